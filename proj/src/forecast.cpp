#include "pauserl/forecast.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "pauserl/csv.hpp"

namespace pauserl {

std::size_t Basis::dim() const {
  switch (kind) {
    case BasisKind::identity: return 2;
    case BasisKind::constant: return 1;
    case BasisKind::polynomial:
      if (degree < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
      return static_cast<std::size_t>(degree) + 1;
  }
  return 0;
}

std::vector<double> Basis::features(double t) const {
  const std::size_t d = dim();
  std::vector<double> phi(d);
  // descending powers so that identity == polynomial(1)
  double p = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    phi[d - 1 - k] = p;
    p *= t;
  }
  return phi;
}

namespace {

Eigen::MatrixXd design(std::span<const int> times, const Basis& basis) {
  const std::size_t d = basis.dim();
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto f = basis.features(static_cast<double>(times[i]));
    for (std::size_t k = 0; k < d; ++k) {
      phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = f[k];
    }
  }
  return phi;
}

// Least-squares coefficients for every column of y; ridge when phi is rank deficient.
Eigen::MatrixXd solve_least_squares(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y,
                                    bool* used_ridge) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
  if (qr.rank() == phi.cols()) {
    if (used_ridge) *used_ridge = false;
    return qr.solve(y);
  }
  if (used_ridge) *used_ridge = true;
  Eigen::MatrixXd normal = phi.transpose() * phi;
  normal.diagonal().array() += kRidgeLambda;
  return normal.ldlt().solve(phi.transpose() * y);
}

}  // namespace

ForecastModel fit_forecaster(std::span<const QSnapshot> history, const Basis& basis,
                             std::size_t window) {
  if (window == 0) throw std::invalid_argument("forecast window must be positive");
  if (history.size() < window) {
    throw std::invalid_argument("history has " + std::to_string(history.size()) +
                                " snapshots, window needs " + std::to_string(window));
  }
  const auto recent = history.subspan(history.size() - window);
  const std::size_t S = recent.front().q.num_states();
  const std::size_t A = recent.front().q.num_actions();
  std::vector<int> times;
  times.reserve(window);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(window), static_cast<Eigen::Index>(S * A));
  for (std::size_t i = 0; i < window; ++i) {
    const auto& snap = recent[i];
    if (snap.q.num_states() != S || snap.q.num_actions() != A) {
      throw std::invalid_argument("snapshot shapes differ");
    }
    times.push_back(snap.time);
    const auto data = snap.q.data();
    for (std::size_t j = 0; j < S * A; ++j) {
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[j];
    }
  }
  ForecastModel model;
  model.basis = basis;
  model.window = window;
  model.num_states = S;
  model.num_actions = A;
  model.fitted_times = times;
  const Eigen::MatrixXd w = solve_least_squares(design(times, basis), y, &model.used_ridge);
  const std::size_t d = basis.dim();
  model.weights.resize(S * A * d);
  for (std::size_t j = 0; j < S * A; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double v = w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
      if (!std::isfinite(v)) throw std::runtime_error("forecast fit produced a non-finite weight");
      model.weights[j * d + k] = v;
    }
  }
  return model;
}

QTable forecast_q(const ForecastModel& model, double t_target) {
  const auto phi = model.basis.features(t_target);
  QTable out(model.num_states, model.num_actions);
  for (std::size_t s = 0; s < model.num_states; ++s) {
    for (std::size_t a = 0; a < model.num_actions; ++a) {
      const auto w = model.weights_for(s, a);
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += phi[k] * w[k];
      out(s, a) = acc;
    }
  }
  return out;
}

std::vector<double> forecast_weights(std::span<const int> times, const Basis& basis,
                                     double t_target) {
  if (times.empty()) throw std::invalid_argument("no times to weight");
  const auto n = static_cast<Eigen::Index>(times.size());
  const Eigen::MatrixXd coef =
      solve_least_squares(design(times, basis), Eigen::MatrixXd::Identity(n, n), nullptr);
  const auto phi = basis.features(t_target);
  std::vector<double> w(times.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) acc += phi[k] * coef(static_cast<Eigen::Index>(k), i);
    w[static_cast<std::size_t>(i)] = acc;
  }
  return w;
}

QTable linear_combination_forecast(std::span<const QTable> history, std::span<const double> w) {
  if (history.size() != w.size()) throw std::invalid_argument("history and weight lengths differ");
  if (history.empty()) throw std::invalid_argument("empty history");
  QTable out(history.front().num_states(), history.front().num_actions());
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].num_states() != out.num_states() ||
        history[i].num_actions() != out.num_actions()) {
      throw std::invalid_argument("history tables differ in shape");
    }
    const auto src = history[i].data();
    auto dst = out.data();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w[i] * src[j];
  }
  return out;
}

void write_model_csv(std::ostream& out, const ForecastModel& model, std::uint64_t seed,
                     const std::string& config_hash) {
  std::vector<std::string> header{"s", "a"};
  for (std::size_t k = 0; k < model.basis.dim(); ++k) header.push_back("w_" + std::to_string(k));
  CsvWriter csv(out, seed, config_hash, header);
  for (std::size_t s = 0; s < model.num_states; ++s) {
    for (std::size_t a = 0; a < model.num_actions; ++a) {
      csv.cell(s).cell(a);
      for (double w : model.weights_for(s, a)) csv.cell(w);
      csv.end_row();
    }
  }
}

namespace {

double horizon_factor(double gamma, int horizon) {
  return (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
}

}  // namespace

double compute_u(const TimeVaryingTabularMDP& mdp, int t, int t_target) {
  if (t > t_target) throw std::invalid_argument("compute_u needs t <= t_target");
  const BudgetPair b = local_budget_pair(mdp, t, t_target);
  const double g = mdp.discount();
  return horizon_factor(g, mdp.horizon()) * (b.r + mdp.r_max() / (1.0 - g) * b.p);
}

double forecast_error_bound(const ForecastErrorInputs& in) {
  if (!(in.weight_norm_cap >= 0.0) || !(in.gamma > 0.0 && in.gamma < 1.0) || in.r_max < 0.0) {
    throw std::invalid_argument("forecast bound: invalid inputs");
  }
  if (in.u.size() != in.eps.size()) throw std::invalid_argument("u and eps lengths differ");
  double sq = 0.0;
  for (std::size_t i = 0; i < in.u.size(); ++i) {
    if (in.u[i] < 0.0 || in.eps[i] < 0.0) throw std::invalid_argument("negative u or eps");
    const double m = std::max(in.u[i], in.eps[i]);
    sq += 2.0 * m * m;
  }
  const double L = in.weight_norm_cap;
  return L * std::sqrt(sq) + static_cast<double>(in.window) * (L + 1.0) *
                                 horizon_factor(in.gamma, in.horizon) * in.r_max;
}

double max_forecast_error_bound(double weight_norm_cap, std::size_t window, double u_max,
                                double gamma, int horizon, double r_max) {
  if (weight_norm_cap < 0.0 || u_max < 0.0 || r_max < 0.0 || !(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("forecast bound: invalid inputs");
  }
  const double lp = static_cast<double>(window);
  return weight_norm_cap * u_max * std::sqrt(2.0 * lp) +
         lp * (weight_norm_cap + 1.0) * horizon_factor(gamma, horizon) * r_max;
}

double sample_complexity_threshold(std::size_t states, std::size_t actions, double gamma,
                                   double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sample complexity needs eps > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma not in (0,1)");
  const double sa = static_cast<double>(states * actions);
  return std::exp(3.3 * std::log(sa) - 5.2 * std::log(1.0 - gamma) - 2.6 * std::log(eps));
}

bool schedule_satisfies_complexity(const UpdateSchedule& schedule, std::size_t m,
                                   std::span<const double> u_values, std::size_t states,
                                   std::size_t actions, double gamma) {
  if (m < 1 || m > schedule.entries.size()) throw std::out_of_range("interval index out of range");
  const double t_m = schedule.entries[m - 1].t;
  for (std::size_t j = 1; j <= u_values.size(); ++j) {
    const double u = u_values[j - 1];
    if (!(u > 0.0)) return false;
    const double available = t_m - static_cast<double>(j) + 1.0;
    if (!(available >= sample_complexity_threshold(states, actions, gamma, u))) return false;
  }
  return true;
}

Basis effective_basis(const Basis& basis, std::size_t available) {
  if (available >= basis.dim()) return basis;
  if (available >= 2) return Basis::polynomial(static_cast<int>(available) - 1);
  return Basis::constant();
}

}  // namespace pauserl
