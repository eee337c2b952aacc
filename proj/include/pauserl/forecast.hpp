#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pauserl/mdp.hpp"
#include "pauserl/schedule.hpp"

namespace pauserl {

enum class BasisKind { identity, polynomial, constant };

// identity: [t, 1]; polynomial of degree d: [t^d, ..., t, 1]; constant: [1].
struct Basis {
  BasisKind kind = BasisKind::identity;
  int degree = 1;

  static Basis identity() { return {BasisKind::identity, 1}; }
  static Basis constant() { return {BasisKind::constant, 0}; }
  static Basis polynomial(int degree) { return {BasisKind::polynomial, degree}; }

  std::size_t dim() const;
  std::vector<double> features(double t) const;
};

// Polynomial of degree available - 1 (or constant) when fewer snapshots than
// basis functions exist yet; the basis itself otherwise.
Basis effective_basis(const Basis& basis, std::size_t available);

inline constexpr double kRidgeLambda = 1e-8;

struct QSnapshot {
  int time;
  QTable q;
};

struct ForecastModel {
  Basis basis;
  std::size_t window = 0;  // l_p
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> weights;  // ((s * A) + a) * dim + k
  std::vector<int> fitted_times;
  bool used_ridge = false;

  std::span<const double> weights_for(std::size_t s, std::size_t a) const {
    const std::size_t d = basis.dim();
    return {weights.data() + (s * num_actions + a) * d, d};
  }
};

// Least squares per (s, a) over the last l_p snapshots; ridge with
// kRidgeLambda when the design matrix is rank deficient.
ForecastModel fit_forecaster(std::span<const QSnapshot> history, const Basis& basis,
                             std::size_t window);

QTable forecast_q(const ForecastModel& model, double t_target);

// Weights w such that forecast_q(fit(history), t_target) = sum_i w_i Q_i.
std::vector<double> forecast_weights(std::span<const int> times, const Basis& basis,
                                     double t_target);

QTable linear_combination_forecast(std::span<const QTable> history, std::span<const double> w);

void write_model_csv(std::ostream& out, const ForecastModel& model, std::uint64_t seed,
                     const std::string& config_hash);

// (1 - gamma^H)/(1 - gamma) * (B_r(t, t') + r_max/(1 - gamma) * B_p(t, t'))
double compute_u(const TimeVaryingTabularMDP& mdp, int t, int t_target);

struct ForecastErrorInputs {
  double weight_norm_cap;  // L
  std::size_t window;      // l_p
  std::vector<double> u;
  std::vector<double> eps;
  double gamma;
  int horizon;
  double r_max;
  double u_max = 0.0;
};

// L * sqrt(sum_t 2 max(u_t, eps_t)^2) + l_p (L + 1) (1 - gamma^H)/(1 - gamma) r_max
double forecast_error_bound(const ForecastErrorInputs& in);

// L u_max sqrt(2 l_p) + l_p (L + 1) (1 - gamma^H)/(1 - gamma) r_max
double max_forecast_error_bound(double weight_norm_cap, std::size_t window, double u_max,
                                double gamma, int horizon, double r_max);

// (SA)^3.3 / ((1 - gamma)^5.2 eps^2.6)
double sample_complexity_threshold(std::size_t states, std::size_t actions, double gamma,
                                   double eps);

// For interval m (1-based): t_m - j + 1 >= threshold(u_values[j-1]) for j = 1..l_p,
// where u_values[j-1] is u at tick t_m - j + 1.
bool schedule_satisfies_complexity(const UpdateSchedule& schedule, std::size_t m,
                                   std::span<const double> u_values, std::size_t states,
                                   std::size_t actions, double gamma);

}  // namespace pauserl
