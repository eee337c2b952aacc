#include "pauserl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pauserl/csv.hpp"

namespace pauserl {

namespace {

double horizon_factor(double gamma, int horizon) {
  return (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
}

void check_eta_tau(double eta, double tau) {
  if (!(eta > 0.0) || !(tau > 0.0)) throw std::invalid_argument("eta and tau must be positive");
  if (!(eta * tau < 1.0)) throw std::invalid_argument("eta*tau must be below 1");
}

// (alpha^n - 1)/(alpha - 1) without cancellation for alpha near 1.
double geometric_sum(double alpha, int n) {
  const double d = alpha - 1.0;
  return std::expm1(static_cast<double>(n) * std::log1p(d)) / d;
}

// Index of the smallest value; values within the tie tolerance keep the earlier index.
std::size_t argmin_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double scale = std::max(std::abs(values[best]), std::abs(values[i]));
    if (values[i] < values[best] - kSplitTieTolerance * scale) best = i;
  }
  return best;
}

// Budgets at or below the stationarity tolerance count as no drift, the same
// rule is_stationary applies to measured budgets.
SplitProblem drop_stationary_budgets(SplitProblem p) {
  if (p.b1max <= kStationaryTolerance) p.b1max = 0.0;
  if (p.b2max <= kStationaryTolerance) p.b2max = 0.0;
  return p;
}

}  // namespace

BoundConstants policy_free_constants(double gamma, int horizon, double r_max,
                                     std::size_t num_actions, double eta, double tau) {
  check_eta_tau(eta, tau);
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma not in (0,1)");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_actions < 1) throw std::invalid_argument("need at least one action");
  BoundConstants c;
  c.eta = eta;
  c.tau = tau;
  c.gamma = gamma;
  c.horizon = horizon;
  c.r_max = r_max;
  c.num_actions = num_actions;
  const double hf = horizon_factor(gamma, horizon);
  c.c2 = 2.0 * (gamma + 2.0) / (1.0 - gamma) * (1.0 + gamma / (eta * tau));
  c.c3 = 2.0 * tau * std::log(static_cast<double>(num_actions)) / (1.0 - gamma);
  c.c4 = 2.0 * hf;
  c.c5 = gamma / (1.0 - gamma) * (hf - std::pow(gamma, horizon - 1) * horizon) +
         hf * r_max / (1.0 - gamma);
  return c;
}

double c1_from_tables(const QTable& q_soft, const TabularPolicy& pi_soft, const QTable& q_pi,
                      const TabularPolicy& pi, double gamma, double eta, double tau) {
  const double keep = 1.0 - eta * tau / (1.0 - gamma);
  if (keep < 0.0) throw std::invalid_argument("eta*tau/(1-gamma) must not exceed 1");
  double log_gap = 0.0;
  for (std::size_t s = 0; s < pi.num_states(); ++s) {
    for (std::size_t a = 0; a < pi.num_actions(); ++a) {
      log_gap = std::max(log_gap, std::abs(std::log(pi_soft(s, a)) - std::log(pi(s, a))));
    }
  }
  return (gamma + 2.0) * (max_abs_diff(q_soft, q_pi) + 2.0 * tau * keep * log_gap);
}

BoundConstants constants_from(const TimeVaryingTabularMDP& mdp, int t_m,
                              const TabularPolicy& policy, double eta, double tau) {
  BoundConstants c = policy_free_constants(mdp.discount(), mdp.horizon(), mdp.r_max(),
                                           mdp.num_actions(), eta, tau);
  const Optimum soft = soft_optimal_values(mdp, t_m, tau);
  const Evaluation eval = exact_evaluate(mdp, t_m, policy);
  c.c1 = c1_from_tables(soft.q, soft.policy, eval.q, policy, mdp.discount(), eta, tau);
  return c;
}

double update_regret_bound(const BoundConstants& c, int updates, double delta_f,
                           BudgetPair budget) {
  if (updates < 0) throw std::invalid_argument("negative update count");
  const double et = c.eta_tau();
  const double policy = c.c1 / et * (1.0 - std::pow(1.0 - et, updates));
  return policy + updates * (c.c2 * delta_f + c.c3) + c.c4 * budget.r + c.c5 * budget.p;
}

double hold_regret_bound(const BoundConstants& c, int holds, int updates, double delta_f,
                         BudgetPair budget) {
  if (holds < 0 || updates < 0) throw std::invalid_argument("negative interval length");
  const double et = c.eta_tau();
  return holds * (c.c1 * std::pow(1.0 - et, updates) + c.c2 * delta_f + c.c3) +
         c.c4 * budget.r + c.c5 * budget.p;
}

IntervalBudgets interval_budgets(const TimeVaryingTabularMDP& mdp, const ScheduleEntry& e) {
  const int split = e.t + e.updates;
  return {cumulative_budget_pair(mdp, e.t, split), cumulative_budget_pair(mdp, split, e.end())};
}

RegretBound total_regret_bound(std::span<const BoundConstants> constants,
                               const UpdateSchedule& schedule, std::span<const double> delta_f,
                               std::span<const IntervalBudgets> budgets) {
  const std::size_t M = schedule.entries.size();
  if (delta_f.size() != M || budgets.size() != M ||
      (constants.size() != M && constants.size() != 1)) {
    throw std::invalid_argument("bound inputs do not match the number of intervals");
  }
  RegretBound out{0.0, {}};
  out.intervals.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    const BoundConstants& c = constants.size() == 1 ? constants[0] : constants[m];
    const auto& e = schedule.entries[m];
    const double et = c.eta_tau();
    const double decay = std::pow(1.0 - et, e.updates);
    const double r_pi = c.c1 / et + (e.holds * c.c1 - c.c1 / et) * decay;
    const double r_f = (e.holds + e.updates) * (c.c2 * delta_f[m] + c.c3);
    const auto& b = budgets[m];
    const double r_env = c.c4 * (b.update.r + b.hold.r) + c.c5 * (b.update.p + b.hold.p);
    out.intervals.push_back({r_pi, r_f, r_env});
    out.total += r_pi + r_f + r_env;
  }
  return out;
}

void SplitProblem::validate() const {
  if (delta < 1) throw std::invalid_argument("split: delta must be positive");
  if (!(alpha1 > 1.0) || !(alpha2 > 1.0)) throw std::invalid_argument("split: alpha must exceed 1");
  if (!(b1max >= 0.0) || !(b2max >= 0.0)) throw std::invalid_argument("split: negative budget");
  if (!(c1 >= 0.0) || !(c4_plus_c5 >= 0.0)) throw std::invalid_argument("split: negative constant");
  check_eta_tau(eta, tau);
}

double env_regret_envelope(const SplitProblem& p, int updates, int holds) {
  if (!(p.alpha1 > 1.0) || !(p.alpha2 > 1.0)) {
    throw std::invalid_argument("envelope needs alpha > 1");
  }
  if (updates < 0 || holds < 0) throw std::invalid_argument("negative interval length");
  return p.c4_plus_c5 *
         (geometric_sum(p.alpha1, updates) * p.b1max + geometric_sum(p.alpha2, holds) * p.b2max);
}

double policy_regret_term(const SplitProblem& p, int updates, int holds) {
  const double et = p.eta * p.tau;
  return p.c1 / et + (holds * p.c1 - p.c1 / et) * std::pow(1.0 - et, updates);
}

double split_objective(const SplitProblem& p, int updates, int holds) {
  return policy_regret_term(p, updates, holds) + env_regret_envelope(p, updates, holds);
}

EnvSplit optimal_split_env(const SplitProblem& p) {
  p.validate();
  const SplitProblem eff = drop_stationary_budgets(p);
  std::vector<double> values(static_cast<std::size_t>(p.delta) + 1);
  for (int n = 0; n <= p.delta; ++n) {
    values[static_cast<std::size_t>(n)] = env_regret_envelope(eff, p.delta - n, n);
  }
  const int n_star = static_cast<int>(argmin_lowest(values));
  EnvSplit out{p.delta - n_star, n_star, values[static_cast<std::size_t>(n_star)], std::nullopt, std::nullopt};
  const double k1 = std::log(p.alpha1) / (p.alpha1 - 1.0);
  const double k2 = std::log(p.alpha2) / (p.alpha2 - 1.0);
  if (p.b1max > 0.0 && p.b2max > 0.0) {
    const double numer = std::log(k1 / k2) + p.delta * std::log(p.alpha1) + std::log(p.b1max / p.b2max);
    if (p.alpha1 != p.alpha2) out.closed_form_n = numer / std::log(p.alpha2 / p.alpha1);
    out.first_order_n = numer / std::log(p.alpha1 * p.alpha2);
  }
  return out;
}

double stationarity_expression(const SplitProblem& p, double updates, double holds) {
  const double x = 1.0 - p.eta * p.tau;
  const double k1 = std::log(p.alpha1) / (p.alpha1 - 1.0);
  const double k2 = std::log(p.alpha2) / (p.alpha2 - 1.0);
  return p.c1 * ((holds - 1.0) * std::log(x) - 1.0) * std::pow(x, updates) +
         p.c4_plus_c5 * (k1 * p.b1max * std::pow(p.alpha1, updates) -
                         k2 * p.b2max * std::pow(p.alpha2, holds));
}

double objective_slope(const SplitProblem& p, double updates, double holds) {
  const double et = p.eta * p.tau;
  const double x = 1.0 - et;
  const double k1 = std::log(p.alpha1) / (p.alpha1 - 1.0);
  const double k2 = std::log(p.alpha2) / (p.alpha2 - 1.0);
  return p.c1 * std::pow(x, updates) * ((holds - 1.0 / et) * std::log(x) - 1.0) +
         p.c4_plus_c5 * (k1 * p.b1max * std::pow(p.alpha1, updates) -
                         k2 * p.b2max * std::pow(p.alpha2, holds));
}

TotalSplit optimal_split_total(const SplitProblem& p) {
  p.validate();
  const SplitProblem eff = drop_stationary_budgets(p);
  std::vector<double> values(static_cast<std::size_t>(p.delta) + 1);
  for (int n = 0; n <= p.delta; ++n) {
    values[static_cast<std::size_t>(n)] = split_objective(eff, p.delta - n, n);
  }
  const int n_star = static_cast<int>(argmin_lowest(values));
  const int g_star = p.delta - n_star;
  return {g_star, n_star, values[static_cast<std::size_t>(n_star)],
          std::abs(stationarity_expression(p, g_star, n_star))};
}

SplitPair stationary_optimal_split(int delta) {
  if (delta < 0) throw std::invalid_argument("delta must be nonnegative");
  return {delta, 0};
}

InteriorSplitReport interior_minimizer_exists(const TimeVaryingTabularMDP& mdp, int t_m,
                                              int t_mp1, double c4, double c5) {
  if (t_mp1 - t_m < 2) throw std::invalid_argument("interval needs at least two ticks");
  const int delta = t_mp1 - t_m;
  InteriorSplitReport out{false, 0, 0, std::vector<double>(static_cast<std::size_t>(delta) + 1)};
  for (int g = 0; g <= delta; ++g) {
    const BudgetPair a = cumulative_budget_pair(mdp, t_m, t_m + g);
    const BudgetPair b = cumulative_budget_pair(mdp, t_m + g, t_mp1);
    out.values[static_cast<std::size_t>(g)] = c4 * (a.r + b.r) + c5 * (a.p + b.p);
  }
  // argmin with ties going to the smallest hold length, i.e. the largest G
  std::vector<double> by_hold(out.values.rbegin(), out.values.rend());
  const int n_star = static_cast<int>(argmin_lowest(by_hold));
  out.n_star = n_star;
  out.g_star = delta - n_star;
  const double boundary = std::min(out.values.front(), out.values.back());
  double interior = out.values[1];
  for (int g = 1; g < delta; ++g) interior = std::min(interior, out.values[static_cast<std::size_t>(g)]);
  out.exists = interior < boundary - kSplitTieTolerance * std::max(1.0, std::abs(boundary));
  return out;
}

double dominant_ratio(std::span<const double> r_env, std::span<const double> r_pi) {
  if (r_env.empty() || r_env.size() != r_pi.size()) {
    throw std::invalid_argument("dominant ratio needs equal-length nonempty series");
  }
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < r_env.size(); ++i) {
    const double denom = r_env[i] + r_pi[i];
    if (!(denom > 0.0)) continue;
    acc += r_env[i] / denom;
    ++used;
  }
  return used == 0 ? 0.0 : acc / static_cast<double>(used);
}

SweepPoint sweep_point(const SweepSpec& spec, double value) {
  SplitProblem p = spec.baseline;
  bool env_zero = false;
  const std::string& name = spec.parameter;
  if (name == "alpha_ratio") {
    p.alpha1 = value * p.alpha2;
  } else if (name == "b_ratio") {
    p.b1max = value * p.b2max;
  } else if (name == "learning_rate" || name == "eta") {
    p.eta = value;
  } else if (name == "dominant_ratio") {
    if (!(value >= 0.0 && value < 1.0)) throw std::invalid_argument("dominant ratio not in [0,1)");
    if (value == 0.0) {
      env_zero = true;
    } else {
      const int n_sym = p.delta / 2;
      const int g_sym = p.delta - n_sym;
      SplitProblem unit = p;
      unit.c1 = 1.0;
      const double env = env_regret_envelope(p, g_sym, n_sym);
      const double pol = policy_regret_term(unit, g_sym, n_sym);
      p.c1 = pol > 0.0 ? env * (1.0 - value) / (value * pol) : 0.0;
    }
  } else if (name == "alpha1") {
    p.alpha1 = value;
  } else if (name == "alpha2") {
    p.alpha2 = value;
  } else if (name == "b1max") {
    p.b1max = value;
  } else if (name == "b2max") {
    p.b2max = value;
  } else if (name == "c1") {
    p.c1 = value;
  } else if (name == "c4_plus_c5") {
    p.c4_plus_c5 = value;
  } else if (name == "tau") {
    p.tau = value;
  } else if (name == "delta") {
    p.delta = static_cast<int>(value);
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + name);
  }
  p.validate();
  return {p, env_zero};
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    const SweepPoint pt = sweep_point(spec, value);
    const SplitProblem& p = pt.problem;
    std::vector<double> curve(static_cast<std::size_t>(p.delta) + 1);
    for (int n = 0; n <= p.delta; ++n) {
      const int g = p.delta - n;
      double v = 0.0;
      if (spec.which == SweepObjective::env_only) {
        v = env_regret_envelope(p, g, n);
      } else if (pt.env_weight_zero) {
        v = policy_regret_term(p, g, n);
      } else {
        v = split_objective(p, g, n);
      }
      curve[static_cast<std::size_t>(n)] = v;
    }
    const std::size_t n_star = argmin_lowest(curve);
    for (std::size_t n = 0; n < curve.size(); ++n) {
      rows.push_back({spec.parameter, value, static_cast<int>(n), curve[n], n == n_star});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::uint64_t seed,
                     const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash, {"param_name", "param_value", "N", "bound_value", "is_argmin"});
  for (const auto& r : rows) {
    csv.cell(r.param_name).cell(r.param_value).cell(r.n).cell(r.bound_value).cell(r.is_argmin ? 1 : 0);
    csv.end_row();
  }
}

double optimal_q_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max, int h) {
  if (h < 0 || h >= horizon) throw std::out_of_range("step index outside [0, H)");
  return horizon_factor(gamma, horizon - h) * (budgets.r + r_max / (1.0 - gamma) * budgets.p);
}

double optimal_v_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max) {
  return horizon_factor(gamma, horizon) * (budgets.r + r_max / (1.0 - gamma) * budgets.p);
}

double same_policy_v_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max) {
  const double hf = horizon_factor(gamma, horizon);
  return hf * budgets.r +
         r_max * gamma / (1.0 - gamma) * (hf - std::pow(gamma, horizon - 1) * horizon) * budgets.p;
}

double npg_convergence_bound(int g, double c_prime, double eps_f, double gamma, double eta,
                             double tau, std::size_t num_actions) {
  if (g < 1) throw std::invalid_argument("iteration count must be at least 1");
  const BoundConstants c = policy_free_constants(gamma, 1, 0.0, num_actions, eta, tau);
  return (gamma + 2.0) * std::pow(1.0 - eta * tau, g - 1) * c_prime + c.c2 * eps_f + c.c3;
}

}  // namespace pauserl
