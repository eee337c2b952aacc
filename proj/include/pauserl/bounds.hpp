#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pauserl/mdp.hpp"
#include "pauserl/schedule.hpp"

namespace pauserl {

struct BoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  int horizon = 0;
  double r_max = 0.0;
  std::size_t num_actions = 0;

  double eta_tau() const { return eta * tau; }
};

// C2..C5 only; c1 left at zero.
BoundConstants policy_free_constants(double gamma, int horizon, double r_max,
                                     std::size_t num_actions, double eta, double tau);

// C1 = (gamma + 2)(||Q*_tau - Q^pi||_inf + 2 tau (1 - eta tau/(1-gamma)) ||log pi*_tau - log pi||_inf)
double c1_from_tables(const QTable& q_soft, const TabularPolicy& pi_soft, const QTable& q_pi,
                      const TabularPolicy& pi, double gamma, double eta, double tau);

BoundConstants constants_from(const TimeVaryingTabularMDP& mdp, int t_m,
                              const TabularPolicy& policy, double eta, double tau);

double update_regret_bound(const BoundConstants& c, int updates, double delta_f,
                           BudgetPair budget);
double hold_regret_bound(const BoundConstants& c, int holds, int updates, double delta_f,
                         BudgetPair budget);

struct IntervalBudgets {
  BudgetPair update;  // cumulative budget over [t_m, t_m + G_m)
  BudgetPair hold;    // cumulative budget over [t_m + G_m, t_{m+1})
};

IntervalBudgets interval_budgets(const TimeVaryingTabularMDP& mdp, const ScheduleEntry& e);

struct IntervalBound {
  double r_pi;
  double r_f;
  double r_env;

  double total() const { return r_pi + r_f + r_env; }
};

struct RegretBound {
  double total;
  std::vector<IntervalBound> intervals;
};

// constants holds one entry per interval, or a single entry shared by all.
RegretBound total_regret_bound(std::span<const BoundConstants> constants,
                               const UpdateSchedule& schedule, std::span<const double> delta_f,
                               std::span<const IntervalBudgets> budgets);

struct SplitProblem {
  int delta;
  double alpha1;
  double alpha2;
  double b1max;
  double b2max;
  double c1;
  double c4_plus_c5;
  double eta;
  double tau;

  void validate() const;
};

// (C4 + C5) ((alpha1^G - 1)/(alpha1 - 1) B1 + (alpha2^N - 1)/(alpha2 - 1) B2)
double env_regret_envelope(const SplitProblem& p, int updates, int holds);

// C1/(eta tau) + (N C1 - C1/(eta tau)) (1 - eta tau)^G
double policy_regret_term(const SplitProblem& p, int updates, int holds);

double split_objective(const SplitProblem& p, int updates, int holds);

// Relative gap under which two objective values count as tied (lowest N wins).
inline constexpr double kSplitTieTolerance = 1e-12;

struct EnvSplit {
  int g_star;
  int n_star;
  double objective;
  std::optional<double> closed_form_n;  // printed closed form; undefined when alpha1 == alpha2
  std::optional<double> first_order_n;  // root of the envelope's first-order condition
};

// Exhaustive search over N in [0, delta]. In both solvers a budget at or below
// kStationaryTolerance is treated as zero.
EnvSplit optimal_split_env(const SplitProblem& p);

struct TotalSplit {
  int g_star;
  int n_star;
  double objective;
  double residual;
};

TotalSplit optimal_split_total(const SplitProblem& p);

// C1((N - 1) ln(1 - eta tau) - 1)(1 - eta tau)^G
//   + (C4 + C5)(ln a1/(a1 - 1) B1 a1^G - ln a2/(a2 - 1) B2 a2^N)
double stationarity_expression(const SplitProblem& p, double updates, double holds);

// d/dG of split_objective along G + N = delta.
double objective_slope(const SplitProblem& p, double updates, double holds);

struct SplitPair {
  int g_star;
  int n_star;
};

SplitPair stationary_optimal_split(int delta);

struct InteriorSplitReport {
  bool exists;
  int g_star;
  int n_star;
  std::vector<double> values;  // indexed by G = 0..delta
};

InteriorSplitReport interior_minimizer_exists(const TimeVaryingTabularMDP& mdp, int t_m,
                                              int t_mp1, double c4, double c5);

double dominant_ratio(std::span<const double> r_env, std::span<const double> r_pi);

enum class SweepObjective { env_only, env_plus_pi };

struct SweepSpec {
  SweepObjective which;
  std::string parameter;
  std::vector<double> values;
  SplitProblem baseline;
};

struct SweepRow {
  std::string param_name;
  double param_value;
  int n;
  double bound_value;
  bool is_argmin;
};

// Problem evaluated at one sweep point. Recognized names: alpha_ratio,
// b_ratio, learning_rate, dominant_ratio, and the raw SplitProblem fields.
struct SweepPoint {
  SplitProblem problem;
  bool env_weight_zero;  // dominant_ratio = 0: only the policy term remains
};

SweepPoint sweep_point(const SweepSpec& spec, double value);
std::vector<SweepRow> sweep(const SweepSpec& spec);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::uint64_t seed,
                     const std::string& config_hash);

double optimal_q_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max, int h);
double optimal_v_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max);
// r_max scales the transition term; the default reproduces the unit-reward form.
double same_policy_v_gap_bound(BudgetPair budgets, double gamma, int horizon, double r_max = 1.0);
double npg_convergence_bound(int g, double c_prime, double eps_f, double gamma, double eta,
                             double tau, std::size_t num_actions);

}  // namespace pauserl
