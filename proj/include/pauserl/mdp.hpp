#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pauserl/rng.hpp"

namespace pauserl {

inline constexpr double kPolicyFloor = 1e-12;
inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kStationaryTolerance = 1e-12;

// Dense |S| x |A| table, row-major by state.
class StateActionTable {
 public:
  StateActionTable() = default;
  StateActionTable(std::size_t states, std::size_t actions, double fill = 0.0)
      : states_(states), actions_(actions), values_(states * actions, fill) {}

  std::size_t num_states() const { return states_; }
  std::size_t num_actions() const { return actions_; }

  double& operator()(std::size_t s, std::size_t a) { return values_[s * actions_ + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values_[s * actions_ + a]; }

  std::span<double> row(std::size_t s) { return {values_.data() + s * actions_, actions_}; }
  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * actions_, actions_};
  }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  bool operator==(const StateActionTable&) const = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

class QTable : public StateActionTable {
 public:
  using StateActionTable::StateActionTable;
};

using ValueTable = std::vector<double>;

// sup-norm of the entrywise difference; shapes must match
double max_abs_diff(const StateActionTable& a, const StateActionTable& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// Clamp entries to at least `floor` and rescale the rest so the row sums to 1.
void floor_and_normalize(std::span<double> row, double floor = kPolicyFloor);

class TabularPolicy {
 public:
  // Rows are validated: sum to 1 within tolerance and respect the floor.
  explicit TabularPolicy(StateActionTable probs);

  static TabularPolicy uniform(std::size_t states, std::size_t actions);
  static TabularPolicy deterministic(std::span<const std::size_t> actions,
                                     std::size_t num_actions);
  // Nonnegative weights, normalized per row and floored.
  static TabularPolicy from_weights(StateActionTable weights);

  std::size_t num_states() const { return probs_.num_states(); }
  std::size_t num_actions() const { return probs_.num_actions(); }
  double operator()(std::size_t s, std::size_t a) const { return probs_(s, a); }
  std::span<const double> row(std::size_t s) const { return probs_.row(s); }
  const StateActionTable& probs() const { return probs_; }

  // FNV-1a over the raw bytes; equal fingerprints for bitwise-equal policies.
  std::uint64_t fingerprint() const;

  bool operator==(const TabularPolicy&) const = default;

 private:
  StateActionTable probs_;
};

// Rewards and transitions of one frozen MDP.
struct MdpTables {
  StateActionTable reward;
  std::vector<double> transition;  // P(s'|s,a) at ((s * A) + a) * S + s'

  std::span<const double> next_dist(std::size_t s, std::size_t a) const {
    const std::size_t S = reward.num_states();
    return {transition.data() + (s * reward.num_actions() + a) * S, S};
  }
  std::span<double> next_dist(std::size_t s, std::size_t a) {
    const std::size_t S = reward.num_states();
    return {transition.data() + (s * reward.num_actions() + a) * S, S};
  }

  static MdpTables zeros(std::size_t states, std::size_t actions);
};

struct ChangePoint {
  int time;
  MdpTables tables;
};

// Piecewise-constant sequence of MDPs over the ticks 0..T. Tables of a change
// point hold from its time until the next change point.
class TimeVaryingTabularMDP {
 public:
  TimeVaryingTabularMDP(std::size_t num_states, std::size_t num_actions, int horizon,
                        double discount, int total_time, std::vector<double> initial_dist,
                        std::vector<ChangePoint> timeline);

  // Stationary convenience constructor.
  TimeVaryingTabularMDP(int horizon, double discount, int total_time,
                        std::vector<double> initial_dist, MdpTables tables);

  std::size_t num_states() const { return states_; }
  std::size_t num_actions() const { return actions_; }
  int horizon() const { return horizon_; }
  double discount() const { return discount_; }
  int total_time() const { return total_time_; }
  double r_max() const { return r_max_; }
  const std::vector<double>& initial_dist() const { return initial_dist_; }
  const std::vector<ChangePoint>& timeline() const { return timeline_; }

  // Index into timeline() of the segment active at tick t; range error outside [0, T].
  std::size_t segment_at(int t) const;
  const MdpTables& at(int t) const { return timeline_[segment_at(t)].tables; }
  double reward(int t, std::size_t s, std::size_t a) const { return at(t).reward(s, a); }
  std::span<const double> transition(int t, std::size_t s, std::size_t a) const {
    return at(t).next_dist(s, a);
  }

  // Per change point i >= 1: max |R_i - R_{i-1}| and max ||P_i - P_{i-1}||_1.
  double reward_jump(std::size_t i) const { return reward_jumps_[i]; }
  double transition_jump(std::size_t i) const { return transition_jumps_[i]; }

  // Copy with every reward multiplied by `factor`.
  TimeVaryingTabularMDP scaled_rewards(double factor) const;

 private:
  std::size_t states_;
  std::size_t actions_;
  int horizon_;
  double discount_;
  int total_time_;
  std::vector<double> initial_dist_;
  std::vector<ChangePoint> timeline_;
  double r_max_ = 0.0;
  std::vector<double> reward_jumps_;
  std::vector<double> transition_jumps_;
};

struct Evaluation {
  ValueTable v;
  QTable q;
};

struct Optimum {
  ValueTable v;
  QTable q;
  TabularPolicy policy;
};

// Finite-horizon value of a stationary policy in M_t (step-0 tables).
Evaluation exact_evaluate(const TimeVaryingTabularMDP& mdp, int t, const TabularPolicy& policy);

// Backward induction with max; greedy policy breaks ties toward the lowest action.
Optimum optimal_values(const TimeVaryingTabularMDP& mdp, int t);

// Q*_{t,h} for h = 0..H-1.
std::vector<QTable> optimal_q_by_step(const TimeVaryingTabularMDP& mdp, int t);

// Entropy-regularized optimum: log-sum-exp backups at temperature tau; the
// policy is the softmax of the step-0 soft Q table.
Optimum soft_optimal_values(const TimeVaryingTabularMDP& mdp, int t, double tau);

// Value averaged over the initial distribution.
double initial_value(const TimeVaryingTabularMDP& mdp, const ValueTable& v);

struct BudgetPair {
  double r = 0.0;
  double p = 0.0;
};

struct VariationBudgetReport {
  double b_r;
  double b_p;
  double cumulative_b_r;
  double cumulative_b_p;
  int t1;
  int t2;
};

VariationBudgetReport local_budget(const TimeVaryingTabularMDP& mdp, int t1, int t2);
BudgetPair cumulative_budget(const TimeVaryingTabularMDP& mdp, int t1, int t2);
bool is_stationary(const TimeVaryingTabularMDP& mdp, int t1, int t2);

// Same sums with t1 == t2 allowed (empty interval gives zeros).
BudgetPair local_budget_pair(const TimeVaryingTabularMDP& mdp, int t1, int t2);
BudgetPair cumulative_budget_pair(const TimeVaryingTabularMDP& mdp, int t1, int t2);

struct BudgetGrowthParams {
  double alpha;
  double b_max;
};

inline constexpr double kGrowthAlphaMin = 1.0 + 1e-6;
inline constexpr double kGrowthAlphaMax = 8.0;
inline constexpr std::size_t kGrowthGridSize = 512;
inline constexpr double kGrowthFloor = 1e-12;

std::vector<double> growth_alpha_grid();

// Series of (offset from interval start, local budget value).
BudgetGrowthParams fit_growth_params(std::span<const std::pair<int, double>> series);

struct Transition {
  std::size_t s;
  std::size_t a;
  double r;
  std::size_t s_next;
};

using Trajectory = std::vector<Transition>;

Trajectory rollout(const TimeVaryingTabularMDP& mdp, int t, const TabularPolicy& policy,
                   Rng& rng);

}  // namespace pauserl
