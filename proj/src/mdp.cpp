#include "pauserl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace pauserl {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument(std::string(what) + ": negative or non-finite probability");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                std::to_string(sum));
  }
}

void check_time(const TimeVaryingTabularMDP& mdp, int t) {
  if (t < 0 || t > mdp.total_time()) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " +
                            std::to_string(mdp.total_time()) + "]");
  }
}

// One backup: Q(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) V(s').
void backup(const MdpTables& m, double gamma, const ValueTable& v_next, QTable& q) {
  const std::size_t S = q.num_states();
  const std::size_t A = q.num_actions();
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto p = m.next_dist(s, a);
      double cont = 0.0;
      for (std::size_t sn = 0; sn < S; ++sn) cont += p[sn] * v_next[sn];
      q(s, a) = m.reward(s, a) + gamma * cont;
    }
  }
}

std::size_t argmax_lowest(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

double log_sum_exp(std::span<const double> x, double tau) {
  const double m = *std::max_element(x.begin(), x.end());
  double acc = 0.0;
  for (double v : x) acc += std::exp((v - m) / tau);
  return m + tau * std::log(acc);
}

}  // namespace

double max_abs_diff(const StateActionTable& a, const StateActionTable& b) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) {
    throw std::invalid_argument("table shape mismatch");
  }
  return max_abs_diff(a.data(), b.data());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void floor_and_normalize(std::span<double> row, double floor) {
  const std::size_t n = row.size();
  if (n == 0) throw std::invalid_argument("empty policy row");
  if (floor * static_cast<double>(n) >= 1.0) throw std::invalid_argument("floor too large");
  double sum = 0.0;
  for (double& x : row) {
    if (std::isnan(x)) throw std::invalid_argument("NaN policy weight");
    x = std::max(x, 0.0);
    sum += x;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
    return;
  }
  for (double& x : row) x /= sum;

  // Pin entries at the floor and rescale the rest until nothing new drops below.
  std::vector<bool> pinned(n, false);
  for (std::size_t iter = 0; iter <= n; ++iter) {
    double free_sum = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        ++k;
      } else {
        free_sum += row[i];
      }
    }
    if (k == n || !(free_sum > 0.0)) {
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
      return;
    }
    const double scale = (1.0 - static_cast<double>(k) * floor) / free_sum;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        row[i] = floor;
        continue;
      }
      row[i] *= scale;
      if (row[i] < floor) {
        pinned[i] = true;
        row[i] = floor;
        changed = true;
      }
    }
    if (!changed) return;
  }
}

TabularPolicy::TabularPolicy(StateActionTable probs) : probs_(std::move(probs)) {
  if (probs_.num_states() == 0 || probs_.num_actions() == 0) {
    throw std::invalid_argument("policy needs at least one state and one action");
  }
  for (std::size_t s = 0; s < probs_.num_states(); ++s) {
    double sum = 0.0;
    for (double x : probs_.row(s)) {
      if (!std::isfinite(x) || x < kPolicyFloor * (1.0 - 1e-9)) {
        throw std::invalid_argument("policy entry below floor in state " + std::to_string(s));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw std::invalid_argument("policy row " + std::to_string(s) + " sums to " +
                                  std::to_string(sum));
    }
  }
}

TabularPolicy TabularPolicy::uniform(std::size_t states, std::size_t actions) {
  return TabularPolicy(StateActionTable(states, actions, 1.0 / static_cast<double>(actions)));
}

TabularPolicy TabularPolicy::deterministic(std::span<const std::size_t> actions,
                                           std::size_t num_actions) {
  StateActionTable w(actions.size(), num_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= num_actions) throw std::invalid_argument("action index out of range");
    w(s, actions[s]) = 1.0;
  }
  return from_weights(std::move(w));
}

TabularPolicy TabularPolicy::from_weights(StateActionTable weights) {
  for (std::size_t s = 0; s < weights.num_states(); ++s) floor_and_normalize(weights.row(s));
  return TabularPolicy(std::move(weights));
}

std::uint64_t TabularPolicy::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : probs_.data()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

MdpTables MdpTables::zeros(std::size_t states, std::size_t actions) {
  return MdpTables{StateActionTable(states, actions, 0.0),
                   std::vector<double>(states * actions * states, 0.0)};
}

TimeVaryingTabularMDP::TimeVaryingTabularMDP(std::size_t num_states, std::size_t num_actions,
                                             int horizon, double discount, int total_time,
                                             std::vector<double> initial_dist,
                                             std::vector<ChangePoint> timeline)
    : states_(num_states),
      actions_(num_actions),
      horizon_(horizon),
      discount_(discount),
      total_time_(total_time),
      initial_dist_(std::move(initial_dist)),
      timeline_(std::move(timeline)) {
  if (states_ == 0 || actions_ == 0) throw std::invalid_argument("empty state or action set");
  if (horizon_ < 1) throw std::invalid_argument("horizon must be positive");
  if (!(discount_ > 0.0 && discount_ < 1.0)) throw std::invalid_argument("discount not in (0,1)");
  if (total_time_ < 1) throw std::invalid_argument("total time must be positive");
  if (initial_dist_.size() != states_) throw std::invalid_argument("initial distribution size");
  check_distribution(initial_dist_, "initial distribution");
  if (timeline_.empty() || timeline_.front().time != 0) {
    throw std::invalid_argument("timeline must start at time 0");
  }
  for (std::size_t i = 0; i < timeline_.size(); ++i) {
    const auto& cp = timeline_[i];
    if (i > 0 && cp.time <= timeline_[i - 1].time) {
      throw std::invalid_argument("change points must be strictly increasing");
    }
    if (cp.time > total_time_) throw std::invalid_argument("change point beyond total time");
    if (cp.tables.reward.num_states() != states_ || cp.tables.reward.num_actions() != actions_ ||
        cp.tables.transition.size() != states_ * actions_ * states_) {
      throw std::invalid_argument("table shape mismatch at change point " + std::to_string(i));
    }
    for (double r : cp.tables.reward.data()) {
      if (!std::isfinite(r)) throw std::invalid_argument("non-finite reward");
      r_max_ = std::max(r_max_, std::abs(r));
    }
    for (std::size_t s = 0; s < states_; ++s) {
      for (std::size_t a = 0; a < actions_; ++a) check_distribution(cp.tables.next_dist(s, a), "transition row");
    }
  }
  reward_jumps_.assign(timeline_.size(), 0.0);
  transition_jumps_.assign(timeline_.size(), 0.0);
  for (std::size_t i = 1; i < timeline_.size(); ++i) {
    const auto& prev = timeline_[i - 1].tables;
    const auto& cur = timeline_[i].tables;
    reward_jumps_[i] = max_abs_diff(prev.reward, cur.reward);
    double worst = 0.0;
    for (std::size_t s = 0; s < states_; ++s) {
      for (std::size_t a = 0; a < actions_; ++a) {
        const auto p0 = prev.next_dist(s, a);
        const auto p1 = cur.next_dist(s, a);
        double l1 = 0.0;
        for (std::size_t sn = 0; sn < states_; ++sn) l1 += std::abs(p1[sn] - p0[sn]);
        worst = std::max(worst, l1);
      }
    }
    transition_jumps_[i] = worst;
  }
}

TimeVaryingTabularMDP::TimeVaryingTabularMDP(int horizon, double discount, int total_time,
                                             std::vector<double> initial_dist, MdpTables tables)
    : TimeVaryingTabularMDP(tables.reward.num_states(), tables.reward.num_actions(), horizon,
                            discount, total_time, std::move(initial_dist),
                            std::vector<ChangePoint>{ChangePoint{0, std::move(tables)}}) {}

std::size_t TimeVaryingTabularMDP::segment_at(int t) const {
  check_time(*this, t);
  auto it = std::upper_bound(timeline_.begin(), timeline_.end(), t,
                             [](int value, const ChangePoint& cp) { return value < cp.time; });
  return static_cast<std::size_t>(std::distance(timeline_.begin(), it)) - 1;
}

TimeVaryingTabularMDP TimeVaryingTabularMDP::scaled_rewards(double factor) const {
  auto copy = timeline_;
  for (auto& cp : copy) {
    for (double& r : cp.tables.reward.data()) r *= factor;
  }
  return TimeVaryingTabularMDP(states_, actions_, horizon_, discount_, total_time_, initial_dist_,
                               std::move(copy));
}

Evaluation exact_evaluate(const TimeVaryingTabularMDP& mdp, int t, const TabularPolicy& policy) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  if (policy.num_states() != S || policy.num_actions() != A) {
    throw std::invalid_argument("policy shape does not match the MDP");
  }
  const MdpTables& m = mdp.at(t);
  ValueTable v(S, 0.0);
  QTable q(S, A);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    backup(m, mdp.discount(), v, q);
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t a = 0; a < A; ++a) acc += policy(s, a) * q(s, a);
      v[s] = acc;
    }
  }
  return {std::move(v), std::move(q)};
}

std::vector<QTable> optimal_q_by_step(const TimeVaryingTabularMDP& mdp, int t) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const MdpTables& m = mdp.at(t);
  std::vector<QTable> steps(static_cast<std::size_t>(mdp.horizon()), QTable(S, A));
  ValueTable v(S, 0.0);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    QTable& q = steps[static_cast<std::size_t>(h)];
    backup(m, mdp.discount(), v, q);
    for (std::size_t s = 0; s < S; ++s) {
      const auto row = q.row(s);
      v[s] = *std::max_element(row.begin(), row.end());
    }
  }
  return steps;
}

Optimum optimal_values(const TimeVaryingTabularMDP& mdp, int t) {
  auto steps = optimal_q_by_step(mdp, t);
  QTable q = std::move(steps.front());
  const std::size_t S = mdp.num_states();
  ValueTable v(S);
  std::vector<std::size_t> greedy(S);
  for (std::size_t s = 0; s < S; ++s) {
    greedy[s] = argmax_lowest(q.row(s));
    v[s] = q(s, greedy[s]);
  }
  return {std::move(v), std::move(q), TabularPolicy::deterministic(greedy, mdp.num_actions())};
}

Optimum soft_optimal_values(const TimeVaryingTabularMDP& mdp, int t, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const MdpTables& m = mdp.at(t);
  ValueTable v(S, 0.0);
  QTable q(S, A);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    backup(m, mdp.discount(), v, q);
    for (std::size_t s = 0; s < S; ++s) v[s] = log_sum_exp(q.row(s), tau);
  }
  StateActionTable weights(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) weights(s, a) = std::exp((q(s, a) - v[s]) / tau);
  }
  return {std::move(v), std::move(q), TabularPolicy::from_weights(std::move(weights))};
}

double initial_value(const TimeVaryingTabularMDP& mdp, const ValueTable& v) {
  const auto& mu = mdp.initial_dist();
  if (v.size() != mu.size()) throw std::invalid_argument("value table size mismatch");
  double acc = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) acc += mu[s] * v[s];
  return acc;
}

BudgetPair local_budget_pair(const TimeVaryingTabularMDP& mdp, int t1, int t2) {
  check_time(mdp, t1);
  check_time(mdp, t2);
  if (t1 > t2) throw std::invalid_argument("budget interval reversed");
  BudgetPair out;
  const auto& tl = mdp.timeline();
  for (std::size_t i = 1; i < tl.size(); ++i) {
    if (tl[i].time > t1 && tl[i].time <= t2) {
      out.r += mdp.reward_jump(i);
      out.p += mdp.transition_jump(i);
    }
  }
  return out;
}

BudgetPair cumulative_budget_pair(const TimeVaryingTabularMDP& mdp, int t1, int t2) {
  check_time(mdp, t1);
  check_time(mdp, t2);
  if (t1 > t2) throw std::invalid_argument("budget interval reversed");
  // A jump at change time c enters B(t1, t) for every t >= c, i.e. t2 - c terms.
  BudgetPair out;
  const auto& tl = mdp.timeline();
  for (std::size_t i = 1; i < tl.size(); ++i) {
    const int c = tl[i].time;
    if (c > t1 && c <= t2 - 1) {
      const double count = static_cast<double>(t2 - c);
      out.r += count * mdp.reward_jump(i);
      out.p += count * mdp.transition_jump(i);
    }
  }
  return out;
}

VariationBudgetReport local_budget(const TimeVaryingTabularMDP& mdp, int t1, int t2) {
  if (t1 >= t2) throw std::invalid_argument("local_budget needs t1 < t2");
  const BudgetPair local = local_budget_pair(mdp, t1, t2);
  const BudgetPair cum = cumulative_budget_pair(mdp, t1, t2);
  return {local.r, local.p, cum.r, cum.p, t1, t2};
}

BudgetPair cumulative_budget(const TimeVaryingTabularMDP& mdp, int t1, int t2) {
  if (t1 >= t2) throw std::invalid_argument("cumulative_budget needs t1 < t2");
  return cumulative_budget_pair(mdp, t1, t2);
}

bool is_stationary(const TimeVaryingTabularMDP& mdp, int t1, int t2) {
  if (t1 >= t2) throw std::invalid_argument("is_stationary needs t1 < t2");
  const BudgetPair b = local_budget_pair(mdp, t1, t2);
  return b.r <= kStationaryTolerance && b.p <= kStationaryTolerance;
}

std::vector<double> growth_alpha_grid() {
  std::vector<double> grid(kGrowthGridSize);
  const double lo = std::log(kGrowthAlphaMin);
  const double hi = std::log(kGrowthAlphaMax);
  for (std::size_t i = 0; i < kGrowthGridSize; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(kGrowthGridSize - 1));
  }
  grid.front() = kGrowthAlphaMin;
  grid.back() = kGrowthAlphaMax;
  return grid;
}

BudgetGrowthParams fit_growth_params(std::span<const std::pair<int, double>> series) {
  // Anchor: earliest point with a positive value. The fit picks the smallest
  // grid alpha whose envelope passes through the anchor while covering the rest.
  if (series.empty()) throw std::invalid_argument("budget series is empty");
  const std::pair<int, double>* anchor = nullptr;
  for (const auto& pt : series) {
    if (pt.first < 0 || !std::isfinite(pt.second) || pt.second < 0.0) {
      throw std::invalid_argument("budget series needs nonnegative offsets and values");
    }
    if (pt.second > 0.0 && (anchor == nullptr || pt.first < anchor->first)) anchor = &pt;
  }
  if (anchor == nullptr) return {kGrowthAlphaMin, kGrowthFloor};

  const auto grid = growth_alpha_grid();
  auto b_max_for = [&](double alpha) {
    double b = 0.0;
    for (const auto& [off, val] : series) {
      if (val > 0.0) b = std::max(b, val / std::pow(alpha, off));
    }
    return b;
  };
  for (double alpha : grid) {
    const double b = b_max_for(alpha);
    const double through_anchor = anchor->second / std::pow(alpha, anchor->first);
    if (b <= through_anchor * (1.0 + 1e-12)) return {alpha, std::max(b, kGrowthFloor)};
  }
  return {kGrowthAlphaMax, std::max(b_max_for(kGrowthAlphaMax), kGrowthFloor)};
}

Trajectory rollout(const TimeVaryingTabularMDP& mdp, int t, const TabularPolicy& policy,
                   Rng& rng) {
  const MdpTables& m = mdp.at(t);
  Trajectory out;
  out.reserve(static_cast<std::size_t>(mdp.horizon()));
  std::size_t s = rng.categorical(mdp.initial_dist());
  for (int h = 0; h < mdp.horizon(); ++h) {
    const std::size_t a = rng.categorical(policy.row(s));
    const std::size_t sn = rng.categorical(m.next_dist(s, a));
    out.push_back({s, a, m.reward(s, a), sn});
    s = sn;
  }
  return out;
}

}  // namespace pauserl
