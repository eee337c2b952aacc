#include "pauserl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pauserl {

void CliffworldSpec::validate() const {
  if (!std::isfinite(success_reward) || !std::isfinite(failure_reward) ||
      !std::isfinite(step_reward)) {
    throw std::invalid_argument("cliffworld rewards must be finite");
  }
  if (switch_step < 0) throw std::invalid_argument("switch_step must be nonnegative");
  if (total_steps < 1) throw std::invalid_argument("total_steps must be positive");
  if (max_episode_steps < 1) throw std::invalid_argument("max_episode_steps must be positive");
  if (first_goal != 0 && first_goal != 1) throw std::invalid_argument("first_goal must be 0 or 1");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount not in (0,1)");
}

namespace cliff {

bool is_restart(std::size_t s) {
  const int x = static_cast<int>(s) % CliffworldSpec::kWidth;
  const int y = static_cast<int>(s) / CliffworldSpec::kWidth;
  return (y == 0 || y == 2) && x >= 1 && x <= 10;
}

std::size_t active_goal(const CliffworldSpec& spec, int step) {
  const int idx = step < spec.switch_step ? spec.first_goal : 1 - spec.first_goal;
  return kGoals[static_cast<std::size_t>(idx)];
}

StepResult step(const CliffworldSpec& spec, std::size_t goal, std::size_t s, std::size_t a) {
  if (s == goal) return {s, 0.0, true};
  int x = static_cast<int>(s) % CliffworldSpec::kWidth;
  int y = static_cast<int>(s) / CliffworldSpec::kWidth;
  int nx = x;
  int ny = y;
  switch (a) {
    case kUp: ny -= 1; break;
    case kLeft: nx -= 1; break;
    case kRight: nx += 1; break;
    case kDown: ny += 1; break;
    default: throw std::invalid_argument("cliffworld action out of range");
  }
  if (nx < 0 || nx >= CliffworldSpec::kWidth || ny < 0 || ny >= CliffworldSpec::kHeight) {
    nx = x;
    ny = y;
  }
  const std::size_t n = cell(nx, ny);
  if (is_restart(n)) return {kStart, spec.failure_reward, false};
  if (n == goal) return {n, spec.success_reward, true};
  return {n, spec.step_reward, false};
}

}  // namespace cliff

namespace {

MdpTables cliff_tables(const CliffworldSpec& spec, std::size_t goal) {
  constexpr std::size_t S = CliffworldSpec::kWidth * CliffworldSpec::kHeight;
  MdpTables m = MdpTables::zeros(S, cliff::kNumActions);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < cliff::kNumActions; ++a) {
      const auto r = cliff::step(spec, goal, s, a);
      m.reward(s, a) = r.reward;
      m.next_dist(s, a)[r.next] = 1.0;
    }
  }
  return m;
}

}  // namespace

TimeVaryingTabularMDP make_cliffworld(const CliffworldSpec& spec) {
  spec.validate();
  constexpr std::size_t S = CliffworldSpec::kWidth * CliffworldSpec::kHeight;
  std::vector<ChangePoint> timeline;
  timeline.push_back({0, cliff_tables(spec, cliff::active_goal(spec, 0))});
  if (spec.switch_step > 0 && spec.switch_step <= spec.total_steps) {
    timeline.push_back({spec.switch_step, cliff_tables(spec, cliff::active_goal(spec, spec.switch_step))});
  }
  std::vector<double> init(S, 0.0);
  init[cliff::kStart] = 1.0;
  return TimeVaryingTabularMDP(S, cliff::kNumActions, spec.max_episode_steps, spec.discount,
                               spec.total_steps, std::move(init), std::move(timeline));
}

TimeVaryingTabularMDP make_switch_bandit(const SwitchBanditSpec& spec) {
  if (spec.total_time < 2) throw std::invalid_argument("bandit needs total_time >= 2");
  if (spec.switch_time <= 0 || spec.switch_time >= spec.total_time) {
    throw std::invalid_argument("switch_time must lie strictly inside (0, T)");
  }
  MdpTables before = MdpTables::zeros(1, 2);
  before.reward(0, 0) = 0.0;
  before.reward(0, 1) = 1.0;
  before.transition = {1.0, 1.0};
  MdpTables after = before;
  after.reward(0, 0) = 1.0;
  after.reward(0, 1) = 0.0;
  std::vector<ChangePoint> timeline{{0, std::move(before)}, {spec.switch_time, std::move(after)}};
  return TimeVaryingTabularMDP(1, 2, 1, spec.discount, spec.total_time, {1.0},
                               std::move(timeline));
}

namespace {

void random_distribution(std::span<double> row, Rng& rng) {
  double sum = 0.0;
  for (double& x : row) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (double& x : row) x /= sum;
}

}  // namespace

TimeVaryingTabularMDP make_drift_mdp(const DriftMdpSpec& spec, Rng& rng) {
  if (spec.num_states == 0 || spec.num_actions == 0) {
    throw std::invalid_argument("drift MDP needs states and actions");
  }
  if (!(spec.r_max >= 0.0) || !std::isfinite(spec.r_max)) {
    throw std::invalid_argument("r_max must be finite and nonnegative");
  }
  std::map<int, std::vector<DriftEvent>> by_time;
  for (const auto& ev : spec.plan) {
    if (ev.time < 0 || ev.time >= spec.total_time) {
      throw std::invalid_argument("drift event time outside [0, T)");
    }
    if (!std::isfinite(ev.magnitude) || ev.magnitude < 0.0) {
      throw std::invalid_argument("drift magnitude must be nonnegative");
    }
    if (ev.target != DriftTarget::reward && ev.magnitude > 1.0) {
      throw std::invalid_argument("transition drift magnitude must lie in [0,1]");
    }
    by_time[ev.time].push_back(ev);
  }

  const std::size_t S = spec.num_states;
  const std::size_t A = spec.num_actions;
  MdpTables base = MdpTables::zeros(S, A);
  for (double& r : base.reward.data()) r = rng.uniform(-spec.r_max, spec.r_max);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) random_distribution(base.next_dist(s, a), rng);
  }

  std::vector<ChangePoint> timeline{{0, base}};
  std::vector<double> mix(S);
  for (const auto& [time, events] : by_time) {
    MdpTables next = timeline.back().tables;
    for (const auto& ev : events) {
      if (ev.target != DriftTarget::transition) {
        for (double& r : next.reward.data()) {
          r = std::clamp(r + rng.uniform(-ev.magnitude, ev.magnitude), -spec.r_max, spec.r_max);
        }
      }
      if (ev.target != DriftTarget::reward) {
        for (std::size_t s = 0; s < S; ++s) {
          for (std::size_t a = 0; a < A; ++a) {
            random_distribution(mix, rng);
            auto row = next.next_dist(s, a);
            double sum = 0.0;
            for (std::size_t k = 0; k < S; ++k) {
              row[k] = (1.0 - ev.magnitude) * row[k] + ev.magnitude * mix[k];
              sum += row[k];
            }
            for (double& p : row) p /= sum;
          }
        }
      }
    }
    timeline.push_back({time + 1, std::move(next)});
  }
  std::vector<double> init(S, 1.0 / static_cast<double>(S));
  return TimeVaryingTabularMDP(S, A, spec.horizon, spec.discount, spec.total_time,
                               std::move(init), std::move(timeline));
}

TimeVaryingTabularMDP make_drift_mdp(const DriftMdpSpec& spec) {
  Rng rng(spec.seed);
  return make_drift_mdp(spec, rng);
}

}  // namespace pauserl
