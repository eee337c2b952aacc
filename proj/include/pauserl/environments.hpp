#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pauserl/mdp.hpp"
#include "pauserl/rng.hpp"

namespace pauserl {

// 12 x 3 grid. Cell (x, y) is state y * 12 + x. Moves: up (y - 1), left, right, down.
struct CliffworldSpec {
  static constexpr int kWidth = 12;
  static constexpr int kHeight = 3;

  double success_reward = 100.0;
  double failure_reward = -100.0;
  double step_reward = -1.0;
  int switch_step = 10000;  // cumulative environment step at which the goal toggles
  int total_steps = 20000;
  int max_episode_steps = 100;
  int first_goal = 0;       // index into goals(); the other one is active after the switch
  double discount = 0.99;

  void validate() const;
};

namespace cliff {

enum Action : std::size_t { kUp = 0, kLeft = 1, kRight = 2, kDown = 3 };
inline constexpr std::size_t kNumActions = 4;

constexpr std::size_t cell(int x, int y) {
  return static_cast<std::size_t>(y * CliffworldSpec::kWidth + x);
}
inline constexpr std::size_t kStart = cell(0, 2);
inline constexpr std::array<std::size_t, 2> kGoals = {cell(11, 0), cell(11, 2)};

bool is_restart(std::size_t s);
std::size_t active_goal(const CliffworldSpec& spec, int step);

struct StepResult {
  std::size_t next;
  double reward;
  bool terminal;  // entered the active goal, or already there
};

// One environment transition given the goal active at this step.
StepResult step(const CliffworldSpec& spec, std::size_t goal, std::size_t s, std::size_t a);

}  // namespace cliff

// Timeline over environment steps with one change point at switch_step. The
// active goal absorbs with zero reward; horizon is max_episode_steps.
TimeVaryingTabularMDP make_cliffworld(const CliffworldSpec& spec);

struct SwitchBanditSpec {
  int total_time = 100;
  int switch_time = 50;
  double discount = 0.5;
};

// One state, two actions, H = 1. Before the switch a1 pays 1 and a0 pays 0; swapped after.
TimeVaryingTabularMDP make_switch_bandit(const SwitchBanditSpec& spec);

enum class DriftTarget { reward, transition, both };

struct DriftEvent {
  int time;
  double magnitude;
  DriftTarget target = DriftTarget::both;
};

struct DriftMdpSpec {
  std::size_t num_states = 3;
  std::size_t num_actions = 2;
  int horizon = 3;
  double discount = 0.9;
  int total_time = 100;
  std::uint64_t seed = 0;
  double r_max = 1.0;
  std::vector<DriftEvent> plan;
};

// Random base MDP. An event at time c in [0, T) changes the tables between
// ticks c and c + 1, so B(0, c) = 0. Each event perturbs rewards by uniform
// noise of the given magnitude (clamped to [-r_max, r_max]) and mixes every
// transition row with a random distribution using the magnitude as weight.
TimeVaryingTabularMDP make_drift_mdp(const DriftMdpSpec& spec, Rng& rng);
TimeVaryingTabularMDP make_drift_mdp(const DriftMdpSpec& spec);

}  // namespace pauserl
