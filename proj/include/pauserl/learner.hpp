#pragma once

#include <vector>

#include "pauserl/mdp.hpp"
#include "pauserl/rng.hpp"

namespace pauserl {

struct NpgConfig {
  double eta;
  double tau;
  double gamma;

  // eta * tau < 1 and eta * tau / (1 - gamma) <= 1
  void validate() const;
};

struct QLearnConfig {
  double step_size;
  double epsilon;
  double gamma;

  void validate() const;
};

// pi'(a|s) ∝ pi(a|s)^(1 - eta*tau/(1-gamma)) * exp(eta * q(s,a) / (1-gamma)),
// evaluated in log space, floored and renormalized.
TabularPolicy npg_entropy_update(const TabularPolicy& policy, const QTable& q,
                                 const NpgConfig& cfg);

// pi^1 .. pi^g against a fixed q.
std::vector<TabularPolicy> npg_iterate(const TabularPolicy& policy, const QTable& q,
                                       const NpgConfig& cfg, int g);

TabularPolicy softmax_policy(const QTable& q, double tau);

QTable q_learning_step(const QTable& q, const Transition& sample, const QLearnConfig& cfg,
                       bool terminal);
void apply_q_learning_step(QTable& q, const Transition& sample, const QLearnConfig& cfg,
                           bool terminal);

std::size_t greedy_action(const StateActionTable& q, std::size_t s);
std::size_t epsilon_greedy(const StateActionTable& q, std::size_t s, double epsilon, Rng& rng);

}  // namespace pauserl
