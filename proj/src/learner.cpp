#include "pauserl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pauserl {

void NpgConfig::validate() const {
  if (!(eta > 0.0) || !(tau > 0.0) || !std::isfinite(eta) || !std::isfinite(tau)) {
    throw std::invalid_argument("npg: eta and tau must be positive");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("npg: gamma not in (0,1)");
  if (!(eta * tau < 1.0)) throw std::invalid_argument("npg: eta*tau must be below 1");
  if (eta * tau / (1.0 - gamma) > 1.0) {
    throw std::invalid_argument("npg: eta*tau/(1-gamma) must not exceed 1");
  }
}

void QLearnConfig::validate() const {
  // zero is accepted and leaves the table unchanged
  if (!(step_size >= 0.0 && step_size <= 1.0)) {
    throw std::invalid_argument("q-learning: step size not in [0,1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("q-learning: epsilon not in [0,1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("q-learning: gamma not in [0,1)");
}

TabularPolicy npg_entropy_update(const TabularPolicy& policy, const QTable& q,
                                 const NpgConfig& cfg) {
  cfg.validate();
  const std::size_t S = policy.num_states();
  const std::size_t A = policy.num_actions();
  if (q.num_states() != S || q.num_actions() != A) {
    throw std::invalid_argument("npg: q table shape does not match the policy");
  }
  const double keep = 1.0 - cfg.eta * cfg.tau / (1.0 - cfg.gamma);
  const double gain = cfg.eta / (1.0 - cfg.gamma);
  StateActionTable out(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    auto row = out.row(s);
    for (std::size_t a = 0; a < A; ++a) row[a] = keep * std::log(policy(s, a)) + gain * q(s, a);
    const double m = *std::max_element(row.begin(), row.end());
    for (double& x : row) x = std::exp(x - m);
  }
  return TabularPolicy::from_weights(std::move(out));
}

std::vector<TabularPolicy> npg_iterate(const TabularPolicy& policy, const QTable& q,
                                       const NpgConfig& cfg, int g) {
  if (g < 0) throw std::invalid_argument("npg: negative iteration count");
  std::vector<TabularPolicy> out;
  out.reserve(static_cast<std::size_t>(g));
  const TabularPolicy* cur = &policy;
  for (int i = 0; i < g; ++i) {
    out.push_back(npg_entropy_update(*cur, q, cfg));
    cur = &out.back();
  }
  return out;
}

TabularPolicy softmax_policy(const QTable& q, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("softmax: tau must be positive");
  StateActionTable w(q.num_states(), q.num_actions());
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    const auto row = q.row(s);
    const double m = *std::max_element(row.begin(), row.end());
    for (std::size_t a = 0; a < row.size(); ++a) w(s, a) = std::exp((row[a] - m) / tau);
  }
  return TabularPolicy::from_weights(std::move(w));
}

void apply_q_learning_step(QTable& q, const Transition& sample, const QLearnConfig& cfg,
                           bool terminal) {
  if (sample.s >= q.num_states() || sample.s_next >= q.num_states() ||
      sample.a >= q.num_actions()) {
    throw std::invalid_argument("q-learning: sample index out of range");
  }
  double target = sample.r;
  if (!terminal) {
    const auto next = q.row(sample.s_next);
    target += cfg.gamma * *std::max_element(next.begin(), next.end());
  }
  double& entry = q(sample.s, sample.a);
  entry = (1.0 - cfg.step_size) * entry + cfg.step_size * target;
}

QTable q_learning_step(const QTable& q, const Transition& sample, const QLearnConfig& cfg,
                       bool terminal) {
  cfg.validate();
  QTable out = q;
  apply_q_learning_step(out, sample, cfg, terminal);
  return out;
}

std::size_t greedy_action(const StateActionTable& q, std::size_t s) {
  const auto row = q.row(s);
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

std::size_t epsilon_greedy(const StateActionTable& q, std::size_t s, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon not in [0,1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.below(q.num_actions());
  return greedy_action(q, s);
}

}  // namespace pauserl
