#pragma once

// Shared builders and independent reference implementations for the tests.
// The oracles here use plain nested vectors and recursion so that they share
// no code path with the library's DP.

#include <cmath>
#include <functional>
#include <vector>

#include "pauserl/mdp.hpp"
#include "pauserl/rng.hpp"

namespace testing_support {

using pauserl::ChangePoint;
using pauserl::MdpTables;
using pauserl::Rng;
using pauserl::TabularPolicy;
using pauserl::TimeVaryingTabularMDP;

inline MdpTables random_tables(Rng& rng, std::size_t S, std::size_t A, double r_max = 1.0) {
  MdpTables m = MdpTables::zeros(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      m.reward(s, a) = rng.uniform(-r_max, r_max);
      auto row = m.next_dist(s, a);
      double sum = 0.0;
      for (double& p : row) {
        p = rng.uniform() + 0.05;
        sum += p;
      }
      for (double& p : row) p /= sum;
    }
  }
  return m;
}

inline TimeVaryingTabularMDP random_stationary(Rng& rng, std::size_t S, std::size_t A, int H,
                                               double gamma, int T = 1) {
  return TimeVaryingTabularMDP(H, gamma, T, std::vector<double>(S, 1.0 / S),
                               random_tables(rng, S, A));
}

// 1 state, 1 action, reward series r[t] for t = 0..T (one change point per value change).
inline TimeVaryingTabularMDP reward_series(const std::vector<double>& r, int H = 1,
                                           double gamma = 0.5) {
  std::vector<ChangePoint> tl;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (t > 0 && r[t] == r[t - 1]) continue;
    MdpTables m = MdpTables::zeros(1, 1);
    m.reward(0, 0) = r[t];
    m.transition = {1.0};
    tl.push_back({static_cast<int>(t), m});
  }
  return TimeVaryingTabularMDP(1, 1, H, gamma, static_cast<int>(r.size()) - 1, {1.0},
                               std::move(tl));
}

inline TabularPolicy random_policy(Rng& rng, std::size_t S, std::size_t A) {
  pauserl::StateActionTable w(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) w(s, a) = rng.uniform() + 1e-3;
  }
  return TabularPolicy::from_weights(std::move(w));
}

// Recursive value of `policy` from state s with `steps` steps to go in M_t.
inline double ref_value(const MdpTables& m, double gamma, const TabularPolicy& pi, std::size_t s,
                        int steps) {
  if (steps == 0) return 0.0;
  const std::size_t S = m.reward.num_states();
  double v = 0.0;
  for (std::size_t a = 0; a < m.reward.num_actions(); ++a) {
    double q = m.reward(s, a);
    const auto p = m.next_dist(s, a);
    for (std::size_t k = 0; k < S; ++k) {
      if (p[k] > 0.0) q += gamma * p[k] * ref_value(m, gamma, pi, k, steps - 1);
    }
    v += pi(s, a) * q;
  }
  return v;
}

// Recursive optimal value with `steps` steps to go.
inline double ref_optimal(const MdpTables& m, double gamma, std::size_t s, int steps) {
  if (steps == 0) return 0.0;
  const std::size_t S = m.reward.num_states();
  double best = -INFINITY;
  for (std::size_t a = 0; a < m.reward.num_actions(); ++a) {
    double q = m.reward(s, a);
    const auto p = m.next_dist(s, a);
    for (std::size_t k = 0; k < S; ++k) {
      if (p[k] > 0.0) q += gamma * p[k] * ref_optimal(m, gamma, k, steps - 1);
    }
    best = std::max(best, q);
  }
  return best;
}

}  // namespace testing_support
