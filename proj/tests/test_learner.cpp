#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "pauserl/learner.hpp"

using namespace pauserl;
using namespace testing_support;

namespace {

QTable random_q(Rng& rng, std::size_t S, std::size_t A, double scale = 3.0) {
  QTable q(S, A);
  for (double& v : q.data()) v = rng.uniform(-scale, scale);
  return q;
}

double log_distance(const TabularPolicy& a, const TabularPolicy& b) {
  double d = 0.0;
  for (std::size_t s = 0; s < a.num_states(); ++s) {
    for (std::size_t x = 0; x < a.num_actions(); ++x) {
      d = std::max(d, std::abs(std::log(a(s, x)) - std::log(b(s, x))));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW((NpgConfig{0.1, 0.1, 0.9}.validate()));
  CHECK_THROWS_AS((NpgConfig{0.0, 0.1, 0.9}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NpgConfig{10.0, 0.1, 0.5}.validate()), std::invalid_argument);  // eta tau = 1
  CHECK_THROWS_AS((NpgConfig{2.0, 0.1, 0.9}.validate()), std::invalid_argument);   // exponent < 0
  CHECK_THROWS_AS((NpgConfig{0.1, 0.1, 1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((QLearnConfig{1.0, 0.0, 0.9}.validate()));
  CHECK_THROWS_AS((QLearnConfig{-0.1, 0.1, 0.9}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((QLearnConfig{0.5, 1.5, 0.9}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(npg_entropy_update(TabularPolicy::uniform(1, 2), QTable(1, 2),
                                     NpgConfig{10.0, 0.1, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("npg update worked examples") {
  const NpgConfig cfg{0.1, 0.1, 0.9};
  QTable flat(2, 3, 1.7);
  const auto same = npg_entropy_update(TabularPolicy::uniform(2, 3), flat, cfg);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t a = 0; a < 3; ++a) CHECK(std::abs(same(s, a) - 1.0 / 3) <= 1e-12);
  }

  QTable q(1, 2);
  q(0, 0) = 1.0;
  const auto next = npg_entropy_update(TabularPolicy::uniform(1, 2), q, cfg);
  const double e = std::exp(1.0);
  CHECK(std::abs(next(0, 0) - e / (1 + e)) <= 1e-9);
  CHECK(std::abs(next(0, 1) - 1 / (1 + e)) <= 1e-9);
}

TEST_CASE("npg fixed point, invariance and order preservation") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t S = 1 + rng.below(4), A = 2 + rng.below(3);
    const double gamma = rng.uniform(0.1, 0.95);
    const double tau = rng.uniform(0.05, 1.0);
    const double eta = rng.uniform(0.01, 1.0) * (1 - gamma) / tau;
    const NpgConfig cfg{eta, tau, gamma};
    const auto q = random_q(rng, S, A);

    const auto star = softmax_policy(q, tau);
    const auto fixed = npg_entropy_update(star, q, cfg);
    CHECK(max_abs_diff(fixed.probs(), star.probs()) <= 1e-9);

    const auto pi = random_policy(rng, S, A);
    const auto base = npg_entropy_update(pi, q, cfg);
    QTable shifted = q;
    for (std::size_t s = 0; s < S; ++s) {
      const double c = rng.uniform(-50, 50);
      for (std::size_t a = 0; a < A; ++a) shifted(s, a) += c;
    }
    const auto moved = npg_entropy_update(pi, shifted, cfg);
    CHECK(max_abs_diff(base.probs(), moved.probs()) <= 1e-9);

    for (std::size_t s = 0; s < S; ++s) {
      double total = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        CHECK(base(s, a) >= kPolicyFloor * (1 - 1e-9));
        total += base(s, a);
      }
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }

    const auto uni = npg_entropy_update(TabularPolicy::uniform(S, A), q, cfg);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t b = 0; b < A; ++b) {
          // strict unless both entries sit on the probability floor
          if (q(s, a) > q(s, b)) {
            CHECK(uni(s, a) >= uni(s, b));
            if (uni(s, b) > kPolicyFloor) CHECK(uni(s, a) > uni(s, b));
          }
        }
      }
    }
  }
}

TEST_CASE("npg update stays finite for large Q near gamma = 1") {
  QTable q(1, 3);
  q(0, 0) = 1e4;
  q(0, 1) = -1e4;
  const auto next = npg_entropy_update(TabularPolicy::uniform(1, 3), q, NpgConfig{1.0, 0.001, 0.999});
  for (std::size_t a = 0; a < 3; ++a) CHECK(std::isfinite(next(0, a)));
  CHECK(next(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("npg_iterate") {
  Rng rng(3);
  const NpgConfig cfg{0.5, 0.2, 0.8};
  const auto q = random_q(rng, 3, 3);
  CHECK(npg_iterate(TabularPolicy::uniform(3, 3), q, cfg, 0).empty());
  const auto star = softmax_policy(q, cfg.tau);
  for (const auto& p : npg_iterate(star, q, cfg, 5)) CHECK(max_abs_diff(p.probs(), star.probs()) <= 1e-9);
  CHECK_THROWS(npg_iterate(star, q, cfg, -1));

  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = rng.uniform(0.1, 0.95);
    const double tau = rng.uniform(0.05, 1.0);
    const NpgConfig c{rng.uniform(0.05, 1.0) * (1 - gamma) / tau, tau, gamma};
    const auto qt = random_q(rng, 3, 3);
    const auto target = softmax_policy(qt, tau);
    const auto seq = npg_iterate(random_policy(rng, 3, 3), qt, c, 30);
    REQUIRE(seq.size() == 30);
    double prev = INFINITY;
    for (const auto& p : seq) {
      const double d = log_distance(p, target);
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("q_learning_step") {
  Rng rng(4);
  const QTable q = random_q(rng, 3, 2);
  const Transition tr{1, 0, 2.5, 2};
  const auto term = q_learning_step(q, tr, QLearnConfig{1.0, 0.0, 0.9}, true);
  CHECK(term(1, 0) == 2.5);
  const auto full = q_learning_step(q, tr, QLearnConfig{1.0, 0.0, 0.9}, false);
  CHECK(full(1, 0) == doctest::Approx(2.5 + 0.9 * std::max(q(2, 0), q(2, 1))));

  CHECK(q_learning_step(q, tr, QLearnConfig{0.0, 0.0, 0.9}, false) == q);

  const auto half = q_learning_step(q, tr, QLearnConfig{0.5, 0.0, 0.9}, false);
  int changed = 0;
  for (std::size_t i = 0; i < q.data().size(); ++i) changed += half.data()[i] != q.data()[i];
  CHECK(changed == 1);
  QTable inplace = q;
  apply_q_learning_step(inplace, tr, QLearnConfig{0.5, 0.0, 0.9}, false);
  CHECK(inplace == half);
  CHECK_THROWS(q_learning_step(q, Transition{3, 0, 0.0, 0}, QLearnConfig{0.5, 0.0, 0.9}, false));
}

TEST_CASE("q-learning converges to the discounted fixed point on a 2-state chain") {
  // s0 --a0--> s0 (r 0), s0 --a1--> s1 (r 1); s1 --a0--> s0 (r 2), s1 --a1--> s1 (r -1)
  const std::size_t next[2][2] = {{0, 1}, {0, 1}};
  const double reward[2][2] = {{0.0, 1.0}, {2.0, -1.0}};
  const double gamma = 0.9;
  double v[2][2] = {};
  for (int it = 0; it < 2000; ++it) {
    double nv[2][2];
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        const std::size_t n = next[s][a];
        nv[s][a] = reward[s][a] + gamma * std::max(v[n][0], v[n][1]);
      }
    }
    std::copy(&nv[0][0], &nv[0][0] + 4, &v[0][0]);
  }
  QTable q(2, 2);
  const QLearnConfig cfg{0.5, 0.0, gamma};
  for (int sweep = 0; sweep < 5000; ++sweep) {
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t a = 0; a < 2; ++a) {
        apply_q_learning_step(q, Transition{s, a, reward[s][a], next[s][a]}, cfg, false);
      }
    }
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(q(s, a) - v[s][a]) <= 1e-6);
  }
}

TEST_CASE("epsilon greedy") {
  Rng rng(5);
  QTable q(2, 3);
  q(0, 2) = 1.0;
  q(1, 1) = 4.0;
  q(1, 2) = 4.0;
  for (int i = 0; i < 1000; ++i) {
    CHECK(epsilon_greedy(q, 0, 0.0, rng) == 2);
    CHECK(epsilon_greedy(q, 1, 0.0, rng) == 1);
  }
  CHECK(greedy_action(q, 1) == 1);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[epsilon_greedy(q, 0, 1.0, rng)];
  const double sd = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (int c : counts) CHECK(std::abs(c - n / 3.0) <= 3 * sd);
}
