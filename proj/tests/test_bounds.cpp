#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "pauserl/bounds.hpp"
#include "pauserl/forecast.hpp"

using namespace pauserl;
using namespace testing_support;

namespace {

SplitProblem symmetric(int delta, double alpha, double c1) {
  return {delta, alpha, alpha, 1.0, 1.0, c1, 1.0, 1.0, 0.1};
}

// Objective along G + N = delta with real G.
double continuous_objective(const SplitProblem& p, double g) {
  const double n = p.delta - g;
  const double et = p.eta * p.tau;
  const double pol = p.c1 / et + (n * p.c1 - p.c1 / et) * std::pow(1 - et, g);
  const double env = p.c4_plus_c5 * ((std::pow(p.alpha1, g) - 1) / (p.alpha1 - 1) * p.b1max +
                                     (std::pow(p.alpha2, n) - 1) / (p.alpha2 - 1) * p.b2max);
  return pol + env;
}

SplitProblem random_problem(Rng& rng) {
  SplitProblem p;
  p.delta = 1 + static_cast<int>(rng.below(40));
  p.alpha1 = 1.0 + rng.uniform(0.001, 0.3);
  p.alpha2 = 1.0 + rng.uniform(0.001, 0.3);
  p.b1max = rng.uniform(0.01, 3);
  p.b2max = rng.uniform(0.01, 3);
  p.c1 = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0, 20);
  p.c4_plus_c5 = rng.uniform(0.1, 5);
  p.tau = rng.uniform(0.01, 1);
  p.eta = rng.uniform(0.01, 0.99) / p.tau;
  return p;
}

}  // namespace

TEST_CASE("policy-free constants") {
  const auto c = policy_free_constants(0.9, 3, 1.0, 2, 1.0, 0.1);
  CHECK(c.c3 == doctest::Approx(1.38629).epsilon(1e-5));
  CHECK(c.c3 == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  CHECK(c.c2 == doctest::Approx(2 * 2.9 / 0.1 * (1 + 0.9 / 0.1)).epsilon(1e-14));
  const auto d = policy_free_constants(0.5, 2, 1.0, 3, 0.5, 0.2);
  CHECK(d.c4 == doctest::Approx(3.0).epsilon(1e-14));
  // gamma/(1-gamma) (1.5 - 0.5*2) + 1.5 * 1/(0.5)
  CHECK(d.c5 == doctest::Approx(0.5 + 3.0).epsilon(1e-14));
  CHECK(d.c2 > 0);
  CHECK(d.c3 > 0);
  CHECK_THROWS_AS(policy_free_constants(0.5, 2, 1.0, 2, 10.0, 0.1), std::invalid_argument);
}

TEST_CASE("C1 vanishes at the soft optimum and is nonnegative elsewhere") {
  Rng rng(2);
  const auto mdp = random_stationary(rng, 3, 2, 3, 0.9);
  const double tau = 0.1, eta = 0.5;
  const auto soft = soft_optimal_values(mdp, 0, tau);
  CHECK(c1_from_tables(soft.q, soft.policy, soft.q, soft.policy, 0.9, eta, tau) == 0.0);
  for (int k = 0; k < 20; ++k) {
    const auto c = constants_from(mdp, 0, random_policy(rng, 3, 2), eta, tau);
    CHECK(c.c1 >= 0.0);
  }
  CHECK_THROWS_AS(constants_from(mdp, 0, TabularPolicy::uniform(3, 2), 20.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("update and hold bounds worked examples") {
  BoundConstants c;
  c.c1 = 1.0;
  c.eta = 1.0;
  c.tau = 0.1;
  CHECK(update_regret_bound(c, 10, 0.0, {}) == doctest::Approx(6.5132).epsilon(1e-5));
  CHECK(update_regret_bound(c, 10, 0.0, {}) ==
        doctest::Approx(10 * (1 - std::pow(0.9, 10))).epsilon(1e-14));
  CHECK(hold_regret_bound(c, 5, 10, 0.0, {}) == doctest::Approx(1.74339).epsilon(1e-5));
  CHECK(hold_regret_bound(c, 0, 10, 0.0, {}) == 0.0);
  c.c4 = 2.0;
  c.c5 = 3.0;
  CHECK(update_regret_bound(c, 0, 5.0, {0.5, 0.25}) == doctest::Approx(1.75));
  CHECK(update_regret_bound(c, 0, 0.0, {}) == 0.0);
  c.c2 = 1.0;
  c.c3 = 0.5;
  CHECK(update_regret_bound(c, 4, 0.2, {}) < update_regret_bound(c, 4, 0.3, {}));
  CHECK(update_regret_bound(c, 4, 0.2, {0.1, 0}) < update_regret_bound(c, 4, 0.2, {0.2, 0}));
  CHECK(hold_regret_bound(c, 4, 3, 0.2, {}) > hold_regret_bound(c, 4, 4, 0.2, {}));
}

TEST_CASE("total bound equals the sum of update and hold bounds") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    UpdateSchedule s;
    std::vector<BoundConstants> cs;
    std::vector<double> deltas;
    std::vector<IntervalBudgets> budgets;
    int t = 0;
    const std::size_t M = 1 + rng.below(6);
    for (std::size_t m = 0; m < M; ++m) {
      const int g = static_cast<int>(rng.below(8)), n = static_cast<int>(rng.below(8));
      s.entries.push_back({t, g, n});
      t += g + n;
      auto c = policy_free_constants(rng.uniform(0.1, 0.95), 1 + static_cast<int>(rng.below(5)),
                                     rng.uniform(0, 2), 1 + rng.below(4), 1.0, rng.uniform(0.01, 0.99));
      c.c1 = rng.uniform(0, 10);
      cs.push_back(c);
      deltas.push_back(rng.uniform(0, 2));
      budgets.push_back({{rng.uniform(0, 3), rng.uniform(0, 3)}, {rng.uniform(0, 3), rng.uniform(0, 3)}});
    }
    const auto total = total_regret_bound(cs, s, deltas, budgets);
    double sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const auto& e = s.entries[m];
      const double parts = update_regret_bound(cs[m], e.updates, deltas[m], budgets[m].update) +
                           hold_regret_bound(cs[m], e.holds, e.updates, deltas[m], budgets[m].hold);
      CHECK(std::abs(total.intervals[m].total() - parts) <= 1e-9 * std::max(1.0, parts));
      sum += parts;
    }
    CHECK(std::abs(total.total - sum) <= 1e-9 * std::max(1.0, sum));
  }
  UpdateSchedule one{{{0, 2, 2}}};
  const std::vector<BoundConstants> c(2);
  const std::vector<double> d = {0.0};
  const std::vector<IntervalBudgets> b(1);
  CHECK_THROWS_AS(total_regret_bound(c, one, d, b), std::invalid_argument);
}

TEST_CASE("total bound reductions") {
  BoundConstants c;
  c.c1 = 2.0;
  c.eta = 0.5;
  c.tau = 0.2;
  c.c2 = 1.0;
  c.c4 = 1.0;
  c.c5 = 1.0;
  const UpdateSchedule s{{{0, 3, 0}, {3, 5, 0}}};
  const std::vector<BoundConstants> cs = {c};
  const std::vector<double> d = {0.0, 0.0};
  const std::vector<IntervalBudgets> b(2);
  const auto r = total_regret_bound(cs, s, d, b);
  const double expect = 2.0 / 0.1 * (1 - std::pow(0.9, 3)) + 2.0 / 0.1 * (1 - std::pow(0.9, 5));
  CHECK(r.total == doctest::Approx(expect).epsilon(1e-12));
  for (const auto& iv : r.intervals) CHECK(iv.r_env == 0.0);

  Rng rng(1);
  const auto mdp = random_stationary(rng, 2, 2, 2, 0.9, 20);
  for (const auto& e : schedule_from_blocks({6, 0.5}, 20).entries) {
    const auto ib = interval_budgets(mdp, e);
    CHECK(ib.update.r == 0.0);
    CHECK(ib.hold.p == 0.0);
  }
}

TEST_CASE("env envelope worked examples") {
  const auto p = symmetric(10, 1.1, 0.0);
  CHECK(env_regret_envelope(p, 0, 0) == 0.0);
  CHECK(env_regret_envelope(p, 5, 5) == doctest::Approx(12.2102).epsilon(1e-5));
  for (int g = 0; g < 6; ++g) {
    for (int n = 0; n < 6; ++n) {
      CHECK(env_regret_envelope(p, g + 1, n) > env_regret_envelope(p, g, n));
      CHECK(env_regret_envelope(p, g, n + 1) > env_regret_envelope(p, g, n));
    }
  }
  SplitProblem bad = p;
  bad.alpha1 = 1.0;
  CHECK_THROWS_AS(env_regret_envelope(bad, 1, 1), std::invalid_argument);
  bad.alpha1 = 0.9;
  CHECK_THROWS_AS(env_regret_envelope(bad, 1, 1), std::invalid_argument);
}

TEST_CASE("optimal_split_env worked examples") {
  const auto sym = optimal_split_env(symmetric(10, 1.1, 0.0));
  CHECK(sym.n_star == 5);
  CHECK(sym.g_star == 5);
  CHECK_FALSE(sym.closed_form_n.has_value());

  SplitProblem p{10, 1.1, 1.05, 1.0, 1.0, 0.0, 1.0, 1.0, 0.1};
  const auto r = optimal_split_env(p);
  CHECK(r.n_star == 6);
  CHECK(r.g_star == 4);
  CHECK(r.objective == doctest::Approx(11.443).epsilon(1e-4));
  CHECK(std::abs(env_regret_envelope(p, 5, 5) - 11.631) <= 1e-3);
  CHECK(std::abs(env_regret_envelope(p, 3, 7) - 11.452) <= 1e-3);
  REQUIRE(r.closed_form_n.has_value());
  REQUIRE(r.first_order_n.has_value());
  CHECK(std::isfinite(*r.closed_form_n));
  // the first-order root lies next to the grid answer
  CHECK(std::abs(*r.first_order_n - r.n_star) <= 1.0);

  for (double a1 : {1.05, 1.2}) {
    SplitProblem one{1, a1, 1.1, 1.0, 1.5, 0.0, 1.0, 1.0, 0.1};
    const auto o = optimal_split_env(one);
    const double e0 = env_regret_envelope(one, 1, 0), e1 = env_regret_envelope(one, 0, 1);
    CHECK(o.n_star == (e1 < e0 ? 1 : 0));
  }
}

TEST_CASE("grid answer beats both boundary splits") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_problem(rng);
    const auto r = optimal_split_env(p);
    CHECK(r.objective <= env_regret_envelope(p, p.delta, 0));
    CHECK(r.objective <= env_regret_envelope(p, 0, p.delta));
    CHECK(r.g_star + r.n_star == p.delta);
  }
}

TEST_CASE("optimal_split_total worked examples") {
  const auto p = symmetric(10, 1.1, 1.0);
  const auto r = optimal_split_total(p);
  CHECK(r.g_star == 6);
  CHECK(r.n_star == 4);
  CHECK(r.objective == doctest::Approx(19.168).epsilon(1e-4));
  CHECK(std::abs(split_objective(p, 5, 5) - 19.258) <= 1e-3);
  CHECK(std::abs(split_objective(p, 7, 3) - 19.449) <= 1e-3);
  CHECK(r.residual >= 0.0);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto q = random_problem(rng);
    q.c1 = 0.0;
    const auto a = optimal_split_total(q);
    const auto b = optimal_split_env(q);
    CHECK(a.n_star == b.n_star);
  }

  SplitProblem huge{1, 1.1, 1.1, 1.0, 1.0, 1e9, 1.0, 1.0, 0.1};
  CHECK(optimal_split_total(huge).n_star == 0);
}

TEST_CASE("stationary split") {
  CHECK(stationary_optimal_split(7).g_star == 7);
  CHECK(stationary_optimal_split(7).n_star == 0);
  CHECK(stationary_optimal_split(0).g_star == 0);
  CHECK(stationary_optimal_split(0).n_star == 0);
  CHECK_THROWS(stationary_optimal_split(-1));
  for (int delta = 1; delta <= 30; ++delta) {
    SplitProblem p{delta, 1.1, 1.1, 1e-12, 1e-12, 1.0, 1.0, 1.0, 0.1};
    const auto r = optimal_split_total(p);
    CHECK(r.n_star == stationary_optimal_split(delta).n_star);
  }
}

TEST_CASE("objective slope is the derivative along G + N = delta") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_problem(rng);
    const double g = rng.uniform(0, p.delta);
    const double h = 1e-5;
    const double fd = (continuous_objective(p, g + h) - continuous_objective(p, g - h)) / (2 * h);
    const double slope = objective_slope(p, g, p.delta - g);
    CHECK(std::abs(fd - slope) <= 1e-5 * std::max(1.0, std::abs(slope)));
    // the printed expression differs only in the policy coefficient
    const double x = 1 - p.eta * p.tau;
    const double diff = stationarity_expression(p, g, p.delta - g) - slope;
    const double expect = p.c1 * std::pow(x, g) * std::log(x) * (1.0 / (p.eta * p.tau) - 1.0);
    CHECK(std::abs(diff - expect) <= 1e-9 * std::max(1.0, std::abs(slope) + std::abs(expect)));
  }
}

TEST_CASE("the slope changes sign around an interior minimizer") {
  Rng rng(7);
  int interior = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_problem(rng);
    const auto r = optimal_split_total(p);
    if (r.g_star == 0 || r.g_star == p.delta) continue;
    ++interior;
    // integer optimality forces slope <= 0 somewhere in (G*-1, G*) and >= 0 in (G*, G*+1)
    double lo = INFINITY, hi = -INFINITY;
    for (int k = 1; k < 1000; ++k) {
      const double a = r.g_star - 1 + k / 1000.0;
      const double b = r.g_star + k / 1000.0;
      lo = std::min(lo, objective_slope(p, a, p.delta - a));
      hi = std::max(hi, objective_slope(p, b, p.delta - b));
    }
    const double scale = 1e-9 * std::max(1.0, std::abs(r.objective));
    CHECK(lo <= scale);
    CHECK(hi >= -scale);
  }
  CHECK(interior > 20);
}

TEST_CASE("interior minimizer on actual budgets") {
  Rng rng(8);
  const auto flat = random_stationary(rng, 2, 2, 2, 0.9, 12);
  const auto none = interior_minimizer_exists(flat, 2, 10, 1.0, 1.0);
  CHECK_FALSE(none.exists);
  for (double v : none.values) CHECK(v == 0.0);

  // reward jump at tick 6 inside [2, 10]
  std::vector<double> r(13, 0.0);
  for (std::size_t t = 6; t < r.size(); ++t) r[t] = 1.0;
  const auto jump = reward_series(r);
  const auto inside = interior_minimizer_exists(jump, 2, 10, 1.0, 1.0);
  CHECK(inside.exists);
  CHECK(inside.g_star == 4);
  CHECK(inside.values[4] == 0.0);
  CHECK(inside.values.front() > 0.0);
  CHECK(inside.values.back() > 0.0);

  // change on the final transition: just report
  std::vector<double> late(13, 0.0);
  late[10] = late[11] = late[12] = 1.0;
  const auto edge = interior_minimizer_exists(reward_series(late), 2, 10, 1.0, 1.0);
  CHECK(edge.values.size() == 9);
  CHECK_THROWS_AS(interior_minimizer_exists(jump, 2, 3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("dominant ratio") {
  const std::vector<double> ones = {1, 2, 3}, zeros = {0, 0, 0};
  CHECK(dominant_ratio(ones, zeros) == 1.0);
  CHECK(dominant_ratio(zeros, ones) == 0.0);
  CHECK(dominant_ratio(ones, ones) == 0.5);
  const std::vector<double> empty;
  CHECK_THROWS_AS(dominant_ratio(empty, empty), std::invalid_argument);
  const std::vector<double> with_zero = {0, 1}, with_zero_pi = {0, 1};
  CHECK(dominant_ratio(with_zero, with_zero_pi) == 0.5);
}

TEST_CASE("sweeps") {
  SweepSpec spec{SweepObjective::env_only, "alpha_ratio", {1.0}, symmetric(10, 1.1, 0.0)};
  const auto rows = sweep(spec);
  CHECK(rows.size() == 11);
  for (const auto& row : rows) {
    if (row.is_argmin) CHECK(row.n == 5);
    CHECK(row.bound_value == doctest::Approx(rows[static_cast<std::size_t>(10 - row.n)].bound_value));
  }
  SweepSpec dom{SweepObjective::env_plus_pi, "dominant_ratio", {0.5}, symmetric(10, 1.05, 0.0)};
  const auto pt = sweep_point(dom, 0.5);
  const double env = env_regret_envelope(pt.problem, 5, 5);
  const double pol = policy_regret_term(pt.problem, 5, 5);
  CHECK(env / (env + pol) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sweep_point(dom, 0.0).env_weight_zero);
  CHECK_THROWS(sweep_point(dom, 1.0));
  SweepSpec unknown{SweepObjective::env_only, "bogus", {1.0}, symmetric(10, 1.1, 0.0)};
  CHECK_THROWS_AS(sweep(unknown), std::invalid_argument);
  SweepSpec none{SweepObjective::env_only, "alpha_ratio", {}, symmetric(10, 1.1, 0.0)};
  CHECK_THROWS_AS(sweep(none), std::invalid_argument);

  std::ostringstream out;
  write_sweep_csv(out, rows, 1, "x");
  CHECK(out.str().rfind("# seed=1 config_hash=x\nparam_name,param_value,N,bound_value,is_argmin\n"
                        "alpha_ratio,1,0,",
                        0) == 0);
}

TEST_CASE("gap bound worked examples") {
  CHECK(optimal_q_gap_bound({}, 0.5, 2, 1.0, 0) == 0.0);
  CHECK(optimal_q_gap_bound({1.0, 0.0}, 0.5, 2, 1.0, 0) == doctest::Approx(1.5));
  CHECK(optimal_q_gap_bound({1.0, 0.0}, 0.5, 2, 1.0, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(optimal_q_gap_bound({1.0, 0.0}, 0.5, 2, 1.0, 2), std::out_of_range);
  CHECK(optimal_v_gap_bound({}, 0.5, 2, 1.0) == 0.0);
  CHECK(optimal_v_gap_bound({1.0, 0.0}, 0.5, 2, 1.0) == doctest::Approx(1.5));
  CHECK(same_policy_v_gap_bound({}, 0.5, 2) == 0.0);
  CHECK(same_policy_v_gap_bound({0.0, 1.0}, 0.5, 2) == doctest::Approx(0.5));
  CHECK(same_policy_v_gap_bound({0.7, 0.0}, 0.5, 2) == doctest::Approx(0.7 * 1.5));

  const auto mdp = reward_series({0.0, 1.0, 1.0}, 2, 0.5);
  const auto b = local_budget(mdp, 0, 2);
  CHECK(optimal_v_gap_bound({b.b_r, b.b_p}, 0.5, 2, mdp.r_max()) == doctest::Approx(compute_u(mdp, 0, 2)));
}

TEST_CASE("npg convergence bound") {
  CHECK(npg_convergence_bound(1, 1.0, 0.0, 0.9, 1.0, 0.1, 2) == doctest::Approx(4.28629).epsilon(1e-5));
  CHECK(npg_convergence_bound(5, 0.0, 0.0, 0.9, 1e3, 1e-9, 2) <= 1e-6);
  double prev = INFINITY;
  for (int g = 1; g < 30; ++g) {
    const double v = npg_convergence_bound(g, 2.0, 0.1, 0.9, 0.5, 0.2, 3);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS(npg_convergence_bound(0, 1.0, 0.0, 0.9, 1.0, 0.1, 2));
}
