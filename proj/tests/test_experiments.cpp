#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "pauserl/experiments.hpp"
#include "pauserl/verify.hpp"

using namespace pauserl;
using namespace testing_support;

namespace {

// Steps the greedy policy of q needs to reach the goal from the start (-1 if never).
int greedy_path_length(const CliffworldSpec& spec, const QTable& q, std::size_t goal) {
  std::size_t s = cliff::kStart;
  for (int k = 1; k <= 100; ++k) {
    const auto r = cliff::step(spec, goal, s, greedy_action(q, s));
    if (r.terminal) return k;
    s = r.next;
  }
  return -1;
}

}  // namespace

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [&](std::size_t i) {
                                 ++ran;
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("cliffworld runs are reproducible") {
  CliffworldSpec spec;
  spec.total_steps = 3000;
  spec.switch_step = 1500;
  for (CliffMethod m : {CliffMethod::reactive, CliffMethod::forecast}) {
    const auto a = run_cliffworld(spec, m, {}, 9);
    const auto b = run_cliffworld(spec, m, {}, 9);
    CHECK(a.rewards == b.rewards);
    CHECK(a.q == b.q);
    CHECK(a.rewards.size() == 3000);
  }
  const auto grid1 = run_cliffworld_grid(spec, {CliffMethod::reactive, CliffMethod::forecast}, {},
                                         default_cliff_settings(), 2, 5, 1);
  const auto grid4 = run_cliffworld_grid(spec, {CliffMethod::reactive, CliffMethod::forecast}, {},
                                         default_cliff_settings(), 2, 5, 4);
  REQUIRE(grid1.size() == 24);
  for (std::size_t i = 0; i < grid1.size(); ++i) {
    CHECK(grid1[i].rewards == grid4[i].rewards);
    CHECK(grid1[i].seed == grid4[i].seed);
  }
  // paired streams across methods
  CHECK(grid1[0].seed == grid1[12].seed);
  CHECK(grid1[0].method == CliffMethod::reactive);
  CHECK(grid1[12].method == CliffMethod::forecast);

  std::ostringstream out;
  write_cliffworld_csv(out, {grid1[0]}, 5, "ab");
  CHECK(out.str().rfind("# seed=5 config_hash=ab\nstep,reward,method,alpha,epsilon,seed\n0,", 0) == 0);
  std::ostringstream sum;
  write_cliffworld_summary_csv(sum, {grid1[0]}, spec, 1000, 5, "ab");
  CHECK(sum.str().rfind(
            "# seed=5 config_hash=ab\nmethod,alpha,epsilon,seed,pre_switch_mean,final_mean\nreactive,0.05,0.05,",
            0) == 0);
}

TEST_CASE("with the switch at step 0 both methods learn the single goal") {
  CliffworldSpec spec;
  spec.switch_step = 0;
  spec.total_steps = 20000;
  const std::size_t goal = cliff::active_goal(spec, 0);
  for (CliffMethod m : {CliffMethod::reactive, CliffMethod::forecast}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto run = run_cliffworld(spec, m, {}, seed);
      const int len = greedy_path_length(spec, run.q, goal);
      CHECK(len > 0);
      CHECK(len <= 13);
      CHECK(mean_reward(run.rewards, 15000, 20000) > mean_reward(run.rewards, 0, 5000));
    }
  }
}

TEST_CASE("cliffworld argument checks") {
  CHECK(parse_method("reactive") == CliffMethod::reactive);
  CHECK(parse_method("forecast") == CliffMethod::forecast);
  CHECK_THROWS_AS(parse_method("foo"), std::invalid_argument);
  CliffAgentConfig bad;
  bad.epsilon = 2.0;
  CHECK_THROWS_AS(run_cliffworld({}, CliffMethod::reactive, bad, 1), std::invalid_argument);
  const std::vector<double> r = {1, 2, 3};
  CHECK(mean_reward(r, 1, 3) == 2.5);
  CHECK_THROWS(mean_reward(r, 2, 2));
  CHECK_THROWS(mean_reward(r, 0, 4));
}

TEST_CASE("bandit: constant beta = 1 with the switch at T/2 earns T/2") {
  BanditRunConfig cfg;
  cfg.env = {100, 50, 0.5};
  cfg.beta_constant = 1.0;
  const auto trace = run_bandit(cfg, BetaPolicy::constant, 0);
  CHECK(trace.cumulative() == doctest::Approx(50.0));
  cfg.beta_constant = 0.0;
  CHECK(run_bandit(cfg, BetaPolicy::constant, 0).cumulative() == doctest::Approx(50.0));
}

TEST_CASE("bandit: T = 2 brute force over a beta grid") {
  BanditRunConfig cfg;
  cfg.env = {2, 1, 0.5};
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double b0 = i / 10.0, b1 = j / 10.0;
      // before the switch a1 pays 1; after it a0 pays 1
      const double hand = (1 - b0) + b1;
      cfg.beta_start = b0;
      cfg.beta_end = b1;
      cfg.ramp_start = 0;
      cfg.fast_ramp = 1;
      const auto trace = run_bandit(cfg, BetaPolicy::conservative, 0);
      REQUIRE(trace.beta.size() == 2);
      CHECK(trace.beta[0] == doctest::Approx(b0));
      CHECK(trace.beta[1] == doctest::Approx(b1));
      CHECK(trace.cumulative() == doctest::Approx(hand));
      cfg.beta_constant = b0;
      CHECK(run_bandit(cfg, BetaPolicy::constant, 0).cumulative() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("bandit: same endpoints, different tempo, different reward") {
  BanditRunConfig cfg;
  cfg.env = {100, 50, 0.5};
  cfg.beta_start = 0.0;
  cfg.beta_end = 1.0;
  cfg.ramp_start = 40;
  const auto fast = run_bandit(cfg, BetaPolicy::conservative, 0);
  const auto slow = run_bandit(cfg, BetaPolicy::pessimistic, 0);
  CHECK(fast.beta.front() == slow.beta.front());
  CHECK(fast.cumulative() != doctest::Approx(slow.cumulative()));
  const auto sched = run_bandit(cfg, BetaPolicy::scheduled, 0);
  REQUIRE(sched.beta.size() == 100);
  for (std::size_t t = 0; t < 100; ++t) {
    CHECK(sched.beta[t] >= 0.0);
    CHECK(sched.beta[t] <= 1.0);
    CHECK(sched.reward[t] == doctest::Approx(t < 50 ? 1 - sched.beta[t] : sched.beta[t]));
  }
  std::ostringstream out;
  write_bandit_csv(out, fast, 0, "z");
  CHECK(out.str().rfind("# seed=0 config_hash=z\nt,beta,reward\n0,0,1\n", 0) == 0);
  CHECK_THROWS(parse_beta_policy("random"));
  cfg.beta_end = 1.5;
  CHECK_THROWS_AS(run_bandit(cfg, BetaPolicy::conservative, 0), std::invalid_argument);
}

TEST_CASE("schedule experiment: stationary environment, more updates never hurt") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mdp = random_stationary(rng, 3, 2, 3, 0.9, 60);
    const NpgConfig npg{0.5, 0.1, 0.9};
    const auto full =
        run_schedule_experiment(mdp, schedule_from_blocks({10, 1.0}, 60), {}, npg, QSource::oracle, 3);
    const auto sparse =
        run_schedule_experiment(mdp, schedule_from_blocks({10, 0.1}, 60), {}, npg, QSource::oracle, 3);
    CHECK(full.measured <= sparse.measured + 1e-9);
    for (const auto* o : {&full, &sparse}) {
      double parts = 0.0;
      for (const auto& c : o->parts) parts += c.update_regret + c.hold_regret;
      CHECK(std::abs(parts - o->measured) <= 1e-9);
      CHECK(o->measured <= o->bound.total + 1e-9);
      for (const auto& iv : o->bound.intervals) CHECK(iv.r_env == 0.0);
    }
  }
}

TEST_CASE("schedule experiment on a drift MDP respects the total bound") {
  DriftMdpSpec spec;
  spec.total_time = 80;
  spec.seed = 4;
  spec.plan = {{20, 0.3}, {50, 0.4}};
  const auto mdp = make_drift_mdp(spec);
  const auto sched = schedule_from_blocks({10, 0.5}, 80);
  const auto out = run_schedule_experiment(mdp, sched, {}, {0.5, 0.1, 0.9}, QSource::oracle, 1);
  CHECK(out.measured <= out.bound.total);
  std::ostringstream csv;
  write_bounds_comparison_csv(csv, out, sched, 1, "q");
  CHECK(csv.str().rfind("# seed=1 config_hash=q\nm,t_m,G_m,N_m,measured_regret,bound_pi,bound_f,"
                        "bound_env,bound_total\n1,0,5,5,",
                        0) == 0);
}

TEST_CASE("verification harness") {
  VerifyOptions opt;
  opt.gap_instances = 20;
  opt.forecast_instances = 10;
  opt.regret_instances = 3;
  opt.workers = 2;
  const auto ok = run_verification(opt);
  CHECK(!ok.empty());
  for (const auto& r : ok) CHECK(r.ok);

  // the same seed reproduces the same records
  const auto again = run_verification(opt);
  REQUIRE(again.size() == ok.size());
  for (std::size_t i = 0; i < ok.size(); ++i) {
    CHECK(again[i].measured == ok[i].measured);
    CHECK(again[i].seed == ok[i].seed);
  }

  opt.bound_scale = 0.01;
  const auto corrupt = run_verification(opt);
  bool any_fail = false;
  for (const auto& r : corrupt) any_fail = any_fail || !r.ok;
  CHECK(any_fail);

  VerifyOptions zero;
  zero.gap_instances = 0;
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
  CHECK_THROWS_AS(run_verification(zero), std::invalid_argument);
  VerifyOptions nothing;
  nothing.run_gap = nothing.run_forecast = nothing.run_regret = false;
  CHECK_THROWS_AS(nothing.validate(), std::invalid_argument);

  std::ostringstream out;
  write_verify_csv(out, ok, 0, "v");
  CHECK(out.str().rfind("# seed=0 config_hash=v\ncheck,instance,seed,measured,bound,margin,ok\n", 0) == 0);
}
