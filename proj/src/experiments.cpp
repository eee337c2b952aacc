#include "pauserl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "pauserl/csv.hpp"
#include "pauserl/learner.hpp"

namespace pauserl {

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---- cliffworld

const char* method_name(CliffMethod m) {
  return m == CliffMethod::reactive ? "reactive" : "forecast";
}

CliffMethod parse_method(const std::string& name) {
  if (name == "reactive") return CliffMethod::reactive;
  if (name == "forecast") return CliffMethod::forecast;
  throw std::invalid_argument("unknown method '" + name + "' (expected reactive or forecast)");
}

void CliffAgentConfig::validate() const {
  QLearnConfig{alpha, epsilon, 0.0}.validate();
  if (snapshot_every < 1) throw std::invalid_argument("snapshot interval must be positive");
  if (window < 1) throw std::invalid_argument("forecast window must be positive");
  if (lookahead < 0) throw std::invalid_argument("lookahead must be nonnegative");
}

CliffRun run_cliffworld(const CliffworldSpec& spec, CliffMethod method,
                        const CliffAgentConfig& agent, std::uint64_t seed) {
  spec.validate();
  agent.validate();
  constexpr std::size_t S = CliffworldSpec::kWidth * CliffworldSpec::kHeight;
  const QLearnConfig qcfg{agent.alpha, agent.epsilon, spec.discount};
  Rng rng(seed);
  QTable q(S, cliff::kNumActions);
  QTable acting(S, cliff::kNumActions);
  std::vector<QSnapshot> history;
  std::vector<double> rewards(static_cast<std::size_t>(spec.total_steps));

  std::size_t s = cliff::kStart;
  int episode_steps = 0;
  for (int step = 0; step < spec.total_steps; ++step) {
    if (method == CliffMethod::forecast && step % agent.snapshot_every == 0) {
      history.push_back({step, q});
      if (history.size() > agent.window) history.erase(history.begin());
      const auto model =
          fit_forecaster(history, effective_basis(agent.basis, history.size()), history.size());
      acting = forecast_q(model, static_cast<double>(step + agent.lookahead));
    }
    const QTable& table = method == CliffMethod::forecast ? acting : q;
    const std::size_t a = epsilon_greedy(table, s, agent.epsilon, rng);
    const auto res = cliff::step(spec, cliff::active_goal(spec, step), s, a);
    rewards[static_cast<std::size_t>(step)] = res.reward;
    apply_q_learning_step(q, {s, a, res.reward, res.next}, qcfg, res.terminal);
    ++episode_steps;
    if (res.terminal || episode_steps >= spec.max_episode_steps) {
      s = cliff::kStart;
      episode_steps = 0;
    } else {
      s = res.next;
    }
  }
  return {std::move(rewards), std::move(q)};
}

std::vector<CliffSetting> default_cliff_settings() {
  return {{0.05, 0.05}, {0.1, 0.1}, {0.1, 0.05}, {0.2, 0.1}, {0.2, 0.05}, {0.3, 0.1}};
}

std::vector<CliffGridRun> run_cliffworld_grid(const CliffworldSpec& spec,
                                              const std::vector<CliffMethod>& methods,
                                              const CliffAgentConfig& agent,
                                              const std::vector<CliffSetting>& settings,
                                              std::size_t repetitions, std::uint64_t master_seed,
                                              unsigned workers) {
  if (methods.empty() || settings.empty() || repetitions == 0) {
    throw std::invalid_argument("cliffworld grid needs methods, settings and repetitions");
  }
  const std::size_t per_method = settings.size() * repetitions;
  std::vector<CliffGridRun> runs(methods.size() * per_method);
  parallel_for(runs.size(), workers, [&](std::size_t i) {
    const std::size_t k = i % per_method;
    const CliffSetting setting = settings[k / repetitions];
    CliffAgentConfig cfg = agent;
    cfg.alpha = setting.alpha;
    cfg.epsilon = setting.epsilon;
    const std::uint64_t seed = derive_seed(master_seed, k);
    const CliffMethod method = methods[i / per_method];
    runs[i] = {method, setting, seed, run_cliffworld(spec, method, cfg, seed).rewards};
  });
  return runs;
}

double mean_reward(const std::vector<double>& rewards, int from, int to) {
  if (from < 0 || to > static_cast<int>(rewards.size()) || from >= to) {
    throw std::invalid_argument("reward window out of range");
  }
  double sum = 0.0;
  for (int i = from; i < to; ++i) sum += rewards[static_cast<std::size_t>(i)];
  return sum / (to - from);
}

void write_cliffworld_csv(std::ostream& out, const std::vector<CliffGridRun>& runs,
                          std::uint64_t seed, const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash, {"step", "reward", "method", "alpha", "epsilon", "seed"});
  for (const auto& run : runs) {
    const std::string run_seed = std::to_string(run.seed);
    for (std::size_t i = 0; i < run.rewards.size(); ++i) {
      csv.cell(i).cell(run.rewards[i]).cell(method_name(run.method)).cell(run.setting.alpha)
          .cell(run.setting.epsilon).cell(run_seed);
      csv.end_row();
    }
  }
}

void write_cliffworld_summary_csv(std::ostream& out, const std::vector<CliffGridRun>& runs,
                                  const CliffworldSpec& spec, int tail, std::uint64_t seed,
                                  const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash,
                {"method", "alpha", "epsilon", "seed", "pre_switch_mean", "final_mean"});
  for (const auto& run : runs) {
    const int n = static_cast<int>(run.rewards.size());
    const int pre_end = std::clamp(spec.switch_step, 0, n);
    csv.cell(method_name(run.method)).cell(run.setting.alpha).cell(run.setting.epsilon)
        .cell(std::to_string(run.seed));
    if (pre_end > 0) {
      csv.cell(mean_reward(run.rewards, 0, pre_end));
    } else {
      csv.cell("");
    }
    csv.cell(mean_reward(run.rewards, std::max(0, n - tail), n));
    csv.end_row();
  }
}

// ---- switch bandit

const char* beta_policy_name(BetaPolicy p) {
  switch (p) {
    case BetaPolicy::constant: return "constant";
    case BetaPolicy::conservative: return "conservative";
    case BetaPolicy::pessimistic: return "pessimistic";
    case BetaPolicy::scheduled: return "scheduled";
  }
  return "?";
}

BetaPolicy parse_beta_policy(const std::string& name) {
  for (BetaPolicy p : {BetaPolicy::constant, BetaPolicy::conservative, BetaPolicy::pessimistic,
                       BetaPolicy::scheduled}) {
    if (name == beta_policy_name(p)) return p;
  }
  throw std::invalid_argument("unknown bandit policy '" + name + "'");
}

double BanditTrace::cumulative() const {
  double sum = 0.0;
  for (double r : reward) sum += r;
  return sum;
}

double ramp_beta(const BanditRunConfig& cfg, int length, int t) {
  double frac = 0.0;
  if (length <= 0) {
    frac = t >= cfg.ramp_start ? 1.0 : 0.0;
  } else {
    frac = std::clamp(static_cast<double>(t - cfg.ramp_start) / length, 0.0, 1.0);
  }
  return cfg.beta_start + (cfg.beta_end - cfg.beta_start) * frac;
}

BanditTrace run_bandit(const BanditRunConfig& cfg, BetaPolicy policy, std::uint64_t seed) {
  for (double b : {cfg.beta_constant, cfg.beta_start, cfg.beta_end}) {
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("beta values must lie in [0,1]");
  }
  const auto mdp = make_switch_bandit(cfg.env);
  const int T = cfg.env.total_time;
  BanditTrace trace;
  trace.beta.resize(static_cast<std::size_t>(T));

  if (policy == BetaPolicy::scheduled) {
    const auto schedule = schedule_from_blocks(cfg.schedule, T);
    StateActionTable w(1, 2);
    w(0, 0) = cfg.beta_start;
    w(0, 1) = 1.0 - cfg.beta_start;
    ForlOptions options;
    options.initial_policy = TabularPolicy::from_weights(std::move(w));
    options.record_policies = true;
    Rng rng(seed);
    const auto run = run_forl(mdp, schedule, {Basis::identity(), cfg.window},
                              {cfg.eta, cfg.tau, cfg.env.discount}, QSource::oracle, rng, options);
    for (std::size_t t = 0; t < trace.beta.size(); ++t) trace.beta[t] = run.policies[t](0, 0);
  } else {
    for (int t = 0; t < T; ++t) {
      double b = cfg.beta_constant;
      if (policy == BetaPolicy::conservative) b = ramp_beta(cfg, cfg.fast_ramp, t);
      if (policy == BetaPolicy::pessimistic) b = ramp_beta(cfg, cfg.slow_ramp, t);
      trace.beta[static_cast<std::size_t>(t)] = b;
    }
  }
  trace.reward.resize(trace.beta.size());
  for (int t = 0; t < T; ++t) {
    const double b = trace.beta[static_cast<std::size_t>(t)];
    trace.reward[static_cast<std::size_t>(t)] =
        b * mdp.reward(t, 0, 0) + (1.0 - b) * mdp.reward(t, 0, 1);
  }
  return trace;
}

void write_bandit_csv(std::ostream& out, const BanditTrace& trace, std::uint64_t seed,
                      const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash, {"t", "beta", "reward"});
  for (std::size_t t = 0; t < trace.beta.size(); ++t) {
    csv.cell(t).cell(trace.beta[t]).cell(trace.reward[t]);
    csv.end_row();
  }
}

// ---- scheduled runs

RegretBound regret_bound_for(const TimeVaryingTabularMDP& mdp, const UpdateSchedule& schedule,
                             const RegretTrace& trace, double eta, double tau) {
  if (trace.intervals.size() != schedule.entries.size()) {
    throw std::invalid_argument("trace intervals do not match the schedule");
  }
  std::vector<BoundConstants> constants;
  std::vector<double> delta;
  std::vector<IntervalBudgets> budgets;
  for (const auto& rec : trace.intervals) {
    constants.push_back(constants_from(mdp, rec.entry.t, rec.start_policy, eta, tau));
    delta.push_back(rec.delta_f);
    budgets.push_back(interval_budgets(mdp, rec.entry));
  }
  return total_regret_bound(constants, schedule, delta, budgets);
}

ScheduleOutcome run_schedule_experiment(const TimeVaryingTabularMDP& mdp,
                                        const UpdateSchedule& schedule,
                                        const ForecastConfig& forecast, const NpgConfig& npg,
                                        QSource mode, std::uint64_t seed,
                                        const ForlOptions& options) {
  Rng rng(seed);
  ScheduleOutcome out;
  out.trace = run_forl(mdp, schedule, forecast, npg, mode, rng, options);
  out.parts = decompose_regret(out.trace, schedule);
  out.bound = regret_bound_for(mdp, schedule, out.trace, npg.eta, npg.tau);
  out.measured = dynamic_regret(out.trace);
  return out;
}

void write_bounds_comparison_csv(std::ostream& out, const ScheduleOutcome& outcome,
                                 const UpdateSchedule& schedule, std::uint64_t seed,
                                 const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash,
                {"m", "t_m", "G_m", "N_m", "measured_regret", "bound_pi", "bound_f", "bound_env",
                 "bound_total"});
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const auto& e = schedule.entries[i];
    const auto& p = outcome.parts[i];
    const auto& b = outcome.bound.intervals[i];
    csv.cell(i + 1).cell(e.t).cell(e.updates).cell(e.holds)
        .cell(p.update_regret + p.hold_regret).cell(b.r_pi).cell(b.r_f).cell(b.r_env)
        .cell(b.total());
    csv.end_row();
  }
}

}  // namespace pauserl
