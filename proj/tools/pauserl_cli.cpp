// pauserl command-line harness.
//
//   pauserl <run-cliffworld|run-bandit|run-schedule|bounds|verify> [--config f] [--seed n]
//           [--out dir] [--method reactive|forecast] [--step-reward r] [--workers n]
//
// Exit codes: 0 success, 1 verification failure, 2 bad arguments or config.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pauserl/bounds.hpp"
#include "pauserl/config.hpp"
#include "pauserl/csv.hpp"
#include "pauserl/environments.hpp"
#include "pauserl/experiments.hpp"
#include "pauserl/mdp_io.hpp"
#include "pauserl/scheduler.hpp"
#include "pauserl/verify.hpp"

namespace fs = std::filesystem;
using namespace pauserl;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::string> method;
  std::optional<double> step_reward;
  unsigned workers = 1;
};

struct Context {
  Config cfg;
  std::uint64_t seed = 0;
  std::string hash;
  fs::path out;
  unsigned workers = 1;

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    return f;
  }
};

const std::set<std::string> kCommon = {"seed"};

const std::set<std::string> kCliffKeys = {
    "env.success_reward", "env.failure_reward", "env.step_reward", "env.switch_step",
    "env.total_steps", "env.max_episode_steps", "env.first_goal", "env.discount",
    "agent.alpha", "agent.epsilon", "agent.settings", "agent.repetitions",
    "agent.snapshot_every", "agent.window", "agent.lookahead", "agent.basis",
    "methods", "summary.tail"};

const std::set<std::string> kBanditKeys = {
    "bandit.total_time", "bandit.switch_time", "bandit.discount", "bandit.policies",
    "bandit.beta", "bandit.beta_start", "bandit.beta_end", "bandit.ramp_start",
    "bandit.fast_ramp", "bandit.slow_ramp", "schedule.block_length",
    "schedule.update_fraction", "npg.eta", "npg.tau", "forecast.window"};

const std::set<std::string> kScheduleKeys = {
    "env.kind", "env.file", "env.states", "env.actions", "env.horizon", "env.discount",
    "env.total_time", "env.r_max", "env.seed", "env.drift_times", "env.drift_magnitudes",
    "env.drift_target", "env.switch_time", "schedule.entries", "schedule.block_length",
    "schedule.update_fractions", "npg.eta", "npg.tau", "forecast.basis", "forecast.window",
    "mode", "q.step_size"};

const std::set<std::string> kBoundsKeys = {
    "bounds.parameter", "bounds.values", "bounds.objective", "split.delta", "split.alpha1",
    "split.alpha2", "split.b1max", "split.b2max", "split.c1", "split.c4_plus_c5", "split.eta",
    "split.tau"};

const std::set<std::string> kVerifyKeys = {
    "verify.suites", "verify.gap_instances", "verify.forecast_instances",
    "verify.regret_instances", "verify.slack", "verify.weight_cap", "verify.bound_scale"};

std::set<std::string> allowed(const std::set<std::string>& keys) {
  std::set<std::string> out = kCommon;
  out.insert(keys.begin(), keys.end());
  return out;
}

int positive_int(const Config& cfg, const std::string& key, long long fallback) {
  const long long v = cfg.get_int(key, fallback);
  if (v < 1 || v > 100000000) throw std::invalid_argument(key + " must be a positive integer");
  return static_cast<int>(v);
}

Basis parse_basis(const std::string& name) {
  if (name == "identity") return Basis::identity();
  if (name == "constant") return Basis::constant();
  if (name.rfind("poly", 0) == 0) {
    const long long d = parse_int(name.substr(4), "basis degree");
    if (d < 0 || d > 8) throw std::invalid_argument("polynomial degree must lie in [0, 8]");
    return Basis::polynomial(static_cast<int>(d));
  }
  throw std::invalid_argument("unknown basis '" + name + "' (identity, constant, polyN)");
}

// ---- run-cliffworld

int cmd_run_cliffworld(const Context& ctx, const Invocation& inv) {
  const Config& cfg = ctx.cfg;
  CliffworldSpec spec;
  spec.success_reward = cfg.get_double("env.success_reward", spec.success_reward);
  spec.failure_reward = cfg.get_double("env.failure_reward", spec.failure_reward);
  spec.step_reward = cfg.get_double("env.step_reward", spec.step_reward);
  spec.switch_step = static_cast<int>(cfg.get_int("env.switch_step", spec.switch_step));
  spec.total_steps = positive_int(cfg, "env.total_steps", spec.total_steps);
  spec.max_episode_steps = positive_int(cfg, "env.max_episode_steps", spec.max_episode_steps);
  spec.first_goal = static_cast<int>(cfg.get_int("env.first_goal", spec.first_goal));
  spec.discount = cfg.get_double("env.discount", spec.discount);
  spec.validate();

  CliffAgentConfig agent;
  agent.snapshot_every = positive_int(cfg, "agent.snapshot_every", agent.snapshot_every);
  agent.window = static_cast<std::size_t>(positive_int(cfg, "agent.window", 10));
  agent.lookahead = static_cast<int>(cfg.get_int("agent.lookahead", agent.lookahead));
  agent.basis = parse_basis(cfg.get_string("agent.basis", "identity"));

  std::vector<CliffSetting> settings = default_cliff_settings();
  if (cfg.has("agent.settings")) {
    settings.clear();
    for (const auto& item : cfg.get_strings("agent.settings", {})) {
      const auto parts = split_list(item, ':');
      if (parts.size() != 2) throw std::invalid_argument("agent.settings items are alpha:epsilon");
      settings.push_back({parse_double(parts[0], "alpha"), parse_double(parts[1], "epsilon")});
    }
  } else if (cfg.has("agent.alpha") || cfg.has("agent.epsilon")) {
    settings = {{cfg.get_double("agent.alpha", agent.alpha),
                 cfg.get_double("agent.epsilon", agent.epsilon)}};
  }
  const auto reps = static_cast<std::size_t>(positive_int(cfg, "agent.repetitions", 5));

  std::vector<CliffMethod> methods;
  for (const auto& name : cfg.get_strings("methods", {"reactive", "forecast"})) {
    methods.push_back(parse_method(name));
  }
  if (inv.method) methods = {parse_method(*inv.method)};

  const auto runs =
      run_cliffworld_grid(spec, methods, agent, settings, reps, ctx.seed, ctx.workers);
  const int tail = positive_int(cfg, "summary.tail", 4000);
  {
    auto f = ctx.open("cliffworld_rewards.csv");
    write_cliffworld_csv(f, runs, ctx.seed, ctx.hash);
  }
  {
    auto f = ctx.open("cliffworld_summary.csv");
    write_cliffworld_summary_csv(f, runs, spec, tail, ctx.seed, ctx.hash);
  }
  for (CliffMethod m : methods) {
    double final_sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : runs) {
      if (r.method != m) continue;
      const int n = static_cast<int>(r.rewards.size());
      final_sum += mean_reward(r.rewards, std::max(0, n - tail), n);
      ++count;
    }
    std::cout << method_name(m) << ": mean reward over the last " << tail
              << " steps = " << format_number(final_sum / static_cast<double>(count)) << "\n";
  }
  return 0;
}

// ---- run-bandit

int cmd_run_bandit(const Context& ctx, const Invocation&) {
  const Config& cfg = ctx.cfg;
  BanditRunConfig run;
  run.env.total_time = positive_int(cfg, "bandit.total_time", 100);
  run.env.switch_time =
      static_cast<int>(cfg.get_int("bandit.switch_time", run.env.total_time / 2));
  run.env.discount = cfg.get_double("bandit.discount", run.env.discount);
  run.beta_constant = cfg.get_double("bandit.beta", run.beta_constant);
  run.beta_start = cfg.get_double("bandit.beta_start", run.beta_start);
  run.beta_end = cfg.get_double("bandit.beta_end", run.beta_end);
  run.ramp_start = static_cast<int>(cfg.get_int("bandit.ramp_start", 0));
  run.fast_ramp = static_cast<int>(
      cfg.get_int("bandit.fast_ramp", std::max(1, run.env.total_time / 10)));
  run.slow_ramp = static_cast<int>(cfg.get_int("bandit.slow_ramp", run.env.total_time));
  run.schedule.block_length = positive_int(cfg, "schedule.block_length", 10);
  run.schedule.update_fraction = cfg.get_double("schedule.update_fraction", 0.5);
  run.eta = cfg.get_double("npg.eta", run.eta);
  run.tau = cfg.get_double("npg.tau", run.tau);
  run.window = static_cast<std::size_t>(positive_int(cfg, "forecast.window", 10));

  const auto names =
      cfg.get_strings("bandit.policies", {"conservative", "pessimistic", "scheduled"});
  std::vector<BetaPolicy> policies;
  for (const auto& n : names) policies.push_back(parse_beta_policy(n));
  std::vector<BanditTrace> traces(policies.size());
  parallel_for(policies.size(), ctx.workers, [&](std::size_t i) {
    traces[i] = run_bandit(run, policies[i], derive_seed(ctx.seed, i));
  });

  auto summary_file = ctx.open("bandit_summary.csv");
  CsvWriter summary(summary_file, ctx.seed, ctx.hash, {"policy", "cumulative_reward"});
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const std::string name = beta_policy_name(policies[i]);
    auto f = ctx.open("bandit_" + name + ".csv");
    write_bandit_csv(f, traces[i], ctx.seed, ctx.hash);
    summary.cell(name).cell(traces[i].cumulative());
    summary.end_row();
    std::cout << name << ": cumulative reward = " << format_number(traces[i].cumulative())
              << "\n";
  }
  return 0;
}

// ---- run-schedule

TimeVaryingTabularMDP schedule_environment(const Context& ctx) {
  const Config& cfg = ctx.cfg;
  const std::string kind = cfg.get_string("env.kind", "drift");
  if (kind == "file") {
    const std::string path = cfg.get_string("env.file", "");
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open timeline file '" + path + "'");
    return read_timeline(in);
  }
  if (kind == "bandit") {
    SwitchBanditSpec spec;
    spec.total_time = positive_int(cfg, "env.total_time", spec.total_time);
    spec.switch_time = static_cast<int>(cfg.get_int("env.switch_time", spec.total_time / 2));
    spec.discount = cfg.get_double("env.discount", spec.discount);
    return make_switch_bandit(spec);
  }
  if (kind != "drift") throw std::invalid_argument("env.kind must be drift, bandit or file");
  DriftMdpSpec spec;
  spec.num_states = static_cast<std::size_t>(positive_int(cfg, "env.states", 3));
  spec.num_actions = static_cast<std::size_t>(positive_int(cfg, "env.actions", 2));
  spec.horizon = positive_int(cfg, "env.horizon", spec.horizon);
  spec.discount = cfg.get_double("env.discount", spec.discount);
  spec.total_time = positive_int(cfg, "env.total_time", spec.total_time);
  spec.r_max = cfg.get_double("env.r_max", spec.r_max);
  spec.seed = cfg.get_u64("env.seed", derive_seed(ctx.seed, 0));
  const auto times = cfg.get_doubles("env.drift_times", {});
  const auto mags = cfg.get_doubles("env.drift_magnitudes", {});
  if (times.size() != mags.size()) {
    throw std::invalid_argument("env.drift_times and env.drift_magnitudes differ in length");
  }
  const std::string target = cfg.get_string("env.drift_target", "both");
  DriftTarget tgt = DriftTarget::both;
  if (target == "reward") {
    tgt = DriftTarget::reward;
  } else if (target == "transition") {
    tgt = DriftTarget::transition;
  } else if (target != "both") {
    throw std::invalid_argument("env.drift_target must be reward, transition or both");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    spec.plan.push_back({static_cast<int>(times[i]), mags[i], tgt});
  }
  return make_drift_mdp(spec);
}

UpdateSchedule parse_entries(const std::string& text) {
  UpdateSchedule s;
  for (const auto& item : split_list(text, ';')) {
    const auto parts = split_list(item, ':');
    if (parts.size() != 3) throw std::invalid_argument("schedule.entries items are t:G:N");
    s.entries.push_back({static_cast<int>(parse_int(parts[0], "t_m")),
                         static_cast<int>(parse_int(parts[1], "G_m")),
                         static_cast<int>(parse_int(parts[2], "N_m"))});
  }
  return s;
}

int cmd_run_schedule(const Context& ctx, const Invocation&) {
  const Config& cfg = ctx.cfg;
  const auto mdp = schedule_environment(ctx);
  const int T = mdp.total_time();

  struct Job {
    std::string label;
    double fraction;  // negative for explicit schedules
    UpdateSchedule schedule;
  };
  std::vector<Job> jobs;
  if (cfg.has("schedule.entries")) {
    auto s = parse_entries(cfg.get_string("schedule.entries", ""));
    if (const auto check = validate_schedule(s, T); !check) {
      throw std::invalid_argument("schedule.entries: " + check.reason);
    }
    jobs.push_back({"explicit", -1.0, std::move(s)});
  } else {
    const int block = positive_int(cfg, "schedule.block_length", 10);
    const auto fractions = cfg.get_doubles(
        "schedule.update_fractions", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    for (double f : fractions) {
      jobs.push_back({"gf" + format_number(f), f, schedule_from_blocks({block, f}, T)});
    }
  }

  const double eta = cfg.get_double("npg.eta", 0.5);
  const double tau = cfg.get_double("npg.tau", 0.1);
  const NpgConfig npg{eta, tau, mdp.discount()};
  npg.validate();
  const ForecastConfig forecast{parse_basis(cfg.get_string("forecast.basis", "identity")),
                                static_cast<std::size_t>(positive_int(cfg, "forecast.window", 10))};
  const std::string mode_name = cfg.get_string("mode", "oracle");
  if (mode_name != "oracle" && mode_name != "empirical") {
    throw std::invalid_argument("mode must be oracle or empirical");
  }
  const QSource mode = mode_name == "oracle" ? QSource::oracle : QSource::empirical;
  ForlOptions options;
  options.q_step_size = cfg.get_double("q.step_size", options.q_step_size);

  std::vector<ScheduleOutcome> outcomes(jobs.size());
  parallel_for(jobs.size(), ctx.workers, [&](std::size_t i) {
    outcomes[i] = run_schedule_experiment(mdp, jobs[i].schedule, forecast, npg, mode,
                                          derive_seed(ctx.seed, i + 1), options);
  });

  auto summary_file = ctx.open("schedule_summary.csv");
  CsvWriter summary(summary_file, ctx.seed, ctx.hash,
                    {"label", "update_fraction", "intervals", "measured_regret", "bound_total"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    const auto& out = outcomes[i];
    {
      auto f = ctx.open("trace_" + job.label + ".csv");
      write_trace_csv(f, out.trace, ctx.seed, ctx.hash);
    }
    {
      auto f = ctx.open("intervals_" + job.label + ".csv");
      write_interval_csv(f, out.trace, job.schedule, ctx.seed, ctx.hash);
    }
    {
      auto f = ctx.open("bounds_" + job.label + ".csv");
      write_bounds_comparison_csv(f, out, job.schedule, ctx.seed, ctx.hash);
    }
    summary.cell(job.label);
    if (job.fraction >= 0.0) {
      summary.cell(job.fraction);
    } else {
      summary.cell("");
    }
    summary.cell(job.schedule.entries.size()).cell(out.measured).cell(out.bound.total);
    summary.end_row();
    std::cout << job.label << ": dynamic regret = " << format_number(out.measured)
              << ", bound = " << format_number(out.bound.total) << "\n";
  }
  return 0;
}

// ---- bounds

SweepObjective parse_objective(const std::string& name) {
  if (name == "env") return SweepObjective::env_only;
  if (name == "total") return SweepObjective::env_plus_pi;
  throw std::invalid_argument("bounds.objective must be env or total");
}

int cmd_bounds(const Context& ctx, const Invocation&) {
  const Config& cfg = ctx.cfg;
  SplitProblem base{static_cast<int>(cfg.get_int("split.delta", 50)),
                    cfg.get_double("split.alpha1", 1.05),
                    cfg.get_double("split.alpha2", 1.05),
                    cfg.get_double("split.b1max", 1.0),
                    cfg.get_double("split.b2max", 1.0),
                    cfg.get_double("split.c1", 1.0),
                    cfg.get_double("split.c4_plus_c5", 1.0),
                    cfg.get_double("split.eta", 0.1),
                    cfg.get_double("split.tau", 1.0)};
  base.validate();

  std::vector<SweepSpec> specs;
  if (cfg.has("bounds.parameter")) {
    const auto values = cfg.get_doubles("bounds.values", {});
    if (values.empty()) throw std::invalid_argument("bounds.values is required with a parameter");
    specs.push_back({parse_objective(cfg.get_string("bounds.objective", "total")),
                     cfg.get_string("bounds.parameter", ""), values, base});
  } else {
    specs.push_back({SweepObjective::env_only, "alpha_ratio", {0.98, 0.99, 1.0, 1.01, 1.02}, base});
    specs.push_back({SweepObjective::env_only, "b_ratio", {0.94, 0.97, 1.0, 1.03, 1.06}, base});
    specs.push_back({SweepObjective::env_plus_pi, "dominant_ratio", {0.0, 0.86, 0.92, 0.95}, base});
    specs.push_back(
        {SweepObjective::env_plus_pi, "learning_rate", {0.01, 0.1, 0.3, 0.7, 0.99}, base});
  }

  std::vector<std::vector<SweepRow>> results(specs.size());
  parallel_for(specs.size(), ctx.workers, [&](std::size_t i) { results[i] = sweep(specs[i]); });

  auto argmin_file = ctx.open("argmin.csv");
  CsvWriter argmin(argmin_file, ctx.seed, ctx.hash,
                   {"param_name", "param_value", "objective", "G_star", "N_star", "bound_value"});
  for (std::size_t i = 0; i < specs.size(); ++i) {
    {
      auto f = ctx.open("sweep_" + specs[i].parameter + ".csv");
      write_sweep_csv(f, results[i], ctx.seed, ctx.hash);
    }
    for (const auto& row : results[i]) {
      if (!row.is_argmin) continue;
      const int delta = sweep_point(specs[i], row.param_value).problem.delta;
      argmin.cell(row.param_name).cell(row.param_value)
          .cell(specs[i].which == SweepObjective::env_only ? "env" : "total")
          .cell(delta - row.n).cell(row.n).cell(row.bound_value);
      argmin.end_row();
      std::cout << row.param_name << "=" << format_number(row.param_value)
                << ": N_star = " << row.n << "\n";
    }
  }

  const EnvSplit env = optimal_split_env(base);
  const TotalSplit total = optimal_split_total(base);
  auto split_file = ctx.open("split.csv");
  CsvWriter split(split_file, ctx.seed, ctx.hash,
                  {"objective", "G_star", "N_star", "value", "closed_form_n", "first_order_n"});
  auto opt_cell = [&split](const std::optional<double>& x) {
    if (x) {
      split.cell(*x);
    } else {
      split.cell("");
    }
  };
  split.cell("env").cell(env.g_star).cell(env.n_star).cell(env.objective);
  opt_cell(env.closed_form_n);
  opt_cell(env.first_order_n);
  split.end_row();
  split.cell("total").cell(total.g_star).cell(total.n_star).cell(total.objective).cell("").cell("");
  split.end_row();
  return 0;
}

// ---- verify

int cmd_verify(const Context& ctx, const Invocation&) {
  const Config& cfg = ctx.cfg;
  VerifyOptions opt;
  opt.seed = ctx.seed;
  opt.workers = ctx.workers;
  auto count = [&cfg](const std::string& key, std::size_t fallback) {
    const long long v = cfg.get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw std::invalid_argument(key + " must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  opt.gap_instances = count("verify.gap_instances", opt.gap_instances);
  opt.forecast_instances = count("verify.forecast_instances", opt.forecast_instances);
  opt.regret_instances = count("verify.regret_instances", opt.regret_instances);
  if (cfg.has("verify.suites")) {
    opt.run_gap = opt.run_forecast = opt.run_regret = false;
    for (const auto& s : cfg.get_strings("verify.suites", {})) {
      if (s == "gap") {
        opt.run_gap = true;
      } else if (s == "forecast") {
        opt.run_forecast = true;
      } else if (s == "regret") {
        opt.run_regret = true;
      } else {
        throw std::invalid_argument("unknown verify suite '" + s + "'");
      }
    }
  }
  opt.slack = cfg.get_double("verify.slack", opt.slack);
  opt.weight_cap = cfg.get_double("verify.weight_cap", opt.weight_cap);
  opt.bound_scale = cfg.get_double("verify.bound_scale", opt.bound_scale);
  opt.validate();

  const auto records = run_verification(opt);
  {
    auto f = ctx.open("verify_report.csv");
    write_verify_csv(f, records, ctx.seed, ctx.hash);
  }
  std::size_t failures = 0;
  std::map<std::string, std::pair<std::size_t, double>> per_check;  // count, worst margin
  for (const auto& r : records) {
    auto [it, fresh] = per_check.try_emplace(r.check.substr(0, r.check.find("_h")), 0, r.margin);
    ++it->second.first;
    it->second.second = std::min(it->second.second, r.margin);
    if (!r.ok) {
      ++failures;
      std::cerr << "violation: " << r.check << " instance " << r.instance << " seed " << r.seed
                << " measured " << format_number(r.measured) << " > bound "
                << format_number(r.bound) << "\n";
    }
  }
  for (const auto& [check, stats] : per_check) {
    std::cout << check << ": " << stats.first << " checks, worst margin "
              << format_number(stats.second) << "\n";
  }
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " violations")
            << "\n";
  return failures == 0 ? 0 : 1;
}

int dispatch(const Invocation& inv) {
  Context ctx;
  if (!inv.config_path.empty()) ctx.cfg = Config::parse_file(inv.config_path);

  const std::map<std::string, const std::set<std::string>*> keys = {
      {"run-cliffworld", &kCliffKeys}, {"run-bandit", &kBanditKeys},
      {"run-schedule", &kScheduleKeys}, {"bounds", &kBoundsKeys}, {"verify", &kVerifyKeys}};
  ctx.cfg.reject_unknown(allowed(*keys.at(inv.command)));
  if (inv.command != "run-cliffworld" && (inv.method || inv.step_reward)) {
    throw std::invalid_argument("--method and --step-reward apply to run-cliffworld only");
  }

  ctx.seed = inv.seed ? *inv.seed : ctx.cfg.get_u64("seed", 0);
  if (inv.step_reward) ctx.cfg.set("env.step_reward", format_number(*inv.step_reward));
  if (inv.method) ctx.cfg.set("methods", *inv.method);
  Config hashed = ctx.cfg;
  hashed.erase("seed");
  ctx.hash = hashed.hash();

  std::string out = inv.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("PAUSERL_OUT");
    out = env != nullptr && *env != '\0' ? env : "pauserl_out";
  }
  ctx.out = out;
  fs::create_directories(ctx.out);
  ctx.workers = inv.workers;

  if (inv.command == "run-cliffworld") return cmd_run_cliffworld(ctx, inv);
  if (inv.command == "run-bandit") return cmd_run_bandit(ctx, inv);
  if (inv.command == "run-schedule") return cmd_run_schedule(ctx, inv);
  if (inv.command == "bounds") return cmd_bounds(ctx, inv);
  return cmd_verify(ctx, inv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecasting online RL for non-stationary tabular MDPs"};
  app.require_subcommand(1);
  Invocation inv;
  double step_reward = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  for (const char* name : {"run-cliffworld", "run-bandit", "run-schedule", "bounds", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "key = value config file");
    sub->add_option("--seed", seed, "master seed (overrides the config's seed key)");
    sub->add_option("--out", inv.out_dir, "output directory (default $PAUSERL_OUT)");
    sub->add_option("--workers", inv.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    if (std::string(name) == "run-cliffworld") {
      sub->add_option("--method", method, "reactive or forecast")
          ->check(CLI::IsMember({"reactive", "forecast"}));
      sub->add_option("--step-reward", step_reward, "per-step reward");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  inv.command = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) inv.seed = seed;
  if (inv.command == "run-cliffworld") {
    if (sub->count("--method") > 0) inv.method = method;
    if (sub->count("--step-reward") > 0) inv.step_reward = step_reward;
  }
  try {
    return dispatch(inv);
  } catch (const std::exception& e) {
    std::cerr << "pauserl " << inv.command << ": " << e.what() << "\n";
    return 2;
  }
}
