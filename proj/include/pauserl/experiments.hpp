#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pauserl/bounds.hpp"
#include "pauserl/environments.hpp"
#include "pauserl/forecast.hpp"
#include "pauserl/scheduler.hpp"

namespace pauserl {

// Runs fn(0..n-1) on up to `workers` threads. Each index writes only its own
// output slot; the first exception is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// ---- cliffworld

enum class CliffMethod { reactive, forecast };

const char* method_name(CliffMethod m);
CliffMethod parse_method(const std::string& name);

struct CliffAgentConfig {
  double alpha = 0.1;    // Q-learning step size
  double epsilon = 0.1;  // exploration rate
  // Forecast method only: every snapshot_every steps the current Q estimate is
  // stored, the last `window` stores are fitted against time, and the agent
  // acts on the fitted table extrapolated `lookahead` steps ahead until the
  // next snapshot.
  int snapshot_every = 500;
  std::size_t window = 10;
  int lookahead = 500;
  Basis basis = Basis::identity();

  void validate() const;
};

struct CliffRun {
  std::vector<double> rewards;  // one per environment step
  QTable q;                     // final Q-learning estimate
};

CliffRun run_cliffworld(const CliffworldSpec& spec, CliffMethod method,
                        const CliffAgentConfig& agent, std::uint64_t seed);

struct CliffSetting {
  double alpha;
  double epsilon;
};

// The six (alpha, epsilon) settings of the reference experiments.
std::vector<CliffSetting> default_cliff_settings();

struct CliffGridRun {
  CliffMethod method;
  CliffSetting setting;
  std::uint64_t seed;  // stream seed of this run
  std::vector<double> rewards;
};

// Runs every method on every (setting, repetition). Repetition r of setting i
// uses derive_seed(master_seed, i * repetitions + r) for all methods, so the
// methods are compared on paired streams.
std::vector<CliffGridRun> run_cliffworld_grid(const CliffworldSpec& spec,
                                              const std::vector<CliffMethod>& methods,
                                              const CliffAgentConfig& agent,
                                              const std::vector<CliffSetting>& settings,
                                              std::size_t repetitions, std::uint64_t master_seed,
                                              unsigned workers);

// Mean of rewards[from, to).
double mean_reward(const std::vector<double>& rewards, int from, int to);

void write_cliffworld_csv(std::ostream& out, const std::vector<CliffGridRun>& runs,
                          std::uint64_t seed, const std::string& config_hash);

// Per run: mean reward before the switch and over the final `tail` steps.
void write_cliffworld_summary_csv(std::ostream& out, const std::vector<CliffGridRun>& runs,
                                  const CliffworldSpec& spec, int tail, std::uint64_t seed,
                                  const std::string& config_hash);

// ---- switch bandit
//
// beta_t = pi_t(a0). Rewards are expected rewards under pi_t.

enum class BetaPolicy { constant, conservative, pessimistic, scheduled };

const char* beta_policy_name(BetaPolicy p);
BetaPolicy parse_beta_policy(const std::string& name);

struct BanditRunConfig {
  SwitchBanditSpec env;
  double beta_constant = 1.0;
  double beta_start = 0.0;
  double beta_end = 1.0;
  int ramp_start = 0;
  int fast_ramp = 10;   // conservative: ticks to move from beta_start to beta_end
  int slow_ramp = 100;  // pessimistic
  SchedulePolicyParams schedule{10, 0.5};
  double eta = 1.0;
  double tau = 0.1;
  std::size_t window = 10;
};

struct BanditTrace {
  std::vector<double> beta;
  std::vector<double> reward;

  double cumulative() const;
};

// Linear ramp from beta_start to beta_end over [ramp_start, ramp_start + length].
double ramp_beta(const BanditRunConfig& cfg, int length, int t);

BanditTrace run_bandit(const BanditRunConfig& cfg, BetaPolicy policy, std::uint64_t seed);

void write_bandit_csv(std::ostream& out, const BanditTrace& trace, std::uint64_t seed,
                      const std::string& config_hash);

// ---- scheduled runs

struct ScheduleOutcome {
  RegretTrace trace;
  std::vector<RegretComponents> parts;
  RegretBound bound;
  double measured;
};

// Per interval: constants_from at t_m with the interval's start policy, the
// measured forecast error, and cumulative budgets of both phases.
RegretBound regret_bound_for(const TimeVaryingTabularMDP& mdp, const UpdateSchedule& schedule,
                             const RegretTrace& trace, double eta, double tau);

ScheduleOutcome run_schedule_experiment(const TimeVaryingTabularMDP& mdp,
                                        const UpdateSchedule& schedule,
                                        const ForecastConfig& forecast, const NpgConfig& npg,
                                        QSource mode, std::uint64_t seed,
                                        const ForlOptions& options = {});

void write_bounds_comparison_csv(std::ostream& out, const ScheduleOutcome& outcome,
                                 const UpdateSchedule& schedule, std::uint64_t seed,
                                 const std::string& config_hash);

}  // namespace pauserl
