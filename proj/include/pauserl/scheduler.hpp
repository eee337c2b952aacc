#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pauserl/forecast.hpp"
#include "pauserl/learner.hpp"
#include "pauserl/mdp.hpp"
#include "pauserl/rng.hpp"
#include "pauserl/schedule.hpp"

namespace pauserl {

enum class QSource { oracle, empirical };

struct ForecastConfig {
  Basis basis = Basis::identity();
  std::size_t window = 10;  // l_p
};

struct ForlOptions {
  std::optional<TabularPolicy> initial_policy;  // uniform when unset
  double q_step_size = 0.1;                     // Q-learning step size in empirical mode
  bool record_policies = false;                 // keep pi_t for every tick
};

struct TickRecord {
  int t;
  std::size_t m;
  Phase phase;
  double v_star;
  double v_pi;
  std::uint64_t policy_fingerprint;

  double regret() const { return v_star - v_pi; }
};

struct IntervalRecord {
  std::size_t m;
  ScheduleEntry entry;
  double delta_f;             // ||Q~_{t_{m+1}|t_m} - Q*_{t_{m+1}}||_inf
  TabularPolicy start_policy; // pi_{t_m}
};

struct RegretTrace {
  std::vector<TickRecord> ticks;
  std::vector<IntervalRecord> intervals;
  std::vector<TabularPolicy> policies;  // filled when record_policies is set
};

// Runs the schedule on the MDP: one trajectory per tick, forecast of the
// next interval start at each t_m, one NPG step per update tick, frozen policy
// during hold ticks. V* and V^pi come from exact DP at each tick.
RegretTrace run_forl(const TimeVaryingTabularMDP& mdp, const UpdateSchedule& schedule,
                     const ForecastConfig& forecast, const NpgConfig& npg, QSource mode,
                     Rng& rng, const ForlOptions& options = {});

double dynamic_regret(const RegretTrace& trace);

struct RegretComponents {
  std::size_t m;
  double update_regret;
  double hold_regret;
};

std::vector<RegretComponents> decompose_regret(const RegretTrace& trace,
                                               const UpdateSchedule& schedule);

void write_trace_csv(std::ostream& out, const RegretTrace& trace, std::uint64_t seed,
                     const std::string& config_hash);
void write_interval_csv(std::ostream& out, const RegretTrace& trace,
                        const UpdateSchedule& schedule, std::uint64_t seed,
                        const std::string& config_hash);

}  // namespace pauserl
