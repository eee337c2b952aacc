#include "pauserl/scheduler.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "pauserl/csv.hpp"

namespace pauserl {

namespace {

// Exact optima per timeline segment, computed on first use.
class OptimumCache {
 public:
  explicit OptimumCache(const TimeVaryingTabularMDP& mdp) : mdp_(mdp) {}

  const Optimum& at(int t) {
    const std::size_t seg = mdp_.segment_at(t);
    auto it = cache_.find(seg);
    if (it == cache_.end()) it = cache_.emplace(seg, optimal_values(mdp_, t)).first;
    return it->second;
  }

 private:
  const TimeVaryingTabularMDP& mdp_;
  std::map<std::size_t, Optimum> cache_;
};

}  // namespace

RegretTrace run_forl(const TimeVaryingTabularMDP& mdp, const UpdateSchedule& schedule,
                     const ForecastConfig& forecast, const NpgConfig& npg, QSource mode,
                     Rng& rng, const ForlOptions& options) {
  if (const auto check = validate_schedule(schedule, mdp.total_time()); !check) {
    throw std::invalid_argument("invalid schedule: " + check.reason);
  }
  npg.validate();
  if (npg.gamma != mdp.discount()) {
    throw std::invalid_argument("npg discount differs from the MDP discount");
  }
  if (forecast.window == 0) throw std::invalid_argument("forecast window must be positive");

  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  TabularPolicy policy = options.initial_policy.value_or(TabularPolicy::uniform(S, A));
  if (policy.num_states() != S || policy.num_actions() != A) {
    throw std::invalid_argument("initial policy shape does not match the MDP");
  }
  const QLearnConfig qcfg{options.q_step_size, 0.0, mdp.discount()};
  if (mode == QSource::empirical) qcfg.validate();

  OptimumCache optima(mdp);
  QTable q_hat(S, A);
  std::vector<QSnapshot> history;
  QTable q_forecast(S, A);
  RegretTrace trace;
  const auto& entries = schedule.entries;
  std::size_t next_entry = 0;

  auto open_intervals_at = [&](int t) {
    while (next_entry < entries.size() && entries[next_entry].t == t) {
      const ScheduleEntry& e = entries[next_entry];
      double delta = 0.0;
      if (e.updates + e.holds > 0) {
        const std::size_t avail = std::min(history.size(), forecast.window);
        const auto model = fit_forecaster(history, effective_basis(forecast.basis, avail), avail);
        q_forecast = forecast_q(model, static_cast<double>(e.end()));
        delta = max_abs_diff(q_forecast, optima.at(e.end()).q);
      }
      trace.intervals.push_back({next_entry + 1, e, delta, policy});
      ++next_entry;
    }
  };

  for (int t = 0; t < schedule.end(); ++t) {
    const Optimum& opt = optima.at(t);
    history.push_back({t, mode == QSource::oracle ? opt.q : q_hat});
    if (history.size() > forecast.window) history.erase(history.begin());
    open_intervals_at(t);

    const TickLabel label = label_tick(schedule, t);
    const double v_star = initial_value(mdp, opt.v);
    const double v_pi = initial_value(mdp, exact_evaluate(mdp, t, policy).v);
    trace.ticks.push_back({t, label.m, label.phase, v_star, v_pi, policy.fingerprint()});
    if (options.record_policies) trace.policies.push_back(policy);

    const Trajectory traj = rollout(mdp, t, policy, rng);
    if (mode == QSource::empirical) {
      for (std::size_t h = 0; h < traj.size(); ++h) {
        apply_q_learning_step(q_hat, traj[h], qcfg, h + 1 == traj.size());
      }
    }
    if (label.phase == Phase::update) policy = npg_entropy_update(policy, q_forecast, npg);
  }
  open_intervals_at(schedule.end());
  return trace;
}

double dynamic_regret(const RegretTrace& trace) {
  double total = 0.0;
  for (const auto& tick : trace.ticks) total += tick.regret();
  return total;
}

std::vector<RegretComponents> decompose_regret(const RegretTrace& trace,
                                               const UpdateSchedule& schedule) {
  std::vector<RegretComponents> out;
  out.reserve(schedule.entries.size());
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) out.push_back({i + 1, 0.0, 0.0});
  for (const auto& tick : trace.ticks) {
    TickLabel label{};
    try {
      label = label_tick(schedule, tick.t);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("trace tick " + std::to_string(tick.t) +
                                  " lies outside the schedule");
    }
    if (label.m != tick.m || label.phase != tick.phase) {
      throw std::invalid_argument("trace tick " + std::to_string(tick.t) +
                                  " is labeled differently from the schedule");
    }
    auto& c = out[label.m - 1];
    (label.phase == Phase::update ? c.update_regret : c.hold_regret) += tick.regret();
  }
  return out;
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace, std::uint64_t seed,
                     const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash, {"t", "m", "phase", "v_star", "v_pi", "inst_regret"});
  for (const auto& tick : trace.ticks) {
    csv.cell(tick.t).cell(tick.m).cell(phase_name(tick.phase)).cell(tick.v_star).cell(tick.v_pi)
        .cell(tick.regret());
    csv.end_row();
  }
}

void write_interval_csv(std::ostream& out, const RegretTrace& trace,
                        const UpdateSchedule& schedule, std::uint64_t seed,
                        const std::string& config_hash) {
  const auto parts = decompose_regret(trace, schedule);
  CsvWriter csv(out, seed, config_hash,
                {"m", "t_m", "G_m", "N_m", "update_regret", "hold_regret", "delta_f_measured"});
  for (const auto& rec : trace.intervals) {
    const auto& c = parts.at(rec.m - 1);
    csv.cell(rec.m).cell(rec.entry.t).cell(rec.entry.updates).cell(rec.entry.holds)
        .cell(c.update_regret).cell(c.hold_regret).cell(rec.delta_f);
    csv.end_row();
  }
}

}  // namespace pauserl
