#include "pauserl/verify.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pauserl/bounds.hpp"
#include "pauserl/csv.hpp"
#include "pauserl/environments.hpp"
#include "pauserl/experiments.hpp"
#include "pauserl/forecast.hpp"

namespace pauserl {

namespace {

enum SuiteId : std::uint64_t { kGapSuite = 1, kForecastSuite = 2, kRegretSuite = 3 };

std::uint64_t instance_seed(std::uint64_t master, SuiteId suite, std::size_t i) {
  return derive_seed(derive_seed(master, suite), i);
}

CheckRecord make_record(const VerifyOptions& opt, std::string check, std::size_t instance,
                        std::uint64_t seed, double measured, double bound) {
  const double scaled = bound * opt.bound_scale;
  const double margin = scaled + opt.slack - measured;
  return {std::move(check), instance, seed, measured, scaled, margin, margin >= 0.0};
}

DriftTarget random_target(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return DriftTarget::reward;
    case 1: return DriftTarget::transition;
    default: return DriftTarget::both;
  }
}

std::vector<DriftEvent> random_plan(Rng& rng, int total_time, std::size_t count, double max_mag) {
  std::vector<DriftEvent> plan;
  for (std::size_t k = 0; k < count; ++k) {
    const int time = static_cast<int>(rng.below(static_cast<std::size_t>(total_time)));
    plan.push_back({time, rng.uniform(0.0, max_mag), random_target(rng)});
  }
  return plan;
}

double random_discount(Rng& rng) { return rng.below(2) == 0 ? 0.5 : 0.9; }

TabularPolicy random_policy(Rng& rng, std::size_t states, std::size_t actions) {
  StateActionTable w(states, actions);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) w(s, a) = 0.01 + rng.uniform();
  }
  return TabularPolicy::from_weights(std::move(w));
}

template <class F>
std::vector<CheckRecord> fan_out(std::size_t n, unsigned workers, F&& per_instance) {
  std::vector<std::vector<CheckRecord>> slots(n);
  parallel_for(n, workers, [&](std::size_t i) { slots[i] = per_instance(i); });
  std::vector<CheckRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

void VerifyOptions::validate() const {
  if (!run_gap && !run_forecast && !run_regret) throw std::invalid_argument("no suite selected");
  if ((run_gap && gap_instances == 0) || (run_forecast && forecast_instances == 0) ||
      (run_regret && regret_instances == 0)) {
    throw std::invalid_argument("instance count must be positive for every selected suite");
  }
  if (!(slack >= 0.0)) throw std::invalid_argument("slack must be nonnegative");
  if (!(weight_cap > 0.0)) throw std::invalid_argument("weight cap must be positive");
  if (!(bound_scale > 0.0)) throw std::invalid_argument("bound scale must be positive");
}

std::vector<CheckRecord> gap_suite(const VerifyOptions& opt) {
  return fan_out(opt.gap_instances, opt.workers, [&](std::size_t i) {
    const std::uint64_t seed = instance_seed(opt.seed, kGapSuite, i);
    Rng rng(seed);
    DriftMdpSpec spec;
    spec.num_states = 1 + rng.below(4);
    spec.num_actions = 1 + rng.below(3);
    spec.horizon = 1 + static_cast<int>(rng.below(4));
    spec.discount = random_discount(rng);
    spec.total_time = 1 + static_cast<int>(rng.below(8));
    spec.seed = rng.next();
    spec.plan = random_plan(rng, spec.total_time, 1 + rng.below(3), 1.0);
    const auto mdp = make_drift_mdp(spec);
    const int t1 = static_cast<int>(rng.below(static_cast<std::size_t>(spec.total_time)));
    const auto span = static_cast<std::size_t>(spec.total_time - t1);
    const int t2 = t1 + 1 + static_cast<int>(rng.below(span));
    const TabularPolicy pi = random_policy(rng, spec.num_states, spec.num_actions);

    const auto rep = local_budget(mdp, t1, t2);
    const BudgetPair b{rep.b_r, rep.b_p};
    const double g = mdp.discount();
    const int H = mdp.horizon();
    const double r_max = mdp.r_max();

    std::vector<CheckRecord> out;
    const auto q1 = optimal_q_by_step(mdp, t1);
    const auto q2 = optimal_q_by_step(mdp, t2);
    for (int h = 0; h < H; ++h) {
      const auto k = static_cast<std::size_t>(h);
      out.push_back(make_record(opt, "optimal_q_gap_h" + std::to_string(h), i, seed,
                                max_abs_diff(q1[k], q2[k]),
                                optimal_q_gap_bound(b, g, H, r_max, h)));
    }
    out.push_back(make_record(opt, "optimal_v_gap", i, seed,
                              max_abs_diff(optimal_values(mdp, t1).v, optimal_values(mdp, t2).v),
                              optimal_v_gap_bound(b, g, H, r_max)));
    out.push_back(make_record(opt, "same_policy_v_gap", i, seed,
                              max_abs_diff(exact_evaluate(mdp, t1, pi).v,
                                           exact_evaluate(mdp, t2, pi).v),
                              same_policy_v_gap_bound(b, g, H, r_max)));
    return out;
  });
}

std::vector<CheckRecord> forecast_suite(const VerifyOptions& opt) {
  return fan_out(opt.forecast_instances, opt.workers, [&](std::size_t i) {
    const std::uint64_t seed = instance_seed(opt.seed, kForecastSuite, i);
    Rng rng(seed);
    DriftMdpSpec spec;
    spec.num_states = 1 + rng.below(3);
    spec.num_actions = 1 + rng.below(3);
    spec.horizon = 1 + static_cast<int>(rng.below(4));
    spec.discount = random_discount(rng);
    spec.total_time = 40;
    spec.seed = rng.next();
    spec.plan = random_plan(rng, spec.total_time, 1 + rng.below(6), 0.5);
    const auto mdp = make_drift_mdp(spec);

    // Redraw the window, basis and horizon until the weight norm respects the cap.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const std::size_t window = 2 + rng.below(5);
      const std::size_t kind = rng.below(window >= 3 ? 3 : 2);
      const Basis basis = kind == 0 ? Basis::identity()
                          : kind == 1 ? Basis::constant()
                                      : Basis::polynomial(2);
      const int lead = 1 + static_cast<int>(rng.below(5));
      const int lo = static_cast<int>(window) - 1;
      const int hi = spec.total_time - lead;
      const int t_m = lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
      const int target = t_m + lead;

      std::vector<int> times;
      for (int t = t_m - lo; t <= t_m; ++t) times.push_back(t);
      const auto w = forecast_weights(times, basis, target);
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > opt.weight_cap) continue;

      std::vector<QSnapshot> history;
      ForecastErrorInputs in{norm, window, {}, {}, mdp.discount(), mdp.horizon(),
                             mdp.r_max()};
      for (int t : times) {
        history.push_back({t, optimal_values(mdp, t).q});
        in.u.push_back(compute_u(mdp, t, target));
        in.eps.push_back(0.0);
      }
      const auto model = fit_forecaster(history, basis, window);
      const double measured = max_abs_diff(forecast_q(model, target), optimal_values(mdp, target).q);
      return std::vector<CheckRecord>{
          make_record(opt, "forecast_error", i, seed, measured, forecast_error_bound(in))};
    }
    throw std::runtime_error("forecast instance " + std::to_string(i) +
                             ": no draw met the weight cap");
  });
}

std::vector<CheckRecord> regret_suite(const VerifyOptions& opt) {
  return fan_out(opt.regret_instances, opt.workers, [&](std::size_t i) {
    const std::uint64_t seed = instance_seed(opt.seed, kRegretSuite, i);
    Rng rng(seed);
    DriftMdpSpec spec;
    spec.num_states = 2 + rng.below(2);
    spec.num_actions = 2 + rng.below(2);
    spec.horizon = 2 + static_cast<int>(rng.below(3));
    spec.discount = random_discount(rng);
    spec.total_time = 50 + static_cast<int>(rng.below(151));
    spec.seed = rng.next();
    spec.plan = random_plan(rng, spec.total_time, 1 + rng.below(4), 0.5);
    const auto mdp = make_drift_mdp(spec);

    static constexpr int kBlocks[] = {5, 10, 20};
    const int block = kBlocks[rng.below(3)];
    const double fraction = 0.2 * static_cast<double>(1 + rng.below(5));
    const auto schedule = schedule_from_blocks({block, fraction}, spec.total_time);
    const double tau = 0.1;
    const double eta = rng.uniform(0.1, 1.0) * (1.0 - spec.discount) / tau;
    const auto outcome = run_schedule_experiment(mdp, schedule, {Basis::identity(), 5},
                                                 {eta, tau, spec.discount}, QSource::oracle,
                                                 rng.next());
    return std::vector<CheckRecord>{
        make_record(opt, "dynamic_regret", i, seed, outcome.measured, outcome.bound.total)};
  });
}

std::vector<CheckRecord> run_verification(const VerifyOptions& opt) {
  opt.validate();
  std::vector<CheckRecord> out;
  auto append = [&out](std::vector<CheckRecord> part) {
    out.insert(out.end(), part.begin(), part.end());
  };
  if (opt.run_gap) append(gap_suite(opt));
  if (opt.run_forecast) append(forecast_suite(opt));
  if (opt.run_regret) append(regret_suite(opt));
  return out;
}

void write_verify_csv(std::ostream& out, const std::vector<CheckRecord>& records,
                      std::uint64_t seed, const std::string& config_hash) {
  CsvWriter csv(out, seed, config_hash,
                {"check", "instance", "seed", "measured", "bound", "margin", "ok"});
  for (const auto& r : records) {
    csv.cell(r.check).cell(r.instance).cell(std::to_string(r.seed)).cell(r.measured)
        .cell(r.bound).cell(r.margin).cell(r.ok ? 1 : 0);
    csv.end_row();
  }
}

}  // namespace pauserl
