#include "pauserl/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pauserl {

UpdateSchedule schedule_from_blocks(const SchedulePolicyParams& params, int total_time) {
  if (params.block_length < 1) throw std::invalid_argument("block length must be positive");
  if (!(params.update_fraction > 0.0 && params.update_fraction <= 1.0)) {
    throw std::invalid_argument("update fraction must lie in (0, 1]");
  }
  if (total_time < 1) throw std::invalid_argument("total time must be positive");
  const int updates = static_cast<int>(
      std::floor(static_cast<double>(params.block_length) * params.update_fraction + 1e-12));
  UpdateSchedule out;
  for (int t = 0; t < total_time; t += params.block_length) {
    const int len = std::min(params.block_length, total_time - t);
    const int g = std::min(updates, len);
    out.entries.push_back({t, g, len - g});
  }
  return out;
}

ScheduleCheck validate_schedule(const UpdateSchedule& schedule, int total_time) {
  const auto& e = schedule.entries;
  if (e.empty()) return {false, "schedule has no entries"};
  if (e.front().t != 0) return {false, "first interval must start at t = 0"};
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].updates < 0 || e[i].holds < 0) {
      return {false, "negative duration in interval " + std::to_string(i + 1)};
    }
    if (i + 1 < e.size() && e[i + 1].t != e[i].end()) {
      return {false, "interval " + std::to_string(i + 2) + " does not start where interval " +
                         std::to_string(i + 1) + " ends"};
    }
  }
  if (schedule.end() > total_time) return {false, "schedule runs past the total time"};
  return {true, ""};
}

const char* phase_name(Phase p) { return p == Phase::update ? "update" : "hold"; }

TickLabel label_tick(const UpdateSchedule& schedule, int t) {
  const auto& e = schedule.entries;
  auto it = std::upper_bound(e.begin(), e.end(), t,
                             [](int value, const ScheduleEntry& x) { return value < x.t; });
  // Several zero-length entries can share a start; the last one holding t wins.
  while (it != e.begin()) {
    --it;
    if (t < it->end()) {
      const int offset = t - it->t;
      const auto m = static_cast<std::size_t>(std::distance(e.begin(), it)) + 1;
      return {m, offset < it->updates ? Phase::update : Phase::hold, offset};
    }
    if (it->end() <= t && it->updates + it->holds > 0) break;
  }
  throw std::out_of_range("tick " + std::to_string(t) + " is not covered by the schedule");
}

}  // namespace pauserl
