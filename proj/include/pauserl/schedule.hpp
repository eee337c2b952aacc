#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pauserl {

// (t_m, G_m, N_m): G_m update ticks from t_m, then N_m hold ticks.
struct ScheduleEntry {
  int t;
  int updates;
  int holds;

  int end() const { return t + updates + holds; }
  bool operator==(const ScheduleEntry&) const = default;
};

struct UpdateSchedule {
  std::vector<ScheduleEntry> entries;

  int end() const { return entries.empty() ? 0 : entries.back().end(); }
};

struct SchedulePolicyParams {
  int block_length;      // l_f
  double update_fraction;  // gamma_f in (0, 1]
};

// Blocks of l_f ticks with floor(l_f * gamma_f) updates each; a shorter final
// block covers any remainder of T.
UpdateSchedule schedule_from_blocks(const SchedulePolicyParams& params, int total_time);

struct ScheduleCheck {
  bool valid;
  std::string reason;

  explicit operator bool() const { return valid; }
};

ScheduleCheck validate_schedule(const UpdateSchedule& schedule, int total_time);

enum class Phase { update, hold };

const char* phase_name(Phase p);

// 1-based interval index and phase of tick t; range error past the schedule end.
struct TickLabel {
  std::size_t m;
  Phase phase;
  int offset;  // ticks since t_m
};

TickLabel label_tick(const UpdateSchedule& schedule, int t);

}  // namespace pauserl
