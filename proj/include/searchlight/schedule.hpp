#pragma once

#include "searchlight/geometry.hpp"

#include <string>
#include <vector>

namespace searchlight {

struct ScheduleEntry {
  std::string guard;
  int index = 0;
  Direction dir{1, 0};
};

struct ScheduleMove {
  std::string guard;
  int from = 0;
  int to = 0;
  Sense sense = Sense::CCW;
  Direction from_dir{1, 0};
  Direction to_dir{1, 0};
};

// Self-contained record of a solution: start posture per guard plus the move
// list. Directions ride along as exact integer pairs so a consumer can replay
// the rotations without rebuilding the cell decomposition.
struct Schedule {
  std::vector<ScheduleEntry> initial;
  std::vector<ScheduleMove> moves;
};

Schedule load_schedule(const std::string& text);
std::string save_schedule(const Schedule& schedule);
Schedule load_schedule_file(const std::string& path);
void save_schedule_file(const Schedule& schedule, const std::string& path);

// The same motion run backwards: starts at the final posture, replays the
// moves in reverse order with each rotation sense flipped.
Schedule time_reversed(const Schedule& schedule);

}  // namespace searchlight
