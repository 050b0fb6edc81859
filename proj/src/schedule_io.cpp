#include "searchlight/schedule.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace searchlight {

using jsonio::json;

namespace {

ScheduleEntry entry_from_json(const json& j, const std::string& where) {
  ScheduleEntry entry;
  entry.guard = jsonio::get_string(jsonio::field(j, "guard", where), where);
  const json& index = jsonio::field(j, "index", where);
  if (!index.is_number_integer()) jsonio::fail(where, "index must be integral");
  entry.index = index.get<int>();
  entry.dir = jsonio::get_direction(jsonio::field(j, "dir", where), where);
  return entry;
}

ScheduleMove move_from_json(const json& j, const std::string& where) {
  ScheduleMove sm;
  sm.guard = jsonio::get_string(jsonio::field(j, "guard", where), where);
  for (const auto& [name, slot] :
       {std::pair<const char*, int*>{"from", &sm.from}, {"to", &sm.to}}) {
    const json& v = jsonio::field(j, name, where);
    if (!v.is_number_integer()) {
      jsonio::fail(where, std::string(name) + " must be integral");
    }
    *slot = v.get<int>();
  }
  const std::string sense =
      jsonio::get_string(jsonio::field(j, "sense", where), where);
  if (sense == "cw") {
    sm.sense = Sense::CW;
  } else if (sense == "ccw") {
    sm.sense = Sense::CCW;
  } else {
    jsonio::fail(where, "sense must be 'cw' or 'ccw'");
  }
  sm.from_dir =
      jsonio::get_direction(jsonio::field(j, "from_dir", where), where);
  sm.to_dir = jsonio::get_direction(jsonio::field(j, "to_dir", where), where);
  return sm;
}

}  // namespace

Schedule load_schedule(const std::string& text) {
  const json j = jsonio::parse_document(text, "schedule");
  Schedule schedule;
  const json& initial = jsonio::field(j, "initial", "schedule");
  if (!initial.is_array()) jsonio::fail("schedule", "initial must be an array");
  for (std::size_t i = 0; i < initial.size(); ++i) {
    schedule.initial.push_back(
        entry_from_json(initial[i], "initial[" + std::to_string(i) + "]"));
  }
  const json& moves = jsonio::field(j, "moves", "schedule");
  if (!moves.is_array()) jsonio::fail("schedule", "moves must be an array");
  for (std::size_t i = 0; i < moves.size(); ++i) {
    schedule.moves.push_back(
        move_from_json(moves[i], "moves[" + std::to_string(i) + "]"));
  }
  return schedule;
}

std::string save_schedule(const Schedule& schedule) {
  json j;
  j["initial"] = json::array();
  for (const ScheduleEntry& entry : schedule.initial) {
    j["initial"].push_back({{"guard", entry.guard},
                            {"index", entry.index},
                            {"dir", jsonio::direction_to_json(entry.dir)}});
  }
  j["moves"] = json::array();
  for (const ScheduleMove& sm : schedule.moves) {
    j["moves"].push_back(
        {{"guard", sm.guard},
         {"from", sm.from},
         {"to", sm.to},
         {"sense", sm.sense == Sense::CW ? "cw" : "ccw"},
         {"from_dir", jsonio::direction_to_json(sm.from_dir)},
         {"to_dir", jsonio::direction_to_json(sm.to_dir)}});
  }
  return j.dump(2) + "\n";
}

Schedule load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) jsonio::fail("schedule", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_schedule(buffer.str());
}

void save_schedule_file(const Schedule& schedule, const std::string& path) {
  std::ofstream out(path);
  if (!out) jsonio::fail("schedule", "cannot write '" + path + "'");
  out << save_schedule(schedule);
}

Schedule time_reversed(const Schedule& schedule) {
  std::map<std::string, std::pair<int, Direction>> final_pose;
  for (const ScheduleEntry& entry : schedule.initial) {
    final_pose[entry.guard] = {entry.index, entry.dir};
  }
  for (const ScheduleMove& sm : schedule.moves) {
    final_pose[sm.guard] = {sm.to, sm.to_dir};
  }

  Schedule out;
  for (const ScheduleEntry& entry : schedule.initial) {
    const auto& [index, dir] = final_pose.at(entry.guard);
    out.initial.push_back({entry.guard, index, dir});
  }
  for (auto it = schedule.moves.rbegin(); it != schedule.moves.rend(); ++it) {
    ScheduleMove sm;
    sm.guard = it->guard;
    sm.from = it->to;
    sm.to = it->from;
    sm.sense = opposite(it->sense);
    sm.from_dir = it->to_dir;
    sm.to_dir = it->from_dir;
    out.moves.push_back(std::move(sm));
  }
  return out;
}

}  // namespace searchlight
