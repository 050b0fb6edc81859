#include "searchlight/instance.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace searchlight {

namespace {

using jsonio::json;

Ring ring_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) jsonio::fail(where, "expected an array of [x, y] pairs");
  Ring out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.pts.push_back(
        jsonio::get_point_pair(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json ring_to_json(const Ring& ring) {
  json j = json::array();
  for (const Point& p : ring.pts) j.push_back(jsonio::point_to_json(p));
  return j;
}

}  // namespace

Instance load_instance(const std::string& text) {
  const json j = jsonio::parse_document(text, "instance");
  Instance out;
  out.env.outer = ring_from_json(jsonio::field(j, "outer", "instance"), "outer");
  if (j.contains("holes")) {
    const json& holes = j["holes"];
    if (!holes.is_array()) jsonio::fail("holes", "expected an array of rings");
    for (std::size_t h = 0; h < holes.size(); ++h) {
      out.env.holes.push_back(
          ring_from_json(holes[h], "holes[" + std::to_string(h) + "]"));
    }
  }
  const json& guards = jsonio::field(j, "guards", "instance");
  if (!guards.is_array()) jsonio::fail("guards", "expected an array");
  for (std::size_t i = 0; i < guards.size(); ++i) {
    const std::string where = "guards[" + std::to_string(i) + "]";
    const json& gj = guards[i];
    Guard g;
    g.id = jsonio::get_string(jsonio::field(gj, "id", where), where + ".id");
    g.position = {jsonio::get_rational(jsonio::field(gj, "x", where), where + ".x"),
                  jsonio::get_rational(jsonio::field(gj, "y", where), where + ".y")};
    if (gj.contains("pinned_start")) {
      g.pinned_start =
          jsonio::get_direction(gj["pinned_start"], where + ".pinned_start");
    }
    out.guards.push_back(std::move(g));
  }
  if (j.contains("target")) {
    const json& tj = j["target"];
    const std::string mode =
        jsonio::get_string(jsonio::field(tj, "mode", "target"), "target.mode");
    if (mode == "whole") {
      out.target.mode = TargetMode::Whole;
    } else if (mode == "region") {
      out.target.mode = TargetMode::Region;
      out.target.ring =
          ring_from_json(jsonio::field(tj, "ring", "target"), "target.ring");
    } else if (mode == "point") {
      out.target.mode = TargetMode::PointNeighborhood;
      out.target.point = {
          jsonio::get_rational(jsonio::field(tj, "x", "target"), "target.x"),
          jsonio::get_rational(jsonio::field(tj, "y", "target"), "target.y")};
    } else {
      jsonio::fail("target.mode", "unknown mode '" + mode + "'");
    }
  }
  return out;
}

std::string save_instance(const Instance& instance) {
  json j;
  j["outer"] = ring_to_json(instance.env.outer);
  if (!instance.env.holes.empty()) {
    j["holes"] = json::array();
    for (const Ring& hole : instance.env.holes) {
      j["holes"].push_back(ring_to_json(hole));
    }
  }
  j["guards"] = json::array();
  for (const Guard& g : instance.guards) {
    json gj;
    gj["id"] = g.id;
    gj["x"] = format_rational(g.position.x);
    gj["y"] = format_rational(g.position.y);
    if (g.pinned_start) {
      gj["pinned_start"] = jsonio::direction_to_json(*g.pinned_start);
    }
    j["guards"].push_back(std::move(gj));
  }
  switch (instance.target.mode) {
    case TargetMode::Whole:
      j["target"] = {{"mode", "whole"}};
      break;
    case TargetMode::Region:
      j["target"] = {{"mode", "region"},
                     {"ring", ring_to_json(instance.target.ring)}};
      break;
    case TargetMode::PointNeighborhood:
      j["target"] = {{"mode", "point"},
                     {"x", format_rational(instance.target.point.x)},
                     {"y", format_rational(instance.target.point.y)}};
      break;
  }
  return j.dump(2) + "\n";
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance(buf.str());
}

void save_instance_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << save_instance(instance);
}

}  // namespace searchlight
