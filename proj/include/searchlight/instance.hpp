#pragma once

#include "searchlight/region.hpp"

#include <optional>
#include <string>
#include <vector>

namespace searchlight {

enum class TargetMode { Whole, Region, PointNeighborhood };

// What must be clear at the end of a schedule: everything, a subregion, or a
// neighborhood of one point.
struct TargetSpec {
  TargetMode mode = TargetMode::Whole;
  Ring ring;    // Region mode
  Point point;  // PointNeighborhood mode
  bool operator==(const TargetSpec&) const = default;
};

struct Guard {
  std::string id;
  Point position;
  std::optional<Direction> pinned_start;
  bool operator==(const Guard&) const = default;
};

struct Instance {
  Region env;
  std::vector<Guard> guards;
  TargetSpec target;
  bool operator==(const Instance&) const = default;
};

struct Violation {
  std::string rule;    // stable identifier, e.g. "guard-outside"
  std::string detail;  // human-readable context
  std::optional<Point> witness;
};

// Normalizes ring orientations in place (outer counterclockwise, holes and
// target clockwise-free) and returns every violated structural rule. An empty
// result means the instance satisfies all model invariants.
std::vector<Violation> validate_instance(Instance& instance);

// Text form: structured document with exact rational coordinate strings.
// load throws std::runtime_error with a field-position diagnostic.
Instance load_instance(const std::string& text);
std::string save_instance(const Instance& instance);

Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& instance, const std::string& path);

// Shortest boundary or target edge; the verifier derives its default grid
// pitch from this.
Rational shortest_edge_length2(const Instance& instance);

}  // namespace searchlight
