#pragma once

#include "searchlight/instance.hpp"

#include <cassert>
#include <vector>

namespace searchlight::fixtures {

inline Point fpt(long long x, long long y) {
  return {Rational(x), Rational(y)};
}

inline Ring fring(std::vector<Point> pts) { return Ring{std::move(pts)}; }

// One guard on the top wall of a square room; a west alcove the guard cannot
// see; the target strip sits in the bottom-right corner. A clockwise sweep
// (east wall first, alcove last) clears the target; the counterclockwise
// sweep pushes contamination out of the alcove across the target.
inline Instance one_pocket() {
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(8, 0), fpt(8, 8), fpt(0, 8),
                         fpt(0, 2), fpt(-2, 2), fpt(-2, 1), fpt(0, 1)});
  ins.guards.push_back({"g", fpt(4, 8), std::nullopt});
  ins.target.mode = TargetMode::Region;
  ins.target.ring = fring({fpt(6, 0), fpt(8, 0), fpt(8, 1), fpt(6, 1)});
  return ins;
}

// Two symmetric alcoves (west and east) and a bottom-center target: whatever
// final direction the single guard picks, one alcove stays connected to the
// target, so no schedule clears it.
inline Instance two_pockets() {
  Instance ins;
  ins.env.outer =
      fring({fpt(0, 0), fpt(8, 0), fpt(8, 1), fpt(10, 1), fpt(10, 2),
             fpt(8, 2), fpt(8, 8), fpt(0, 8), fpt(0, 2), fpt(-2, 2),
             fpt(-2, 1), fpt(0, 1)});
  ins.guards.push_back({"g", fpt(4, 8), std::nullopt});
  ins.target.mode = TargetMode::Region;
  ins.target.ring = fring({fpt(3, 0), fpt(5, 0), fpt(5, 1), fpt(3, 1)});
  return ins;
}

// two_pockets plus a corner guard whose downward beam seals the east alcove
// mouth, restoring solvability.
inline Instance two_pockets_helper() {
  Instance ins = two_pockets();
  ins.guards.push_back({"h", fpt(8, 8), std::nullopt});
  return ins;
}

inline Instance square_center_guard() {
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(4, 0), fpt(4, 4), fpt(0, 4)});
  ins.guards.push_back({"g", fpt(2, 2), std::nullopt});
  ins.target.mode = TargetMode::Whole;
  return ins;
}

inline Instance validated(Instance ins) {
  const auto violations = validate_instance(ins);
  assert(violations.empty());
  (void)violations;
  return ins;
}

}  // namespace searchlight::fixtures
