#pragma once

#include "mmkit/space.hpp"

// The four-point family used across the suites: one ambient metric with all
// distances 1 and four measures on it. X and Y both dominate Z and W, but no
// common refinement inside their order ideals dominates both.
namespace fixtures {

using mmkit::MMSpace;
using mmkit::Rat;
using mmkit::RatMatrix;
using mmkit::RatVec;

inline RatMatrix all_ones(std::size_t n) {
  RatMatrix d(n, RatVec(n, Rat(1)));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = Rat(0);
  return d;
}

inline MMSpace space_x() {
  return mmkit::validate_space({"a", "b", "c"}, all_ones(3),
                               {Rat(1, 2), Rat(1, 3), Rat(1, 6)});
}

inline MMSpace space_y() {
  return mmkit::validate_space(
      {"a", "b", "c", "d"}, all_ones(4),
      {Rat(5, 12), Rat(5, 12), Rat(1, 12), Rat(1, 12)});
}

inline MMSpace space_z() {
  return mmkit::validate_space({"a", "b"}, all_ones(2),
                               {Rat(1, 2), Rat(1, 2)});
}

inline MMSpace space_w() {
  return mmkit::validate_space({"a", "c"}, all_ones(2),
                               {Rat(5, 6), Rat(1, 6)});
}

inline MMSpace two_point_uniform(const Rat& d) {
  return mmkit::validate_space({"p", "q"}, {{Rat(0), d}, {d, Rat(0)}},
                               {Rat(1, 2), Rat(1, 2)});
}

}  // namespace fixtures
