#pragma once

#include <string>

#include "constshape/factor.hpp"
#include "constshape/io.hpp"

namespace constshape::test {

inline Substitution fixture(const std::string& name) {
  return load_substitution(std::string(FIXTURE_DIR) + "/" + name);
}

inline BlockMap fixture_map(const std::string& name) {
  return load_blockmap(std::string(FIXTURE_DIR) + "/" + name);
}

inline std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

// Pattern over an explicit support with cells listed in the same order.
inline Pattern make_pattern(const std::vector<Vec>& pts, const std::vector<int>& cells) {
  PointSet sup(pts.front().dim, pts);
  std::vector<int> aligned(sup.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    aligned[static_cast<std::size_t>(sup.index_of(pts[i]))] = cells[i];
  return Pattern(sup, aligned);
}

inline PointSet box(Coord lo, Coord hi, int dim) {
  Vec l(dim), h(dim);
  for (int i = 0; i < dim; ++i) {
    l.c[i] = lo;
    h.c[i] = hi;
  }
  return box_points(l, h);
}

}  // namespace constshape::test
