#pragma once

#include <cstddef>

namespace constshape {

// Resource caps. Exceeding any of them raises ErrorCode::ResourceLimit,
// never a silent truncation.
struct Limits {
  std::size_t max_points = 4'000'000;    // largest explicit point set
  std::size_t max_patterns = 2'000'000;  // largest pattern collection
  std::size_t max_cells = 128'000'000;   // largest dense window, in cells
  int max_level = 64;                    // deepest substitution iteration
};

Limits& limits();

}  // namespace constshape
