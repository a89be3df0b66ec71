#pragma once

#include <map>
#include <string>
#include <vector>

#include "constshape/pattern.hpp"

namespace constshape {

// A local rule with finite support: maps source patterns over `support` to
// target letters. Induces a shift-commuting map between subshifts.
struct BlockMap {
  std::vector<std::string> source_alphabet;
  std::vector<std::string> target_alphabet;
  PointSet support;
  std::map<std::vector<int>, int> table;  // cells in support order -> target letter

  double radius() const { return support.norm_max(); }
  bool letter_to_letter() const {
    return support.size() == 1 && support[0].is_zero();
  }

  int lookup(const std::vector<int>& cells) const {
    auto it = table.find(cells);
    if (it == table.end())
      fail(ErrorCode::MissingTableEntry, "block map has no entry for the given pattern");
    return it->second;
  }
  // Value at `pos`: reads the window pos + support from `g`.
  int apply_at(const Grid& g, const Vec& pos) const;
  // Applies everywhere the support fits; output support shrinks accordingly.
  Pattern apply(const Pattern& p) const;
  Grid apply_grid(const Grid& g) const;

  bool operator==(const BlockMap& o) const {
    return support == o.support && table == o.table;
  }
  bool operator<(const BlockMap& o) const {
    if (!(support == o.support)) return support.points() < o.support.points();
    return table < o.table;
  }
};

// first.apply then second.apply, as one block map with combined support.
// The table is built over the supplied source-language patterns.
BlockMap compose(const BlockMap& second, const BlockMap& first,
                 const std::vector<Pattern>& source_language);

}  // namespace constshape
