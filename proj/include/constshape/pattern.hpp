#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "constshape/geometry.hpp"

namespace constshape {

// A finite pattern: a symbol at each point of a finite support. Cells are
// aligned with the support's canonical (lexicographic) order, so equality
// and hashing are structural.
struct Pattern {
  PointSet support;
  std::vector<int> cells;

  Pattern() = default;
  Pattern(PointSet sup, std::vector<int> cs) : support(std::move(sup)), cells(std::move(cs)) {
    if (support.size() != cells.size())
      fail(ErrorCode::Internal, "pattern cells not aligned with support");
  }
  static Pattern single(const Vec& p, int letter) {
    PointSet s(p.dim);
    s.insert(p);
    return Pattern(std::move(s), {letter});
  }

  int at(const Vec& p) const {
    int i = support.index_of(p);
    if (i < 0) fail(ErrorCode::Internal, "pattern lookup outside support " + p.str());
    return cells[static_cast<std::size_t>(i)];
  }
  bool tries_at(const Vec& p, int* out) const {
    int i = support.index_of(p);
    if (i < 0) return false;
    *out = cells[static_cast<std::size_t>(i)];
    return true;
  }

  Pattern translate(const Vec& t) const { return Pattern(support.translate(t), cells); }
  // Restriction to sub (must be inside the support).
  Pattern restrict_to(const PointSet& sub) const;
  // Support shifted so its lexicographic minimum is the origin.
  Pattern normalized() const;

  bool operator==(const Pattern& o) const { return support == o.support && cells == o.cells; }
  bool operator<(const Pattern& o) const;

  std::string str(const std::vector<std::string>& alphabet) const;
};

struct PatternHash {
  std::size_t operator()(const Pattern& p) const {
    std::size_t h = 1469598103934665603ull;
    VecHash vh;
    for (const Vec& v : p.support) h = (h ^ vh(v)) * 1099511628211ull;
    for (int c : p.cells) h = (h ^ static_cast<std::size_t>(c + 1)) * 1099511628211ull;
    return h;
  }
};

// Dense window over a bounding box; the workhorse for expansions and scans.
// Cell value -1 means unset.
class Grid {
 public:
  Grid() = default;
  Grid(const Vec& lo, const Vec& hi);

  int dim() const { return lo_.dim; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  bool in_bounds(const Vec& p) const;
  int get(const Vec& p) const { return cells_[offset(p)]; }
  int get_checked(const Vec& p) const { return in_bounds(p) ? cells_[offset(p)] : -1; }
  void set(const Vec& p, int v) { cells_[offset(p)] = v; }
  std::size_t cell_count() const { return cells_.size(); }

  static Grid from_pattern(const Pattern& p);
  Pattern to_pattern() const;  // set cells only
  Pattern window(const PointSet& sup) const;  // all must be set

  // Applies fn(point, value) to every set cell.
  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    Vec p = lo_;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i] >= 0) fn(p, cells_[i]);
      for (int d = dim() - 1; d >= 0; --d) {
        if (++p.c[d] <= hi_.c[d]) break;
        p.c[d] = lo_.c[d];
      }
    }
  }

 private:
  Vec lo_, hi_;
  std::vector<Coord> stride_;
  std::vector<int32_t> cells_;
  std::size_t offset(const Vec& p) const {
    std::size_t o = 0;
    for (int i = 0; i < lo_.dim; ++i)
      o += static_cast<std::size_t>(p.c[i] - lo_.c[i]) * static_cast<std::size_t>(stride_[static_cast<std::size_t>(i)]);
    return o;
  }
};

}  // namespace constshape
