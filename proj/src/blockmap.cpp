#include "constshape/blockmap.hpp"

namespace constshape {

int BlockMap::apply_at(const Grid& g, const Vec& pos) const {
  std::vector<int> cells;
  cells.reserve(support.size());
  for (const Vec& s : support) {
    int v = g.get_checked(pos + s);
    if (v < 0) fail(ErrorCode::WindowTooSmall, "block map window leaves the grid");
    cells.push_back(v);
  }
  return lookup(cells);
}

Pattern BlockMap::apply(const Pattern& p) const {
  Grid g = Grid::from_pattern(p);
  std::vector<Vec> keep;
  for (const Vec& n : p.support) {
    bool fits = true;
    for (const Vec& s : support)
      if (g.get_checked(n + s) < 0) {
        fits = false;
        break;
      }
    if (fits) keep.push_back(n);
  }
  PointSet out_sup(p.support.dim(), std::move(keep));
  std::vector<int> cells;
  cells.reserve(out_sup.size());
  for (const Vec& n : out_sup) cells.push_back(apply_at(g, n));
  return Pattern(std::move(out_sup), std::move(cells));
}

Grid BlockMap::apply_grid(const Grid& g) const {
  Grid out(g.lo(), g.hi());
  g.for_each_set([&](const Vec& n, int) {
    for (const Vec& s : support)
      if (g.get_checked(n + s) < 0) return;
    out.set(n, apply_at(g, n));
  });
  return out;
}

BlockMap compose(const BlockMap& second, const BlockMap& first,
                 const std::vector<Pattern>& source_language) {
  BlockMap out;
  out.source_alphabet = first.source_alphabet;
  out.target_alphabet = second.target_alphabet;
  out.support = second.support.sum(first.support);
  for (const Pattern& w : source_language) {
    if (!(w.support == out.support))
      fail(ErrorCode::Internal, "composition language has the wrong support");
    Grid g = Grid::from_pattern(w);
    std::vector<int> mid;
    mid.reserve(second.support.size());
    for (const Vec& s : second.support) mid.push_back(first.apply_at(g, s));
    out.table[w.cells] = second.lookup(mid);
  }
  return out;
}

}  // namespace constshape
