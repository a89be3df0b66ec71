#include "constshape/pattern.hpp"

#include <sstream>

#include "constshape/limits.hpp"

namespace constshape {

Pattern Pattern::restrict_to(const PointSet& sub) const {
  std::vector<int> out;
  out.reserve(sub.size());
  for (const Vec& p : sub) out.push_back(at(p));
  return Pattern(sub, std::move(out));
}

Pattern Pattern::normalized() const {
  if (support.empty()) return *this;
  return translate(-support.lex_min());
}

bool Pattern::operator<(const Pattern& o) const {
  if (support.size() != o.support.size()) return support.size() < o.support.size();
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] != o.support[i]) return support[i] < o.support[i];
  }
  return cells < o.cells;
}

std::string Pattern::str(const std::vector<std::string>& alphabet) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) os << ' ';
    os << support[i].str() << '=' << alphabet[static_cast<std::size_t>(cells[i])];
  }
  return os.str();
}

Grid::Grid(const Vec& lo, const Vec& hi) : lo_(lo), hi_(hi) {
  int d = lo.dim;
  stride_.assign(static_cast<std::size_t>(d), 1);
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    if (hi.c[i] < lo.c[i]) fail(ErrorCode::Internal, "empty grid box");
    std::size_t extent = static_cast<std::size_t>(hi.c[i] - lo.c[i] + 1);
    stride_[static_cast<std::size_t>(i)] = static_cast<Coord>(total);
    total *= extent;
    if (total > limits().max_cells) fail(ErrorCode::ResourceLimit, "grid exceeds max_cells");
  }
  cells_.assign(total, -1);
}

bool Grid::in_bounds(const Vec& p) const {
  for (int i = 0; i < dim(); ++i)
    if (p.c[i] < lo_.c[i] || p.c[i] > hi_.c[i]) return false;
  return true;
}

Grid Grid::from_pattern(const Pattern& p) {
  auto [lo, hi] = p.support.bounding_box();
  Grid g(lo, hi);
  for (std::size_t i = 0; i < p.support.size(); ++i) g.set(p.support[i], p.cells[i]);
  return g;
}

Pattern Grid::to_pattern() const {
  PointSet sup(dim());
  std::vector<Vec> pts;
  for_each_set([&](const Vec& p, int) { pts.push_back(p); });
  sup = PointSet(dim(), std::move(pts));
  std::vector<int> cells;
  cells.reserve(sup.size());
  for (const Vec& p : sup) cells.push_back(get(p));
  return Pattern(std::move(sup), std::move(cells));
}

Pattern Grid::window(const PointSet& sup) const {
  std::vector<int> cells;
  cells.reserve(sup.size());
  for (const Vec& p : sup) {
    int v = get_checked(p);
    if (v < 0) fail(ErrorCode::WindowTooSmall, "window cell " + p.str() + " is unset");
    cells.push_back(v);
  }
  return Pattern(sup, std::move(cells));
}

}  // namespace constshape
