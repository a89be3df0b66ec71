#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "constshape/errors.hpp"

namespace constshape {

using Coord = long long;

inline constexpr int kMaxDim = 6;

// Overflow-checked integer helpers. Lattice arithmetic must stay exact;
// an overflow is reported as a resource limit, not wrapped around.
inline Coord checked_add(Coord a, Coord b) {
  Coord r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorCode::ResourceLimit, "integer overflow in add");
  return r;
}
inline Coord checked_mul(Coord a, Coord b) {
  Coord r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::ResourceLimit, "integer overflow in mul");
  return r;
}

// A point of the d-dimensional integer lattice, d <= kMaxDim.
struct Vec {
  int dim = 0;
  std::array<Coord, kMaxDim> c{};

  Vec() = default;
  explicit Vec(int d) : dim(d) { c.fill(0); }
  Vec(std::initializer_list<Coord> xs) {
    dim = static_cast<int>(xs.size());
    if (dim > kMaxDim) fail(ErrorCode::Schema, "dimension exceeds supported maximum");
    int i = 0;
    for (Coord x : xs) c[i++] = x;
  }
  static Vec of(const std::vector<Coord>& xs) {
    if (static_cast<int>(xs.size()) > kMaxDim)
      fail(ErrorCode::Schema, "dimension exceeds supported maximum");
    Vec v(static_cast<int>(xs.size()));
    for (int i = 0; i < v.dim; ++i) v.c[i] = xs[i];
    return v;
  }
  static Vec zero(int d) { return Vec(d); }

  Coord operator[](int i) const { return c[i]; }
  Coord& operator[](int i) { return c[i]; }

  bool is_zero() const {
    for (int i = 0; i < dim; ++i)
      if (c[i] != 0) return false;
    return true;
  }
  Coord norm_sq() const {
    Coord s = 0;
    for (int i = 0; i < dim; ++i) s = checked_add(s, checked_mul(c[i], c[i]));
    return s;
  }
  double norm() const;

  Vec operator+(const Vec& o) const {
    Vec r(dim);
    for (int i = 0; i < dim; ++i) r.c[i] = checked_add(c[i], o.c[i]);
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r(dim);
    for (int i = 0; i < dim; ++i) r.c[i] = checked_add(c[i], -o.c[i]);
    return r;
  }
  Vec operator-() const {
    Vec r(dim);
    for (int i = 0; i < dim; ++i) r.c[i] = -c[i];
    return r;
  }
  bool operator==(const Vec& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  bool operator!=(const Vec& o) const { return !(*this == o); }
  // Lexicographic order on coordinates; the project-wide canonical order.
  bool operator<(const Vec& o) const {
    for (int i = 0; i < dim; ++i)
      if (c[i] != o.c[i]) return c[i] < o.c[i];
    return false;
  }
  std::string str() const;
};

struct VecHash {
  std::size_t operator()(const Vec& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int i = 0; i < v.dim; ++i) {
      h ^= static_cast<std::size_t>(v.c[i]) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Square integer matrix, n <= kMaxDim.
struct Mat {
  int n = 0;
  std::array<Coord, kMaxDim * kMaxDim> a{};

  Mat() = default;
  explicit Mat(int size) : n(size) { a.fill(0); }
  static Mat identity(int size) {
    Mat m(size);
    for (int i = 0; i < size; ++i) m.at(i, i) = 1;
    return m;
  }
  static Mat scalar(int size, Coord k) {
    Mat m(size);
    for (int i = 0; i < size; ++i) m.at(i, i) = k;
    return m;
  }
  static Mat of(const std::vector<std::vector<Coord>>& rows);

  Coord at(int i, int j) const { return a[static_cast<std::size_t>(i) * kMaxDim + j]; }
  Coord& at(int i, int j) { return a[static_cast<std::size_t>(i) * kMaxDim + j]; }

  Vec apply(const Vec& v) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      Coord s = 0;
      for (int j = 0; j < n; ++j) s = checked_add(s, checked_mul(at(i, j), v.c[j]));
      r.c[i] = s;
    }
    return r;
  }
  Mat operator*(const Mat& o) const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Coord s = 0;
        for (int k = 0; k < n; ++k) s = checked_add(s, checked_mul(at(i, k), o.at(k, j)));
        r.at(i, j) = s;
      }
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.at(i, j) = checked_add(at(i, j), -o.at(i, j));
    return r;
  }
  Mat pow(int k) const {
    Mat r = identity(n);
    for (int i = 0; i < k; ++i) r = r * (*this);
    return r;
  }
  bool operator==(const Mat& o) const {
    if (n != o.n) return false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (at(i, j) != o.at(i, j)) return false;
    return true;
  }

  Coord det() const;
  Mat adjugate() const;  // det(M) * M^{-1}
  std::string str() const;
};

// Finite subset of Z^d. Points kept sorted lexicographically and unique,
// so iteration order is deterministic everywhere. The point storage is
// shared between copies and only cloned on mutation; patterns copy their
// supports freely.
class PointSet {
 public:
  PointSet() : pts_(std::make_shared<std::vector<Vec>>()) {}
  explicit PointSet(int dim) : dim_(dim), pts_(std::make_shared<std::vector<Vec>>()) {}
  PointSet(int dim, std::vector<Vec> pts);

  int dim() const { return dim_; }
  std::size_t size() const { return pts_->size(); }
  bool empty() const { return pts_->empty(); }
  const Vec& operator[](std::size_t i) const { return (*pts_)[i]; }
  const std::vector<Vec>& points() const { return *pts_; }
  auto begin() const { return pts_->begin(); }
  auto end() const { return pts_->end(); }

  bool contains(const Vec& v) const;
  // Index of v in the sorted order, or -1.
  int index_of(const Vec& v) const;
  void insert(const Vec& v);

  bool operator==(const PointSet& o) const {
    return dim_ == o.dim_ && (pts_ == o.pts_ || *pts_ == *o.pts_);
  }
  bool operator!=(const PointSet& o) const { return !(*this == o); }
  bool is_subset_of(const PointSet& o) const;

  PointSet translate(const Vec& t) const;
  PointSet negate() const;
  PointSet image(const Mat& m) const;
  PointSet sum(const PointSet& o) const;        // Minkowski sum
  PointSet difference_set(const PointSet& o) const;  // {a - b}
  PointSet union_with(const PointSet& o) const;
  PointSet intersect(const PointSet& o) const;
  PointSet set_minus(const PointSet& o) const;

  Coord norm_sq_max() const;  // max squared Euclidean norm, exact
  double norm_max() const;
  Vec lex_min() const;
  // Bounding box [lo, hi] componentwise.
  std::pair<Vec, Vec> bounding_box() const;

  std::string str() const;

 private:
  int dim_ = 0;
  std::shared_ptr<std::vector<Vec>> pts_;
  void check_dim(const Vec& v) const {
    if (v.dim != dim_) fail(ErrorCode::Internal, "dimension mismatch in point set");
  }
};

// F^{oE}: the points f of F with f + E inside F.
PointSet shrink(const PointSet& F, const PointSet& E);

// Lattice points of the closed Euclidean ball of radius r.
PointSet ball_points(double r, int dim);

// Axis-aligned box [lo_i, hi_i]^d as a point set.
PointSet box_points(const Vec& lo, const Vec& hi);

struct Ratio {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio& o) const { return num == o.num && den == o.den; }
};

// |F delta (v+F)| / |F|, exact and reduced.
Ratio sym_diff_ratio(const PointSet& F, const Vec& v);

// Largest singular value of an integer matrix, computed on the Gram matrix
// in floating point and rounded outward by `dir` (+1 up, -1 down).
double spectral_norm(const Mat& m, int dir);
// Largest singular value of M^{-1} (M must be invertible).
double inverse_spectral_norm(const Mat& m, int dir);

// Exact integer q such that q equals the largest singular value of m, when
// there is one: q^2 must be an exact eigenvalue of the integer Gram matrix.
// Avoids the outward float bump for scalar-like matrices.
std::optional<Coord> exact_integer_spectral(const Mat& m);
// Exact value of ||m^{-1}|| as s/|det m| when (s/|det|)^2 is an exact
// eigenvalue of the adjugate Gram matrix and a perfect square.
std::optional<double> exact_inverse_spectral(const Mat& m);

inline double round_up(double x) { return x + (x > 0 ? x * 1e-12 : 0) + 1e-300; }
inline double round_down(double x) { return x - (x > 0 ? x * 1e-12 : 0) - 1e-300; }

}  // namespace constshape
