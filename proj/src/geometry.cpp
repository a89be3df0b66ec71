#include "constshape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "constshape/limits.hpp"

namespace constshape {

Limits& limits() {
  static Limits instance;
  return instance;
}

double Vec::norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

std::string Vec::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) {
    if (i) os << ',';
    os << c[i];
  }
  os << ')';
  return os.str();
}

Mat Mat::of(const std::vector<std::vector<Coord>>& rows) {
  int n = static_cast<int>(rows.size());
  if (n == 0 || n > kMaxDim) fail(ErrorCode::Schema, "matrix size unsupported");
  Mat m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) fail(ErrorCode::Schema, "matrix is not square");
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

namespace {

Coord det_rec(const Mat& m, std::array<int, kMaxDim>& cols, int k, int row) {
  if (k == 1) return m.at(row, cols[0]);
  Coord s = 0;
  int sign = 1;
  for (int i = 0; i < k; ++i) {
    Coord pivot = m.at(row, cols[i]);
    if (pivot != 0) {
      std::array<int, kMaxDim> sub;
      int t = 0;
      for (int j = 0; j < k; ++j)
        if (j != i) sub[t++] = cols[j];
      Coord minor = det_rec(m, sub, k - 1, row + 1);
      s = checked_add(s, checked_mul(static_cast<Coord>(sign), checked_mul(pivot, minor)));
    }
    sign = -sign;
  }
  return s;
}

}  // namespace

Coord Mat::det() const {
  std::array<int, kMaxDim> cols;
  for (int i = 0; i < n; ++i) cols[i] = i;
  return det_rec(*this, cols, n, 0);
}

Mat Mat::adjugate() const {
  Mat adj(n);
  if (n == 1) {
    adj.at(0, 0) = 1;
    return adj;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Cofactor C_ij: minor with row i, column j removed.
      Mat minor(n - 1);
      int r = 0;
      for (int p = 0; p < n; ++p) {
        if (p == i) continue;
        int c = 0;
        for (int q = 0; q < n; ++q) {
          if (q == j) continue;
          minor.at(r, c) = at(p, q);
          ++c;
        }
        ++r;
      }
      Coord cof = minor.det();
      if ((i + j) & 1) cof = -cof;
      adj.at(j, i) = cof;  // adjugate is the transposed cofactor matrix
    }
  }
  return adj;
}

std::string Mat::str() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < n; ++i) {
    if (i) os << ';';
    for (int j = 0; j < n; ++j) {
      if (j) os << ',';
      os << at(i, j);
    }
  }
  os << ']';
  return os.str();
}

PointSet::PointSet(int dim, std::vector<Vec> pts) : dim_(dim) {
  for (const Vec& v : pts) check_dim(v);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts_ = std::make_shared<std::vector<Vec>>(std::move(pts));
}

bool PointSet::contains(const Vec& v) const {
  return std::binary_search(pts_->begin(), pts_->end(), v);
}

int PointSet::index_of(const Vec& v) const {
  auto it = std::lower_bound(pts_->begin(), pts_->end(), v);
  if (it == pts_->end() || !(*it == v)) return -1;
  return static_cast<int>(it - pts_->begin());
}

void PointSet::insert(const Vec& v) {
  check_dim(v);
  auto it = std::lower_bound(pts_->begin(), pts_->end(), v);
  if (it != pts_->end() && *it == v) return;
  if (pts_->size() + 1 > limits().max_points)
    fail(ErrorCode::ResourceLimit, "point set exceeds max_points");
  std::size_t at = static_cast<std::size_t>(it - pts_->begin());
  if (pts_.use_count() > 1) pts_ = std::make_shared<std::vector<Vec>>(*pts_);
  pts_->insert(pts_->begin() + static_cast<std::ptrdiff_t>(at), v);
}

bool PointSet::is_subset_of(const PointSet& o) const {
  for (const Vec& v : *pts_)
    if (!o.contains(v)) return false;
  return true;
}

PointSet PointSet::translate(const Vec& t) const {
  std::vector<Vec> out;
  out.reserve(pts_->size());
  for (const Vec& v : *pts_) out.push_back(v + t);
  PointSet r(dim_);
  *r.pts_ = std::move(out);  // translation preserves lexicographic order
  return r;
}

PointSet PointSet::negate() const {
  std::vector<Vec> out;
  out.reserve(pts_->size());
  for (const Vec& v : *pts_) out.push_back(-v);
  return PointSet(dim_, std::move(out));
}

PointSet PointSet::image(const Mat& m) const {
  std::vector<Vec> out;
  out.reserve(pts_->size());
  for (const Vec& v : *pts_) out.push_back(m.apply(v));
  return PointSet(dim_, std::move(out));
}

PointSet PointSet::sum(const PointSet& o) const {
  if (pts_->size() * o.pts_->size() > limits().max_points)
    fail(ErrorCode::ResourceLimit, "Minkowski sum exceeds max_points");
  std::vector<Vec> out;
  out.reserve(pts_->size() * o.pts_->size());
  for (const Vec& a : *pts_)
    for (const Vec& b : *o.pts_) out.push_back(a + b);
  return PointSet(dim_, std::move(out));
}

PointSet PointSet::difference_set(const PointSet& o) const { return sum(o.negate()); }

PointSet PointSet::union_with(const PointSet& o) const {
  std::vector<Vec> out;
  out.reserve(pts_->size() + o.pts_->size());
  std::merge(pts_->begin(), pts_->end(), o.pts_->begin(), o.pts_->end(),
             std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  PointSet r(dim_);
  *r.pts_ = std::move(out);
  return r;
}

PointSet PointSet::intersect(const PointSet& o) const {
  std::vector<Vec> out;
  std::set_intersection(pts_->begin(), pts_->end(), o.pts_->begin(), o.pts_->end(),
                        std::back_inserter(out));
  PointSet r(dim_);
  *r.pts_ = std::move(out);
  return r;
}

PointSet PointSet::set_minus(const PointSet& o) const {
  std::vector<Vec> out;
  std::set_difference(pts_->begin(), pts_->end(), o.pts_->begin(), o.pts_->end(),
                      std::back_inserter(out));
  PointSet r(dim_);
  *r.pts_ = std::move(out);
  return r;
}

Coord PointSet::norm_sq_max() const {
  Coord m = 0;
  for (const Vec& v : *pts_) m = std::max(m, v.norm_sq());
  return m;
}

double PointSet::norm_max() const { return std::sqrt(static_cast<double>(norm_sq_max())); }

Vec PointSet::lex_min() const {
  if (pts_->empty()) fail(ErrorCode::Internal, "lex_min of empty set");
  return pts_->front();
}

std::pair<Vec, Vec> PointSet::bounding_box() const {
  if (pts_->empty()) fail(ErrorCode::Internal, "bounding box of empty set");
  Vec lo = pts_->front(), hi = pts_->front();
  for (const Vec& v : *pts_)
    for (int i = 0; i < dim_; ++i) {
      lo.c[i] = std::min(lo.c[i], v.c[i]);
      hi.c[i] = std::max(hi.c[i], v.c[i]);
    }
  return {lo, hi};
}

std::string PointSet::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < pts_->size(); ++i) {
    if (i) os << ", ";
    os << (*pts_)[i].str();
  }
  os << '}';
  return os.str();
}

PointSet shrink(const PointSet& F, const PointSet& E) {
  std::vector<Vec> out;
  for (const Vec& f : F) {
    bool ok = true;
    for (const Vec& e : E)
      if (!F.contains(f + e)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(f);
  }
  PointSet r(F.dim());
  for (const Vec& v : out) r.insert(v);
  return r;
}

PointSet ball_points(double r, int dim) {
  if (r < 0) fail(ErrorCode::Schema, "ball radius must be nonnegative");
  // Exact membership: |x|^2 <= thr with thr the rounded-up integer r^2.
  Coord thr = static_cast<Coord>(std::floor(r * r * (1 + 1e-12) + 1e-9));
  Coord reach = static_cast<Coord>(std::floor(r * (1 + 1e-12) + 1e-9));
  double volume = 1;
  for (int i = 0; i < dim; ++i) volume *= static_cast<double>(2 * reach + 1);
  if (volume > static_cast<double>(limits().max_points))
    fail(ErrorCode::ResourceLimit, "ball exceeds max_points");
  std::vector<Vec> out;
  Vec v(dim);
  std::function<void(int, Coord)> rec = [&](int i, Coord used) {
    if (i == dim) {
      out.push_back(v);
      return;
    }
    for (Coord x = -reach; x <= reach; ++x) {
      Coord u = used + x * x;
      if (u > thr) continue;
      v.c[i] = x;
      rec(i + 1, u);
    }
  };
  rec(0, 0);
  return PointSet(dim, std::move(out));
}

PointSet box_points(const Vec& lo, const Vec& hi) {
  int d = lo.dim;
  std::vector<Vec> out;
  Vec v(d);
  std::function<void(int)> rec = [&](int i) {
    if (i == d) {
      out.push_back(v);
      return;
    }
    for (Coord x = lo.c[i]; x <= hi.c[i]; ++x) {
      v.c[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
  return PointSet(d, std::move(out));
}

Ratio sym_diff_ratio(const PointSet& F, const Vec& v) {
  if (F.empty()) fail(ErrorCode::Schema, "symmetric difference ratio of empty set");
  PointSet shifted = F.translate(v);
  long long inter = static_cast<long long>(F.intersect(shifted).size());
  long long n = static_cast<long long>(F.size());
  long long diff = 2 * (n - inter);
  long long g = std::gcd(diff, n);
  return Ratio{diff / g, n / g};
}

namespace {

// log of the largest eigenvalue of a symmetric PSD matrix, by repeated
// squaring with renormalization.
long double log_lambda_max(std::array<long double, kMaxDim * kMaxDim> b, int n) {
  long double scale = 0.0L;
  const int rounds = 64;
  for (int it = 0; it < rounds; ++it) {
    long double m = 0.0L;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::fabs(b[i * kMaxDim + j]));
    if (m == 0.0L) fail(ErrorCode::SingularMatrix, "zero matrix has no spectral norm");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b[i * kMaxDim + j] /= m;
    scale += std::log(m);
    std::array<long double, kMaxDim * kMaxDim> sq{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long double s = 0.0L;
        for (int k = 0; k < n; ++k) s += b[i * kMaxDim + k] * b[k * kMaxDim + j];
        sq[i * kMaxDim + j] = s;
      }
    b = sq;
    scale *= 2.0L;
  }
  long double tr = 0.0L;
  for (int i = 0; i < n; ++i) tr += b[i * kMaxDim + i];
  return (std::log(tr) + scale) / std::exp2l(static_cast<long double>(rounds));
}

double gram_spectral(const std::array<long double, kMaxDim * kMaxDim>& m, int n, int dir) {
  std::array<long double, kMaxDim * kMaxDim> gram{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (int k = 0; k < n; ++k) s += m[k * kMaxDim + i] * m[k * kMaxDim + j];
      gram[i * kMaxDim + j] = s;
    }
  long double lg = log_lambda_max(gram, n) / 2.0L;
  double value = static_cast<double>(std::exp(lg));
  return dir > 0 ? round_up(value) : round_down(value);
}

}  // namespace

double spectral_norm(const Mat& m, int dir) {
  std::array<long double, kMaxDim * kMaxDim> a{};
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) a[i * kMaxDim + j] = static_cast<long double>(m.at(i, j));
  return gram_spectral(a, m.n, dir);
}

double inverse_spectral_norm(const Mat& m, int dir) {
  Coord det = m.det();
  if (det == 0) fail(ErrorCode::SingularMatrix, "matrix is singular");
  Mat adj = m.adjugate();
  std::array<long double, kMaxDim * kMaxDim> a{};
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      a[i * kMaxDim + j] =
          static_cast<long double>(adj.at(i, j)) / static_cast<long double>(det);
  return gram_spectral(a, m.n, dir);
}

namespace {

Mat gram_of(const Mat& m) {
  Mat g(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      Coord s = 0;
      for (int k = 0; k < m.n; ++k) s = checked_add(s, checked_mul(m.at(k, i), m.at(k, j)));
      g.at(i, j) = s;
    }
  return g;
}

bool is_exact_eigenvalue(const Mat& gram, Coord lambda) {
  Mat shifted = gram;
  for (int i = 0; i < gram.n; ++i) shifted.at(i, i) = checked_add(shifted.at(i, i), -lambda);
  return shifted.det() == 0;
}

}  // namespace

std::optional<Coord> exact_integer_spectral(const Mat& m) {
  double s = spectral_norm(m, +1);
  Coord q = static_cast<Coord>(std::llround(s));
  if (q <= 0 || std::fabs(s - static_cast<double>(q)) > 1e-6) return std::nullopt;
  if (!is_exact_eigenvalue(gram_of(m), checked_mul(q, q))) return std::nullopt;
  return q;
}

std::optional<double> exact_inverse_spectral(const Mat& m) {
  Coord det = m.det();
  if (det == 0) return std::nullopt;
  Coord ad = det < 0 ? -det : det;
  double s = inverse_spectral_norm(m, +1);
  // sigma^2 = p / det^2 for an eigenvalue p of the adjugate Gram matrix.
  double p_real = s * s * static_cast<double>(ad) * static_cast<double>(ad);
  Coord p = static_cast<Coord>(std::llround(p_real));
  if (p <= 0 || std::fabs(p_real - static_cast<double>(p)) > 1e-4) return std::nullopt;
  Coord root = static_cast<Coord>(std::llround(std::sqrt(static_cast<double>(p))));
  if (checked_mul(root, root) != p) return std::nullopt;  // not a perfect square
  if (!is_exact_eigenvalue(gram_of(m.adjugate()), p)) return std::nullopt;
  return static_cast<double>(root) / static_cast<double>(ad);
}

}  // namespace constshape
