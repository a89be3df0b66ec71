#include "constshape/lattice.hpp"

#include <cmath>
#include <sstream>

#include "constshape/limits.hpp"

namespace constshape {

namespace {

Coord positive_mod(Coord x, Coord m) {
  Coord r = x % m;
  return r < 0 ? r + m : r;
}

}  // namespace

ExpansionCheck check_expansion(const Mat& m) {
  if (m.n < 1) fail(ErrorCode::Schema, "empty matrix");
  ExpansionCheck out;
  out.det = m.det();
  if (out.det == 0) fail(ErrorCode::SingularMatrix, "determinant is zero");
  out.mat_norm = spectral_norm(m, +1);
  out.inv_norm = inverse_spectral_norm(m, +1);
  out.sigma_min = 1.0 / out.inv_norm;
  const double band = 1e-9;
  if (out.sigma_min < 1.0 - band)
    fail(ErrorCode::NotExpansive,
         "smallest singular value " + std::to_string(out.sigma_min) + " is not > 1");
  if (out.sigma_min < 1.0 + band)
    fail(ErrorCode::AmbiguousExpansion,
         "smallest singular value is within 1e-9 of 1; refusing to decide");
  return out;
}

DomainReport check_fundamental_domain(const Mat& m, const PointSet& f1) {
  DomainReport rep;
  Coord det = m.det();
  if (det == 0) fail(ErrorCode::SingularMatrix, "determinant is zero");
  Coord ad = det < 0 ? -det : det;
  Mat adj = m.adjugate();
  rep.has_zero = f1.contains(Vec::zero(m.n));
  rep.cardinality_ok = static_cast<Coord>(f1.size()) == ad;

  std::unordered_map<Vec, Vec, VecHash> seen;
  for (const Vec& f : f1) {
    Vec key(m.n);
    Vec af = adj.apply(f);
    for (int i = 0; i < m.n; ++i) key.c[i] = positive_mod(af.c[i], ad);
    auto [it, fresh] = seen.emplace(key, f);
    if (!fresh) rep.duplicate_cosets.emplace_back(it->second, f);
  }
  rep.ok = rep.has_zero && rep.cardinality_ok && rep.duplicate_cosets.empty();

  std::ostringstream os;
  if (!rep.has_zero) os << "0 is missing from the support; ";
  if (!rep.cardinality_ok)
    os << "support has " << f1.size() << " points, |det| = " << ad << "; ";
  for (auto& [a, b] : rep.duplicate_cosets)
    os << a.str() << " == " << b.str() << " mod L(Z^d); ";
  rep.message = rep.ok ? "valid fundamental domain" : os.str();
  return rep;
}

Vec ExpansionSystem::residue_key(const Vec& p) const {
  Coord ad = abs_det();
  Vec key(dim);
  Vec ap = adj.apply(p);
  for (int i = 0; i < dim; ++i) key.c[i] = positive_mod(ap.c[i], ad);
  return key;
}

int ExpansionSystem::residue_index(const Vec& p) const {
  auto it = residue_map_.find(residue_key(p));
  if (it == residue_map_.end())
    fail(ErrorCode::Internal, "residue lookup failed; fundamental domain invariant broken");
  return it->second;
}

ExpansionSystem make_system(const Mat& m, const PointSet& f1) {
  ExpansionCheck chk = check_expansion(m);
  DomainReport rep = check_fundamental_domain(m, f1);
  if (!rep.ok) fail(ErrorCode::BadDomain, rep.message);

  ExpansionSystem sys;
  sys.dim = m.n;
  sys.L = m;
  sys.adj = m.adjugate();
  sys.det = chk.det;
  sys.F1 = f1;
  sys.mat_norm = chk.mat_norm;
  sys.inv_norm = chk.inv_norm;

  // Exactly representable norms skip the outward float bumps.
  bool exact_inv = false;
  if (std::optional<Coord> q = exact_integer_spectral(m)) sys.mat_norm = static_cast<double>(*q);
  if (std::optional<double> s = exact_inverse_spectral(m)) {
    sys.inv_norm = *s;
    exact_inv = true;
  }

  // ||L^-1(F1)|| rounded up, over the exact rational image adj(f)/det.
  double num = 0;
  bool exact_num = true;
  for (const Vec& f : f1) {
    Vec af = sys.adj.apply(f);
    Coord sq = 0;
    for (int i = 0; i < sys.dim; ++i) sq = checked_add(sq, checked_mul(af.c[i], af.c[i]));
    Coord root = static_cast<Coord>(std::llround(std::sqrt(static_cast<double>(sq))));
    bool perfect = checked_mul(root, root) == sq;
    if (!perfect) exact_num = false;
    double val = perfect ? static_cast<double>(root) / std::fabs(static_cast<double>(sys.det))
                         : std::sqrt(static_cast<double>(sq)) / std::fabs(static_cast<double>(sys.det));
    num = std::max(num, val);
  }
  if (exact_inv && exact_num)
    sys.r_bar = num / (1.0 - sys.inv_norm);
  else
    sys.r_bar = round_up(round_up(num) / round_down(1.0 - sys.inv_norm));

  for (std::size_t i = 0; i < f1.size(); ++i)
    sys.residue_map_.emplace(sys.residue_key(f1[i]), static_cast<int>(i));
  return sys;
}

std::pair<Vec, Vec> decompose(const ExpansionSystem& sys, const Vec& p) {
  auto [j, fi] = digit_strip(sys, p);
  return {j, sys.F1[static_cast<std::size_t>(fi)]};
}

std::pair<Vec, int> digit_strip(const ExpansionSystem& sys, const Vec& p) {
  int fi = sys.residue_index(p);
  Vec diff = p - sys.F1[static_cast<std::size_t>(fi)];
  Vec aj = sys.adj.apply(diff);
  Vec j(sys.dim);
  for (int i = 0; i < sys.dim; ++i) {
    if (aj.c[i] % sys.det != 0)
      fail(ErrorCode::Internal, "inexact division in decompose");
    j.c[i] = aj.c[i] / sys.det;
  }
  return {j, fi};
}

PointSet support_iterate(const ExpansionSystem& sys, int n) {
  if (n < 0) fail(ErrorCode::Schema, "support level must be nonnegative");
  PointSet fn(sys.dim);
  fn.insert(Vec::zero(sys.dim));
  for (int i = 0; i < n; ++i) {
    if (fn.size() * static_cast<std::size_t>(sys.abs_det()) > limits().max_points)
      fail(ErrorCode::ResourceLimit, "support level exceeds max_points");
    fn = fn.image(sys.L).sum(sys.F1);
  }
  return fn;
}

bool in_support_level(const ExpansionSystem& sys, const Vec& p, int n) {
  Vec q = p;
  for (int i = 0; i < n; ++i) q = digit_strip(sys, q).first;
  return q.is_zero();
}

Vec compose_digits(const ExpansionSystem& sys, const std::vector<Vec>& digits) {
  // sum_i L^i(digits[i]) evaluated by Horner from the top digit.
  Vec acc = Vec::zero(sys.dim);
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) acc = sys.L.apply(acc) + *it;
  return acc;
}

std::vector<Vec> support_digits(const ExpansionSystem& sys, const Vec& p, int n) {
  std::vector<Vec> digits;
  Vec q = p;
  for (int i = 0; i < n; ++i) {
    auto [j, fi] = digit_strip(sys, q);
    digits.push_back(sys.F1[static_cast<std::size_t>(fi)]);
    q = j;
  }
  if (!q.is_zero()) fail(ErrorCode::NoDecomposition, p.str() + " is not in F_" + std::to_string(n));
  return digits;
}

DigitDecomposition digit_decompose(const ExpansionSystem& sys, const PointSet& K, const Vec& p,
                                   int n_max) {
  DigitDecomposition out;
  Vec q = p;
  for (int n = 0; n <= n_max; ++n) {
    if (K.contains(q)) {
      out.n = n;
      out.k = q;
      return out;
    }
    auto [j, fi] = digit_strip(sys, q);
    out.digits.push_back(sys.F1[static_cast<std::size_t>(fi)]);
    q = j;
  }
  fail(ErrorCode::NotCovered,
       "no representation of " + p.str() + " with level <= " + std::to_string(n_max));
}

}  // namespace constshape
