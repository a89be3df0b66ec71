#include "constshape/coreset.hpp"

#include <cmath>
#include <sstream>

#include "constshape/limits.hpp"

namespace constshape {

namespace {

// (Id - L^m)^{-1}(F_m) cap Z^d, exactly via adjugate and divisibility.
PointSet remainder_term(const ExpansionSystem& sys, const Mat& l_pow_m, const PointSet& f_m) {
  Mat m = Mat::identity(sys.dim) - l_pow_m;
  Coord det = m.det();
  if (det == 0)
    fail(ErrorCode::Internal, "Id - L^m is singular; matrix cannot be expansive");
  Mat adj = m.adjugate();
  PointSet out(sys.dim);
  for (const Vec& f : f_m) {
    Vec af = adj.apply(f);
    Vec x(sys.dim);
    bool integral = true;
    for (int i = 0; i < sys.dim; ++i) {
      if (af.c[i] % det != 0) {
        integral = false;
        break;
      }
      x.c[i] = af.c[i] / det;
    }
    if (integral) out.insert(x);
  }
  return out;
}

// Coverage post-check: every point of the window must reach K by digit
// stripping before its orbit cycles.
bool covers_window(const ExpansionSystem& sys, const PointSet& k, int radius) {
  Vec lo(sys.dim), hi(sys.dim);
  for (int i = 0; i < sys.dim; ++i) {
    lo.c[i] = -radius;
    hi.c[i] = radius;
  }
  for (const Vec& p : box_points(lo, hi)) {
    Vec q = p;
    std::vector<Vec> seen;
    bool found = false;
    while (true) {
      if (k.contains(q)) {
        found = true;
        break;
      }
      bool cycled = false;
      for (const Vec& s : seen)
        if (s == q) {
          cycled = true;
          break;
        }
      if (cycled) break;
      seen.push_back(q);
      q = digit_strip(sys, q).first;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

KResult compute_K(const ExpansionSystem& sys, int m_max) {
  KResult out;
  out.K = PointSet(sys.dim);
  out.K.insert(Vec::zero(sys.dim));
  out.verified_radius = 5;

  Mat l_pow = Mat::identity(sys.dim);
  PointSet f_m(sys.dim);
  f_m.insert(Vec::zero(sys.dim));
  int unchanged = 0;
  int stable_at = 0;
  for (int m = 1; m <= m_max; ++m) {
    if (f_m.size() * static_cast<std::size_t>(sys.abs_det()) > limits().max_points)
      fail(ErrorCode::ResourceLimit, "remainder-set term exceeds max_points at m=" +
                                         std::to_string(m));
    l_pow = l_pow * sys.L;
    f_m = f_m.image(sys.L).sum(sys.F1);
    PointSet next = out.K.union_with(remainder_term(sys, l_pow, f_m));
    if (next == out.K) {
      ++unchanged;
    } else {
      out.K = next;
      unchanged = 0;
      stable_at = m;
    }
    if (unchanged >= 3 && covers_window(sys, out.K, out.verified_radius)) {
      out.j_stable = stable_at;
      std::ostringstream os;
      os << "stable after m=" << stable_at << "; coverage verified on window [-"
         << out.verified_radius << "," << out.verified_radius << "]^" << sys.dim;
      out.note = os.str();
      return out;
    }
  }
  fail(ErrorCode::NotStabilized, "remainder set did not stabilize by m_max=" +
                                     std::to_string(m_max) + "; partial set " + out.K.str());
}

namespace {

PointSet lattice_preimage(const ExpansionSystem& sys, const PointSet& s) {
  PointSet out(sys.dim);
  for (const Vec& p : s) {
    Vec ap = sys.adj.apply(p);
    Vec x(sys.dim);
    bool integral = true;
    for (int i = 0; i < sys.dim; ++i) {
      if (ap.c[i] % sys.det != 0) {
        integral = false;
        break;
      }
      x.c[i] = ap.c[i] / sys.det;
    }
    if (integral) out.insert(x);
  }
  return out;
}

PointSet fixpoint_iterate(const ExpansionSystem& sys, const PointSet& increment, double norm_bound) {
  PointSet c(sys.dim);
  c.insert(Vec::zero(sys.dim));
  // Monotone and bounded by norm_bound, so equality is guaranteed to occur.
  const std::size_t guard =
      static_cast<std::size_t>(std::pow(2 * norm_bound + 3, sys.dim)) + 16;
  for (std::size_t it = 0; it < guard + 4; ++it) {
    PointSet next = lattice_preimage(sys, c.sum(increment));
    next = next.union_with(c);
    if (next == c) return c;
    if (next.size() > limits().max_points)
      fail(ErrorCode::ResourceLimit, "covering-set iterate exceeds max_points");
    c = next;
  }
  fail(ErrorCode::NotStabilized, "covering-set iteration exceeded its norm-bound guard");
}

}  // namespace

PointSet compute_C(const ExpansionSystem& sys, const PointSet& A, const PointSet& F) {
  if (!A.contains(Vec::zero(sys.dim)))
    fail(ErrorCode::Schema, "covering-set computation requires 0 in A");
  PointSet increment = A.sum(F).difference_set(sys.F1);
  double bound =
      round_up((sys.inv_norm * A.sum(F).norm_max() + sys.inv_norm * sys.F1.norm_max()) /
               round_down(1.0 - sys.inv_norm)) +
      1.0;
  return fixpoint_iterate(sys, increment, bound);
}

PointSet compute_A_supportchange(const ExpansionSystem& sys, const PointSet& G1) {
  if (!G1.contains(Vec::zero(sys.dim)))
    fail(ErrorCode::Schema, "support-change set requires 0 in G1");
  PointSet increment = G1.sum(G1).difference_set(sys.F1);
  double bound =
      round_up(sys.inv_norm * increment.norm_max() / round_down(1.0 - sys.inv_norm)) + 1.0;
  return fixpoint_iterate(sys, increment, bound);
}

PointSet covering_first_iterate(const ExpansionSystem& sys, const PointSet& A,
                                const PointSet& F) {
  PointSet c0(sys.dim);
  c0.insert(Vec::zero(sys.dim));
  return c0.union_with(lattice_preimage(sys, A.sum(F).difference_set(sys.F1)));
}

CoreSets core_sets(const ExpansionSystem& sys) {
  CoreSets out;
  KResult kr = compute_K(sys);
  out.K = kr.K;
  out.j_stable = kr.j_stable;
  PointSet a0(sys.dim);
  a0.insert(Vec::zero(sys.dim));
  PointSet f = sys.F1.sum(sys.F1);
  out.C = compute_C(sys, a0, f);
  out.k_norm = kr.K.norm_max();
  out.c_norm = out.C.norm_max();
  out.c_norm_bound =
      round_up((sys.inv_norm * a0.sum(f).norm_max() + sys.inv_norm * sys.F1.norm_max()) /
               round_down(1.0 - sys.inv_norm));
  return out;
}

bool verify_covering_inclusions(const ExpansionSystem& sys, const PointSet& A, const PointSet& F,
                                const PointSet& C, int n_max, std::string* why) {
  auto explain = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  PointSet af = A.sum(F);
  PointSet caf = C.sum(af);
  if (!af.is_subset_of(caf)) return explain("A+F is not inside C+A+F");
  if (!caf.is_subset_of(C.image(sys.L).sum(sys.F1)))
    return explain("C+A+F is not inside L(C)+F1");

  PointSet fn(sys.dim);
  fn.insert(Vec::zero(sys.dim));
  Mat l_pow = Mat::identity(sys.dim);
  PointSet partial_sum = af;  // Minkowski sum of L^i(A+F), i = 0..n
  PointSet prev_level = C;    // L^n(C) + F_n
  for (int n = 0; n <= n_max; ++n) {
    Mat l_next = l_pow * sys.L;
    PointSet fn1 = fn.image(sys.L).sum(sys.F1);
    PointSet rhs = C.image(l_next).sum(fn1);  // L^{n+1}(C) + F_{n+1}
    if (!caf.image(l_pow).sum(fn).is_subset_of(rhs))
      return explain("L^n(C+A+F)+F_n escapes L^{n+1}(C)+F_{n+1} at n=" + std::to_string(n));
    if (!C.sum(partial_sum).is_subset_of(rhs))
      return explain("C+sum L^i(A+F) escapes L^{n+1}(C)+F_{n+1} at n=" + std::to_string(n));
    if (!prev_level.is_subset_of(rhs))
      return explain("(L^n(C)+F_n) is not nested at n=" + std::to_string(n));
    prev_level = rhs;
    l_pow = l_next;
    fn = fn1;
    partial_sum = partial_sum.sum(af.image(l_pow));
  }
  return true;
}

bool verify_supportchange_inclusions(const ExpansionSystem& sys, const PointSet& G1,
                                     const PointSet& K2, const PointSet& A, int k_max,
                                     std::string* why) {
  PointSet ka = K2.sum(A);
  PointSet gk = G1;
  PointSet fk = sys.F1;
  Mat l_pow = sys.L;
  for (int k = 1; k <= k_max; ++k) {
    if (!ka.sum(gk).is_subset_of(ka.image(l_pow).sum(fk))) {
      if (why) *why = "K2+A+G_k escapes L^k(K2+A)+F_k at k=" + std::to_string(k);
      return false;
    }
    gk = gk.image(sys.L).sum(G1);
    fk = fk.image(sys.L).sum(sys.F1);
    l_pow = l_pow * sys.L;
  }
  return true;
}

}  // namespace constshape
