#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "constshape/geometry.hpp"

namespace constshape {

// Certified reals for an accepted expansion matrix.
struct ExpansionCheck {
  Coord det = 0;
  double mat_norm = 0;   // largest singular value, rounded up
  double inv_norm = 0;   // largest singular value of the inverse, rounded up
  double sigma_min = 0;  // 1 / inv_norm, rounded down
};

// Accepts M iff its smallest singular value exceeds 1 by at least 1e-9.
// Values inside the 1e-9 band around 1 raise AmbiguousExpansion: the strict
// inequality is not decidable in floating point at the boundary.
ExpansionCheck check_expansion(const Mat& m);

struct DomainReport {
  bool ok = false;
  bool has_zero = false;
  bool cardinality_ok = false;
  std::vector<std::pair<Vec, Vec>> duplicate_cosets;
  std::string message;
};

// Exact test that F1 represents every class of Z^d / M(Z^d) once, with 0 in F1.
// Congruence is adj(M)(x-y) == 0 (mod det M) componentwise.
DomainReport check_fundamental_domain(const Mat& m, const PointSet& f1);

// An expansion matrix together with a validated fundamental domain and the
// derived constants used throughout.
struct ExpansionSystem {
  int dim = 0;
  Mat L;
  Mat adj;        // adjugate of L
  Coord det = 0;  // signed determinant
  PointSet F1;
  double mat_norm = 0;  // ||L||, rounded up
  double inv_norm = 0;  // ||L^-1||, rounded up
  double r_bar = 0;     // ||L^-1(F1)|| / (1 - ||L^-1||), rounded up

  Coord abs_det() const { return det < 0 ? -det : det; }

  // Residue class lookup: index into F1 of the representative congruent to p.
  int residue_index(const Vec& p) const;

 private:
  friend ExpansionSystem make_system(const Mat&, const PointSet&);
  std::unordered_map<Vec, int, VecHash> residue_map_;
  Vec residue_key(const Vec& p) const;
};

// Runs check_expansion and check_fundamental_domain; throws on failure.
ExpansionSystem make_system(const Mat& m, const PointSet& f1);

// Unique decomposition p = L(j) + f with f in F1.
std::pair<Vec, Vec> decompose(const ExpansionSystem& sys, const Vec& p);

// One digit-stripping step: returns j such that p = L(j) + f, plus the index
// of f in F1.
std::pair<Vec, int> digit_strip(const ExpansionSystem& sys, const Vec& p);

// F_n of the recurrence F_{n+1} = L(F_n) + F1, with F_0 = {0}.
PointSet support_iterate(const ExpansionSystem& sys, int n);

// Membership in F_n without materializing it.
bool in_support_level(const ExpansionSystem& sys, const Vec& p, int n);

// Digit expansion f = sum_i L^i(digits[i]), digits in F1. Inverse of the
// word/witness correspondence used by the synchronization graph.
Vec compose_digits(const ExpansionSystem& sys, const std::vector<Vec>& digits);
// The n digits of a member of F_n (throws NoDecomposition if p not in F_n).
std::vector<Vec> support_digits(const ExpansionSystem& sys, const Vec& p, int n);

struct DigitDecomposition {
  int n = 0;
  Vec k;                   // element of K
  std::vector<Vec> digits;  // f_0 ... f_{n-1}
};

// Minimal-n representation p = L^n(k) + sum_{i<n} L^i(digits[i]) with k in K.
// The digit orbit is forced, so n is the first entry time into K.
DigitDecomposition digit_decompose(const ExpansionSystem& sys, const PointSet& K, const Vec& p,
                                   int n_max);

}  // namespace constshape
