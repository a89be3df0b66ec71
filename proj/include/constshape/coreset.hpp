#pragma once

#include <string>

#include "constshape/lattice.hpp"

namespace constshape {

struct KResult {
  PointSet K;
  int j_stable = 0;       // first index whose partial union already equals K
  int verified_radius = 0;  // window on which coverage was re-checked
  std::string note;         // "verified on window ..." provenance
};

// Remainder set K = union over m of (Id - L^m)^{-1}(F_m) intersected with Z^d.
// Stops when the partial union is unchanged for three consecutive m and the
// coverage post-check passes on a window; the stop is sound by verification,
// since coverage is the defining property of K.
KResult compute_K(const ExpansionSystem& sys, int m_max = 64);

// Least fixpoint of C_{n+1} = L^{-1}(C_n + A + F - F1) cap Z^d, C_0 = {0}.
// Monotone and norm-bounded, so exact set equality is a sound stop.
PointSet compute_C(const ExpansionSystem& sys, const PointSet& A, const PointSet& F);

// Support-change set: least fixpoint of A_{n+1} = L^{-1}(A_n + G1 + G1 - F1)
// cap Z^d with A_0 = {0}.
PointSet compute_A_supportchange(const ExpansionSystem& sys, const PointSet& G1);

// The first iterate {0} cup L^{-1}(A + F - F1) cap Z^d of the covering-set
// recursion. Not closed under the covering inclusions in general; it is the
// set behind the worked small synchronization graphs.
PointSet covering_first_iterate(const ExpansionSystem& sys, const PointSet& A,
                                const PointSet& F);

struct CoreSets {
  PointSet K;
  int j_stable = 0;
  PointSet C;  // covering set for A = {0}, F = F1 + F1
  double k_norm = 0;
  double c_norm = 0;
  double c_norm_bound = 0;  // (||L^-1(A+F)|| + ||L^-1(F1)||) / (1 - ||L^-1||)
};

CoreSets core_sets(const ExpansionSystem& sys);

// Checks the covering-set inclusions for levels 0..n_max:
//   A+F subseteq C+A+F subseteq L(C)+F1,
//   L^n(C+A+F)+F_n subseteq L^{n+1}(C)+F_{n+1},
//   C + sum_{i<=n} L^i(A+F) subseteq L^{n+1}(C)+F_{n+1},
//   (L^n(C)+F_n) nested.
bool verify_covering_inclusions(const ExpansionSystem& sys, const PointSet& A, const PointSet& F,
                                const PointSet& C, int n_max, std::string* why = nullptr);

// Checks K2 + A + G_k subseteq L^k(K2 + A) + F_k for k = 1..k_max.
bool verify_supportchange_inclusions(const ExpansionSystem& sys, const PointSet& G1,
                                     const PointSet& K2, const PointSet& A, int k_max,
                                     std::string* why = nullptr);

}  // namespace constshape
