#pragma once

#include <optional>
#include <string>
#include <vector>

#include "constshape/bigmag.hpp"
#include "constshape/blockmap.hpp"
#include "constshape/recognizability.hpp"
#include "constshape/substitution.hpp"
#include "constshape/transform.hpp"

namespace constshape {

struct FactorCertificate {
  BlockMap map;
  int level = 0;  // n
  Vec shift;      // f in F_n
  int verified_window = 0;
  std::string hash;  // of the canonical table serialization
};

std::string certificate_hash(const BlockMap& map, int level, const Vec& shift);

// Decides S^f phi zeta1^n = zeta2^n phi by checking the local identity on
// every source-language pattern over the derived support. Both substitutions
// must share L and F1.
bool verify_commutation(const BlockMap& map, const Substitution& s1, const Substitution& s2,
                        const Vec& f, int n, LanguageEngine& eng1);
bool verify_commutation(const BlockMap& map, const Substitution& s1, const Substitution& s2,
                        const Vec& f, int n);

// Searches f in F_n, n <= level_budget, for which the commutation holds;
// success certifies a factor map onto the target subshift.
std::optional<FactorCertificate> certify_factor(const BlockMap& map, const Substitution& s1,
                                                const Substitution& s2, int level_budget,
                                                LanguageEngine& eng1);

struct RenormalizationResult {
  std::vector<BlockMap> sequence;   // phi_0, phi_1, ...
  std::vector<Vec> step_shifts;     // g_i with S^{g_i} phi_i zeta1 = zeta2 phi_{i+1}
  int cycle_start = 0;
  int cycle_len = 0;
  BlockMap canonical;               // psi with S^f psi zeta1^k = zeta2^k psi
  int canonical_level = 0;          // k = cycle length
  Vec canonical_shift;
};

// Renormalizes a certified factor map: each step replaces phi_n by the unique
// phi_{n+1} solving the one-step intertwining relation, with a radius that
// contracts toward a constant; stops at the first repeated table.
RenormalizationResult renormalize(const FactorCertificate& cert, const Substitution& s1,
                                  const Substitution& s2, LanguageEngine& eng1);

// Backtracking search over block-map tables with support P: the commutation
// relation forces entries from one another, so assignments propagate and the
// search never enumerates raw letter tuples.
std::vector<FactorCertificate> search_factors(const Substitution& s1, const Substitution& s2,
                                              const PointSet& support, int level_budget,
                                              LanguageEngine& eng1);
std::vector<FactorCertificate> search_factors(const Substitution& s1, const Substitution& s2,
                                              const PointSet& support, int level_budget);

struct FactorDecision {
  enum class Verdict { Yes, No, Unknown } verdict = Verdict::Unknown;
  std::optional<FactorCertificate> certificate;
  bool bridged = false;          // source rewritten onto the target support first
  int searched_radius = -1;
  int searched_level = 0;
  std::string sound_level_budget;  // |B|^{|A|^R}, reported, never enumerated
  std::string note;
};

// Searches increasing radii and levels. Yes carries a certificate. No is only
// sound when the searched space covers the full sound budget, which is
// astronomically infeasible; short of that the verdict is Unknown and says so.
FactorDecision decide_factorization(const Substitution& s1, const Substitution& s2,
                                    int radius_budget = 1, int level_budget = 3);

struct ConjugacyVerdict {
  enum class Status { Conjugacy, FactorOnly, Unknown } status = Status::Unknown;
  std::optional<BlockMap> inverse;
  Vec forward_shift;   // composition inverse(forward) acts as this shift
  Vec backward_shift;  // composition forward(inverse) acts as this shift
  int power = 0;       // for endomorphisms: psi^power is a shift
  std::string note;
};

// For endomorphisms the inverse is found as a power composed with a shift
// (every self-factor is invertible); otherwise an inverse certificate is
// searched within the budget.
ConjugacyVerdict check_conjugacy(const FactorCertificate& cert, const Substitution& s1,
                                 const Substitution& s2, int radius_budget = 1,
                                 int level_budget = 3);

// Certified invertible self-maps with the given support, modulo powers of the
// shift.
std::vector<FactorCertificate> automorphism_census(const Substitution& sub,
                                                   const PointSet& support, int level_budget = 3);

struct InvariantOrbit {
  int p = 1;       // zeta^p(x) = S^j x
  Vec j;
  Pattern germ;    // pattern over the dependency closure, determines the point
};

// Germ-level scan for shift-invariant orbits of the substitution map; the
// expansions of periodic seeds always appear (with j = 0).
std::vector<InvariantOrbit> invariant_orbit_scan(const Substitution& sub, int p_max,
                                                 int j_radius = -1);

}  // namespace constshape
