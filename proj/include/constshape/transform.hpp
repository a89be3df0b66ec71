#pragma once

#include "constshape/blockmap.hpp"
#include "constshape/substitution.hpp"

namespace constshape {

// Forward/backward local rules witnessing a conjugacy; backward after forward
// acts as the identity on source-language patterns restricted to the
// composite support.
struct ConjugacyPair {
  BlockMap forward;
  BlockMap backward;
};

// The n-th power substitution, over (L^n, F_n).
Substitution power(const Substitution& sub, int n);

struct ChangeSupportResult {
  Substitution out;       // substitution with support G1
  ConjugacyPair maps;     // forward: pattern-over-B coding, backward: cell at 0
  PointSet B;             // K2 + A, the coding support
  bool identity_shortcut = false;
  int verified_window = 0;
};

// Rewrites the substitution onto another fundamental domain G1 of the same
// matrix, with a conjugacy pair between the two subshifts. Both support
// sequences must be Folner (NotFolner otherwise). Letters of the new alphabet
// are the language patterns over B = K2 + A, numbered in canonical order.
ChangeSupportResult change_support(const Substitution& sub, const PointSet& g1,
                                   int verify_radius = 16);

struct InjectivizeResult {
  Substitution out;
  ConjugacyPair maps;     // forward letter-to-letter; backward one-step decoding
  std::vector<int> letter_map;  // source letter -> output letter
  int steps = 0;
};

// Merges letters with identical images until the substitution is injective
// on letters. The alphabet strictly shrinks each step.
InjectivizeResult injectivize(const Substitution& sub);

}  // namespace constshape
