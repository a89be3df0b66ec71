#pragma once

#include <optional>

#include "constshape/bigmag.hpp"
#include "constshape/substitution.hpp"

namespace constshape {

struct RecogConstants {
  double t = 0;
  double r_bar = 0;
  Magnitude a;
  Magnitude R_bar;
  Magnitude n_bar;
  Magnitude bound;
  LogTower bound_log10;
};

enum class RecogVariant {
  ClosedForm,          // fully closed-form constants
  RepetitivityBased,   // intermediate radius through the repetitivity growth bound
};

// Computable upper bound for the recognizability radius, expressed in the
// alphabet size, the matrix norms, the support norm and the dimension alone.
// Tower-of-exponent quantities stay exact while at most 1e6 digits, beyond
// that they are carried as outward-rounded iterated exponentials. The bound
// is a report, never a loop limit.
RecogConstants recog_bound(const Substitution& sub,
                           RecogVariant variant = RecogVariant::ClosedForm);

struct EmpiricalRecog {
  int r_fail_below = -1;       // largest radius that fails on the window
  std::optional<int> r_pass;   // first radius that passes
  int window_radius = 0;
  long long pairs_tested = 0;
};

// Exhaustive double scan on an expanded periodic-point window: the smallest
// radius R such that equal radius-R windows centered at L(i) and j force
// j into L(Z^d) with equal preimage letters. Partial coverage is an error
// (WindowTooSmall), never a silent pass.
EmpiricalRecog empirical_recognizability(const Substitution& sub, int window_radius, int r_max);
EmpiricalRecog empirical_recognizability(LanguageEngine& eng, int window_radius, int r_max);

struct Desubstitution {
  Pattern preimage;  // cells whose full one-block image is visible
  Vec shift;         // j in F1 with window = S^j (image of preimage)
};

// Unique decomposition window = S^j zeta(x') read off the window. Ambiguous
// when several shifts (or several preimage letters) stay consistent,
// NoDecomposition when none does.
Desubstitution desubstitute(const Substitution& sub, const Pattern& window, int margin = 0);

}  // namespace constshape
