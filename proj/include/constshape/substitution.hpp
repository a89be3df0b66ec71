#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "constshape/bigmag.hpp"
#include "constshape/coreset.hpp"
#include "constshape/folner.hpp"
#include "constshape/pattern.hpp"

namespace constshape {

// A constant-shape substitution: every letter maps to a pattern whose support
// is the fundamental domain F1.
struct Substitution {
  std::vector<std::string> alphabet;
  ExpansionSystem sys;
  // rules[letter][i] = image letter at sys.F1[i].
  std::vector<std::vector<int>> rules;
  // Original support order as loaded, kept for byte-stable round trips.
  std::vector<Vec> doc_support;

  int dim() const { return sys.dim; }
  int letter_count() const { return static_cast<int>(alphabet.size()); }
  int rule_at(int letter, int f1_index) const {
    return rules[static_cast<std::size_t>(letter)][static_cast<std::size_t>(f1_index)];
  }
  int letter_index(const std::string& name) const;
  Pattern rule_pattern(int letter) const;
};

struct ValidationReport {
  bool ok = false;
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::string> warnings;
  FolnerVerdict folner;
  std::string message;
};

// Lattice checks, rule-support checks, and the Folner decision (required for
// the rules to define a subshift at all). Unreachable letters produce a
// warning, not a failure.
ValidationReport validate(const Substitution& sub);

std::vector<std::vector<long long>> incidence_matrix(const Substitution& sub);

// Primitivity with the smallest witness exponent, bounded by m^2 - 2m + 2
// for m letters. Matrix powers saturate instead of overflowing.
std::pair<bool, int> is_primitive(const Substitution& sub);

// Image of a single letter under n iterations; support F_n.
Pattern iterate(const Substitution& sub, int letter, int n);

// Image of a pattern; support L(supp) + F1.
Pattern substitute_pattern(const Substitution& sub, const Pattern& p);
Grid substitute_grid(const Substitution& sub, const Grid& g);

struct GermSeed {
  Pattern germ;  // pattern over K
  int period = 1;
};

class LanguageEngine;

// All germ-map cycles of period <= p_max among the language patterns over K.
// Each seed expands to a configuration fixed by the p-th iterate.
std::vector<GermSeed> periodic_seeds(const Substitution& sub, int p_max);
std::vector<GermSeed> periodic_seeds(LanguageEngine& eng, int p_max);

// Expands a seed by whole periods until the window is covered; returns the
// restriction to the window.
Pattern expand_seed(const Substitution& sub, const GermSeed& seed, const PointSet& window);
// Same, but returns the full dense expansion covering `window`.
Grid expand_seed_grid(const Substitution& sub, const GermSeed& seed, const PointSet& window);

// Language enumeration. Core patterns over C+B are closed under the one-step
// occurrence relation (tracking the finitely many derived sub-supports), and
// patterns over an arbitrary support are read off images of core patterns at
// a level that provably covers the support. Results are memoized.
class LanguageEngine {
 public:
  explicit LanguageEngine(const Substitution& sub);

  const Substitution& sub() const { return sub_; }
  const PointSet& core_support() const { return cb_; }
  const PointSet& covering_set() const { return c_; }
  const PointSet& base_ball() const { return b_; }
  const PointSet& remainder_set() const { return k_; }

  // Language patterns whose support is exactly C+B.
  const std::vector<Pattern>& core();
  // Language patterns with the given support (translation-normalized
  // internally, returned on the support as passed).
  std::vector<Pattern> over(const PointSet& p);
  bool in_language(const Pattern& p);

  // Level used to generate patterns over P from core patterns.
  int cover_level(const PointSet& p) const;

 private:
  Substitution sub_;
  PointSet k_, c_, b_, cb_;
  std::vector<PointSet> supports_;  // derived sub-supports, closed under stripping
  bool closed_ = false;
  std::unordered_set<Pattern, PatternHash> seen_;
  std::vector<Pattern> core_;
  std::map<std::string, std::vector<Pattern>> memo_;
  void close();
  std::string key_of(const PointSet& p) const;
};

// Number of language patterns on the lattice ball of radius r.
long long complexity(LanguageEngine& eng, double r);
// The polynomial bound |A|^{|C+B|} r^t with t = -log|det L| / log||L^-1||.
Magnitude complexity_bound(const Substitution& sub, const PointSet& cb, double r);

struct RepetitivityResult {
  int r_emp = -1;        // smallest radius that works, -1 if none <= r_max
  Magnitude r_bound;     // growth bound evaluated at r
  int scanned_up_to = 0;
};

// Empirical repetitivity radius: smallest integer R such that every ball-R
// language pattern contains an occurrence of every ball-r language pattern.
RepetitivityResult repetitivity(LanguageEngine& eng, int r, int r_max = 24);

struct AperiodicityReport {
  int window_radius = 0;
  int period_bound = 0;
  std::vector<Vec> consistent_periods;  // empty list = aperiodicity evidence
};

// Heuristic scan, not a decision: reports every nonzero vector consistent
// with periodicity of an expanded seed on the window.
AperiodicityReport aperiodicity_scan(const Substitution& sub, int window_radius,
                                     int period_bound);

}  // namespace constshape
