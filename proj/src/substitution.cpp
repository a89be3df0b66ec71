#include "constshape/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "constshape/limits.hpp"

namespace constshape {

int Substitution::letter_index(const std::string& name) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == name) return static_cast<int>(i);
  fail(ErrorCode::Schema, "unknown symbol '" + name + "'");
}

Pattern Substitution::rule_pattern(int letter) const {
  return Pattern(sys.F1, rules[static_cast<std::size_t>(letter)]);
}

ValidationReport validate(const Substitution& sub) {
  ValidationReport rep;
  auto record = [&](const std::string& name, bool ok, const std::string& why = "") {
    rep.checks.emplace_back(name, ok);
    if (!ok && !why.empty()) rep.message += name + ": " + why + "; ";
  };

  try {
    check_expansion(sub.sys.L);
    record("expansion", true);
  } catch (const Error& e) {
    record("expansion", false, e.what());
  }
  {
    DomainReport dr = check_fundamental_domain(sub.sys.L, sub.sys.F1);
    record("fundamental-domain", dr.ok, dr.message);
  }
  {
    bool ok = !sub.alphabet.empty() && sub.rules.size() == sub.alphabet.size();
    for (const auto& r : sub.rules) {
      if (r.size() != sub.sys.F1.size()) ok = false;
      for (int v : r)
        if (v < 0 || v >= sub.letter_count()) ok = false;
    }
    record("rule-support", ok, ok ? "" : "every rule must assign one letter per cell of F1");
  }
  try {
    rep.folner = decide_folner(sub.sys);
    record("folner", rep.folner.is_folner,
           rep.folner.is_folner ? "" : "support sequence is not Folner: " + rep.folner.note);
  } catch (const Error& e) {
    record("folner", false, e.what());
  }

  // Letters that never occur around a periodic point are flagged, not fatal.
  if (!sub.rules.empty() && sub.rules[0].size() == sub.sys.F1.size()) {
    int zero_idx = sub.sys.F1.index_of(Vec::zero(sub.dim()));
    if (zero_idx >= 0) {
      std::vector<int> h(static_cast<std::size_t>(sub.letter_count()));
      for (int a = 0; a < sub.letter_count(); ++a) h[static_cast<std::size_t>(a)] = sub.rule_at(a, zero_idx);
      std::vector<bool> on_cycle(h.size(), false);
      for (std::size_t a = 0; a < h.size(); ++a) {
        int x = static_cast<int>(a);
        for (std::size_t step = 0; step <= h.size(); ++step) x = h[static_cast<std::size_t>(x)];
        int y = x;
        do {
          on_cycle[static_cast<std::size_t>(y)] = true;
          y = h[static_cast<std::size_t>(y)];
        } while (y != x);
      }
      std::vector<bool> reach = on_cycle;
      bool grew = true;
      while (grew) {
        grew = false;
        for (std::size_t a = 0; a < reach.size(); ++a)
          if (reach[a])
            for (int v : sub.rules[a])
              if (!reach[static_cast<std::size_t>(v)]) {
                reach[static_cast<std::size_t>(v)] = true;
                grew = true;
              }
      }
      for (std::size_t a = 0; a < reach.size(); ++a)
        if (!reach[a])
          rep.warnings.push_back("letter '" + sub.alphabet[a] +
                                 "' does not occur in any periodic point");
    }
  }

  rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(),
                       [](const auto& c) { return c.second; });
  if (rep.ok) rep.message = "valid";
  return rep;
}

std::vector<std::vector<long long>> incidence_matrix(const Substitution& sub) {
  std::size_t m = static_cast<std::size_t>(sub.letter_count());
  std::vector<std::vector<long long>> mat(m, std::vector<long long>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (int b : sub.rules[a]) ++mat[a][static_cast<std::size_t>(b)];
  return mat;
}

std::pair<bool, int> is_primitive(const Substitution& sub) {
  std::size_t m = static_cast<std::size_t>(sub.letter_count());
  auto base = incidence_matrix(sub);
  const long long cap = 1'000'000'000'000'000'000LL;
  std::vector<std::vector<long long>> pow = base;
  int bound = static_cast<int>(m * m) - 2 * static_cast<int>(m) + 2;
  bound = std::max(bound, 1);
  for (int k = 1; k <= bound; ++k) {
    bool positive = true;
    for (const auto& row : pow)
      for (long long v : row)
        if (v == 0) positive = false;
    if (positive) return {true, k};
    // pow <- pow * base with saturation; only positivity matters.
    std::vector<std::vector<long long>> next(m, std::vector<long long>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = 0; l < m; ++l) {
        if (pow[i][l] == 0) continue;
        for (std::size_t j = 0; j < m; ++j) {
          if (base[l][j] == 0) continue;
          long long add = (pow[i][l] > cap / std::max(base[l][j], 1LL)) ? cap : pow[i][l] * base[l][j];
          next[i][j] = std::min(cap, next[i][j] + add);
        }
      }
    pow = std::move(next);
  }
  return {false, 0};
}

Pattern substitute_pattern(const Substitution& sub, const Pattern& p) {
  PointSet out_sup = p.support.image(sub.sys.L).sum(sub.sys.F1);
  std::vector<int> cells(out_sup.size());
  for (std::size_t i = 0; i < out_sup.size(); ++i) {
    auto [j, fi] = digit_strip(sub.sys, out_sup[i]);
    cells[i] = sub.rule_at(p.at(j), fi);
  }
  return Pattern(std::move(out_sup), std::move(cells));
}

Grid substitute_grid(const Substitution& sub, const Grid& g) {
  auto [f_lo, f_hi] = sub.sys.F1.bounding_box();
  // Bounding box of the image support, from the set cells themselves; a box
  // taken from the source corners compounds exponential slack for rotating
  // matrices.
  Vec lo(g.dim()), hi(g.dim());
  bool first = true;
  g.for_each_set([&](const Vec& p, int) {
    Vec img = sub.sys.L.apply(p);
    for (int i = 0; i < g.dim(); ++i) {
      if (first || img.c[i] + f_lo.c[i] < lo.c[i]) lo.c[i] = img.c[i] + f_lo.c[i];
      if (first || img.c[i] + f_hi.c[i] > hi.c[i]) hi.c[i] = img.c[i] + f_hi.c[i];
    }
    first = false;
  });
  if (first) fail(ErrorCode::Internal, "substituting an empty grid");
  Grid out(lo, hi);
  g.for_each_set([&](const Vec& p, int letter) {
    Vec base = sub.sys.L.apply(p);
    for (std::size_t fi = 0; fi < sub.sys.F1.size(); ++fi)
      out.set(base + sub.sys.F1[fi], sub.rule_at(letter, static_cast<int>(fi)));
  });
  return out;
}

Pattern iterate(const Substitution& sub, int letter, int n) {
  if (n < 0) fail(ErrorCode::Schema, "iteration level must be nonnegative");
  if (n > limits().max_level) fail(ErrorCode::ResourceLimit, "iteration level exceeds max_level");
  Pattern p = Pattern::single(Vec::zero(sub.dim()), letter);
  for (int i = 0; i < n; ++i) p = substitute_pattern(sub, p);
  return p;
}

// ---------------------------------------------------------------------------
// Language engine

LanguageEngine::LanguageEngine(const Substitution& sub) : sub_(sub) {
  auto [prim, k] = is_primitive(sub);
  (void)k;
  if (!prim) fail(ErrorCode::Schema, "language enumeration requires a primitive substitution");
  CoreSets cs = core_sets(sub.sys);
  k_ = cs.K;
  c_ = cs.C;
  b_ = ball_points(std::max(sub.sys.r_bar, cs.K.norm_max()), sub.dim());
  cb_ = c_.sum(b_);
  if (!k_.is_subset_of(k_.image(sub.sys.L).sum(sub.sys.F1)))
    fail(ErrorCode::Internal, "remainder set is not nested under the support recurrence");
}

std::string LanguageEngine::key_of(const PointSet& p) const { return p.str(); }

void LanguageEngine::close() {
  if (closed_) return;
  // Derived supports: close {C+B} under S -> {strip(f1 + s) : s in S}. Every
  // derived support stays inside C+B, so the closure is finite.
  supports_.clear();
  supports_.push_back(cb_);
  for (std::size_t i = 0; i < supports_.size(); ++i) {
    PointSet s = supports_[i];
    for (const Vec& f1 : sub_.sys.F1) {
      PointSet j(sub_.dim());
      for (const Vec& p : s) j.insert(digit_strip(sub_.sys, f1 + p).first);
      if (std::find(supports_.begin(), supports_.end(), j) == supports_.end())
        supports_.push_back(j);
      if (supports_.size() > 4096)
        fail(ErrorCode::ResourceLimit, "support closure unexpectedly large");
    }
  }

  std::deque<Pattern> work;
  auto add = [&](const Pattern& p) {
    if (seen_.insert(p).second) {
      if (seen_.size() > limits().max_patterns)
        fail(ErrorCode::IncompleteLanguage, "language closure exceeds max_patterns");
      work.push_back(p);
      if (p.support == cb_) core_.push_back(p);
    }
  };

  // Seed: single letters on every derived singleton support.
  for (const PointSet& s : supports_)
    if (s.size() == 1)
      for (int a = 0; a < sub_.letter_count(); ++a)
        add(Pattern(s, {a}));
  if (seen_.empty())
    for (int a = 0; a < sub_.letter_count(); ++a)
      add(Pattern::single(Vec::zero(sub_.dim()), a));

  while (!work.empty()) {
    Pattern v = work.front();
    work.pop_front();
    Pattern img = substitute_pattern(sub_, v);
    Grid g = Grid::from_pattern(img);
    for (const PointSet& s : supports_) {
      if (s.size() > img.support.size()) continue;
      const Vec& anchor = s[0];
      for (const Vec& q : img.support) {
        Vec t = q - anchor;
        std::vector<int> cells;
        cells.reserve(s.size());
        bool ok = true;
        for (const Vec& p : s) {
          int val = g.get_checked(p + t);
          if (val < 0) {
            ok = false;
            break;
          }
          cells.push_back(val);
        }
        if (ok) add(Pattern(s, std::move(cells)));
      }
    }
  }
  std::sort(core_.begin(), core_.end());
  closed_ = true;
}

const std::vector<Pattern>& LanguageEngine::core() {
  close();
  return core_;
}

int LanguageEngine::cover_level(const PointSet& p) const {
  // The requested level covers P exactly when strip^n(F_n + P) lands in C+B.
  // Since strip(L(y) + z) = y + strip(z), that iterated image satisfies the
  // recursion T_0 = P, T_{k+1} = strip(F1 + T_k).
  PointSet layer = p.translate(-p.lex_min());
  for (int n = 0; n <= limits().max_level; ++n) {
    if (layer.is_subset_of(cb_)) return n;
    std::vector<Vec> next;
    next.reserve(layer.size() * sub_.sys.F1.size());
    for (const Vec& f1 : sub_.sys.F1)
      for (const Vec& t : layer) next.push_back(digit_strip(sub_.sys, f1 + t).first);
    layer = PointSet(sub_.dim(), std::move(next));
  }
  fail(ErrorCode::ResourceLimit, "no covering level within max_level");
}

std::vector<Pattern> LanguageEngine::over(const PointSet& p) {
  if (p.empty()) fail(ErrorCode::Schema, "language over an empty support");
  close();
  Vec base = p.lex_min();
  PointSet p0 = p.translate(-base);
  std::string key = key_of(p0);
  auto it = memo_.find(key);
  if (it == memo_.end()) {
    std::vector<Pattern> out;
    std::unordered_set<Pattern, PatternHash> dedup;
    int n = cover_level(p0);
    double work = static_cast<double>(core_.size()) *
                  std::pow(static_cast<double>(sub_.sys.abs_det()), n) *
                  static_cast<double>(p0.size());
    if (work > 4e9)
      fail(ErrorCode::ResourceLimit,
           "language enumeration over this support exceeds the work budget");
    PointSet fn = support_iterate(sub_.sys, n);
    for (const Pattern& c : core_) {
      Grid g = Grid::from_pattern(c);
      for (int i = 0; i < n; ++i) g = substitute_grid(sub_, g);
      for (const Vec& f : fn) {
        std::vector<int> cells;
        cells.reserve(p0.size());
        for (const Vec& q : p0) {
          int val = g.get_checked(f + q);
          if (val < 0)
            fail(ErrorCode::Internal, "cover level failed to cover the requested support");
          cells.push_back(val);
        }
        Pattern w(p0, std::move(cells));
        if (dedup.insert(w).second) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    it = memo_.emplace(key, std::move(out)).first;
  }
  if (base.is_zero()) return it->second;
  std::vector<Pattern> translated;
  translated.reserve(it->second.size());
  for (const Pattern& w : it->second) translated.push_back(w.translate(base));
  return translated;
}

bool LanguageEngine::in_language(const Pattern& p) {
  std::vector<Pattern> all = over(p.support);
  return std::find(all.begin(), all.end(), p) != all.end();
}

// ---------------------------------------------------------------------------

std::vector<GermSeed> periodic_seeds(LanguageEngine& eng, int p_max) {
  const Substitution& sub = eng.sub();
  std::vector<Pattern> lk = eng.over(eng.remainder_set());
  std::vector<GermSeed> seeds;
  for (const Pattern& w : lk) {
    Pattern cur = w;
    for (int p = 1; p <= p_max; ++p) {
      cur = substitute_pattern(sub, cur).restrict_to(eng.remainder_set());
      if (cur == w) {
        seeds.push_back(GermSeed{w, p});
        break;
      }
    }
  }
  return seeds;
}

std::vector<GermSeed> periodic_seeds(const Substitution& sub, int p_max) {
  LanguageEngine eng(sub);
  return periodic_seeds(eng, p_max);
}

Grid expand_seed_grid(const Substitution& sub, const GermSeed& seed, const PointSet& window) {
  Grid g = Grid::from_pattern(seed.germ);
  auto covered = [&] {
    for (const Vec& p : window)
      if (g.get_checked(p) < 0) return false;
    return true;
  };
  int steps = 0;
  while (!covered()) {
    for (int i = 0; i < seed.period; ++i) g = substitute_grid(sub, g);
    steps += seed.period;
    if (steps > limits().max_level)
      fail(ErrorCode::ResourceLimit, "seed expansion exceeds max_level");
  }
  return g;
}

Pattern expand_seed(const Substitution& sub, const GermSeed& seed, const PointSet& window) {
  return expand_seed_grid(sub, seed, window).window(window);
}

long long complexity(LanguageEngine& eng, double r) {
  return static_cast<long long>(eng.over(ball_points(r, eng.sub().dim())).size());
}

Magnitude complexity_bound(const Substitution& sub, const PointSet& cb, double r) {
  double t = -std::log(static_cast<double>(sub.sys.abs_det())) / std::log(sub.sys.inv_norm);
  Magnitude base = Magnitude::from_int(sub.letter_count())
                       .pow(Magnitude::from_int(static_cast<long>(cb.size())));
  if (r <= 1.0) return base;
  return base.mul(Magnitude::from_double(r).pow(Magnitude::from_double(t)));
}

RepetitivityResult repetitivity(LanguageEngine& eng, int r, int r_max) {
  RepetitivityResult out;
  const Substitution& sub = eng.sub();
  PointSet ball_r = ball_points(r, sub.dim());
  std::vector<Pattern> small = eng.over(ball_r);

  // Failures below the answer are read off an expanded window (windows of a
  // point are genuine language patterns, so a failure there is sound); the
  // first window-passing radius is then confirmed against the full language
  // enumeration at that radius alone.
  int window_radius = 2 * r_max + 8;
  std::vector<GermSeed> seeds;
  for (int pm = 2; seeds.empty() && pm <= 64; pm *= 2) seeds = periodic_seeds(eng, pm);
  PointSet window = ball_points(window_radius, sub.dim());
  Grid x = expand_seed_grid(sub, seeds.front(), window);

  std::vector<Grid> occ;  // occurrence indicator per small pattern
  occ.reserve(small.size());
  for (const Pattern& u : small) {
    Grid o(x.lo(), x.hi());
    x.for_each_set([&](const Vec& pos, int) {
      for (std::size_t i = 0; i < ball_r.size(); ++i) {
        int have = x.get_checked(pos + ball_r[i]);
        if (have < 0 || have != u.cells[i]) return;
      }
      o.set(pos, 1);
    });
    occ.push_back(std::move(o));
  }

  auto window_passes = [&](int R) {
    PointSet reach = ball_points(R + static_cast<int>(std::ceil(std::sqrt(
                                          static_cast<double>(ball_r.norm_sq_max())))),
                                 sub.dim());
    Coord r2 = static_cast<Coord>(R) * static_cast<Coord>(R);
    for (const Vec& c : ball_points(window_radius - R - 1, sub.dim())) {
      for (std::size_t ui = 0; ui < small.size(); ++ui) {
        bool found = false;
        for (const Vec& o : reach) {
          Vec cand = c + o;
          if (occ[ui].get_checked(cand) != 1) continue;
          bool inside = true;
          for (const Vec& s : ball_r)
            if ((cand + s - c).norm_sq() > r2) {
              inside = false;
              break;
            }
          if (inside) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
    }
    return true;
  };

  auto enumeration_passes = [&](int R) {
    PointSet ball_R = ball_points(R, sub.dim());
    PointSet offsets = shrink(ball_R, ball_r);
    for (const Pattern& p : eng.over(ball_R)) {
      Grid g = Grid::from_pattern(p);
      for (const Pattern& u : small) {
        bool found = false;
        for (const Vec& o : offsets) {
          bool match = true;
          for (std::size_t i = 0; i < ball_r.size() && match; ++i)
            match = g.get(ball_r[i] + o) == u.cells[i];
          if (match) {
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
    }
    return true;
  };

  for (int R = r; R <= r_max; ++R) {
    out.scanned_up_to = R;
    if (window_passes(R) && enumeration_passes(R)) {
      out.r_emp = R;
      break;
    }
  }

  // Growth bound (2||F1|| + ||L||^N (2||F1|| + d)) r^t with
  // N = |A|^2 + (|A|+1)^{(6 r_bar)^d}.
  double t = -std::log(sub.sys.mat_norm) / std::log(sub.sys.inv_norm);
  double f1n = round_up(sub.sys.F1.norm_max());
  Magnitude n_mag =
      Magnitude::from_int(sub.letter_count() * sub.letter_count())
          .add(Magnitude::from_int(sub.letter_count() + 1)
                   .pow(Magnitude::from_double(std::pow(6.0 * sub.sys.r_bar, sub.dim())).ceil()));
  Magnitude bound = Magnitude::from_double(2.0 * f1n)
                        .add(Magnitude::from_double(sub.sys.mat_norm)
                                 .pow(n_mag)
                                 .mul(Magnitude::from_double(2.0 * f1n + sub.dim())));
  if (r > 1) bound = bound.mul(Magnitude::from_double(static_cast<double>(r)).pow(Magnitude::from_double(t)));
  out.r_bound = bound;
  return out;
}

AperiodicityReport aperiodicity_scan(const Substitution& sub, int window_radius,
                                     int period_bound) {
  AperiodicityReport rep;
  rep.window_radius = window_radius;
  rep.period_bound = period_bound;

  std::vector<GermSeed> seeds;
  for (int pm = 2; seeds.empty() && pm <= 64; pm *= 2) seeds = periodic_seeds(sub, pm);
  if (seeds.empty()) fail(ErrorCode::Internal, "no periodic seed found for a primitive substitution");

  PointSet window = ball_points(window_radius, sub.dim());
  Grid g = expand_seed_grid(sub, seeds.front(), window);
  for (const Vec& p : ball_points(period_bound, sub.dim())) {
    if (p.is_zero()) continue;
    bool consistent = true;
    for (const Vec& q : window) {
      int a = g.get_checked(q), b = g.get_checked(q + p);
      if (a >= 0 && b >= 0 && a != b) {
        consistent = false;
        break;
      }
    }
    if (consistent) rep.consistent_periods.push_back(p);
  }
  return rep;
}

}  // namespace constshape
