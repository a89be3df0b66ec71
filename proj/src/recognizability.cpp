#include "constshape/recognizability.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace constshape {

RecogConstants recog_bound(const Substitution& sub, RecogVariant variant) {
  RecogConstants out;
  const ExpansionSystem& sys = sub.sys;
  double f1n = round_up(sys.F1.norm_max());
  double alpha = static_cast<double>(sub.letter_count());
  int d = sub.dim();

  out.t = -std::log(sys.mat_norm) / std::log(sys.inv_norm);
  out.r_bar = sys.r_bar;

  Magnitude mat = Magnitude::from_double(sys.mat_norm);
  Magnitude two_f1 = Magnitude::from_double(2.0 * f1n);
  Magnitude rbar_t = Magnitude::from_double(std::pow(sys.r_bar, out.t));

  // N = |A|^2 + (|A|+1)^{(6 r_bar)^d}
  Magnitude n_exp =
      Magnitude::from_int(sub.letter_count() * sub.letter_count())
          .add(Magnitude::from_int(sub.letter_count() + 1)
                   .pow(Magnitude::from_double(std::pow(6.0 * sys.r_bar, d)).ceil()));
  // a = ceil((2||F1|| + d)(2||F1|| + ||L||^N))
  out.a = Magnitude::from_double(2.0 * f1n + d)
              .mul(two_f1.add(mat.pow(n_exp)))
              .ceil();

  // inner = ||L^-1||^{|A|-1} * a * 9^t * ||L||^{t(|A|-1)}
  Magnitude inner =
      Magnitude::from_double(std::max(std::pow(sys.inv_norm, alpha - 1.0), 1e-300))
          .mul(out.a)
          .mul(Magnitude::from_double(std::pow(9.0, out.t)))
          .mul(Magnitude::from_double(sys.mat_norm)
                   .pow(Magnitude::from_double(std::max(out.t * (alpha - 1.0), 1e-9))));

  if (variant == RecogVariant::ClosedForm) {
    out.R_bar = inner.mul(rbar_t).add(Magnitude::from_double(4.0 * sys.r_bar)).ceil();
  } else {
    // Through the repetitivity growth bound evaluated at 9 ||L||^{|A|-1} r_bar.
    double radius = 9.0 * std::pow(sys.mat_norm, alpha - 1.0) * sys.r_bar;
    Magnitude rep = two_f1.add(mat.pow(n_exp).mul(Magnitude::from_double(2.0 * f1n + d)))
                        .mul(Magnitude::from_double(std::pow(radius, out.t)));
    out.R_bar = Magnitude::from_double(std::max(std::pow(sys.inv_norm, alpha - 1.0), 1e-300))
                    .mul(rep)
                    .add(Magnitude::from_double(4.0 * sys.r_bar))
                    .ceil();
  }

  // n_bar = ceil(|A|^{(2 R_bar + 6 r_bar)^d})
  Magnitude radius_term = out.R_bar.mul(Magnitude::from_int(2))
                              .add(Magnitude::from_double(6.0 * sys.r_bar).ceil());
  out.n_bar = Magnitude::from_int(sub.letter_count())
                  .pow(radius_term.pow(Magnitude::from_int(d)))
                  .ceil();

  // bound = 2||L||^{|A|} [2||F1|| + ||L||^{n_bar+|A|} (2||F1|| + 7 r_bar + inner') r_bar^t]
  Magnitude inner_prime =
      Magnitude::from_double(std::max(std::pow(sys.inv_norm, alpha - 1.0), 1e-300))
          .mul(out.a)
          .mul(Magnitude::from_double(std::pow(9.0, out.t)))
          .mul(Magnitude::from_double(sys.mat_norm)
                   .pow(Magnitude::from_double(std::max(out.t * (alpha - 1.0), 1e-9))));
  Magnitude bracket =
      two_f1.add(mat.pow(out.n_bar.add(Magnitude::from_int(sub.letter_count())))
                     .mul(Magnitude::from_double(2.0 * f1n + 7.0 * sys.r_bar)
                              .add(inner_prime))
                     .mul(rbar_t));
  out.bound = Magnitude::from_int(2)
                  .mul(Magnitude::from_double(sys.mat_norm)
                           .pow(Magnitude::from_int(sub.letter_count())))
                  .mul(bracket);
  out.bound_log10 = out.bound.approx().log10_tower();
  return out;
}

namespace {

struct WindowHash {
  // FNV over the radius-R ball contents around a center.
  static std::size_t of(const Grid& g, const Vec& center, const PointSet& ball) {
    std::size_t h = 1469598103934665603ull;
    for (const Vec& q : ball) {
      h ^= static_cast<std::size_t>(g.get(center + q) + 1);
      h *= 1099511628211ull;
    }
    return h;
  }
};

bool windows_equal(const Grid& g, const Vec& a, const Vec& b, const PointSet& ball) {
  for (const Vec& q : ball)
    if (g.get(a + q) != g.get(b + q)) return false;
  return true;
}

}  // namespace

EmpiricalRecog empirical_recognizability(LanguageEngine& eng, int window_radius, int r_max) {
  const Substitution& sub = eng.sub();
  std::vector<GermSeed> seeds;
  for (int pm = 2; seeds.empty() && pm <= 64; pm *= 2) seeds = periodic_seeds(eng, pm);
  if (seeds.empty())
    fail(ErrorCode::Internal, "no periodic seed found for a primitive substitution");
  const GermSeed& seed = seeds.front();

  // Expansion of the fixed point x of zeta^p and of its one-step preimage x'
  // with zeta(x') = x: the previous germ on the cycle.
  PointSet window = ball_points(window_radius, sub.dim());
  Grid x = expand_seed_grid(sub, seed, window);
  Pattern prev_germ = seed.germ;
  for (int i = 0; i < seed.period - 1; ++i)
    prev_germ = substitute_pattern(sub, prev_germ).restrict_to(eng.remainder_set());
  GermSeed prev{prev_germ, seed.period};
  Grid x_prev = expand_seed_grid(sub, prev, window);

  EmpiricalRecog out;
  out.window_radius = window_radius;

  for (int r = 0; r <= r_max; ++r) {
    PointSet ball = ball_points(r, sub.dim());
    // Centers whose radius-r ball is fully inside the expanded region.
    std::vector<Vec> centers;
    for (const Vec& q : ball_points(std::max(0, window_radius - r), sub.dim()))
      if (x.get_checked(q) >= 0) {
        bool full = true;
        for (const Vec& b : ball)
          if (x.get_checked(q + b) < 0) {
            full = false;
            break;
          }
        if (full) centers.push_back(q);
      }
    bool any_image_center = false;
    std::unordered_map<std::size_t, std::vector<Vec>> groups;
    for (const Vec& q : centers) groups[WindowHash::of(x, q, ball)].push_back(q);

    bool violated = false;
    for (auto& [h, members] : groups) {
      (void)h;
      for (const Vec& a : members) {
        // a = L(i) for integral i?
        Vec ai = sub.sys.adj.apply(a);
        bool integral = true;
        Vec i(sub.dim());
        for (int c = 0; c < sub.dim(); ++c) {
          if (ai.c[c] % sub.sys.det != 0) {
            integral = false;
            break;
          }
          i.c[c] = ai.c[c] / sub.sys.det;
        }
        if (!integral) continue;
        if (x_prev.get_checked(i) < 0) continue;
        any_image_center = true;
        for (const Vec& b : members) {
          if (a == b) continue;
          ++out.pairs_tested;
          if (!windows_equal(x, a, b, ball)) continue;  // hash collision
          Vec bi = sub.sys.adj.apply(b);
          bool b_integral = true;
          Vec k(sub.dim());
          for (int c = 0; c < sub.dim(); ++c) {
            if (bi.c[c] % sub.sys.det != 0) {
              b_integral = false;
              break;
            }
            k.c[c] = bi.c[c] / sub.sys.det;
          }
          if (!b_integral) {
            violated = true;
            break;
          }
          int la = x_prev.get_checked(i), lb = x_prev.get_checked(k);
          if (la < 0 || lb < 0) continue;  // preimage letter not visible; skip pair
          if (la != lb) {
            violated = true;
            break;
          }
        }
        if (violated) break;
      }
      if (violated) break;
    }

    if (!any_image_center) {
      if (out.r_pass) return out;
      fail(ErrorCode::WindowTooSmall,
           "no fully testable center at radius " + std::to_string(r));
    }
    if (violated) {
      out.r_fail_below = r;
      out.r_pass.reset();
    } else if (!out.r_pass) {
      out.r_pass = r;
      return out;
    }
  }
  return out;
}

EmpiricalRecog empirical_recognizability(const Substitution& sub, int window_radius, int r_max) {
  LanguageEngine eng(sub);
  return empirical_recognizability(eng, window_radius, r_max);
}

Desubstitution desubstitute(const Substitution& sub, const Pattern& window, int margin) {
  Grid g = Grid::from_pattern(window);
  PointSet effective = window.support;
  if (margin > 0) effective = shrink(window.support, ball_points(margin, sub.dim()));
  if (effective.empty())
    fail(ErrorCode::WindowTooSmall, "window vanishes after trimming the margin");

  struct Candidate {
    Vec shift;
    Pattern preimage;
  };
  std::vector<Candidate> found;

  for (const Vec& f : sub.sys.F1) {
    // Hypothesis: window_n = zeta(x')_{n+f}. Cell m of x' constrains the
    // block at L(m) - f.
    std::vector<Vec> sources;
    for (const Vec& n : effective) sources.push_back(digit_strip(sub.sys, n + f).first);
    PointSet src(sub.dim(), std::move(sources));

    bool consistent = true;
    bool ambiguous = false;
    std::vector<Vec> keep;
    std::vector<int> letters;
    for (const Vec& m : src) {
      Vec base = sub.sys.L.apply(m) - f;
      bool fully_visible = true;
      int match = -1;
      int matches = 0;
      for (int a = 0; a < sub.letter_count() && !ambiguous; ++a) {
        bool ok = true;
        for (std::size_t fi = 0; fi < sub.sys.F1.size(); ++fi) {
          int have = g.get_checked(base + sub.sys.F1[fi]);
          if (have < 0) continue;
          if (have != sub.rule_at(a, static_cast<int>(fi))) {
            ok = false;
            break;
          }
        }
        if (ok) {
          ++matches;
          match = a;
        }
      }
      for (std::size_t fi = 0; fi < sub.sys.F1.size(); ++fi)
        if (g.get_checked(base + sub.sys.F1[fi]) < 0) fully_visible = false;
      if (matches == 0) {
        consistent = false;
        break;
      }
      if (fully_visible) {
        if (matches > 1) {
          ambiguous = true;
          break;
        }
        keep.push_back(m);
        letters.push_back(match);
      }
    }
    if (ambiguous)
      fail(ErrorCode::Ambiguous, "several preimage letters fit a fully visible block");
    if (!consistent || keep.empty()) continue;
    PointSet sup(sub.dim(), keep);
    std::vector<int> cells(sup.size());
    for (std::size_t i = 0; i < keep.size(); ++i) cells[static_cast<std::size_t>(sup.index_of(keep[i]))] = letters[i];
    found.push_back(Candidate{f, Pattern(sup, cells)});
  }

  if (found.empty())
    fail(ErrorCode::NoDecomposition, "window admits no one-step decomposition");
  if (found.size() > 1)
    fail(ErrorCode::Ambiguous, "several shifts admit a decomposition; radius too small");
  return Desubstitution{found.front().preimage, found.front().shift};
}

}  // namespace constshape
