#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"

using namespace constshape;
using test::box;
using test::make_pattern;

namespace {

std::vector<std::vector<long long>> mat_mul(const std::vector<std::vector<long long>>& a,
                                            const std::vector<std::vector<long long>>& b) {
  std::size_t n = a.size();
  std::vector<std::vector<long long>> c(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Window-scan complexity oracle: count distinct ball-r windows of an
// expanded periodic point.
long long window_complexity(const Substitution& sub, int r, int window_radius) {
  std::vector<GermSeed> seeds = periodic_seeds(sub, 4);
  REQUIRE(!seeds.empty());
  PointSet window = ball_points(window_radius, sub.dim());
  Grid x = expand_seed_grid(sub, seeds.front(), window);
  PointSet ball = ball_points(r, sub.dim());
  std::set<std::vector<int>> seen;
  for (const Vec& c : ball_points(window_radius - r - 1, sub.dim())) {
    std::vector<int> cells;
    bool full = true;
    for (const Vec& q : ball) {
      int v = x.get_checked(c + q);
      if (v < 0) {
        full = false;
        break;
      }
      cells.push_back(v);
    }
    if (full) seen.insert(cells);
  }
  return static_cast<long long>(seen.size());
}

const std::vector<std::vector<int>> kTriangularGermCells{
    // cells over K in canonical order (-1,0), (0,-1), (0,0), (1,1); 0 = a.
    {1, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {0, 1, 0, 1},
    {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 0}, {1, 1, 1, 1},
};

}  // namespace

TEST_CASE("validation of the fixtures") {
  CHECK(validate(test::fixture("triangular.json")).ok);
  CHECK(validate(test::fixture("dragon.json")).ok);
  CHECK(validate(test::fixture("square16.json")).ok);
  CHECK(validate(test::fixture("block2d3.json")).ok);
  ValidationReport sparse = validate(test::fixture("sparse13.json"));
  CHECK_FALSE(sparse.ok);
  bool folner_failed = false;
  for (auto& [name, ok] : sparse.checks)
    if (name == "folner" && !ok) folner_failed = true;
  CHECK(folner_failed);
}

TEST_CASE("rules with the wrong support are rejected") {
  Substitution tri = test::fixture("triangular.json");
  tri.rules[0].pop_back();
  CHECK_FALSE(validate(tri).ok);
}

TEST_CASE("incidence matrix") {
  Substitution tri = test::fixture("triangular.json");
  auto m = incidence_matrix(tri);
  CHECK(m == std::vector<std::vector<long long>>{{2, 2}, {2, 2}});

  Substitution sq = test::fixture("square16.json");
  auto ms = incidence_matrix(sq);
  CHECK(ms.size() == 16);
  for (const auto& row : ms) {
    long long sum = 0;
    for (long long v : row) sum += v;
    CHECK(sum == 4);  // row sums equal |F1|
  }

  Substitution constant = test::fixture("constant1.json");
  CHECK(incidence_matrix(constant) == std::vector<std::vector<long long>>{{4}});
}

TEST_CASE("primitivity with the smallest exponent") {
  auto [p1, k1] = is_primitive(test::fixture("triangular.json"));
  CHECK(p1);
  CHECK(k1 == 1);

  auto [p2, k2] = is_primitive(test::fixture("square16.json"));
  CHECK(p2);
  CHECK(k2 <= 16 * 16 - 2 * 16 + 2);

  // Two disconnected letters: block-diagonal incidence matrix.
  Substitution split = test::fixture("tm1d.json");
  split.rules[0] = {0, 0};
  split.rules[1] = {1, 1};
  auto [p3, k3] = is_primitive(split);
  CHECK_FALSE(p3);
  (void)k3;
}

TEST_CASE("iterating letters") {
  Substitution tri = test::fixture("triangular.json");
  Pattern z1 = iterate(tri, 0, 1);
  CHECK(z1.support == tri.sys.F1);
  CHECK(z1.at(Vec{0, 0}) == 0);
  CHECK(z1.at(Vec{1, 0}) == 1);
  CHECK(z1.at(Vec{0, 1}) == 1);
  CHECK(z1.at(Vec{-1, -1}) == 0);

  CHECK(iterate(tri, 0, 3).support.size() == 64);

  // Letter counts of the second iterate match the second matrix power.
  auto m2 = mat_mul(incidence_matrix(tri), incidence_matrix(tri));
  Pattern z2 = iterate(tri, 0, 2);
  std::vector<long long> counts(2, 0);
  for (int c : z2.cells) ++counts[static_cast<std::size_t>(c)];
  CHECK(counts[0] == m2[0][0]);
  CHECK(counts[1] == m2[0][1]);
  CHECK(counts[0] == 8);
  CHECK(counts[1] == 8);
}

TEST_CASE("abelianization for every fixture up to the fourth level") {
  for (const char* name : {"triangular.json", "tm1d.json", "square16.json"}) {
    Substitution sub = test::fixture(name);
    auto m = incidence_matrix(sub);
    auto pow = m;
    for (int n = 1; n <= 4; ++n) {
      if ((name == std::string("square16.json")) && n > 3) break;
      for (int a = 0; a < sub.letter_count(); ++a) {
        Pattern z = iterate(sub, a, n);
        std::vector<long long> counts(static_cast<std::size_t>(sub.letter_count()), 0);
        for (int c : z.cells) ++counts[static_cast<std::size_t>(c)];
        for (int b = 0; b < sub.letter_count(); ++b)
          CHECK(counts[static_cast<std::size_t>(b)] ==
                pow[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
      }
      pow = mat_mul(pow, m);
    }
  }
}

TEST_CASE("pattern substitution") {
  Substitution tri = test::fixture("triangular.json");
  Pattern single = Pattern::single(Vec{0, 0}, 0);
  CHECK(substitute_pattern(tri, single) == iterate(tri, 0, 1));

  // Direct-expansion associativity on a random three-cell pattern.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec> pts;
    std::vector<int> cells;
    while (pts.size() < 3) {
      Vec p{static_cast<Coord>(rng() % 9) - 4, static_cast<Coord>(rng() % 9) - 4};
      bool dup = false;
      for (const Vec& q : pts) dup |= q == p;
      if (!dup) {
        pts.push_back(p);
        cells.push_back(static_cast<int>(rng() % 2));
      }
    }
    Pattern p = make_pattern(pts, cells);
    Pattern twice = substitute_pattern(tri, substitute_pattern(tri, p));
    // Oracle: place the second iterate of each source letter at L^2(j) + F_2.
    Mat l2 = tri.sys.L.pow(2);
    for (std::size_t i = 0; i < p.support.size(); ++i) {
      Pattern block = iterate(tri, p.cells[i], 2);
      Vec base = l2.apply(p.support[i]);
      for (std::size_t c = 0; c < block.support.size(); ++c)
        CHECK(twice.at(base + block.support[c]) == block.cells[c]);
    }
    CHECK(twice.support.size() == 3 * 16);
  }
}

TEST_CASE("germ image of the remainder set stays inside the next level") {
  Substitution tri = test::fixture("triangular.json");
  KResult k = compute_K(tri.sys);
  CHECK(k.K.is_subset_of(k.K.image(tri.sys.L).sum(tri.sys.F1)));
  LanguageEngine eng(tri);
  for (const Pattern& w : eng.over(k.K)) {
    Pattern img = substitute_pattern(tri, w);
    CHECK(k.K.is_subset_of(img.support));
  }
}

TEST_CASE("triangular seeds are exactly the eight worked germ patterns") {
  Substitution tri = test::fixture("triangular.json");
  std::vector<GermSeed> seeds = periodic_seeds(tri, 2);
  REQUIRE(seeds.size() == 8);
  std::set<std::vector<int>> got;
  for (const GermSeed& s : seeds) {
    CHECK(s.period == 2);
    got.insert(s.germ.cells);
  }
  std::set<std::vector<int>> expect(kTriangularGermCells.begin(), kTriangularGermCells.end());
  CHECK(got == expect);
}

TEST_CASE("sixteen-letter square substitution also has eight second-order seeds") {
  CHECK(periodic_seeds(test::fixture("square16.json"), 2).size() == 8);
}

TEST_CASE("one-dimensional seeds over the two-cell remainder set") {
  Substitution tm = test::fixture("tm1d.json");
  std::vector<GermSeed> seeds = periodic_seeds(tm, 2);
  CHECK(seeds.size() == 4);
  for (const GermSeed& s : seeds) {
    CHECK(s.germ.support == PointSet(1, {{-1}, {0}}));
    // The germ map applied twice returns the germ.
    Pattern cur = s.germ;
    for (int i = 0; i < 2; ++i)
      cur = substitute_pattern(tm, cur).restrict_to(s.germ.support);
    CHECK(cur == s.germ);
  }
}

TEST_CASE("seed count is bounded by the germ language") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  CHECK(periodic_seeds(tri, 2).size() <= eng.over(eng.remainder_set()).size());
}

TEST_CASE("expanding a seed") {
  Substitution tri = test::fixture("triangular.json");
  std::vector<GermSeed> seeds = periodic_seeds(tri, 2);
  REQUIRE(!seeds.empty());
  const GermSeed& seed = seeds.front();

  SUBCASE("single-cell window returns the germ cell") {
    PointSet zero(2, {{0, 0}});
    Pattern p = expand_seed(tri, seed, zero);
    CHECK(p.at(Vec{0, 0}) == seed.germ.at(Vec{0, 0}));
  }

  SUBCASE("expansion is invariant under the period-power on the window") {
    PointSet window = box(-8, 8, 2);
    Pattern p = expand_seed(tri, seed, window);
    Pattern back = p;
    for (int i = 0; i < seed.period; ++i) back = substitute_pattern(tri, back);
    CHECK(back.restrict_to(window) == p);
  }

  SUBCASE("nested windows agree") {
    Pattern small = expand_seed(tri, seed, box(-3, 3, 2));
    Pattern large = expand_seed(tri, seed, box(-9, 9, 2));
    CHECK(large.restrict_to(small.support) == small);
  }
}

TEST_CASE("language over a single cell lists the letters") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  PointSet zero(2, {{0, 0}});
  CHECK(eng.over(zero).size() == 2);
}

TEST_CASE("germ language contains the eight worked patterns") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  std::vector<Pattern> lk = eng.over(eng.remainder_set());
  for (const auto& cells : kTriangularGermCells) {
    Pattern p(eng.remainder_set(), cells);
    CHECK(std::find(lk.begin(), lk.end(), p) != lk.end());
  }
}

TEST_CASE("square language contains the eight displayed generators") {
  Substitution sq = test::fixture("square16.json");
  LanguageEngine eng(sq);
  PointSet sup = box(0, 1, 2);
  std::vector<Pattern> lang = eng.over(sup);
  // cells in canonical order (0,0), (0,1), (1,0), (1,1)
  const std::vector<std::vector<int>> expected{
      {0, 9, 10, 0},  {8, 4, 6, 8},  {3, 13, 14, 0}, {11, 1, 2, 8},
      {4, 13, 10, 12}, {9, 1, 6, 7}, {6, 9, 14, 12}, {10, 4, 2, 7},
  };
  for (const auto& cells : expected) {
    Pattern p(sup, cells);
    CHECK_MESSAGE(std::find(lang.begin(), lang.end(), p) != lang.end(),
                  p.str(sq.alphabet));
  }
}

TEST_CASE("language restriction is consistent across nested supports") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  PointSet big = box(0, 1, 2);
  PointSet small(2, {{0, 0}, {1, 1}});
  std::vector<Pattern> over_big = eng.over(big);
  std::vector<Pattern> over_small = eng.over(small);
  std::set<std::vector<int>> restricted;
  for (const Pattern& p : over_big) restricted.insert(p.restrict_to(small).cells);
  std::set<std::vector<int>> direct;
  for (const Pattern& p : over_small) direct.insert(p.cells);
  CHECK(restricted == direct);
}

TEST_CASE("germ map sends germ language into germ language") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  std::vector<Pattern> lk = eng.over(eng.remainder_set());
  for (const Pattern& w : lk) {
    Pattern img = substitute_pattern(tri, w).restrict_to(eng.remainder_set());
    CHECK(std::find(lk.begin(), lk.end(), img) != lk.end());
  }
}

TEST_CASE("complexity against the frozen window oracle") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  CHECK(complexity(eng, 0) == 2);
  const long long frozen[] = {2, 28, 160, 470};
  for (int r = 1; r <= 3; ++r) {
    long long lib = complexity(eng, r);
    CHECK(lib == frozen[r]);
    CHECK(lib == window_complexity(tri, r, 48));
  }
  // Exponent arithmetic: -log 4 / log(1/2) = 2, so the bound scales as r^2.
  double t = -std::log(4.0) / std::log(tri.sys.inv_norm);
  CHECK(t == doctest::Approx(2.0).epsilon(1e-9));
  Magnitude bound = complexity_bound(tri, eng.core_support(), 4.0);
  CHECK(Magnitude::from_int(complexity(eng, 4)).compare(bound) <= 0);
}

TEST_CASE("repetitivity radius, growth bound, and letter occurrences") {
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);

  RepetitivityResult r0 = repetitivity(eng, 0, 8);
  CHECK(r0.r_emp >= 0);
  // Every letter occurs in the primitivity-exponent image of every letter.
  auto [prim, k] = is_primitive(tri);
  REQUIRE(prim);
  for (int a = 0; a < tri.letter_count(); ++a) {
    Pattern z = iterate(tri, a, k);
    std::set<int> letters(z.cells.begin(), z.cells.end());
    CHECK(letters.size() == 2);
  }

  RepetitivityResult r1 = repetitivity(eng, 1, 16);
  CHECK(r1.r_emp == 13);
  CHECK(Magnitude::from_int(r1.r_emp).compare(r1.r_bound) < 0);
}

TEST_CASE("repulsion at desk scale") {
  // Two occurrences of a pattern holding a ball of the repetitivity radius
  // force the occurrences to coincide.
  Substitution tri = test::fixture("triangular.json");
  LanguageEngine eng(tri);
  const int dist = 1;
  RepetitivityResult rep = repetitivity(eng, dist, 16);
  REQUIRE(rep.r_emp > 0);
  int radius = rep.r_emp;

  std::vector<GermSeed> seeds = periodic_seeds(tri, 2);
  Grid x = expand_seed_grid(tri, seeds.front(), ball_points(2 * radius + 8, 2));
  PointSet ball = ball_points(radius, 2);
  // Occurrences of the central ball-pattern within a small search range.
  std::vector<int> center_cells;
  for (const Vec& q : ball) center_cells.push_back(x.get(q));
  for (const Vec& j : ball_points(dist, 2)) {
    if (j.is_zero()) continue;
    bool same = true;
    for (std::size_t i = 0; i < ball.size() && same; ++i) {
      int v = x.get_checked(j + ball[i]);
      same = v >= 0 && v == center_cells[i];
    }
    CHECK_FALSE(same);
  }
}

TEST_CASE("aperiodicity scans") {
  AperiodicityReport tri = aperiodicity_scan(test::fixture("triangular.json"), 16, 8);
  CHECK(tri.consistent_periods.empty());

  AperiodicityReport sq = aperiodicity_scan(test::fixture("square16.json"), 16, 8);
  CHECK(sq.consistent_periods.empty());

  AperiodicityReport constant = aperiodicity_scan(test::fixture("constant1.json"), 8, 2);
  bool has_unit = false;
  for (const Vec& p : constant.consistent_periods) has_unit |= p == Vec{1, 0};
  CHECK(has_unit);
}

TEST_CASE("a rotating expansion matrix") {
  // Index-two system whose matrix rotates while it expands; exercises the
  // skewed digit geometry end to end.
  Substitution dragon = test::fixture("dragon.json");
  CHECK(compute_K(dragon.sys).K == PointSet(2, {{0, 0}, {0, 1}}));
  CHECK(decide_folner(dragon.sys).is_folner);

  std::vector<GermSeed> seeds = periodic_seeds(dragon, 4);
  CHECK(seeds.size() == 4);
  for (const GermSeed& s : seeds) {
    Pattern cur = s.germ;
    for (int i = 0; i < s.period; ++i)
      cur = substitute_pattern(dragon, cur).restrict_to(s.germ.support);
    CHECK(cur == s.germ);
  }

  // Rules are swap-symmetric, so the letter-map search finds both classes.
  LanguageEngine eng(dragon);
  CHECK(search_factors(dragon, dragon, PointSet(2, {{0, 0}}), 2, eng).size() == 2);

  EmpiricalRecog er = empirical_recognizability(eng, 24, 12);
  REQUIRE(er.r_pass.has_value());
  CHECK(*er.r_pass <= 12);
}
