#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace constshape;
using test::box;

namespace {

// Closed-form singular values of a 2x2 integer matrix.
std::pair<double, double> closed_form_2x2(const Mat& m) {
  double t = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      t += static_cast<double>(m.at(i, j)) * static_cast<double>(m.at(i, j));
  double d = static_cast<double>(m.det());
  double disc = std::sqrt(t * t - 4 * d * d);
  return {std::sqrt((t + disc) / 2), std::sqrt((t - disc) / 2)};
}

}  // namespace

TEST_CASE("expansion check accepts 2*Id with exact norms") {
  ExpansionCheck chk = check_expansion(Mat::scalar(2, 2));
  CHECK(chk.det == 4);
  CHECK(chk.mat_norm == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(chk.inv_norm == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("expansion check rejects a shear with eigenvalue 1") {
  CHECK_THROWS_AS(check_expansion(Mat::of({{1, 1}, {0, 1}})), Error);
}

TEST_CASE("expansion check rejects singular and ambiguous matrices") {
  CHECK_THROWS_AS(check_expansion(Mat::of({{2, 0}, {4, 0}})), Error);
  try {
    check_expansion(Mat::of({{1, 0}, {0, 2}}));  // smallest singular value exactly 1
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousExpansion);
  }
}

TEST_CASE("triangular matrix norms match the 2x2 closed form") {
  Mat m = Mat::of({{2, 1}, {0, 2}});
  ExpansionCheck chk = check_expansion(m);
  auto [smax, smin] = closed_form_2x2(m);
  CHECK(chk.mat_norm == doctest::Approx(smax).epsilon(1e-10));
  CHECK(chk.inv_norm == doctest::Approx(1.0 / smin).epsilon(1e-10));
  CHECK(chk.sigma_min == doctest::Approx(smin).epsilon(1e-10));
}

TEST_CASE("fundamental domain check on the triangular support") {
  Mat l = Mat::scalar(2, 2);
  PointSet tri(2, {{0, 0}, {1, 0}, {0, 1}, {-1, -1}});
  CHECK(check_fundamental_domain(l, tri).ok);
  PointSet block(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(check_fundamental_domain(l, block).ok);
  PointSet bad(2, {{0, 0}, {2, 0}, {0, 1}, {1, 1}});
  DomainReport rep = check_fundamental_domain(l, bad);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.duplicate_cosets.size() == 1);
  CHECK(rep.duplicate_cosets[0].first == Vec{0, 0});
  CHECK(rep.duplicate_cosets[0].second == Vec{2, 0});
}

TEST_CASE("decompose on the triangular system") {
  Substitution tri = test::fixture("triangular.json");
  auto [j0, f0] = decompose(tri.sys, Vec{0, 0});
  CHECK(j0 == Vec{0, 0});
  CHECK(f0 == Vec{0, 0});
  auto [j1, f1] = decompose(tri.sys, Vec{1, 0});
  CHECK(j1 == Vec{0, 0});
  CHECK(f1 == Vec{1, 0});
  auto [j2, f2] = decompose(tri.sys, Vec{3, 3});
  CHECK(j2 == Vec{2, 2});
  CHECK(f2 == Vec{-1, -1});
}

TEST_CASE("decompose round trip on a window") {
  Substitution tri = test::fixture("triangular.json");
  for (const Vec& p : box(-20, 20, 2)) {
    auto [j, f] = decompose(tri.sys, p);
    CHECK(tri.sys.L.apply(j) + f == p);
    CHECK(tri.sys.F1.contains(f));
  }
}

TEST_CASE("support levels have the right cardinality and members") {
  Substitution tri = test::fixture("triangular.json");
  CHECK(support_iterate(tri.sys, 2).size() == 16);
  PointSet f4 = support_iterate(tri.sys, 4);
  CHECK(f4.size() == 256);
  CHECK(f4.contains(Vec{-2, 5}));

  Substitution tm = test::fixture("tm1d.json");
  CHECK(support_iterate(tm.sys, 3) == box(0, 7, 1));
}

TEST_CASE("each support level is a fundamental domain of the power") {
  Substitution tri = test::fixture("triangular.json");
  for (int n = 1; n <= 5; ++n) {
    PointSet fn = support_iterate(tri.sys, n);
    CHECK(check_fundamental_domain(tri.sys.L.pow(n), fn).ok);
  }
}

TEST_CASE("digit decomposition reproduces the worked identity") {
  Substitution tri = test::fixture("triangular.json");
  KResult k = compute_K(tri.sys);
  DigitDecomposition d = digit_decompose(tri.sys, k.K, Vec{-2, 5}, 16);
  CHECK(d.n == 4);
  CHECK(d.k == Vec{0, 0});
  REQUIRE(d.digits.size() == 4);
  CHECK(d.digits[0] == Vec{0, 1});
  CHECK(d.digits[1] == Vec{1, 0});
  CHECK(d.digits[2] == Vec{-1, -1});
  CHECK(d.digits[3] == Vec{0, 1});
  CHECK(compose_digits(tri.sys, d.digits) + tri.sys.L.pow(d.n).apply(d.k) == Vec{-2, 5});
}

TEST_CASE("digit decomposition agrees with brute force in one dimension") {
  Substitution tm = test::fixture("tm1d.json");
  PointSet k(1, {{-1}, {0}});
  DigitDecomposition d = digit_decompose(tm.sys, k, Vec{-5}, 16);
  CHECK(d.k == Vec{-1});

  // Brute force: the minimal n with -5 = 2^n k + sum 2^i d_i over all digit
  // strings d in {0,1}^n, k in K.
  int best_n = -1;
  for (int n = 0; n <= 8 && best_n < 0; ++n) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      for (Coord kk : {-1LL, 0LL}) {
        Coord v = kk;
        for (int i = n - 1; i >= 0; --i) v = 2 * v + ((mask >> i) & 1);
        if (v == -5 && best_n < 0) best_n = n;
      }
    }
  }
  CHECK(d.n == best_n);
}

TEST_CASE("digit decomposition reports uncovered points") {
  Substitution tm = test::fixture("tm1d.json");
  PointSet not_k(1, {{0}});  // misses the cycle at -1
  CHECK_THROWS_AS(digit_decompose(tm.sys, not_k, Vec{-5}, 16), Error);
}

TEST_CASE("shrink") {
  PointSet f = box(0, 3, 1);
  PointSet e(1, {{0}, {1}});
  CHECK(shrink(f, e) == box(0, 2, 1));

  PointSet zero(1, {{0}});
  CHECK(shrink(f, zero) == f);

  // 0 in F but F not closed under addition: proper shrink.
  PointSet g(1, {{0}, {1}, {3}});
  CHECK(shrink(g, g).size() < g.size());

  // Monotone: larger E shrinks more.
  PointSet e2(1, {{0}, {1}, {2}});
  CHECK(shrink(f, e2).is_subset_of(shrink(f, e)));
}

TEST_CASE("shrink of the worked support level contains the witness") {
  Substitution tri = test::fixture("triangular.json");
  PointSet f4 = support_iterate(tri.sys, 4);
  KResult k = compute_K(tri.sys);
  PointSet c1 =
      covering_first_iterate(tri.sys, PointSet(2, {{0, 0}}), tri.sys.F1.sum(tri.sys.F1));
  CHECK(shrink(f4, c1.sum(k.K)).contains(Vec{-2, 5}));
}

TEST_CASE("symmetric difference ratio") {
  CHECK(sym_diff_ratio(box(0, 9, 1), Vec{1}) == Ratio{1, 5});  // = 2/10 reduced
  CHECK(sym_diff_ratio(box(0, 9, 1), Vec{0}) == Ratio{0, 1});
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> pts;
    for (int i = 0; i < 30; ++i)
      pts.push_back(
          Vec{static_cast<Coord>(rng() % 41) - 20, static_cast<Coord>(rng() % 41) - 20});
    PointSet s(2, pts);
    Vec v{static_cast<Coord>(rng() % 7) - 3, static_cast<Coord>(rng() % 7) - 3};
    CHECK(sym_diff_ratio(s, v).value() <= 2.0);
    CHECK(sym_diff_ratio(s, Vec{0, 0}) == Ratio{0, 1});
  }
}

TEST_CASE("sparse interval-plus-spikes family") {
  // A_n = [0,n] cup {-k(k+3)/2 : 0 <= k <= n}: arbitrarily long intervals but
  // not Folner; a shift by r > 2 moves half of the set out.
  const int n = 1000;
  std::vector<Vec> pts;
  for (Coord i = 0; i <= n; ++i) pts.push_back(Vec{i});
  for (Coord k = 0; k <= n; ++k) pts.push_back(Vec{-k * (k + 3) / 2});
  PointSet a(1, pts);
  CHECK(a.size() == 2 * n + 1);
  Ratio r = sym_diff_ratio(a, Vec{3});
  // One-sided escaping fraction |A \ (A+r)| / |A| tends to 1/2; the symmetric
  // ratio is twice that.
  CHECK(std::fabs(r.value() / 2 - 0.5) < 0.05);
  CHECK(r.value() > 0.9);
}

TEST_CASE("ball points") {
  CHECK(ball_points(0, 2).size() == 1);
  CHECK(ball_points(1, 2).size() == 5);
  CHECK(ball_points(std::sqrt(2.0), 2).size() == 9);
  PointSet b = ball_points(2.5, 2);
  CHECK(b == b.negate());
}

TEST_CASE("renderings of small objects") {
  Substitution tri = test::fixture("triangular.json");
  CHECK(render_ascii_points(tri.sys.F1) == ".#.\n.##\n#..\n");
  CHECK(render_ascii_points(PointSet(2)) == "");
  CHECK(render_ascii(tri.rule_pattern(0), tri.alphabet) == ".b.\n.ab\na..\n");
}
