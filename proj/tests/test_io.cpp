#include "doctest.h"
#include "helpers.hpp"

using namespace constshape;

TEST_CASE("fixtures load and the round trip is byte-stable") {
  for (const char* name :
       {"triangular.json", "square16.json", "tm1d.json", "block2d3.json", "sparse13.json"}) {
    Substitution sub = test::fixture(name);
    std::string once = substitution_to_json(sub).dump(2);
    Substitution again = substitution_from_json(Json::parse(once));
    CHECK(substitution_to_json(again).dump(2) == once);
    CHECK(again.rules == sub.rules);
    CHECK(again.sys.F1 == sub.sys.F1);
  }
}

TEST_CASE("schema violations name the offending field") {
  Json good = substitution_to_json(test::fixture("triangular.json"));

  SUBCASE("rule length mismatch names the symbol") {
    Json bad = good;
    bad["rules"]["a"].erase(3);
    CHECK_THROWS_WITH_AS(substitution_from_json(bad), doctest::Contains("'a'"), Error);
  }

  SUBCASE("unknown symbol in a rule") {
    Json bad = good;
    bad["rules"]["b"][0] = "z";
    CHECK_THROWS_WITH_AS(substitution_from_json(bad), doctest::Contains("'z'"), Error);
  }

  SUBCASE("missing field") {
    Json bad = good;
    bad.erase("matrix");
    CHECK_THROWS_WITH_AS(substitution_from_json(bad), doctest::Contains("matrix"), Error);
  }

  SUBCASE("duplicate alphabet symbol") {
    Json bad = good;
    bad["alphabet"][1] = "a";
    CHECK_THROWS_AS(substitution_from_json(bad), Error);
  }

  SUBCASE("coordinates must be arrays of integers") {
    Json bad = good;
    bad["support"][0] = "0,0";
    CHECK_THROWS_AS(substitution_from_json(bad), Error);
  }
}

TEST_CASE("block map documents round trip") {
  BlockMap psi = test::fixture_map("psi.json");
  CHECK(psi.support.size() == 4);
  CHECK(psi.table.size() == 16);
  Json j = blockmap_to_json(psi, 2);
  BlockMap again = blockmap_from_json(j);
  CHECK(again.table == psi.table);
  CHECK(again.support == psi.support);
}

TEST_CASE("pattern documents") {
  Substitution tri = test::fixture("triangular.json");
  Pattern p = iterate(tri, 0, 1);
  Json j = pattern_to_json(p, tri.alphabet, tri.dim());
  Pattern again = pattern_from_json(j, tri);
  CHECK(again == p);
}

TEST_CASE("renders match the committed goldens") {
  Substitution tri = test::fixture("triangular.json");
  std::string golden_dir = GOLDEN_DIR;
  CHECK(render_ascii_points(tri.sys.F1) == read_file(golden_dir + "/triangular_f1.txt"));
  CHECK(render_ascii_points(support_iterate(tri.sys, 2)) ==
        read_file(golden_dir + "/triangular_f2.txt"));
  std::vector<GermSeed> seeds = periodic_seeds(tri, 2);
  CHECK(render_ascii(seeds.front().germ, tri.alphabet) ==
        read_file(golden_dir + "/triangular_germ.txt"));
}

TEST_CASE("svg renders are deterministic and well-formed") {
  Substitution tri = test::fixture("triangular.json");
  std::string svg = render_svg(tri.rule_pattern(0), tri.alphabet);
  CHECK(svg == render_svg(tri.rule_pattern(0), tri.alphabet));
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<rect") != std::string::npos);

  std::string tile = render_tile_svg(tri.sys, 3);
  CHECK(tile.find("<circle") != std::string::npos);
  // One mark per support point.
  std::size_t count = 0;
  for (std::size_t at = tile.find("<circle"); at != std::string::npos;
       at = tile.find("<circle", at + 1))
    ++count;
  CHECK(count == 64);
}
