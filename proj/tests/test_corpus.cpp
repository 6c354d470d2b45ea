#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "vbpg/corpus.hpp"
#include "vbpg/errors.hpp"
#include "vbpg/scans.hpp"

using namespace vbpg;
using Catch::Approx;

// Frozen from the oracles in oracles.hpp.
constexpr double kEx51At16 = 1.0988845115895123;
constexpr double kEx51At256 = 2.0609868235873194;
constexpr double kEx53At10 = 30.016662039607269;
constexpr double kEx52At100 = 0.20202020202020202;

TEST_CASE("frozen oracle values", "[corpus]") {
  CHECK(oracle::ex51_ratio(16) == Approx(kEx51At16).epsilon(1e-14));
  CHECK(oracle::ex51_ratio(256) == Approx(kEx51At256).epsilon(1e-14));
  CHECK(oracle::ex53_ratio(10) == Approx(kEx53At10).epsilon(1e-14));
  CHECK(oracle::ex52_bound(100, 0.5) == Approx(kEx52At100).epsilon(1e-14));
}

TEST_CASE("every id pattern loads", "[corpus]") {
  for (const char* id : {"EX_5_1", "EX_5_2", "EX_5_3", "QUAD_SC(3,5)", "QUAD_L1(4,0.2)",
                         "QUAD_MCP(2,0.3,0.5)", "LASSO(10,15,0.1,3)", "TWO_WELL",
                         "JACOBI_BLOCK(8,2,1)"}) {
    INFO(id);
    CorpusEntry e = load_corpus(id);
    CHECK(e.dim() > 0);
    CHECK_FALSE(e.regions.empty());
    if (e.is_composite())
      CHECK(validate_problem(e.composite(), e.sample_box, 200, 9).passed());
  }
}

TEST_CASE("unknown ids list the valid ones", "[corpus]") {
  try {
    load_corpus("QUAD_XX(2)");
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    std::string what = e.what();
    CHECK(what.find("QUAD_SC(n,kappa)") != std::string::npos);
    CHECK(what.find("TWO_WELL") != std::string::npos);
  }
  CHECK_THROWS_AS(load_corpus("QUAD_SC(2)"), ArgumentError);
}

TEST_CASE("EX_5_1 branches", "[corpus]") {
  auto land = load_corpus("EX_5_1").landscape();
  CHECK(land.value(Point{{1.0, -1.0}}) == -1.0);
  CHECK(land.value(Point{{0.5, 0.5}}) == Approx(0.25 - 0.125));
  CHECK_THROWS_AS(load_corpus("EX_5_1").composite(), CapabilityError);
}

TEST_CASE("staircase values and subdifferential", "[corpus]") {
  for (double x : {1e-3, 0.0123, 0.1, 0.26, 0.3, 1.0 / 3, 0.4, 0.5, 0.7, 1.2})
    CHECK(staircase_value(x) == Approx(oracle::staircase(x)).epsilon(1e-14));
  CHECK(staircase_value(-0.5) == 0.0);
  CHECK(staircase_subdiff_dist(-1.0) == 0.0);
  CHECK(staircase_subdiff_dist(0.3) == Approx(0.6));
  CHECK(staircase_subdiff_dist(0.5) == Approx(1.0));
  CHECK(std::isfinite(staircase_value(1e-300)));
}

TEST_CASE("EX_5_3 proximal reference", "[corpus]") {
  Point t = ex53_prox_reference(Point{{0.1, 0.04}});
  CHECK(t[0] == 0.1);
  CHECK(t[1] == 0.0);
  CHECK_THROWS_AS(ex53_prox_reference(Point{{0.1, 0.06}}), RegimeError);
  // brute force agrees inside the regime
  auto land = load_corpus("EX_5_3").landscape();
  Point b = brute_force_prox(land.value, Point{{0.1, 0.04}}, 1.0, 0.1, 1e-5);
  CHECK((b - t).norm() <= 1e-3);
}

TEST_CASE("TWO_WELL sublevel projection", "[corpus]") {
  auto e = load_corpus("TWO_WELL");
  const auto& proj = e.analytic().sublevel_project;
  REQUIRE(proj);
  CHECK(proj(Point{{0.0}}, -1.0)[0] == Approx(2.0).margin(1e-12));
  // [F <= 0] = {-1} U [a, b] around 2
  Point q = proj(Point{{0.5}}, 0.0);
  CHECK(e.composite().value(q) == Approx(0.0).margin(1e-10));
  CHECK(proj(Point{{-1.0}}, 0.0)[0] == -1.0);
}

TEST_CASE("scan values", "[corpus]") {
  auto s1 = scan_counterexample(CounterexampleId::Ex51, {16, 256, 4096});
  CHECK(s1.rows[0].ratio == Approx(kEx51At16).epsilon(1e-12));
  CHECK(s1.rows[1].ratio == Approx(kEx51At256).epsilon(1e-12));
  CHECK(s1.monotone);
  auto s3 = scan_counterexample(CounterexampleId::Ex53, {2, 10, 50});
  CHECK(s3.rows[1].ratio == Approx(30.0).epsilon(0.02));
  CHECK(s3.rows[1].ratio == Approx(kEx53At10).epsilon(1e-12));
  auto s2 = scan_counterexample(CounterexampleId::Ex52, {3, 100, 200}, 0.5);
  CHECK(s2.rows[1].ratio == Approx(kEx52At100).epsilon(1e-12));
  CHECK(s2.monotone);
  CHECK(scan_csv(s2).rfind("n,ratio\n", 0) == 0);
  CHECK_THROWS_AS(scan_counterexample(CounterexampleId::Ex52, {2}, 0.5), ArgumentError);
  CHECK_THROWS_AS(scan_counterexample(CounterexampleId::Ex51, {1}), ArgumentError);
}
