#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "vbpg/corpus.hpp"
#include "vbpg/diagnostics.hpp"
#include "vbpg/errors.hpp"
#include "vbpg/terms.hpp"

using namespace vbpg;
using Catch::Approx;

namespace {

CompositeProblem half_square(Index n) {
  CompositeProblem p;
  p.dim = n;
  p.f = quadratic_term(Matrix::Identity(n, n), Point::Zero(n));
  p.g = zero_term();
  wire_subdiff_dist(p);
  p.analytic.critical_points = CriticalSet{{Point::Zero(n)}, {}, "{0}"};
  p.analytic.optimal_value = 0.0;
  p.analytic.critical_set_is_solution_set = true;
  return p;
}

std::vector<Point> draw(const Landscape& land, const Region& r, std::size_t n = 400,
                        std::uint64_t seed = 1) {
  return sample_region(land, r, SamplerOptions{n, seed, 0});
}

DistanceFn norm_dist() {
  return [](const Point& x) { return x.norm(); };
}

}  // namespace

TEST_CASE("subdifferential EB on the half square has c1 = 1", "[diagnostics]") {
  auto p = half_square(2);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(2), 1.0, 1.0);
  auto c = certify_level_set_subdiff_eb(land, region, 1.0, draw(land, region), norm_dist());
  CHECK(c.verdict == Verdict::CertifiedOnSamples);
  CHECK(c.constant_estimate == Approx(1.0).epsilon(1e-12));
  CHECK(c.n_samples == 400);
  auto j = to_json(c);
  CHECK(j.at("condition") == "level_set_subdiff");
  CHECK(j.at("verdict") == "CERTIFIED_ON_SAMPLES");
  CHECK_FALSE(j.contains("witness"));
}

TEST_CASE("a candidate constant that is too small is refuted", "[diagnostics]") {
  auto p = half_square(2);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(2), 1.0, 1.0);
  CertifyOptions o;
  o.candidate = 0.9;
  auto c = certify_level_set_subdiff_eb(land, region, 1.0, draw(land, region), norm_dist(), o);
  CHECK(c.refuted());
  REQUIRE(c.witness);
  CHECK(c.witness->lhs > 0.9 * c.witness->rhs);
  CHECK(to_json(c).contains("witness"));
}

TEST_CASE("too few samples are rejected", "[diagnostics]") {
  auto p = half_square(1);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(1), 1.0, 1.0);
  std::vector<Point> few(10, Point{{0.5}});
  CHECK_THROWS_AS(certify_level_set_subdiff_eb(land, region, 1.0, few, norm_dist()),
                  InsufficientSamplingError);
}

TEST_CASE("EX_5_1 has the subdifferential EB with c1 <= 1/2", "[diagnostics]") {
  auto e = load_corpus("EX_5_1");
  auto land = e.landscape();
  const auto& r = e.regions.front();
  SublevelDistance d(land, r.F_bar, SublevelOracle::analytic());
  auto c = certify_level_set_subdiff_eb(land, r, 1.0, draw(land, r, 1000), d);
  CHECK_FALSE(c.refuted());
  CHECK(c.constant_estimate <= 0.5 + 1e-6);
}

TEST_CASE("EX_5_1 fails weak metric subregularity", "[diagnostics]") {
  auto e = load_corpus("EX_5_1");
  auto land = e.landscape();
  const auto& r = e.regions.front();
  CertifyOptions o;
  o.witness_sequence = e.witness_sequences.at("weak_metric");
  auto c = certify_weak_metric_subregularity(land, r, draw(land, r, 1000), o);
  CHECK(c.refuted());
  REQUIRE(c.sequence_assessment);
  CHECK(c.sequence_assessment->criterion_met);
  for (const auto& s : c.witness_sequence)
    CHECK(s.ratio == Approx(oracle::ex51_ratio(s.n)).epsilon(1e-9));
}

TEST_CASE("staircase has the subdifferential EB but not KL", "[diagnostics]") {
  auto e = load_corpus("EX_5_2");
  auto land = e.landscape();
  const auto& r = e.regions.front();
  SublevelDistance d(land, r.F_bar, SublevelOracle::analytic());
  auto eb = certify_level_set_subdiff_eb(land, r, 1.0, draw(land, r, 1000), d);
  CHECK_FALSE(eb.refuted());
  CHECK(std::isfinite(eb.constant_estimate));

  CertifyOptions o;
  o.witness_sequence = e.witness_sequences.at("kl");
  auto kl = certify_kl(land, r, 0.5, draw(land, r, 1000), o);
  CHECK(kl.refuted());
  auto j = to_json(kl);
  CHECK(j.at("verdict") == "REFUTED");
  CHECK(j.contains("witness"));
}

TEST_CASE("Bregman EB on the half square has theta = 2", "[diagnostics]") {
  auto p = half_square(2);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(2), 1.0, 1.0);
  auto T = prox_map(p, BregmanStep::constant(BregmanKernel::euclidean(2), 0.5));
  auto c = certify_level_set_bregman_eb(land, T, region, 1.0, draw(land, region), norm_dist());
  CHECK(c.constant_estimate == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("EX_5_3 fails the Bregman proximal EB", "[diagnostics]") {
  auto e = load_corpus("EX_5_3");
  auto land = e.landscape();
  const auto& r = e.regions.front();
  CertifyOptions o;
  o.witness_sequence = e.witness_sequences.at("bregman_prox");
  auto c = certify_bregman_prox_eb(land, *e.prox, r, draw(land, r, 500), o);
  CHECK(c.refuted());
  for (const auto& s : c.witness_sequence)
    CHECK(s.ratio == Approx(oracle::ex53_ratio(s.n)).epsilon(1e-9));
}

TEST_CASE("KL on the half square has c5 = sqrt 2", "[diagnostics]") {
  auto p = half_square(3);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(3), 1.0, 1.0);
  auto c = certify_kl(land, region, 0.5, draw(land, region));
  CHECK_FALSE(c.refuted());
  CHECK(c.constant_estimate == Approx(std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(c.exponent_fit);
  CHECK(c.exponent_fit->slope == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("KL for the squared distance to a ball", "[diagnostics]") {
  Landscape land;
  land.dim = 2;
  land.name = "ball_distance";
  land.value = [](const Point& x) {
    double t = std::max(x.norm() - 1.0, 0.0);
    return t * t;
  };
  land.analytic.subdiff_dist = [](const Point& x) { return 2 * std::max(x.norm() - 1.0, 0.0); };
  auto region = make_region(land, Point{{1.0, 0.0}}, 0.5, 1.0);
  auto c = certify_kl(land, region, 0.5, draw(land, region));
  CHECK_FALSE(c.refuted());
  CHECK(c.constant_estimate == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("gap condition on the half square", "[diagnostics]") {
  auto p = half_square(2);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(2), 1.0, 1.0);
  auto step = BregmanStep::constant(BregmanKernel::euclidean(2), 0.5);
  auto c = certify_bp_gap(p, step, region, 1.0, draw(land, region));
  // t = x/2, E = x^2/4, G = x^2/2 = F
  CHECK(c.constant_estimate == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("proximal PL needs the optimal value", "[diagnostics]") {
  auto p = half_square(2);
  auto land = Landscape::of(p);
  auto region = make_region(land, Point::Zero(2), 1.0, 1.0);
  auto c = certify_prox_pl(p, region, 0.5, draw(land, region));
  CHECK_FALSE(c.refuted());
  p.analytic.optimal_value.reset();
  CHECK_THROWS_AS(certify_prox_pl(p, region, 0.5, draw(land, region)), CapabilityError);
}

TEST_CASE("contraction from a point of the sublevel set is empty", "[diagnostics]") {
  auto p = half_square(1);
  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::constant(BregmanKernel::euclidean(1));
  cfg.eps = EpsSchedule::constant(0.5);
  cfg.max_iters = 10;
  auto r = measure_levelset_contraction(p, cfg, Point::Zero(1), norm_dist());
  CHECK(r.empty());
  auto s = measure_levelset_contraction(p, cfg, Point{{1.0}}, norm_dist());
  for (double q : s.ratios) CHECK(q == 0.5);
  CHECK(s.beta_hat == 0.5);
}

TEST_CASE("envelope proximity on the half square", "[diagnostics]") {
  auto p = half_square(2);
  auto step = BregmanStep::constant(BregmanKernel::euclidean(2), 0.5);
  std::vector<Point> xs{Point{{1.0, 0.0}}, Point{{0.3, -0.2}}, Point{{2.0, 2.0}}};
  auto rep = check_envelope_proximity(p, step, 0.0, xs, norm_dist());
  CHECK(rep.holds());
  auto bad = BregmanStep::constant(BregmanKernel::euclidean(2), 1.5);
  CHECK_THROWS_AS(check_envelope_proximity(p, bad, 0.0, xs, norm_dist()), RegimeError);
}

TEST_CASE("LWSC modulus on the MCP entry", "[diagnostics]") {
  auto e = load_corpus("QUAD_MCP(2,0.3,0.5)");
  const auto& p = e.composite();
  auto rep = check_sufficient_condition(p, Point::Zero(2), 0.5, SufficientCondition::LWSC,
                                        std::nullopt, SamplerOptions{1000, 3, 0});
  CHECK(rep.mu == Approx(1.0).epsilon(0.02));
  auto with = check_sufficient_condition(p, Point::Zero(2), 0.5, SufficientCondition::LWSC, 1.5,
                                         SamplerOptions{1000, 3, 0});
  CHECK_FALSE(with.candidate_holds);
  CHECK(with.witness);
  auto chain = audit_convexity_chain(p, Point::Zero(2), 0.5, SamplerOptions{300, 4, 0});
  CHECK(chain.holds);
  CHECK(chain.mu_lsc <= chain.mu_lesc);
  CHECK(chain.mu_lesc <= chain.mu_lwsc);
}

TEST_CASE("conditions that need g = 0 or a nearby critical point refuse", "[diagnostics]") {
  auto e = load_corpus("QUAD_MCP(2,0.3,0.5)");
  CHECK_THROWS_AS(check_sufficient_condition(e.composite(), Point::Zero(2), 0.5,
                                             SufficientCondition::LRSI, std::nullopt, {}),
                  HypothesisError);
  CompositeProblem lin;
  lin.dim = 1;
  lin.f = quadratic_term(Matrix::Zero(1, 1), Point{{-1.0}}, 0.0, 0.0);
  lin.g = zero_term();
  wire_subdiff_dist(lin);
  lin.analytic.critical_points = CriticalSet{{Point{{10.0}}}, {}, "far away"};
  CHECK_THROWS_AS(check_sufficient_condition(lin, Point::Zero(1), 0.5, SufficientCondition::LRSI,
                                             std::nullopt, {}),
                  HypothesisError);
}

TEST_CASE("weak metric prediction needs mu > rho", "[diagnostics]") {
  auto e = load_corpus("QUAD_MCP(2,0.3,0.5)");
  const auto& p = e.composite();
  auto land = e.landscape();
  const auto& r = e.regions.front();
  CHECK_THROWS_AS(predict_weak_metric_subregularity(p, r, 0.5, 0.5, draw(land, r)),
                  HypothesisError);
  auto pred = predict_weak_metric_subregularity(p, r, 1.0, 0.5, draw(land, r, 500));
  CHECK(pred.c2 == Approx(4.0));
  CHECK(pred.verified());
}

TEST_CASE("nearby critical values", "[diagnostics]") {
  auto tw = load_corpus("TWO_WELL");
  auto rep = check_nearby_critical_values(tw.landscape(), Point{{-1.0}}, {0.5, 3.5});
  CHECK_FALSE(rep.holds());
  REQUIRE(rep.witness);
  CHECK(rep.largest_certified == Approx(0.5));
  auto st = load_corpus("EX_5_2");
  auto ok = check_nearby_critical_values(st.landscape(), Point::Zero(1), {0.1, 1.0});
  CHECK(ok.holds());
}

TEST_CASE("implication constants follow their formulas", "[diagnostics]") {
  const double m = 1, M = 1, eps = 0.05, L = 10, rho = 0;
  auto k = derive_constants(m, M, eps, eps, L, rho);
  const Region R{Point::Zero(2), 1.0, 2.0, 0.0};

  auto bb = bregman_eb_from_subdiff(k, R, 1.0, 0.8);
  const double s = L + M / eps;
  CHECK(bb.theta1 == Approx(1 + 0.8 * s));
  CHECK(bb.theta2 == Approx(1 + 0.8 * s));
  CHECK(bb.theta == Approx(std::max(bb.theta1, bb.theta2)));
  const double N = 1.5 * std::max(2 * eps * 2.0 / ((m - eps * L) * 0.25), 1.0);
  CHECK(bb.N == Approx(N));
  CHECK(bb.region.eta == Approx(0.5));
  CHECK(bb.region.nu == Approx(2.0 / N));

  auto o = oracle::constants(m, M, eps, eps, L);
  auto gb = bp_gap_from_bregman_eb(k, eps, 1.0, bb.theta);
  REQUIRE(gb.mu);
  CHECK(*gb.mu == Approx(1 / (eps + 2 * o.c0 * bb.theta * bb.theta * eps * eps / m)));
  CHECK_FALSE(bp_gap_from_bregman_eb(k, eps, 0.5, bb.theta).mu);

  auto kb = kl_from_bp_gap(k, 1.0, *gb.mu);
  CHECK(kb.alpha == 0.5);
  CHECK(kb.c5 == Approx(std::sqrt(2 * m * *gb.mu)));

  auto fk = subdiff_eb_from_kl(R, 0.5, 2.0);
  CHECK(fk.gamma == 1.0);
  CHECK(fk.region.eta == 0.5);
  CHECK(fk.heuristic_c1 == Approx(2.0 / 4.0));

  auto se = strong_eb_from_contraction(k, 0.5);
  CHECK(se.c1 == Approx(eps / (0.5 * m)));
  CHECK(se.theta == Approx(1 + se.c1 * s));

  CHECK(weak_subregularity_constant(1.0, 0.5) == Approx(4.0));
  CHECK(value_proximity_constant(k, 1.0, 0.8) == Approx(std::max(0.64 * s * s * o.kappa, o.kappa)));
  CHECK_THROWS_AS(value_proximity_constant(k, 1.5, 0.8), HypothesisError);
  CHECK(q_linear_factor(k, 3.0) == Approx(1 / (1 + o.a / 3.0)));
}

TEST_CASE("implications refuse outside their regime", "[diagnostics]") {
  const Region R{Point::Zero(1), 1.0, 1.0, 0.0};
  auto slow = derive_constants(1, 1, 0.2, 0.2, 10, 0.0);
  CHECK_THROWS_AS(bregman_eb_from_subdiff(slow, R, 1.0, 1.0), RegimeError);
  auto no_rho = derive_constants(1, 1, 0.05, 0.05, 10);
  CHECK_THROWS_AS(bp_gap_from_bregman_eb(no_rho, 0.05, 1.0, 2.0), HypothesisError);
  auto k = derive_constants(1, 1, 0.05, 0.05, 10, 0.0);
  auto cb = contraction_from_strong_bregman_eb(k, 1.0);
  CHECK_FALSE(cb.theta_admissible);
  CHECK_FALSE(cb.beta);
}
