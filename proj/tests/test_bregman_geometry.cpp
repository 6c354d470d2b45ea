#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "vbpg/corpus.hpp"
#include "vbpg/errors.hpp"
#include "vbpg/terms.hpp"

using namespace vbpg;
using Catch::Approx;

namespace {

CompositeProblem make(SmoothTerm f, NonsmoothTerm g, Index n) {
  CompositeProblem p;
  p.dim = n;
  p.f = std::move(f);
  p.g = std::move(g);
  wire_subdiff_dist(p);
  return p;
}

CompositeProblem half_square(Index n) {
  return make(quadratic_term(Matrix::Identity(n, n), Point::Zero(n)), zero_term(), n);
}

BregmanStep euclid(Index n, double eps) {
  return BregmanStep::constant(BregmanKernel::euclidean(n), eps);
}

}  // namespace

TEST_CASE("Bregman distance of quadratic kernels", "[bregman_geometry]") {
  auto e = BregmanKernel::euclidean(2);
  CHECK(bregman_distance(e, Point{{3.0, 4.0}}, Point{{3.0, 4.0}}) == 0.0);
  CHECK(bregman_distance(e, Point{{1.0, 0.0}}, Point{{0.0, 1.0}}) == Approx(1.0));
  auto d = BregmanKernel::diagonal(Point{{2.0, 1.0}});
  CHECK(bregman_distance(d, Point{{1.0, 0.0}}, Point{{0.0, 1.0}}) == Approx(1.5));
  CHECK(d.m() == 1.0);
  CHECK(d.M() == 2.0);
  CHECK_THROWS_AS(bregman_distance(e, Point::Zero(3), Point::Zero(2)), ArgumentError);
}

TEST_CASE("diagonal Bregman distance agrees with the oracle", "[bregman_geometry]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2), w(0.5, 3);
  for (int i = 0; i < 100; ++i) {
    Point wt(3), x(3), y(3);
    for (int j = 0; j < 3; ++j) wt[j] = w(rng), x[j] = u(rng), y[j] = u(rng);
    CHECK(bregman_distance(BregmanKernel::diagonal(wt), x, y) ==
          Approx(oracle::diag_bregman(wt, x, y)).epsilon(1e-13));
  }
}

TEST_CASE("spd kernel moduli come from the spectrum", "[bregman_geometry]") {
  Matrix H{{2.0, 0.5}, {0.5, 1.0}};
  auto k = BregmanKernel::spd(H);
  auto ev = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues();
  CHECK(k.m() == Approx(ev.minCoeff()));
  CHECK(k.M() == Approx(ev.maxCoeff()));
  CHECK(audit_kernel(k, Box::cube(2, -2, 2), 200, 1).passed());
  CHECK_THROWS(BregmanKernel::spd(H, 1.0));  // declared m above the true minimum
}

TEST_CASE("subproblem on the half square", "[bregman_geometry]") {
  auto p = half_square(1);
  auto sol = solve_subproblem(p, euclid(1, 0.5), Point{{2.0}});
  CHECK(sol.point[0] == Approx(1.0).epsilon(1e-14));
  CHECK(sol.envelope_value == Approx(1.0).epsilon(1e-14));
  CHECK(sol.gap_value == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("l1 subproblem is the soft threshold", "[bregman_geometry]") {
  CompositeProblem p = make(quadratic_term(Matrix::Zero(2, 2), Point::Zero(2), 0.0, 0.0),
                            l1_term(1.0), 2);
  const Point x{{2.0, -0.5}};
  auto sol = solve_subproblem(p, euclid(2, 1.0), x);
  CHECK(sol.point[0] == Approx(1.0));
  CHECK(sol.point[1] == 0.0);
  // the same point from a grid search of |y|_1 + |y - x|^2/2
  auto phi = [&](const oracle::Vec& y) { return y.lpNorm<1>() + 0.5 * (y - x).squaredNorm(); };
  oracle::Vec g = oracle::grid_argmin(phi, x, 3.0, 1e-4);
  CHECK((g - sol.point).norm() <= 2e-4);
}

TEST_CASE("iterative inner solver matches the closed form", "[bregman_geometry]") {
  CompositeProblem p = make(quadratic_term(Matrix{{2.0, 0.3}, {0.3, 1.0}}, Point{{1.0, -1.0}}),
                            l1_term(0.2), 2);
  auto step = euclid(2, 0.3);
  for (const Point& x : {Point{{1.0, 2.0}}, Point{{-0.3, 0.1}}, Point{{0.0, 0.0}}}) {
    auto exact = solve_subproblem(p, step, x, 1e-13);
    InnerOptions opts;
    opts.force_iterative = true;
    auto iter = solve_subproblem(p, step, x, 1e-13, opts);
    CHECK((exact.point - iter.point).norm() <= 1e-11);
    CHECK(iter.inner_iters > 0);
  }
}

TEST_CASE("spd subproblem against a grid minimizer", "[bregman_geometry]") {
  Matrix H{{2.0, 0.5}, {0.5, 1.0}};
  Matrix Q{{1.0, 0.3}, {0.3, 0.5}};
  Point b{{0.4, -0.2}};
  auto p = make(quadratic_term(Q, b), l1_term(0.3), 2);
  auto K = BregmanKernel::spd(H);
  const double eps = 0.5 * K.m() / p.f.lipschitz;
  const Point x{{0.7, -1.1}};
  auto sol = solve_subproblem(p, BregmanStep::constant(K, eps), x, 1e-13);
  const Point gx = Q * x - b;
  auto phi = [&](const oracle::Vec& y) {
    oracle::Vec d = y - x;
    return gx.dot(d) + 0.3 * y.lpNorm<1>() + 0.5 * d.dot(H * d) / eps;
  };
  oracle::Vec g = oracle::grid_argmin(phi, x, 4.0, 1e-4);
  CHECK((g - sol.point).norm() <= std::sqrt(2.0) * 1e-4);
}

TEST_CASE("critical points are fixed points with zero gap", "[bregman_geometry]") {
  auto e = load_corpus("QUAD_MCP(3,0.3,0.5)");
  const auto& p = e.composite();
  auto sol = solve_subproblem(p, euclid(3, 0.5 / p.f.lipschitz), Point::Zero(3));
  CHECK(sol.point.norm() == 0.0);
  CHECK(sol.gap_value == Approx(0.0).margin(1e-14));
}

TEST_CASE("envelope descent", "[bregman_geometry]") {
  auto p = half_square(1);
  auto step = euclid(1, 0.5);
  const Point x{{2.0}};
  auto rep = check_envelope_descent(p, step, x, solve_subproblem(p, step, x));
  CHECK(rep.holds());
  // at a fixed point every slack is zero
  auto at0 = check_envelope_descent(p, step, Point{{0.0}}, solve_subproblem(p, step, Point{{0.0}}));
  CHECK(at0.min_slack() == Approx(0.0).margin(1e-15));
  auto big = euclid(1, 1.0);
  CHECK_THROWS_AS(check_envelope_descent(p, big, x, solve_subproblem(p, big, x)), RegimeError);
}

TEST_CASE("envelope descent on LASSO", "[bregman_geometry]") {
  auto e = load_corpus("LASSO(20,50,0.1,7)");
  const auto& p = e.composite();
  auto step = euclid(p.dim, 0.9 / p.f.lipschitz);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Point x(p.dim);
    for (Index j = 0; j < p.dim; ++j) x[j] = u(rng);
    auto rep = check_envelope_descent(p, step, x, solve_subproblem(p, step, x));
    CHECK(rep.min_slack() >= -1e-8);
  }
}

TEST_CASE("generalized descent worked example", "[bregman_geometry]") {
  auto p = half_square(1);
  auto step = euclid(1, 0.1);
  const Point x{{1.0}}, u{{0.0}};
  auto sol = solve_subproblem(p, step, x);
  CHECK(sol.point[0] == Approx(0.9));
  auto rep = check_generalized_descent(p, step, x, u, sol);
  REQUIRE(rep.checks.size() == 2);
  CHECK(rep.checks[0].lhs == Approx(0.81));
  CHECK(rep.checks[0].rhs == Approx(14.12));
  CHECK(rep.holds());
  // u = x = critical point: every displacement vanishes
  auto at0 = check_generalized_descent(p, step, u, u, solve_subproblem(p, step, u));
  CHECK(at0.checks[0].lhs == 0.0);
  CHECK(at0.checks[0].rhs == 0.0);
}

TEST_CASE("residual bound", "[bregman_geometry]") {
  auto e = load_corpus("LASSO(20,50,0.1,7)");
  const auto& p = e.composite();
  auto step = euclid(p.dim, 0.5 / p.f.lipschitz);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < 100; ++i) {
    Point x(p.dim);
    for (Index j = 0; j < p.dim; ++j) x[j] = g(rng);
    CHECK(check_residual_bound(p, step, x, solve_subproblem(p, step, x)).holds());
  }
  auto q = half_square(1);
  q.analytic.subdiff_dist = nullptr;
  q.g.min_norm_subgrad = nullptr;
  CHECK_THROWS_AS(check_residual_bound(q, euclid(1, 0.5), Point{{1.0}},
                                       solve_subproblem(q, euclid(1, 0.5), Point{{1.0}})),
                  CapabilityError);
}

TEST_CASE("gap bounds are tight on the half square", "[bregman_geometry]") {
  auto p = half_square(1);
  auto step = euclid(1, 0.5);
  const Point x{{2.0}};
  auto rep = check_gap_bounds(p, step, x, solve_subproblem(p, step, x, 1e-14), 1e-14);
  REQUIRE(rep.checks.size() >= 3);
  for (int i = 0; i < 3; ++i) CHECK(rep.checks[i].lhs == Approx(rep.checks[i].rhs).epsilon(1e-12));
  auto at0 = check_gap_bounds(p, step, Point{{0.0}}, solve_subproblem(p, step, Point{{0.0}}), 1e-12);
  for (int i = 0; i < 3; ++i) CHECK(at0.checks[i].lhs == Approx(0.0).margin(1e-15));
}

TEST_CASE("gap bounds on the MCP entry", "[bregman_geometry]") {
  auto e = load_corpus("QUAD_MCP(3,0.3,0.5)");
  const auto& p = e.composite();
  auto step = euclid(3, 0.5 / p.f.lipschitz);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Point x{{u(rng), u(rng), u(rng)}};
    auto rep = check_gap_bounds(p, step, x, solve_subproblem(p, step, x, 1e-12), 1e-12);
    CHECK(rep.holds());
  }
  auto q = p;
  q.g.semiconvex_rho.reset();
  CHECK_THROWS_AS(check_gap_bounds(q, step, Point::Ones(3), solve_subproblem(q, step, Point::Ones(3)), 1e-12),
                  RegimeError);
}
