#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "vbpg/corpus.hpp"
#include "vbpg/errors.hpp"
#include "vbpg/terms.hpp"

using namespace vbpg;
using Catch::Approx;

namespace {

CompositeProblem quad(const Matrix& Q, const Point& b) {
  CompositeProblem p;
  p.dim = Q.rows();
  p.f = quadratic_term(Q, b);
  p.g = zero_term();
  wire_subdiff_dist(p);
  return p;
}

VbpgConfig euclid_cfg(Index n, double eps, std::size_t iters, double stop = 1e-300) {
  VbpgConfig c;
  c.schedule = KernelSchedule::constant(BregmanKernel::euclidean(n));
  c.eps = EpsSchedule::constant(eps);
  c.max_iters = iters;
  c.stop_tol = stop;
  return c;
}

}  // namespace

TEST_CASE("closed-form recursion on the half square", "[vbpg]") {
  auto p = quad(Matrix::Identity(1, 1), Point::Zero(1));
  auto tr = run_vbpg(p, euclid_cfg(1, 0.5, 30), Point{{2.0}});
  REQUIRE(tr.iters() == 30);
  for (std::size_t k = 0; k <= 30; ++k) {
    CHECK(tr.iterate(k)[0] == std::ldexp(2.0, -static_cast<int>(k)));
    CHECK(tr.value(k) == Approx(2 * std::pow(0.25, k)).epsilon(1e-15));
  }
  auto rate = measure_rates(tr, 0.0, Point::Zero(1), 1.0);
  CHECK(rate.beta_q == Approx(0.25).epsilon(1e-12));
  CHECK(rate.linear);
}

TEST_CASE("a critical start stops at once", "[vbpg]") {
  auto p = quad(Matrix::Identity(2, 2), Point::Zero(2));
  auto tr = run_vbpg(p, euclid_cfg(2, 0.5, 100, 1e-12), Point::Zero(2));
  CHECK(tr.iters() == 1);
  CHECK(tr.records[0].step_norm <= 1e-12);
  CHECK(tr.stop == StopReason::StepTolerance);
}

TEST_CASE("non-descent configurations are refused", "[vbpg]") {
  auto p = quad(Matrix::Identity(1, 1), Point::Zero(1));
  try {
    run_vbpg(p, euclid_cfg(1, 1.0, 10), Point{{1.0}});
    FAIL("expected RegimeError");
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("m/L") != std::string::npos);
  }
}

TEST_CASE("LASSO run agrees with an independent proximal gradient", "[vbpg]") {
  auto e = load_corpus("LASSO(20,50,0.1,7)");
  const auto& p = e.composite();
  REQUIRE(p.f.quadratic.has_value());
  const Matrix& Q = p.f.quadratic->Q;  // A'A
  const Point& b = p.f.quadratic->b;   // A'y
  const double eps = 0.99 / p.f.lipschitz;
  Point x0 = Point::Constant(p.dim, 0.3);
  auto tr = run_vbpg(p, euclid_cfg(p.dim, eps, 300), x0);
  Point x = x0;
  double worst = 0;
  for (std::size_t k = 0; k < tr.iters(); ++k) {
    Point v = x - eps * (Q * x - b);
    for (Index i = 0; i < v.size(); ++i) v[i] = oracle::soft(v[i], eps * 0.1);
    x = v;
    worst = std::max(worst, (x - tr.iterate(k + 1)).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst <= 1e-8);
  for (std::size_t k = 0; k < tr.iters(); ++k) CHECK(tr.value(k + 1) < tr.value(k));
  auto rate = measure_rates(tr, objective(p, *e.reference_solution) - 1e-12,
                            *e.reference_solution, 0.3);
  CHECK(rate.beta_q < 1);
}

TEST_CASE("ISTA oracle reproduces the least squares form", "[vbpg]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 1);
  Matrix A(8, 5);
  Point y(8);
  for (Index i = 0; i < 8; ++i) {
    y[i] = g(rng);
    for (Index j = 0; j < 5; ++j) A(i, j) = g(rng);
  }
  const double L = power_iteration_lambda_max(A.transpose() * A);
  CompositeProblem p;
  p.dim = 5;
  p.f = least_squares_term(A, y, L);
  p.g = l1_term(0.2);
  wire_subdiff_dist(p);
  auto tr = run_vbpg(p, euclid_cfg(5, 0.9 / L, 50), Point::Zero(5));
  auto ref = oracle::ista(A, y, 0.2, 0.9 / L, Point::Zero(5), 50);
  for (std::size_t k = 0; k <= tr.iters(); ++k)
    CHECK((tr.iterate(k) - ref[k]).norm() <= 1e-10);
}

TEST_CASE("rate of an ill-conditioned quadratic", "[vbpg]") {
  auto p = quad(Matrix(Point{{1.0, 10.0}}.asDiagonal()), Point::Zero(2));
  auto tr = run_vbpg(p, euclid_cfg(2, 0.09, 200), Point{{1.0, 1.0}});
  auto rate = measure_rates(tr, 0.0, Point::Zero(2), 0.5);
  // the affine map x -> (I - 0.09 Q) x has spectral radius 0.91
  CHECK(rate.beta_q < 1);
  CHECK(rate.beta_q == Approx(0.91 * 0.91).epsilon(1e-6));
  CHECK(rate.beta_r == Approx(0.91).epsilon(1e-6));
}

TEST_CASE("a constant trace has no rate", "[vbpg]") {
  auto p = quad(Matrix::Identity(1, 1), Point::Zero(1));
  auto tr = run_vbpg(p, euclid_cfg(1, 0.5, 5), Point::Zero(1));
  CHECK_THROWS_AS(measure_rates(tr, 0.0, Point::Zero(1), 1.0), TargetValueError);
}

TEST_CASE("value proximity on the half square", "[vbpg]") {
  auto p = quad(Matrix::Identity(1, 1), Point::Zero(1));
  auto tr = run_vbpg(p, euclid_cfg(1, 0.5, 20), Point{{0.8}});
  auto rep = check_value_proximity(p, tr, Point::Zero(1), 0.5, 1.0, 1.0);
  CHECK_FALSE(rep.empty());
  CHECK(rep.minimal_kappa == Approx(0.5).epsilon(1e-12));
  CHECK(rep.report.holds());
  auto fixed = run_vbpg(p, euclid_cfg(1, 0.5, 5, 1e-12), Point::Zero(1));
  CHECK(check_value_proximity(p, fixed, Point::Zero(1), 0.5, 1.0, 1.0).empty());
}

TEST_CASE("diagonal BB kernels respect their bounds", "[vbpg]") {
  auto e = load_corpus("QUAD_SC(5,20)");
  const auto& p = e.composite();
  VbpgConfig c;
  c.schedule = KernelSchedule::diagonal_bb(1.0, 30.0);
  c.eps = EpsSchedule::constant(0.9 / p.f.lipschitz);
  c.max_iters = 100;
  auto tr = run_vbpg(p, c, Point::Ones(5));
  CHECK(tr.constants.m == 1.0);
  CHECK(tr.constants.M == 30.0);
  for (std::size_t k = 0; k < tr.iters(); ++k) CHECK(tr.value(k + 1) <= tr.value(k));
}

TEST_CASE("Jacobi update with two scalar blocks", "[vbpg]") {
  auto p = quad(Matrix(Point{{1.0, 2.0}}.asDiagonal()), Point{{1.0, 1.0}});
  BlockPartition blocks{{1, 1}};
  std::vector<double> c{1.0, 1.0};
  const double eps = 0.5;
  const Point x0{{3.0, -2.0}};
  auto jac = run_regularized_jacobi(p, blocks, c, eps, x0, 20);
  // per-block: x+ = x - eps (Q_ii x - b_i)/(Q_ii + c_i)
  Point x = x0;
  for (std::size_t k = 0; k < jac.iters(); ++k) {
    x[0] -= eps * (1.0 * x[0] - 1.0) / 2.0;
    x[1] -= eps * (2.0 * x[1] - 1.0) / 3.0;
    CHECK((jac.iterate(k + 1) - x).norm() <= 1e-14);
  }
  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::block_jacobi(blocks, c);
  cfg.eps = EpsSchedule::constant(eps);
  cfg.max_iters = 20;
  cfg.stop_tol = 1e-300;
  auto vb = run_vbpg(p, cfg, x0);
  for (std::size_t k = 0; k <= std::min(vb.iters(), jac.iters()); ++k)
    CHECK((vb.iterate(k) - jac.iterate(k)).norm() <= 1e-10);
}

TEST_CASE("Jacobi equivalence on the block corpus entry", "[vbpg]") {
  auto e = load_corpus("JACOBI_BLOCK(40,4,7)");
  const auto& p = e.composite();
  std::vector<double> c(4, 1.0);
  Matrix K = jacobi_kernel_matrix(p.f.quadratic->Q, *e.blocks, c);
  const double eps = 0.9 * Eigen::SelfAdjointEigenSolver<Matrix>(K).eigenvalues().minCoeff() /
                     p.f.lipschitz;
  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::block_jacobi(*e.blocks, c);
  cfg.eps = EpsSchedule::constant(eps);
  cfg.max_iters = 60;
  cfg.stop_tol = 1e-300;
  cfg.inner_tol = 1e-13;
  const Point x0 = Point::Constant(40, 0.5);
  auto vb = run_vbpg(p, cfg, x0);
  auto jac = run_regularized_jacobi(p, *e.blocks, c, eps, x0, 60);
  for (std::size_t k = 0; k <= 60; ++k)
    CHECK((vb.iterate(k) - jac.iterate(k)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("Jacobi needs a quadratic smooth part", "[vbpg]") {
  auto e = load_corpus("TWO_WELL");
  CHECK_THROWS_AS(run_regularized_jacobi(e.composite(), BlockPartition{{1}}, {1.0}, 0.01,
                                         Point{{1.0}}, 5),
                  CapabilityError);
}

TEST_CASE("identical inputs give identical traces", "[vbpg]") {
  auto e = load_corpus("LASSO(20,50,0.1,7)");
  const auto& p = e.composite();
  VbpgConfig c;
  c.schedule = KernelSchedule::diagonal_bb(1.0, 10.0);
  c.eps = EpsSchedule::constant(0.9 / p.f.lipschitz);
  c.max_iters = 80;
  auto a = run_vbpg(p, c, Point::Constant(50, 0.1));
  auto b = run_vbpg(p, c, Point::Constant(50, 0.1));
  CHECK(trace_csv(a) == trace_csv(b));
}
