#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
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

CompositeProblem half_square(Index n, std::optional<double> L = std::nullopt) {
  return make(quadratic_term(Matrix::Identity(n, n), Point::Zero(n), 0.0, L), zero_term(), n);
}

}  // namespace

TEST_CASE("objective adds both terms", "[problem_core]") {
  auto p = make(quadratic_term(Matrix::Identity(2, 2), Point::Zero(2)), l1_term(1.0), 2);
  CHECK(objective(p, Point{{1.0, -2.0}}) == Approx(5.5).epsilon(1e-15));
  CHECK(objective(p, Point::Zero(2)) == 0.0);
}

TEST_CASE("objective is +inf outside dom g", "[problem_core]") {
  auto p = make(quadratic_term(Matrix::Identity(1, 1), Point::Zero(1)),
                box_indicator_term(Point{{0.0}}, Point{{1.0}}), 1);
  CHECK(std::isinf(objective(p, Point{{-1.0}})));
}

TEST_CASE("NaN from a term names the term", "[problem_core]") {
  auto p = half_square(1);
  p.f.eval = [](const Point&) { return std::nan(""); };
  try {
    objective(p, Point{{1.0}});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.term() == "f");
  }
}

TEST_CASE("validate_problem accepts exact constants", "[problem_core]") {
  auto p = half_square(2);
  auto rep = validate_problem(p, Box::cube(2, -1, 1), 100, 3);
  CHECK(rep.passed());
  CHECK(rep.n_samples == 100);
}

TEST_CASE("validate_problem catches an understated Lipschitz constant", "[problem_core]") {
  auto p = half_square(2, 0.5);
  auto rep = validate_problem(p, Box::cube(2, -1, 1), 100, 3);
  REQUIRE_FALSE(rep.passed());
  const auto& v = rep.violations.front();
  CHECK(v.kind == "lipschitz");
  CHECK(v.lhs > v.rhs);
  CHECK((v.x - v.y).norm() > 0);
}

TEST_CASE("power iteration matches a dense eigensolver", "[problem_core]") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 1);
  for (int n : {5, 20, 50}) {
    Matrix A(n + 3, n);
    for (Index i = 0; i < A.rows(); ++i)
      for (Index j = 0; j < A.cols(); ++j) A(i, j) = g(rng);
    Matrix S = A.transpose() * A;
    double ref = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues().maxCoeff();
    CHECK(power_iteration_lambda_max(S) == Approx(ref).epsilon(1e-10));
    Point y = Point::Zero(n + 3);
    auto p = make(least_squares_term(A, y, power_iteration_lambda_max(S)), zero_term(), n);
    CHECK(validate_problem(p, Box::cube(n, -1, 1), 200, 1).passed());
  }
}

TEST_CASE("derived constants follow the closed forms", "[problem_core]") {
  auto k = derive_constants(1, 1, 0.5, 0.5, 1);
  auto o = oracle::constants(1, 1, 0.5, 0.5, 1);
  CHECK(k.a == Approx(0.5));
  CHECK(k.frak_b == Approx(7));
  CHECK(k.frak_c == Approx(-1));
  CHECK(k.kappa == Approx(7.5));
  CHECK(k.c0 == Approx(2.5));
  CHECK(k.a == Approx(o.a));
  CHECK(k.kappa == Approx(o.kappa));
  CHECK(k.descent());
  CHECK_FALSE(k.strict());

  auto s = derive_constants(1, 1, 0.1, 0.1, 1);
  CHECK(s.frak_c == Approx(7));
  CHECK(s.strict());

  CHECK(derive_constants(1, 1, 1, 1, 0).a == Approx(0.5));
}

TEST_CASE("non-descent steps are flagged, not rejected", "[problem_core]") {
  auto k = derive_constants(1, 1, 1.0, 1.0, 1.0);
  CHECK(k.a == 0.0);
  CHECK_FALSE(k.descent());
}

TEST_CASE("random constant sets agree with the oracle", "[problem_core]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 200; ++i) {
    double m = u(rng), M = m + u(rng), L = u(rng), lo = u(rng) * 0.1, hi = lo * (1 + u(rng));
    auto k = derive_constants(m, M, lo, hi, L);
    auto o = oracle::constants(m, M, lo, hi, L);
    CHECK(k.a == Approx(o.a).margin(1e-12));
    CHECK(k.frak_b == Approx(o.b));
    CHECK(k.frak_c == Approx(o.c).margin(1e-12));
    CHECK(k.kappa == Approx(o.kappa));
    CHECK(k.c0 == Approx(o.c0));
  }
}
