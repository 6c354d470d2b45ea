#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace vbpg {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Additive slack used for every asserted inequality: 1e-8 * (1 + |scale|).
inline double slack_tolerance(double scale, double rel = 1e-8) {
  return rel * (1.0 + std::abs(scale));
}

struct Box {
  Point lower;
  Point upper;

  static Box cube(Index n, double lo, double hi);
  Index dim() const { return lower.size(); }
  bool contains(const Point& x) const;
};

// f(x) = 0.5 x'Qx - b'x + c
struct QuadraticForm {
  Matrix Q;
  Point b;
  double c = 0.0;
};

struct SmoothTerm {
  std::function<double(const Point&)> eval;
  std::function<Point(const Point&)> grad;
  double lipschitz = 0.0;
  std::optional<Box> domain;
  // Present when f is a quadratic; the Jacobi kernel needs Q.
  std::optional<QuadraticForm> quadratic;
  std::string name;
};

// argmin_y <shift, y> + g(y) + 0.5 sum_i w_i (y_i - center_i)^2
using ScaledProx =
    std::function<Point(const Point& center, const Point& shift, const Point& weights)>;

struct NonsmoothTerm {
  std::function<double(const Point&)> eval;  // may return +inf
  ScaledProx scaled_prox;
  std::optional<double> semiconvex_rho;
  // dist(0, shift + d_P g(x)); empty when unavailable.
  std::function<double(const Point& x, const Point& shift)> min_norm_subgrad;
  bool is_zero = false;
  // Coordinatewise separable, so scaled_prox with unequal weights is exact.
  bool separable = false;
  std::string name;
};

// Proximal critical set. Either an explicit finite list or a nearest-point map.
struct CriticalSet {
  std::vector<Point> points;
  std::function<Point(const Point&)> project;
  std::string description;

  Point nearest(const Point& x) const;
  double distance(const Point& x) const;
  bool is_finite() const { return !project; }
};

struct AnalyticOracles {
  std::optional<CriticalSet> critical_points;
  std::optional<double> optimal_value;
  // Nearest point of [F <= level].
  std::function<Point(const Point&, double level)> sublevel_project;
  // dist(0, d_P F(x))
  std::function<double(const Point&)> subdiff_dist;
  // The critical set coincides with the set of global minimizers.
  bool critical_set_is_solution_set = false;
};

struct CompositeProblem {
  Index dim = 0;
  SmoothTerm f;
  NonsmoothTerm g;
  AnalyticOracles analytic;
  std::string name;

  double value(const Point& x) const;
};

// F(x) = f(x) + g(x). Returns +inf outside dom g; throws NumericError on NaN.
double objective(const CompositeProblem& p, const Point& x);

// Fills analytic.subdiff_dist from g.min_norm_subgrad when the former is
// missing. Call once after assembling a problem.
void wire_subdiff_dist(CompositeProblem& p);

struct Violation {
  std::string kind;  // "lipschitz", "descent", "semiconvexity", "critical_point"
  Point x;
  Point y;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ValidationReport {
  std::size_t n_samples = 0;
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
};

ValidationReport validate_problem(const CompositeProblem& p, const Box& box,
                                  std::size_t n_samples, std::uint64_t seed);

struct SolverConstants {
  double m = 0, M = 0;
  double eps_lo = 0, eps_hi = 0;
  double L = 0;
  std::optional<double> rho;

  double a = 0;       // 0.5 (m/eps_hi - L)
  double frak_a = 2;  // generalized descent constants
  double frak_b = 0;
  double frak_c = 0;
  double kappa = 0;   // cost-to-go constant
  double c0 = 0;      // envelope vs squared sublevel distance

  bool descent() const { return a > 0; }
  bool strict() const { return frak_c > 0; }
  // m - eps_hi * rho > 0 and eps_hi < m/L: gap bounds and single-valued T.
  bool semiconvex_regime() const;
};

SolverConstants derive_constants(double m, double M, double eps_lo, double eps_hi,
                                 double L, std::optional<double> rho = std::nullopt);

}  // namespace vbpg
