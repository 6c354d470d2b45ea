#pragma once

#include <string>
#include <vector>

#include "vbpg/subproblem.hpp"

namespace vbpg {

// One asserted inequality lhs <= rhs, with additive tolerance.
struct InequalityCheck {
  std::string label;
  double lhs = 0;
  double rhs = 0;
  double tolerance = 0;

  double slack() const { return rhs - lhs; }
  bool holds() const { return lhs <= rhs + tolerance; }
};

struct InequalityReport {
  std::string name;
  std::vector<InequalityCheck> checks;
  std::vector<std::string> notes;

  // Adds lhs <= rhs with tolerance 1e-8 (1 + max(|lhs|, |rhs|)).
  void add(std::string label, double lhs, double rhs);
  void add(std::string label, double lhs, double rhs, double tolerance);
  bool holds() const;
  double min_slack() const;
  const InequalityCheck* first_failure() const;
};

// F(t) <= E(x) - a||x-t||^2 <= F(x) - a||x-t||^2 with a = (m/eps - L)/2, and
// E = F - eps G. Needs eps < m/L.
InequalityReport check_envelope_descent(const CompositeProblem& p, const BregmanStep& step,
                                        const Point& x, const SubproblemSolution& sol);

// 2[F(t) - F(u)] <= b||u-x||^2 - ||u-t||^2 - c||x-t||^2 and the cost-to-go
// form F(t) - F(u) <= kappa (||u-t||^2 + ||x-t||^2). Any eps.
InequalityReport check_generalized_descent(const CompositeProblem& p, const BregmanStep& step,
                                           const Point& x, const Point& u,
                                           const SubproblemSolution& sol);

// dist(0, dF(t)) <= (L + M/eps_lo) ||x - t||
InequalityReport check_residual_bound(const CompositeProblem& p, const BregmanStep& step,
                                      const Point& x, const SubproblemSolution& sol);

// For semiconvex g and eps_hi < min(m/L, m/rho):
//   (m - eps_hi rho)/(2 eps_hi^2) ||x-T||^2 <= G
//   G <= eps_hi / (2 eps_lo (m - eps_hi rho)) dist^2(0, dF(x))
//   ||x-T|| <= eps_hi/(m - eps_hi rho) sqrt(eps_hi/eps_lo) dist(0, dF(x))
// plus a restart probe that T(x) is a single point.
InequalityReport check_gap_bounds(const CompositeProblem& p, const BregmanStep& step,
                                  const Point& x, const SubproblemSolution& sol,
                                  double inner_tol, std::size_t restarts = 5);

}  // namespace vbpg
