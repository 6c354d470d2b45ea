#pragma once

#include "vbpg/kernel.hpp"

namespace vbpg {

struct BregmanStep {
  BregmanKernel kernel;
  double eps = 1.0;
  double eps_lo = 1.0;
  double eps_hi = 1.0;

  static BregmanStep constant(const BregmanKernel& k, double eps);
  static BregmanStep bounded(const BregmanKernel& k, double eps, double eps_lo, double eps_hi);
};

struct SubproblemSolution {
  Point point;               // t in T(x)
  double inner_residual = 0;
  std::size_t inner_iters = 0;
  double envelope_value = 0;  // E(x)
  double gap_value = 0;       // G(x) = (F(x) - E(x)) / eps
};

struct InnerOptions {
  std::size_t max_iters = 10000;
  // Use the iterative solver even when a closed form exists.
  bool force_iterative = false;
  std::optional<Point> start;
};

double default_inner_tol(const Point& x);

// t = argmin_y <df(x), y - x> + g(y) + D(x, y)/eps, together with E(x), G(x).
SubproblemSolution solve_subproblem(const CompositeProblem& p, const BregmanStep& step,
                                    const Point& x, double inner_tol,
                                    const InnerOptions& opts = {});

inline SubproblemSolution solve_subproblem(const CompositeProblem& p, const BregmanStep& step,
                                           const Point& x) {
  return solve_subproblem(p, step, x, default_inner_tol(x));
}

}  // namespace vbpg
