#include "vbpg/subproblem.hpp"

#include <cmath>
#include <sstream>

#include "vbpg/errors.hpp"

namespace vbpg {

BregmanStep BregmanStep::constant(const BregmanKernel& k, double eps) {
  return bounded(k, eps, eps, eps);
}

BregmanStep BregmanStep::bounded(const BregmanKernel& k, double eps, double eps_lo, double eps_hi) {
  if (!(eps_lo > 0) || !(eps_lo <= eps_hi) || !std::isfinite(eps_hi))
    throw ArgumentError("step bounds must satisfy 0 < eps_lo <= eps_hi < inf");
  if (!(eps >= eps_lo && eps <= eps_hi)) throw ArgumentError("step size outside its declared bounds");
  return BregmanStep{k, eps, eps_lo, eps_hi};
}

double default_inner_tol(const Point& x) { return 1e-10 * (1.0 + x.norm()); }

namespace {

Point iterate_inner(const CompositeProblem& p, const BregmanStep& step, const Point& x,
                    const Point& gfx, double inner_tol, const InnerOptions& opts,
                    double& residual, std::size_t& iters) {
  const auto& K = step.kernel;
  const double eps = step.eps;
  const double tau = eps / K.M();
  const Point gKx = K.grad(x);
  const Point zero = Point::Zero(x.size());
  const Point w = Point::Constant(x.size(), 1.0 / tau);
  Point y = opts.start ? *opts.start : x;
  if (y.size() != x.size()) throw ArgumentError("inner start has wrong dimension");
  residual = kInf;
  for (iters = 1; iters <= opts.max_iters; ++iters) {
    Point gh = gfx + (K.grad(y) - gKx) / eps;
    Point next = p.g.scaled_prox(y - tau * gh, zero, w);
    residual = (next - y).norm() * (K.M() / eps);
    y = std::move(next);
    if (!y.allFinite()) break;
    if (residual <= inner_tol) return y;
  }
  std::ostringstream os;
  os << "inner solver did not reach residual " << inner_tol << " (last residual " << residual
     << ") within " << opts.max_iters << " iterations";
  throw InnerSolverError(residual, opts.max_iters, os.str());
}

}  // namespace

SubproblemSolution solve_subproblem(const CompositeProblem& p, const BregmanStep& step,
                                    const Point& x, double inner_tol, const InnerOptions& opts) {
  if (!(inner_tol > 0)) throw ArgumentError("inner_tol must be positive");
  if (x.size() != p.dim || step.kernel.dim() != p.dim)
    throw ArgumentError("solve_subproblem: dimension mismatch");
  const double gx = p.g.eval(x);
  if (!std::isfinite(gx)) throw DomainError("solve_subproblem: x is outside dom g");
  const double fx = p.f.eval(x);
  if (!std::isfinite(fx)) throw NumericError("f", "f is not finite at x");
  const Point gfx = p.f.grad(x);
  if (!gfx.allFinite()) throw NumericError("f", "gradient of f is not finite at x");

  SubproblemSolution sol;
  if (step.kernel.is_diagonal() && p.g.separable && !opts.force_iterative) {
    sol.point = p.g.scaled_prox(x, gfx, step.kernel.weights() / step.eps);
  } else {
    sol.point = iterate_inner(p, step, x, gfx, inner_tol, opts, sol.inner_residual, sol.inner_iters);
  }
  const Point& t = sol.point;
  const double gt = p.g.eval(t);
  if (!std::isfinite(gt)) throw NumericError("g", "subproblem solution is outside dom g");
  const double model = gfx.dot(t - x) + gt + bregman_distance(step.kernel, x, t) / step.eps;
  sol.envelope_value = fx + model;
  // Computed from its own definition so that E = F - eps G is a real check.
  // Rounding can push an exact zero slightly negative; anything larger is
  // left visible because it means t is not a minimizer.
  double gap = (gx - model) / step.eps;
  double noise = 1e-12 * (1.0 + std::abs(gx) + std::abs(model)) / step.eps;
  sol.gap_value = (gap < 0 && gap > -noise) ? 0.0 : gap;
  return sol;
}

}  // namespace vbpg
