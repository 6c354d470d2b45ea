#include "vbpg/inequalities.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vbpg/errors.hpp"

namespace vbpg {

void InequalityReport::add(std::string label, double lhs, double rhs) {
  add(std::move(label), lhs, rhs, slack_tolerance(std::max(std::abs(lhs), std::abs(rhs))));
}

void InequalityReport::add(std::string label, double lhs, double rhs, double tolerance) {
  checks.push_back({std::move(label), lhs, rhs, tolerance});
}

bool InequalityReport::holds() const { return first_failure() == nullptr; }

double InequalityReport::min_slack() const {
  double s = kInf;
  for (const auto& c : checks) s = std::min(s, c.slack());
  return s;
}

const InequalityCheck* InequalityReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.holds()) return &c;
  return nullptr;
}

namespace {

SolverConstants constants_for(const CompositeProblem& p, const BregmanStep& step) {
  return derive_constants(step.kernel.m(), step.kernel.M(), step.eps_lo, step.eps_hi,
                          p.f.lipschitz, p.g.semiconvex_rho);
}

}  // namespace

InequalityReport check_envelope_descent(const CompositeProblem& p, const BregmanStep& step,
                                        const Point& x, const SubproblemSolution& sol) {
  const double m = step.kernel.m(), L = p.f.lipschitz;
  if (!(step.eps * L < m)) {
    std::ostringstream os;
    os << "envelope descent needs eps < m/L (eps = " << step.eps << ", m = " << m
       << ", L = " << L << ")";
    throw RegimeError(os.str());
  }
  const double a = 0.5 * (m / step.eps - L);
  const double Fx = objective(p, x);
  const double Ft = objective(p, sol.point);
  const double d2 = (x - sol.point).squaredNorm();
  const double tol = slack_tolerance(Fx);

  InequalityReport rep;
  rep.name = "envelope_descent";
  rep.add("F(t) <= E(x) - a|x-t|^2", Ft, sol.envelope_value - a * d2, tol);
  rep.add("F(t) <= F(x) - a|x-t|^2", Ft, Fx - a * d2, tol);
  rep.add("|E - (F - eps G)| <= 0",
          std::abs(sol.envelope_value - (Fx - step.eps * sol.gap_value)), 0.0,
          1e-9 * (1.0 + std::abs(Fx)));
  return rep;
}

InequalityReport check_generalized_descent(const CompositeProblem& p, const BregmanStep& step,
                                           const Point& x, const Point& u,
                                           const SubproblemSolution& sol) {
  const SolverConstants c = constants_for(p, step);
  const double Fu = objective(p, u);
  if (!std::isfinite(Fu)) throw DomainError("comparison point u is outside dom F");
  const double Ft = objective(p, sol.point);
  const double ux = (u - x).squaredNorm();
  const double ut = (u - sol.point).squaredNorm();
  const double xt = (x - sol.point).squaredNorm();

  InequalityReport rep;
  rep.name = "generalized_descent";
  rep.add("2[F(t)-F(u)] <= b|u-x|^2 - |u-t|^2 - c|x-t|^2", c.frak_a * (Ft - Fu),
          c.frak_b * ux - ut - c.frak_c * xt);
  rep.add("F(t)-F(u) <= kappa(|u-t|^2 + |x-t|^2)", Ft - Fu, c.kappa * (ut + xt));
  return rep;
}

InequalityReport check_residual_bound(const CompositeProblem& p, const BregmanStep& step,
                                      const Point& x, const SubproblemSolution& sol) {
  if (!p.analytic.subdiff_dist) throw CapabilityError("residual bound needs subdiff_dist");
  const double d = p.analytic.subdiff_dist(sol.point);
  const double bound =
      (p.f.lipschitz + step.kernel.M() / step.eps_lo) * (x - sol.point).norm();
  InequalityReport rep;
  rep.name = "residual_bound";
  rep.add("dist(0,dF(t)) <= (L + M/eps_lo)|x-t|", d, bound);
  return rep;
}

InequalityReport check_gap_bounds(const CompositeProblem& p, const BregmanStep& step,
                                  const Point& x, const SubproblemSolution& sol,
                                  double inner_tol, std::size_t restarts) {
  if (!p.g.semiconvex_rho) throw RegimeError("gap bounds need a semiconvexity modulus for g");
  if (!p.analytic.subdiff_dist) throw CapabilityError("gap bounds need subdiff_dist");
  const SolverConstants c = constants_for(p, step);
  if (!c.semiconvex_regime()) {
    std::ostringstream os;
    os << "gap bounds need eps_hi < min(m/L, m/rho) (eps_hi = " << c.eps_hi << ", m = " << c.m
       << ", L = " << c.L << ", rho = " << *c.rho << ")";
    throw RegimeError(os.str());
  }
  const double rho = *c.rho;
  const double shrink = c.m - c.eps_hi * rho;
  const double step_len = (x - sol.point).norm();
  const double d = p.analytic.subdiff_dist(x);
  const double G = sol.gap_value;

  InequalityReport rep;
  rep.name = "gap_bounds";
  rep.add("(m - eps rho)/(2 eps^2) |x-T|^2 <= G",
          shrink / (2 * c.eps_hi * c.eps_hi) * step_len * step_len, G);
  rep.add("G <= eps/(2 eps_lo (m - eps rho)) d^2", G,
          c.eps_hi / (2 * c.eps_lo * shrink) * d * d);
  rep.add("|x-T| <= eps/(m - eps rho) sqrt(eps/eps_lo) d", step_len,
          c.eps_hi / shrink * std::sqrt(c.eps_hi / c.eps_lo) * d);

  // Restart the iterative solver from perturbed points; all limits must agree.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double probe_tol = inner_tol * std::min(1.0, c.m / step.eps);
  const double radius = 0.1 * (1.0 + step_len);
  double spread = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    Point dir(x.size());
    for (Index i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
    InnerOptions o;
    o.force_iterative = true;
    o.start = Point(x + radius * dir / std::max(dir.norm(), 1e-300));
    SubproblemSolution alt = solve_subproblem(p, step, x, probe_tol, o);
    spread = std::max(spread, (alt.point - sol.point).norm());
  }
  rep.add("restart spread <= 10 inner_tol", spread, 10 * inner_tol, 0.0);
  return rep;
}

}  // namespace vbpg
