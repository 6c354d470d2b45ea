#include "vbpg/problem.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vbpg/errors.hpp"

namespace vbpg {

Box Box::cube(Index n, double lo, double hi) {
  return Box{Point::Constant(n, lo), Point::Constant(n, hi)};
}

bool Box::contains(const Point& x) const {
  if (x.size() != lower.size()) return false;
  return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
}

Point CriticalSet::nearest(const Point& x) const {
  if (project) return project(x);
  if (points.empty()) throw CapabilityError("critical set is empty");
  const Point* best = &points.front();
  double best_d = (x - points.front()).norm();
  for (const auto& c : points) {
    double d = (x - c).norm();
    if (d < best_d) {
      best_d = d;
      best = &c;
    }
  }
  return *best;
}

double CriticalSet::distance(const Point& x) const { return (x - nearest(x)).norm(); }

double objective(const CompositeProblem& p, const Point& x) {
  if (x.size() != p.dim) throw ArgumentError("objective: dimension mismatch");
  if (!x.allFinite()) throw ArgumentError("objective: non-finite point");
  double gv = p.g.eval(x);
  if (std::isnan(gv)) throw NumericError("g", "g returned NaN");
  if (gv == kInf) return kInf;
  double fv = p.f.eval(x);
  if (std::isnan(fv)) throw NumericError("f", "f returned NaN");
  return fv + gv;
}

double CompositeProblem::value(const Point& x) const { return objective(*this, x); }

void wire_subdiff_dist(CompositeProblem& p) {
  if (p.analytic.subdiff_dist || !p.g.min_norm_subgrad) return;
  auto grad = p.f.grad;
  auto sub = p.g.min_norm_subgrad;
  p.analytic.subdiff_dist = [grad, sub](const Point& x) { return sub(x, grad(x)); };
}

namespace {

Point uniform_in_box(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(box.dim());
  for (Index i = 0; i < x.size(); ++i)
    x[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
  return x;
}

double checked(double v, const char* term, const Point& x) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << term << " is not finite at x = [" << x.transpose() << "]";
    throw DomainError(os.str());
  }
  return v;
}

}  // namespace

ValidationReport validate_problem(const CompositeProblem& p, const Box& box,
                                  std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw ArgumentError("validate_problem needs at least 2 samples");
  if (box.dim() != p.dim) throw ArgumentError("validate_problem: box dimension mismatch");

  ValidationReport rep;
  rep.n_samples = n_samples;
  std::mt19937_64 rng(seed);
  const double L = p.f.lipschitz;
  const std::optional<double> rho = p.g.semiconvex_rho;

  for (std::size_t s = 0; s < n_samples; ++s) {
    Point x = uniform_in_box(box, rng);
    Point y = uniform_in_box(box, rng);
    double fx = checked(p.f.eval(x), "f", x);
    double fy = checked(p.f.eval(y), "f", y);
    double gx = checked(p.g.eval(x), "g", x);
    double gy = checked(p.g.eval(y), "g", y);
    Point dx = p.f.grad(x), dy = p.f.grad(y);
    if (!dx.allFinite() || !dy.allFinite()) throw DomainError("gradient of f is not finite");

    double dist = (x - y).norm();
    double lhs = (dx - dy).norm();
    double rhs = L * dist;
    if (lhs > rhs + 1e-9 * (1.0 + std::max(lhs, rhs)))
      rep.violations.push_back({"lipschitz", x, y, lhs, rhs});

    double dlhs = fy;
    double drhs = fx + dx.dot(y - x) + 0.5 * L * dist * dist;
    double mag = std::abs(fx) + std::abs(fy) + std::abs(drhs);
    if (dlhs > drhs + 1e-9 * (1.0 + mag))
      rep.violations.push_back({"descent", x, y, dlhs, drhs});

    if (rho) {
      // midpoint convexity of g + rho/2 ||.||^2
      Point mid = 0.5 * (x + y);
      double gm = checked(p.g.eval(mid), "g", mid);
      double h_mid = gm + 0.5 * *rho * mid.squaredNorm();
      double h_avg = 0.5 * (gx + 0.5 * *rho * x.squaredNorm()) +
                     0.5 * (gy + 0.5 * *rho * y.squaredNorm());
      if (h_mid > h_avg + 1e-9 * (1.0 + std::abs(h_mid) + std::abs(h_avg)))
        rep.violations.push_back({"semiconvexity", x, y, h_mid, h_avg});
    }
  }

  if (p.analytic.critical_points && p.analytic.subdiff_dist) {
    for (const auto& c : p.analytic.critical_points->points) {
      double d = p.analytic.subdiff_dist(c);
      if (d > 1e-10) rep.violations.push_back({"critical_point", c, c, d, 0.0});
    }
  }
  return rep;
}

bool SolverConstants::semiconvex_regime() const {
  if (!rho) return false;
  bool step_ok = L == 0 ? true : eps_hi < m / L;
  return step_ok && m - eps_hi * *rho > 0;
}

SolverConstants derive_constants(double m, double M, double eps_lo, double eps_hi,
                                 double L, std::optional<double> rho) {
  if (!(m > 0)) throw ArgumentError("kernel modulus m must be positive");
  if (!(M >= m)) throw ArgumentError("kernel modulus M must be at least m");
  if (!(eps_lo > 0) || !(eps_lo <= eps_hi))
    throw ArgumentError("step bounds must satisfy 0 < eps_lo <= eps_hi");
  if (!(L >= 0)) throw ArgumentError("Lipschitz constant must be nonnegative");
  if (rho && !(*rho >= 0)) throw ArgumentError("semiconvexity modulus must be nonnegative");

  SolverConstants c;
  c.m = m;
  c.M = M;
  c.eps_lo = eps_lo;
  c.eps_hi = eps_hi;
  c.L = L;
  c.rho = rho;
  c.a = 0.5 * (m / eps_hi - L);
  c.frak_a = 2.0;
  c.frak_b = M / eps_lo + 2.0 + 3.0 * L;
  c.frak_c = m / eps_hi - (L + 2.0);
  c.kappa = std::max((2.0 * c.frak_b - 1.0) / c.frak_a, (2.0 * c.frak_b - c.frak_c) / c.frak_a);
  c.c0 = 1.5 * L + M / (2.0 * eps_lo);
  return c;
}

}  // namespace vbpg
