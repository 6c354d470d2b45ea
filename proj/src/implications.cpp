#include "vbpg/implications.hpp"

#include <cmath>

#include "vbpg/errors.hpp"

namespace vbpg {

namespace {

void require_descent(const SolverConstants& k) {
  if (!k.descent())
    throw RegimeError("needs eps_hi < m/L (a = " + std::to_string(k.a) + ")");
}

double semiconvex_margin(const SolverConstants& k) {
  if (!k.rho) throw HypothesisError("needs the semiconvexity modulus of g");
  double margin = k.m - k.eps_hi * *k.rho;
  if (!(margin > 0)) throw RegimeError("needs eps_hi < m/rho");
  return margin;
}

}  // namespace

BregmanEbBound bregman_eb_from_subdiff(const SolverConstants& k, const Region& region,
                                       double gamma, double c1) {
  if (!(gamma > 0) || !(c1 >= 0)) throw ArgumentError("need gamma > 0 and c1 >= 0");
  require_descent(k);
  BregmanEbBound b;
  const double half = region.eta / 2.0;
  const double Lres = k.L + k.M / k.eps_lo;
  const double ig = 1.0 / gamma;
  b.p = 1.0 / std::min(ig, 1.0);
  b.theta1 = 1.0 + std::pow(c1, ig) * std::pow(Lres, ig) * std::pow(half, ig - 1.0);
  b.theta2 = std::pow(half, 1.0 - ig) + std::pow(c1, ig) * std::pow(Lres, ig);
  b.theta = std::max(b.theta1, b.theta2);
  // N must exceed the bound strictly; 1.5 times it is a fixed choice.
  const double need = 2.0 * k.eps_hi * region.nu / ((k.m - k.eps_hi * k.L) * half * half);
  b.N = 1.5 * std::max(need, 1.0);
  b.region = region;
  b.region.eta = half;
  b.region.nu = region.nu / b.N;
  return b;
}

GapBound bp_gap_from_bregman_eb(const SolverConstants& k, double eps, double p, double theta) {
  if (!(p > 0) || !(theta >= 0)) throw ArgumentError("need p > 0 and theta >= 0");
  if (!(eps >= k.eps_lo && eps <= k.eps_hi)) throw ArgumentError("eps outside [eps_lo, eps_hi]");
  require_descent(k);
  const double margin = semiconvex_margin(k);
  GapBound g;
  g.q = 1.0 / std::min(1.0 / p, 1.0);
  if (p == 1.0)
    g.mu = 1.0 / (eps + 2.0 * k.c0 * theta * theta * k.eps_hi * k.eps_hi / margin);
  return g;
}

KlBound kl_from_bp_gap(const SolverConstants& k, double q, double mu) {
  if (!(q >= 0 && q < 2) || !(mu >= 0)) throw ArgumentError("need q in [0, 2) and mu >= 0");
  const double margin = semiconvex_margin(k);
  KlBound b;
  b.alpha = q / 2.0;
  b.c5 = std::sqrt((2.0 * k.eps_lo / k.eps_hi) * margin * mu);
  return b;
}

SubdiffEbFromKl subdiff_eb_from_kl(const Region& region, double alpha, double c5) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("KL exponent must lie in (0, 1)");
  if (!(c5 > 0)) throw ArgumentError("KL constant must be positive");
  SubdiffEbFromKl r;
  r.gamma = alpha / (1.0 - alpha);
  r.region = region;
  r.region.eta = region.eta / 2.0;
  r.heuristic_c1 = std::pow(c5 * (1.0 - alpha), -r.gamma) / c5;
  return r;
}

ContractionBound contraction_from_strong_bregman_eb(const SolverConstants& k,
                                                    std::optional<double> theta_prime) {
  ContractionBound b;
  const double nan = std::nan("");
  b.lo = k.frak_c > 0 ? std::sqrt(k.frak_c / k.frak_b) : nan;
  b.hi = (k.frak_c > 0 && k.frak_b > 1) ? std::sqrt(k.frak_c / (k.frak_b - 1.0)) : nan;
  b.interval_nonempty = std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi;
  if (theta_prime) {
    b.theta_admissible = b.interval_nonempty && *theta_prime > b.lo && *theta_prime < b.hi;
    if (b.theta_admissible)
      b.beta = std::sqrt(k.frak_b - k.frak_c / (*theta_prime * *theta_prime));
  }
  return b;
}

StrongEbFromContraction strong_eb_from_contraction(const SolverConstants& k, double beta) {
  if (!(beta > 0 && beta < 1)) throw HypothesisError("contraction factor must lie in (0, 1)");
  require_descent(k);
  const double margin = semiconvex_margin(k);
  StrongEbFromContraction s;
  s.c1 = k.eps_hi / ((1.0 - beta) * margin) * std::sqrt(k.eps_hi / k.eps_lo);
  s.theta = 1.0 + s.c1 * (k.L + k.M / k.eps_lo);
  return s;
}

double weak_subregularity_constant(double mu, double rho) {
  if (!(mu > rho)) throw HypothesisError("needs mu > rho");
  return 2.0 / (mu - rho);
}

double value_proximity_constant(const SolverConstants& k, double gamma, double c1) {
  if (!(gamma > 0 && gamma <= 1))
    throw HypothesisError("value proximity is only derived for gamma in (0, 1]");
  const double e = 2.0 / gamma;
  return std::max(std::pow(c1, e) * std::pow(k.L + k.M / k.eps_lo, e) * k.kappa, k.kappa);
}

double q_linear_factor(const SolverConstants& k, double kappa_prime) {
  require_descent(k);
  if (!(kappa_prime > 0)) throw ArgumentError("kappa' must be positive");
  return 1.0 / (1.0 + k.a / kappa_prime);
}

}  // namespace vbpg
