#pragma once

#include <optional>

#include "vbpg/landscape.hpp"

namespace vbpg {

// Constants that one error-bound condition hands to the next. Every function
// checks the step regime it needs and throws RegimeError or HypothesisError
// instead of returning a constant that is not backed by the argument.

// Subdifferential EB (gamma, c1) on B(x_bar; eta, nu) gives the Bregman EB
// dist^p <= theta ||x - T(x)|| on B(x_bar; eta/2, nu/N). Needs eps_hi < m/L.
struct BregmanEbBound {
  double p = 1;
  double theta1 = 0;
  double theta2 = 0;
  double theta = 0;
  double N = 1;
  Region region;
};

BregmanEbBound bregman_eb_from_subdiff(const SolverConstants& k, const Region& region,
                                       double gamma, double c1);

// Bregman EB (p, theta) gives the gap condition G >= mu (F - F_bar)^q with
// q = 1/min(1/p, 1). The explicit mu is only available for p = 1:
// mu = 1/(eps + 2 c0 theta^2 eps_hi^2/(m - eps_hi rho)).
struct GapBound {
  double q = 1;
  std::optional<double> mu;
};

GapBound bp_gap_from_bregman_eb(const SolverConstants& k, double eps, double p, double theta);

// Gap condition (q, mu) gives KL with exponent q/2 and
// c5 = sqrt((2 eps_lo/eps_hi)(m - eps_hi rho) mu).
struct KlBound {
  double alpha = 0.5;
  double c5 = 0;
};

KlBound kl_from_bp_gap(const SolverConstants& k, double q, double mu);

// KL (alpha, c5) on B(x_bar; eta, nu) gives the subdifferential EB with
// gamma = alpha/(1 - alpha) on B(x_bar; eta/2, nu). No constant is stated for
// this step; heuristic_c1 = (c5 (1-alpha))^(-alpha/(1-alpha)) / c5 comes from
// the usual desingularizing-function argument and is reported only.
struct SubdiffEbFromKl {
  double gamma = 1;
  Region region;
  double heuristic_c1 = 0;
};

SubdiffEbFromKl subdiff_eb_from_kl(const Region& region, double alpha, double c5);

// Contraction dist(x+, S) <= beta dist(x, S) from the strong Bregman EB with
// theta' in (sqrt(c/b), sqrt(c/(b-1))), beta = sqrt(b - c/theta'^2).
struct ContractionBound {
  double lo = 0;  // sqrt(c/b), or NaN when c <= 0
  double hi = 0;  // sqrt(c/(b-1)), or NaN when the interval is empty
  bool interval_nonempty = false;
  bool theta_admissible = false;
  std::optional<double> beta;
};

ContractionBound contraction_from_strong_bregman_eb(const SolverConstants& k,
                                                    std::optional<double> theta_prime);

// Measured contraction beta in (0,1) with semiconvex g gives the strong
// subdifferential EB c1' = eps_hi/((1-beta)(m - eps_hi rho)) sqrt(eps_hi/eps_lo)
// and the strong Bregman EB theta' = 1 + c1'(L + M/eps_lo).
struct StrongEbFromContraction {
  double c1 = 0;
  double theta = 0;
};

StrongEbFromContraction strong_eb_from_contraction(const SolverConstants& k, double beta);

// Prediction for weak metric subregularity from LWSC/LQGG modulus mu > rho.
double weak_subregularity_constant(double mu, double rho);

// kappa' = max(c1^(2/gamma) (L + M/eps_lo)^(2/gamma) kappa, kappa), gamma in (0, 1].
double value_proximity_constant(const SolverConstants& k, double gamma, double c1);

// Q-linear factor 1/(1 + a/kappa').
double q_linear_factor(const SolverConstants& k, double kappa_prime);

}  // namespace vbpg
