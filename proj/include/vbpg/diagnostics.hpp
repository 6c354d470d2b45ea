#pragma once

#include "vbpg/certificates.hpp"
#include "vbpg/implications.hpp"

namespace vbpg {

// dist(x^k, S) along a VBPG run, S = [F <= F_bar].
struct ContractionReport {
  std::vector<double> distances;  // dist(x^k, S) for the recorded iterates
  std::vector<double> ratios;     // dist(x^{k+1}, S) / dist(x^k, S)
  double beta_hat = 0;            // max ratio; 0 when the series is empty
  bool truncated = false;         // stopped at a distance at or below the floor
  ContractionBound theorem;       // applicability of the rate from theta'
  SolverTrace trace;

  bool empty() const { return ratios.empty(); }
};

// Runs VBPG from x0 and measures the contraction of the sublevel distance. The
// series stops at the first iterate whose distance is <= dist_floor.
ContractionReport measure_levelset_contraction(const CompositeProblem& p, const VbpgConfig& cfg,
                                               const Point& x0, const DistanceFn& dist,
                                               std::optional<double> theta_prime = std::nullopt,
                                               double dist_floor = 0.0);

// F(t) - F_bar <= E(x) - F_bar <= c0 dist^2(x, [F <= F_bar]) for x in [F > F_bar].
InequalityReport check_envelope_proximity(const CompositeProblem& p, const BregmanStep& step,
                                          double F_bar, const std::vector<Point>& samples,
                                          const DistanceFn& sublevel_dist);

enum class SufficientCondition { LSC, LESC, LWSC, LQGG, LRSI, LPL };
const char* to_string(SufficientCondition c);
std::optional<SufficientCondition> sufficient_condition_from_string(const std::string& s);

// Each sampled constraint reads lhs >= mu * weight with weight > 0.
struct ConditionReport {
  SufficientCondition which = SufficientCondition::LSC;
  double mu = 0;  // largest mu >= 0 for which every sampled constraint holds
  std::size_t n_constraints = 0;
  std::optional<double> candidate;
  bool candidate_holds = true;
  std::optional<Witness> witness;  // first violation of the candidate
};

// Samples the ball B(x_bar; eta) and bisects on mu. Pairs for LSC/LESC include
// (x, x_p) so that LSC <= LESC <= LWSC holds on the same samples.
ConditionReport check_sufficient_condition(const CompositeProblem& p, const Point& x_bar,
                                           double eta, SufficientCondition which,
                                           std::optional<double> mu_candidate,
                                           const SamplerOptions& opts);

struct ChainAudit {
  double mu_lsc = 0;
  double mu_lesc = 0;
  double mu_lwsc = 0;
  bool holds = false;  // LSC modulus satisfies LESC, LESC modulus satisfies LWSC
};

ChainAudit audit_convexity_chain(const CompositeProblem& p, const Point& x_bar, double eta,
                                 const SamplerOptions& opts);

struct PredictionReport {
  double mu = 0;
  double rho = 0;
  double c2 = 0;  // 2/(mu - rho)
  EBCertificate certificate;
  bool verified() const { return !certificate.refuted(); }
};

// Predicts weak metric subregularity from an LWSC/LQGG modulus mu > rho and
// checks the predicted constant on fresh samples of the region.
PredictionReport predict_weak_metric_subregularity(const CompositeProblem& p, const Region& region,
                                                   double mu, double rho,
                                                   const std::vector<Point>& fresh);

// Every critical point within delta of x_bar has F <= F(x_bar).
struct NearbyCriticalReport {
  std::vector<double> deltas;
  std::optional<double> largest_certified;
  std::optional<Witness> witness;  // critical point with F above F(x_bar)
  std::size_t checked = 0;
  bool holds() const { return !witness; }
};

NearbyCriticalReport check_nearby_critical_values(const Landscape& land, const Point& x_bar,
                                                  std::vector<double> deltas,
                                                  std::size_t samples = 2000,
                                                  std::uint64_t seed = 0);

json to_json(const ContractionReport& r);
json to_json(const ConditionReport& r);
json to_json(const NearbyCriticalReport& r);

}  // namespace vbpg
