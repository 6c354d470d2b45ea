#pragma once

#include <map>

#include "vbpg/io.hpp"
#include "vbpg/landscape.hpp"

namespace vbpg {

enum class Condition {
  LevelSetSubdiff,         // dist^gamma(x, [F<=F_bar]) <= c1 dist(0, dF(x))
  LevelSetBregman,         // dist^p(x, [F<=F_bar]) <= theta ||x - T(x)||
  StrongLevelSetSubdiff,   // dist(x, [F<=F_bar]) <= c1' dist(0, dF(x)) on a global band
  StrongLevelSetBregman,   // dist(x, [F<=F_bar]) <= theta' ||x - T(x)|| on a global band
  WeakMetricSubregularity, // dist(x, crit) <= c2 dist(0, dF(x))
  BregmanProxEb,           // dist(x, crit) <= c3 ||x - T(x)||
  LuoTseng,                // dist(x, crit) <= c4 ||x - T(x)|| when F <= xi, ||x - T(x)|| <= sigma
  Kl,                      // dist(0, dF(x)) >= c5 (F(x) - F_bar)^alpha
  BpGap,                   // G(x) >= mu (F(x) - F_bar)^q
  ProxPl,                  // G_{1/L}(x) >= mu (F(x) - F*)
};

const char* to_string(Condition c);
std::optional<Condition> condition_from_string(const std::string& s);

enum class Verdict { CertifiedOnSamples, Refuted };
const char* to_string(Verdict v);

struct Witness {
  Point point;
  double lhs = 0;
  double rhs = 0;
  std::string relation;
};

// Points along which a refutation is sought, indexed by n.
struct WitnessSequence {
  std::vector<double> n;
  std::vector<Point> points;
};

struct SequencePoint {
  double n = 0;
  double ratio = 0;
};

struct SequenceAssessment {
  bool monotone = false;       // over the last 10 points
  bool criterion_met = false;  // monotone and a factor 10 away from the first value
  double first = 0;
  double last = 0;
};

// Increasing over the last 10 points and last > 10 * first.
SequenceAssessment assess_divergence(const std::vector<SequencePoint>& seq);
// Decreasing over the last 10 points and last < first / 10.
SequenceAssessment assess_vanishing(const std::vector<SequencePoint>& seq);

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t n = 0;
};

// Least squares fit log y = intercept + slope log x over positive pairs.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct EBCertificate {
  Condition condition = Condition::LevelSetSubdiff;
  std::map<std::string, double> params;
  Region region;
  std::size_t n_samples = 0;   // samples that entered the estimate
  double worst_ratio = 0;      // extreme sample ratio
  double constant_estimate = 0;
  Verdict verdict = Verdict::CertifiedOnSamples;
  std::optional<Witness> witness;
  std::vector<SequencePoint> witness_sequence;
  std::optional<SequenceAssessment> sequence_assessment;
  std::optional<LogLogFit> exponent_fit;

  bool refuted() const { return verdict == Verdict::Refuted; }
};

json to_json(const EBCertificate& c);

// Optional knobs shared by the certify_* functions.
struct CertifyOptions {
  // Check the inequality with this constant instead of only estimating one.
  std::optional<double> candidate;
  std::optional<WitnessSequence> witness_sequence;
};

using DistanceFn = std::function<double(const Point&)>;

EBCertificate certify_level_set_subdiff_eb(const Landscape& land, const Region& region,
                                           double gamma, const std::vector<Point>& samples,
                                           const DistanceFn& sublevel_dist,
                                           const CertifyOptions& opts = {});

EBCertificate certify_strong_level_set_subdiff_eb(const Landscape& land, const Region& band,
                                                  const std::vector<Point>& samples,
                                                  const DistanceFn& sublevel_dist,
                                                  const CertifyOptions& opts = {});

EBCertificate certify_level_set_bregman_eb(const Landscape& land, const ProxMap& T,
                                           const Region& region, double p,
                                           const std::vector<Point>& samples,
                                           const DistanceFn& sublevel_dist,
                                           const CertifyOptions& opts = {});

EBCertificate certify_weak_metric_subregularity(const Landscape& land, const Region& region,
                                                const std::vector<Point>& samples,
                                                const CertifyOptions& opts = {});

EBCertificate certify_bregman_prox_eb(const Landscape& land, const ProxMap& T,
                                      const Region& region, const std::vector<Point>& samples,
                                      const CertifyOptions& opts = {});

EBCertificate certify_luo_tseng(const Landscape& land, const ProxMap& T, const Region& region,
                                double xi, double sigma, const std::vector<Point>& samples,
                                const CertifyOptions& opts = {});

EBCertificate certify_kl(const Landscape& land, const Region& region, double alpha,
                         const std::vector<Point>& samples, const CertifyOptions& opts = {});

EBCertificate certify_bp_gap(const CompositeProblem& p, const BregmanStep& step,
                             const Region& region, double q, const std::vector<Point>& samples,
                             const CertifyOptions& opts = {});

// Euclidean kernel with eps = 1/L; needs the optimal value.
EBCertificate certify_prox_pl(const CompositeProblem& p, const Region& band,
                              std::optional<double> mu_candidate,
                              const std::vector<Point>& samples);

}  // namespace vbpg
