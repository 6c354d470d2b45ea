#pragma once

#include "vbpg/corpus.hpp"

namespace vbpg {

enum class CounterexampleId { Ex51, Ex52, Ex53 };
std::optional<CounterexampleId> counterexample_from_string(const std::string& s);
const char* to_string(CounterexampleId id);

struct ScanReport {
  CounterexampleId example = CounterexampleId::Ex51;
  std::optional<double> alpha;     // EX_5_2 only
  std::vector<SequencePoint> rows;  // (n, ratio)
  bool monotone = false;            // strictly, over the whole scan
  SequenceAssessment assessment;    // divergence for 5.1/5.3, vanishing for 5.2
  EBCertificate positive;           // subdifferential EB with gamma = 1 on a band
};

// EX_5_1: ||x_n|| / ||grad F(x_n)|| at x_n = (n^-5/4, 1/n).
// EX_5_3: ||x_n|| / x_{n,2} at x_n = (1/n, 1/(3n^2)).
// EX_5_2: the bound 2 n^alpha/(n-1) on the KL ratio at x_n = 1/(n-1).
// n_values must lie in [2, 2^20] (n >= 3 for EX_5_2).
ScanReport scan_counterexample(CounterexampleId id, const std::vector<double>& n_values,
                               std::optional<double> alpha = std::nullopt,
                               std::size_t positive_samples = 1000, std::uint64_t seed = 0);

// Rows as CSV with header "n,ratio".
std::string scan_csv(const ScanReport& r);
json to_json(const ScanReport& r);

}  // namespace vbpg
