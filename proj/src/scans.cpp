#include "vbpg/scans.hpp"

#include <cmath>
#include <sstream>

#include "vbpg/errors.hpp"

namespace vbpg {

std::optional<CounterexampleId> counterexample_from_string(const std::string& s) {
  if (s == "EX_5_1") return CounterexampleId::Ex51;
  if (s == "EX_5_2") return CounterexampleId::Ex52;
  if (s == "EX_5_3") return CounterexampleId::Ex53;
  return std::nullopt;
}

const char* to_string(CounterexampleId id) {
  switch (id) {
    case CounterexampleId::Ex51: return "EX_5_1";
    case CounterexampleId::Ex52: return "EX_5_2";
    case CounterexampleId::Ex53: return "EX_5_3";
  }
  return "unknown";
}

ScanReport scan_counterexample(CounterexampleId id, const std::vector<double>& n_values,
                               std::optional<double> alpha, std::size_t positive_samples,
                               std::uint64_t seed) {
  if (n_values.empty()) throw ArgumentError("scan needs at least one n");
  const double n_min = id == CounterexampleId::Ex52 ? 3.0 : 2.0;
  for (double n : n_values)
    if (!(n >= n_min && n <= 0x1p20)) throw ArgumentError("scan index must lie in [2, 2^20]");
  if (id == CounterexampleId::Ex52) {
    if (!alpha || !(*alpha > 0 && *alpha < 1))
      throw ArgumentError("EX_5_2 scan needs alpha in (0, 1)");
  }
  ScanReport r;
  r.example = id;
  r.alpha = alpha;
  for (double n : n_values) {
    double ratio = 0;
    switch (id) {
      case CounterexampleId::Ex51: {
        double x1 = std::pow(n, -1.25), x2 = 1.0 / n;
        ratio = std::hypot(x1, x2) / std::hypot(2.0 * x1, 3.0 * x2 * x2);
        break;
      }
      case CounterexampleId::Ex53: {
        double x1 = 1.0 / n, x2 = 1.0 / (3.0 * n * n);
        ratio = std::hypot(x1, x2) / x2;
        break;
      }
      case CounterexampleId::Ex52:
        ratio = 2.0 * std::pow(n, *alpha) / (n - 1.0);
        break;
    }
    r.rows.push_back({n, ratio});
  }
  const bool up = id != CounterexampleId::Ex52;
  r.monotone = r.rows.size() >= 2;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    bool step = up ? r.rows[i].ratio > r.rows[i - 1].ratio : r.rows[i].ratio < r.rows[i - 1].ratio;
    r.monotone = r.monotone && step;
  }
  r.assessment = up ? assess_divergence(r.rows) : assess_vanishing(r.rows);

  CorpusEntry e = load_corpus(to_string(id));
  Landscape land = e.landscape();
  const Region& region = e.regions.front();
  std::vector<Point> samples = sample_region(land, region, {positive_samples, seed, 0});
  SublevelDistance dist(land, region.F_bar, SublevelOracle::analytic());
  r.positive = certify_level_set_subdiff_eb(land, region, 1.0, samples,
                                            [&](const Point& x) { return dist(x); });
  return r;
}

std::string scan_csv(const ScanReport& r) {
  std::ostringstream os;
  os << "n,ratio\n";
  for (const auto& row : r.rows) os << format_double(row.n) << ',' << format_double(row.ratio) << '\n';
  return os.str();
}

json to_json(const ScanReport& r) {
  json j;
  j["example"] = to_string(r.example);
  if (r.alpha) j["alpha"] = *r.alpha;
  j["n_rows"] = r.rows.size();
  j["monotone"] = r.monotone;
  j["criterion_met"] = r.assessment.criterion_met;
  j["first"] = r.assessment.first;
  j["last"] = r.assessment.last;
  j["positive_certificate"] = to_json(r.positive);
  return j;
}

}  // namespace vbpg
