#pragma once

#include <filesystem>

#include "vbpg/errors.hpp"
#include "vbpg/io.hpp"

namespace vbpg {

struct CheckResult {
  std::string id;
  int criterion = 0;  // 0 for the corpus validation that every other check relies on
  bool passed = false;
  std::string detail;
  double seconds = 0;
  json data;
};

struct AcceptanceOptions {
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  double tamper_lipschitz = 1.0;
  std::vector<std::string> only;  // empty: every check
};

struct CheckInfo {
  std::string id;
  int criterion;
};

const std::vector<CheckInfo>& acceptance_checks();

// Runs the selected checks. Exceptions inside a check turn into failures.
// Artifacts go to out_dir/<check id>/.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts);

// {"schema_version": 1, "all_passed": ..., "checks": [...]}
json manifest_json(const std::vector<CheckResult>& results);

}  // namespace vbpg
