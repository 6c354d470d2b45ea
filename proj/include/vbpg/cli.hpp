#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "vbpg/config.hpp"
#include "vbpg/errors.hpp"

namespace vbpg {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCapability = 4;

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned jobs = 1;
  // Scales every corpus Lipschitz constant before `paper-checks`. Used to
  // exercise the validation failure path.
  double tamper_lipschitz = 1.0;
  bool quiet = false;  // no stdout summary
};

// Reads VBPG_LOG (trace, debug, info, warn, error, critical, off); default warn.
void init_logging();

// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown
// after every worker has stopped.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

int cmd_run(const CliOptions& opts);
int cmd_certify(const CliOptions& opts);
int cmd_paper_checks(const CliOptions& opts);

// One certificate per request; CapabilityError propagates.
EBCertificate run_request(const ExperimentConfig& cfg, const DiagnosticRequest& r,
                          std::uint64_t seed);

}  // namespace vbpg
