#pragma once

#include <filesystem>
#include <memory>

#include "vbpg/corpus.hpp"
#include "vbpg/errors.hpp"

namespace vbpg {

struct KernelSpec {
  enum class Kind { Euclidean, Diagonal, Spd, DiagonalBB, BlockJacobi };
  Kind kind = Kind::Euclidean;
  double scale = 1.0;                  // Euclidean
  Point weights;                       // Diagonal
  Matrix matrix;                       // Spd
  double m = 0, M = 0;                 // DiagonalBB clipping bounds
  std::vector<double> c;               // BlockJacobi proximal weights
  std::optional<BlockPartition> blocks;
};

struct EpsSpec {
  double lo = 0, hi = 0;
  std::vector<double> values;
};

struct DiagnosticRequest {
  Condition condition = Condition::LevelSetSubdiff;
  // alpha, gamma, p, q, xi, sigma depending on the condition
  std::map<std::string, double> params;
  std::optional<double> candidate;
  std::size_t samples = 1000;
  Region region;
  SublevelOracle sublevel;
  std::optional<std::string> witness_sequence;
  std::optional<double> eps;  // step of T for the prox-based conditions
};

struct ExperimentConfig {
  std::string problem_id;  // corpus id or "inline"
  std::shared_ptr<const CorpusEntry> entry;
  KernelSpec kernel;
  std::optional<EpsSpec> eps;  // default: constant 0.5 m/L
  std::optional<Point> x0;     // default: seeded uniform point of the sample box
  std::size_t max_iters = 500;
  double stop_tol = 1e-12;
  std::optional<double> inner_tol;
  std::size_t inner_max_iters = 10000;
  std::uint64_t seed = 0;
  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.json";
  std::vector<DiagnosticRequest> diagnostics;
};

// Throws ConfigError. Corpus ids, region shapes and step bounds are checked
// here so that later stages only see closed configs.
ExperimentConfig parse_config(const json& j);
// Adds line and column to JSON syntax errors.
ExperimentConfig load_config(const std::filesystem::path& path);

// Kernel schedule and steps for run_vbpg. Throws ConfigError outside the
// descent regime eps_hi < m/L.
VbpgConfig solver_config(const ExperimentConfig& cfg);
Point initial_point(const ExperimentConfig& cfg);
// Fixed step used by the prox-based diagnostics.
BregmanStep diagnostic_step(const ExperimentConfig& cfg, std::optional<double> eps);

}  // namespace vbpg
