#pragma once

#include <string>
#include <vector>

#include "vbpg/inequalities.hpp"

namespace vbpg {

// Contiguous block partition of the coordinates.
struct BlockPartition {
  std::vector<Index> sizes;

  static BlockPartition equal(Index n, Index blocks);
  Index dim() const;
  Index start(std::size_t b) const;
};

// Block diagonal matrix with blocks Q_ii + c_i I.
Matrix jacobi_kernel_matrix(const Matrix& Q, const BlockPartition& blocks,
                            const std::vector<double>& c);

struct KernelSchedule {
  enum class Kind { Constant, DiagonalBB, BlockJacobi, Custom };

  Kind kind = Kind::Constant;
  std::optional<BregmanKernel> kernel;   // Constant
  double m = 0, M = 0;                   // DiagonalBB clipping bounds
  BlockPartition blocks;                 // BlockJacobi
  std::vector<double> c_weights;         // BlockJacobi
  std::vector<BregmanKernel> sequence;   // Custom; the last kernel repeats

  static KernelSchedule constant(const BregmanKernel& k);
  static KernelSchedule diagonal_bb(double m, double M);
  static KernelSchedule block_jacobi(BlockPartition blocks, std::vector<double> c);
  static KernelSchedule custom(std::vector<BregmanKernel> seq);
};

const char* to_string(KernelSchedule::Kind k);

struct EpsSchedule {
  double lo = 1, hi = 1;
  std::vector<double> values;  // the last value repeats

  static EpsSchedule constant(double eps);
  static EpsSchedule sequence(std::vector<double> values, double lo, double hi);
  double at(std::size_t k) const;
};

struct VbpgConfig {
  KernelSchedule schedule;
  EpsSchedule eps;
  std::size_t max_iters = 1000;
  double stop_tol = 1e-10;
  std::optional<double> inner_tol;  // default: 1e-10 (1 + ||x||)
  std::size_t inner_max_iters = 10000;
  bool record_gap = true;
};

struct TraceRecord {
  std::size_t k = 0;
  Point x;
  double F = 0;
  double step_norm = 0;  // ||x^k - x^{k+1}||
  double gap = 0;
  double envelope = 0;
  double residual_bound = 0;  // (L + M/eps_lo) ||x^k - x^{k+1}||
};

enum class StopReason { StepTolerance, MaxIterations };
const char* to_string(StopReason r);

struct SolverTrace {
  std::vector<TraceRecord> records;
  Point final_point;
  double F_limit = 0;
  StopReason stop = StopReason::MaxIterations;
  SolverConstants constants;
  double L = 0, M = 0, eps_lo = 0;

  std::size_t iters() const { return records.size(); }
  // x^k for k = 0..iters(); the last one is final_point.
  Point iterate(std::size_t k) const;
  double value(std::size_t k) const;
};

// Moduli (m, M) the schedule guarantees on this problem.
std::pair<double, double> schedule_moduli(const CompositeProblem& p, const KernelSchedule& s);

SolverTrace run_vbpg(const CompositeProblem& p, const VbpgConfig& cfg, const Point& x0);

// Blockwise Jacobi update with per-block kernel (Q_ii + c_i I)/eps, computed
// without going through the generic subproblem solver. Accepts any eps > 0.
SolverTrace run_regularized_jacobi(const CompositeProblem& p, const BlockPartition& blocks,
                                   const std::vector<double>& c, double eps, const Point& x0,
                                   std::size_t iters, double stop_tol = 0.0);

struct ValueProximityReport {
  InequalityReport report;
  std::size_t in_region = 0;
  double minimal_kappa = 0;  // smallest kappa' that every in-region iterate satisfies
  bool empty() const { return in_region == 0; }
};

// F(x^{k+1}) - F(x_bar) <= kappa' ||x^k - x^{k+1}||^2 for every x^{k+1} in
// {||x - x_bar|| < eta, F_bar < F(x) < F_bar + nu}.
ValueProximityReport check_value_proximity(const CompositeProblem& p, const SolverTrace& trace,
                                           const Point& x_bar, double kappa_prime, double eta,
                                           double nu);

struct RateReport {
  double beta_q = 0;  // max tail ratio of F - F_bar
  double beta_r = 0;  // geometric mean of tail ratios of ||x^k - x_bar||
  std::size_t tail_start = 0;
  std::size_t q_pairs = 0;
  std::size_t r_pairs = 0;
  bool linear = false;
};

RateReport measure_rates(const SolverTrace& trace, double F_bar, const Point& x_bar,
                         double tail_fraction);

}  // namespace vbpg
