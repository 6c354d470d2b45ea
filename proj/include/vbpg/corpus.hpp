#pragma once

#include <map>
#include <variant>

#include "vbpg/certificates.hpp"

namespace vbpg {

struct CorpusEntry {
  std::string id;
  std::variant<CompositeProblem, RawFunction> problem;
  Box sample_box;
  std::vector<Region> regions;  // the first one is the default
  std::map<std::string, WitnessSequence> witness_sequences;
  // Reference minimizer when it is not known in closed form (LASSO, Jacobi).
  std::optional<Point> reference_solution;
  std::optional<BlockPartition> blocks;
  // Proximal map for piecewise entries, which have no smooth/nonsmooth split.
  std::optional<ProxMap> prox;
  std::string notes;

  bool is_composite() const { return std::holds_alternative<CompositeProblem>(problem); }
  // Throws CapabilityError for piecewise entries.
  const CompositeProblem& composite() const;
  Landscape landscape() const;
  Index dim() const;
  const AnalyticOracles& analytic() const;
};

// Ids: EX_5_1, EX_5_2, EX_5_3, QUAD_SC(n,kappa), LASSO(m,n,lambda,seed),
// QUAD_L1(n,lambda), QUAD_MCP(n,lambda,rho), TWO_WELL, JACOBI_BLOCK(n,blocks,seed).
// Throws ArgumentError listing the valid ids for anything else. Entries are
// validated when first built and cached afterwards.
CorpusEntry load_corpus(const std::string& id);

std::vector<std::string> corpus_id_patterns();

// dist(0, dF(x)) for the staircase; 2x at the breakpoints, where the
// subdifferential is [2x, inf).
double staircase_subdiff_dist(double x);
double staircase_value(double x);

// T_{D,1}(x) = (x1, 0) for the EX_5_3 function; needs x1 > 2 x2 > 0, ||x|| < 1.
Point ex53_prox_reference(const Point& x);

// Minimizer of F(y) + ||y - x||^2/(2 eps) over the box x +/- half_width, by a
// coarse grid refined down to `resolution`. Dimension <= 2.
Point brute_force_prox(const std::function<double(const Point&)>& F, const Point& x, double eps,
                       double half_width, double resolution);

}  // namespace vbpg
