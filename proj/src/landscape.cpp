#include "vbpg/landscape.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "vbpg/errors.hpp"

namespace vbpg {

Landscape Landscape::of(const CompositeProblem& p) {
  auto shared = std::make_shared<const CompositeProblem>(p);
  Landscape l;
  l.dim = p.dim;
  l.value = [shared](const Point& x) { return objective(*shared, x); };
  l.analytic = p.analytic;
  l.name = p.name;
  return l;
}

Landscape Landscape::of(const RawFunction& r) {
  Landscape l;
  l.dim = r.dim;
  l.value = r.eval;
  l.analytic = r.analytic;
  l.name = r.name;
  return l;
}

ProxMap prox_map(const CompositeProblem& p, const BregmanStep& step) {
  auto shared = std::make_shared<const CompositeProblem>(p);
  return [shared, step](const Point& x) { return solve_subproblem(*shared, step, x).point; };
}

bool Region::contains(const Point& x, double Fx) const {
  return (x - x_bar).norm() < eta && Fx > F_bar && Fx < F_bar + nu;
}

Region make_region(const Landscape& land, const Point& x_bar, double eta, double nu) {
  if (x_bar.size() != land.dim) throw ArgumentError("region center has the wrong dimension");
  if (!(eta > 0) || !(nu > 0)) throw ArgumentError("region radius and band must be positive");
  double Fb = land.value(x_bar);
  if (!std::isfinite(Fb)) throw DomainError("region center is outside dom F");
  return Region{x_bar, eta, nu, Fb};
}

Point sample_ball(const Point& center, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index n = center.size();
  Point dir(n);
  double nn = 0;
  do {
    for (Index i = 0; i < n; ++i) dir[i] = normal(rng);
    nn = dir.norm();
  } while (nn == 0);
  double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
  return center + (r / nn) * dir;
}

std::vector<Point> sample_region(const Landscape& land, const Region& region,
                                 const SamplerOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  const std::size_t cap = opts.max_attempts ? opts.max_attempts : 2000 * opts.count;
  std::vector<Point> out;
  out.reserve(opts.count);
  for (std::size_t a = 0; a < cap && out.size() < opts.count; ++a) {
    Point x = sample_ball(region.x_bar, region.eta, rng);
    double Fx = land.value(x);
    if (region.contains(x, Fx)) out.push_back(std::move(x));
  }
  if (out.size() < kMinAcceptedSamples)
    throw InsufficientSamplingError(out.size(), "only " + std::to_string(out.size()) +
                                                    " samples accepted in the region (need " +
                                                    std::to_string(kMinAcceptedSamples) + ")");
  if (out.size() < opts.count)
    spdlog::warn("sampler accepted {} of {} requested points", out.size(), opts.count);
  return out;
}

SublevelOracle SublevelOracle::analytic() { return {Method::AnalyticProjection, 0, std::nullopt}; }

SublevelOracle SublevelOracle::grid(double resolution, const Box& box) {
  if (!(resolution > 0)) throw ArgumentError("grid resolution must be positive");
  return {Method::Grid, resolution, box};
}

SublevelOracle SublevelOracle::solution_set() { return {Method::SolutionSet, 0, std::nullopt}; }

namespace {

std::vector<Point> tabulate(const Landscape& land, double level, const Box& box, double h) {
  const Index d = box.dim();
  std::vector<long> counts(static_cast<std::size_t>(d));
  long total = 1;
  for (Index i = 0; i < d; ++i) {
    counts[static_cast<std::size_t>(i)] =
        static_cast<long>(std::floor((box.upper[i] - box.lower[i]) / h + 1e-9)) + 1;
    total *= counts[static_cast<std::size_t>(i)];
  }
  if (total > 50'000'000) throw ArgumentError("sublevel grid is too large");
  std::vector<Point> in;
  Point z(d);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (Index i = 0; i < d; ++i) {
      long c = counts[static_cast<std::size_t>(i)];
      z[i] = box.lower[i] + static_cast<double>(rem % c) * h;
      rem /= c;
    }
    if (land.value(z) <= level) in.push_back(z);
  }
  return in;
}

}  // namespace

SublevelDistance::SublevelDistance(const Landscape& land, double level, const SublevelOracle& oracle)
    : land_(land), level_(level), oracle_(oracle) {
  using M = SublevelOracle::Method;
  switch (oracle.method) {
    case M::AnalyticProjection:
      if (!land.analytic.sublevel_project)
        throw CapabilityError("no analytic sublevel projection for " + land.name);
      break;
    case M::SolutionSet: {
      const auto& a = land.analytic;
      if (!a.optimal_value || !a.critical_points || !a.critical_set_is_solution_set)
        throw CapabilityError("solution set of " + land.name + " is not known");
      if (std::abs(level - *a.optimal_value) > 1e-12 * (1 + std::abs(*a.optimal_value)))
        throw ArgumentError("solution-set distance applies only at the optimal value");
      break;
    }
    case M::Grid:
      if (land.dim > 3) throw ArgumentError("grid sublevel distances need dimension <= 3");
      if (!oracle.box || oracle.box->dim() != land.dim)
        throw ArgumentError("grid oracle needs a box of matching dimension");
      grid_points_ = std::make_shared<const std::vector<Point>>(
          tabulate(land, level, *oracle.box, oracle.resolution));
      if (grid_points_->empty())
        spdlog::warn("sublevel set [F <= {}] has no grid points in the box", level);
      break;
  }
}

double SublevelDistance::cell_diagonal() const {
  return oracle_.method == SublevelOracle::Method::Grid
             ? oracle_.resolution * std::sqrt(static_cast<double>(land_.dim))
             : 0.0;
}

double SublevelDistance::operator()(const Point& x) const {
  if (land_.value(x) <= level_) return 0.0;
  switch (oracle_.method) {
    case SublevelOracle::Method::AnalyticProjection:
      return (x - land_.analytic.sublevel_project(x, level_)).norm();
    case SublevelOracle::Method::SolutionSet: return land_.analytic.critical_points->distance(x);
    case SublevelOracle::Method::Grid: {
      double best = kInf;
      for (const auto& z : *grid_points_) best = std::min(best, (x - z).squaredNorm());
      return std::sqrt(best);
    }
  }
  return kInf;
}

double sublevel_distance(const Landscape& land, const Point& x, double level,
                         const SublevelOracle& oracle) {
  return SublevelDistance(land, level, oracle)(x);
}

}  // namespace vbpg
