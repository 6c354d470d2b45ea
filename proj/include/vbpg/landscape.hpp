#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "vbpg/subproblem.hpp"

namespace vbpg {

// Piecewise function used only for diagnostics; it has no smooth/nonsmooth split.
struct RawFunction {
  Index dim = 0;
  std::function<double(const Point&)> eval;
  std::function<Point(const Point&)> piecewise_grad;  // off the seam
  std::function<bool(const Point&)> seam;
  AnalyticOracles analytic;
  std::string name;
};

// What the diagnostics need from a function: values plus analytic oracles.
struct Landscape {
  Index dim = 0;
  std::function<double(const Point&)> value;
  AnalyticOracles analytic;
  std::string name;

  static Landscape of(const CompositeProblem& p);
  static Landscape of(const RawFunction& r);
};

using ProxMap = std::function<Point(const Point&)>;

// x -> T(x) for a fixed step; the problem is copied into the closure.
ProxMap prox_map(const CompositeProblem& p, const BregmanStep& step);

// {x : ||x - x_bar|| < eta, F_bar < F(x) < F_bar + nu}
struct Region {
  Point x_bar;
  double eta = 1;
  double nu = 1;
  double F_bar = 0;

  bool contains(const Point& x, double Fx) const;
};

Region make_region(const Landscape& land, const Point& x_bar, double eta, double nu);

struct SamplerOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 0;  // 0: 2000 * count
};

inline constexpr std::size_t kMinAcceptedSamples = 30;

Point sample_ball(const Point& center, double radius, std::mt19937_64& rng);

// Rejection sampling: uniform in the ball, kept when inside the value band.
std::vector<Point> sample_region(const Landscape& land, const Region& region,
                                 const SamplerOptions& opts);

struct SublevelOracle {
  enum class Method { AnalyticProjection, Grid, SolutionSet };
  Method method = Method::AnalyticProjection;
  double resolution = 1e-3;
  std::optional<Box> box;

  static SublevelOracle analytic();
  static SublevelOracle grid(double resolution, const Box& box);
  static SublevelOracle solution_set();
};

// dist(x, [F <= level]) for one level. Grid oracles tabulate the sublevel set
// once at construction.
class SublevelDistance {
 public:
  SublevelDistance(const Landscape& land, double level, const SublevelOracle& oracle);
  double operator()(const Point& x) const;
  double level() const { return level_; }
  double cell_diagonal() const;

 private:
  Landscape land_;
  double level_;
  SublevelOracle oracle_;
  std::shared_ptr<const std::vector<Point>> grid_points_;
};

double sublevel_distance(const Landscape& land, const Point& x, double level,
                         const SublevelOracle& oracle);

}  // namespace vbpg
