#include "vbpg/corpus.hpp"

#include <spdlog/spdlog.h>

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <mutex>
#include <regex>

#include "vbpg/errors.hpp"
#include "vbpg/terms.hpp"

namespace vbpg {

const CompositeProblem& CorpusEntry::composite() const {
  if (const auto* p = std::get_if<CompositeProblem>(&problem)) return *p;
  throw CapabilityError(id + " is a piecewise function without a smooth/nonsmooth split");
}

Landscape CorpusEntry::landscape() const {
  return std::visit([](const auto& p) { return Landscape::of(p); }, problem);
}

Index CorpusEntry::dim() const {
  return std::visit([](const auto& p) { return p.dim; }, problem);
}

const AnalyticOracles& CorpusEntry::analytic() const {
  return std::visit([](const auto& p) -> const AnalyticOracles& { return p.analytic; }, problem);
}

std::vector<std::string> corpus_id_patterns() {
  return {"EX_5_1",           "EX_5_2",
          "EX_5_3",           "QUAD_SC(n,kappa)",
          "LASSO(m,n,lambda,seed)", "QUAD_L1(n,lambda)",
          "QUAD_MCP(n,lambda,rho)", "TWO_WELL",
          "JACOBI_BLOCK(n,blocks,seed)"};
}

double staircase_value(double x) {
  if (x <= 0) return 0.0;
  if (x > 0.5) return x * x + 0.25;
  double n = std::floor(1.0 / x) + 1.0;
  // Beyond 2^52 the interval index is no longer exact; F is within rounding of x.
  if (!(n < 0x1p52)) return x * x + 1.0 / n - 1.0 / (n * n);
  while (x <= 1.0 / n) n += 1.0;
  while (n > 3.0 && x > 1.0 / (n - 1.0)) n -= 1.0;
  return x * x + 1.0 / n - 1.0 / (n * n);
}

double staircase_subdiff_dist(double x) { return x <= 0 ? 0.0 : 2.0 * x; }

Point ex53_prox_reference(const Point& x) {
  if (x.size() != 2) throw ArgumentError("ex53_prox_reference needs a point in R^2");
  if (!(x[0] > 2.0 * x[1] && x[1] > 0 && x.norm() < 1.0))
    throw RegimeError("ex53_prox_reference needs x1 > 2 x2 > 0 near the origin");
  return Point{{x[0], 0.0}};
}

Point brute_force_prox(const std::function<double(const Point&)>& F, const Point& x, double eps,
                       double half_width, double resolution) {
  const Index d = x.size();
  if (d < 1 || d > 2) throw ArgumentError("brute_force_prox supports dimension 1 or 2");
  if (!(resolution > 0) || !(half_width > 0) || !(eps > 0))
    throw ArgumentError("brute_force_prox needs positive eps, width and resolution");
  auto obj = [&](const Point& y) { return F(y) + (y - x).squaredNorm() / (2.0 * eps); };
  Point center = x;
  double hw = half_width;
  double h = std::max(resolution, 2.0 * half_width / 200.0);
  for (;;) {
    const long cells = static_cast<long>(std::ceil(2.0 * hw / h));
    Point best = center;
    double bv = obj(center);
    Point y(d);
    for (long i = 0; i <= cells; ++i) {
      y[0] = center[0] - hw + static_cast<double>(i) * h;
      if (d == 1) {
        double v = obj(y);
        if (v < bv) bv = v, best = y;
        continue;
      }
      for (long j = 0; j <= cells; ++j) {
        y[1] = center[1] - hw + static_cast<double>(j) * h;
        double v = obj(y);
        if (v < bv) bv = v, best = y;
      }
    }
    if (h <= resolution) return best;
    center = best;
    hw = 2.0 * h;
    h = std::max(h / 10.0, resolution);
  }
}

namespace {

std::mutex g_cache_mutex;
std::map<std::string, CorpusEntry> g_cache;

struct ParsedId {
  std::string name;
  std::vector<double> args;
};

ParsedId parse_id(const std::string& raw) {
  std::string id;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) id += c;
  static const std::regex re(R"(^([A-Z0-9_]+)(?:\((.*)\))?$)");
  std::smatch m;
  if (!std::regex_match(id, m, re)) throw ArgumentError("malformed corpus id '" + raw + "'");
  ParsedId p{m[1], {}};
  if (m[2].matched) {
    std::string args = m[2];
    std::size_t pos = 0;
    while (pos <= args.size()) {
      std::size_t next = args.find(',', pos);
      std::string tok = args.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (tok.empty() || used != tok.size())
        throw ArgumentError("corpus id '" + raw + "' has a non-numeric argument '" + tok + "'");
      p.args.push_back(v);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }
  return p;
}

std::string valid_ids_message() {
  std::string s = "valid ids:";
  for (const auto& v : corpus_id_patterns()) s += " " + v;
  return s;
}

void expect_args(const ParsedId& p, std::size_t n) {
  if (p.args.size() != n)
    throw ArgumentError(p.name + " takes " + std::to_string(n) + " arguments; " +
                        valid_ids_message());
}

Index as_count(double v, const std::string& what) {
  if (!(v >= 1) || v != std::floor(v) || v > 1e6)
    throw ArgumentError(what + " must be a positive integer");
  return static_cast<Index>(v);
}

Point spread(Index n, double lo, double hi) {
  Point d(n);
  for (Index i = 0; i < n; ++i)
    d[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return d;
}

// F(y) = offset + sum_i d_i/2 (y_i - a_i)^2 + lambda |y_i|. Projection onto
// [F <= level] through y(tau) = prox of tau F, with tau found by bisection.
struct SeparableModel {
  Point d, a;
  double lambda = 0;
  double offset = 0;

  Point minimizer() const {
    Point y(d.size());
    for (Index i = 0; i < d.size(); ++i) y[i] = soft_threshold(a[i], lambda / d[i]);
    return y;
  }
  double value(const Point& y) const {
    return offset + 0.5 * (d.array() * (y - a).array().square()).sum() + lambda * y.lpNorm<1>();
  }
  Point prox(const Point& x, double tau) const {
    Point y(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      double s = 1.0 + tau * d[i];
      y[i] = soft_threshold((x[i] + tau * d[i] * a[i]) / s, tau * lambda / s);
    }
    return y;
  }
  Point project(const Point& x, double level) const {
    if (value(x) <= level) return x;
    const Point xs = minimizer();
    const double Fmin = value(xs);
    if (level < Fmin - slack_tolerance(Fmin, 1e-14))
      throw DomainError("sublevel set is empty below the minimum value");
    double lo = 0, hi = 1;
    while (value(prox(x, hi)) > level) {
      lo = hi;
      hi *= 2;
      if (hi > 1e16) return xs;
    }
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (value(prox(x, mid)) > level ? lo : hi) = mid;
    }
    return prox(x, hi);
  }
};

void attach_separable(CompositeProblem& p, const SeparableModel& model) {
  auto shared = std::make_shared<const SeparableModel>(model);
  p.analytic.sublevel_project = [shared](const Point& x, double level) {
    return shared->project(x, level);
  };
}

Point reference_pg(const CompositeProblem& p, Point x) {
  const double L = p.f.lipschitz;
  const Point w = Point::Constant(p.dim, L);
  for (int k = 0; k < 2'000'000; ++k) {
    Point y = p.g.scaled_prox(x, p.f.grad(x), w);
    double step = (y - x).norm();
    x = std::move(y);
    if (step <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

void finish_composite(CompositeProblem& p, const Point& xstar, bool with_value) {
  wire_subdiff_dist(p);
  p.analytic.critical_points = CriticalSet{{xstar}, {}, "unique minimizer"};
  if (with_value) p.analytic.optimal_value = objective(p, xstar);
  p.analytic.critical_set_is_solution_set = true;
}

Region region_of(const Landscape& land, const Point& c, double eta, double nu) {
  return make_region(land, c, eta, nu);
}

CorpusEntry make_quad_sc(const ParsedId& id) {
  expect_args(id, 2);
  Index n = as_count(id.args[0], "QUAD_SC dimension");
  double kappa = id.args[1];
  if (!(kappa >= 1)) throw ArgumentError("QUAD_SC condition number must be >= 1");
  Point d = spread(n, 1.0, kappa);
  CompositeProblem p;
  p.dim = n;
  p.name = "QUAD_SC";
  p.f = quadratic_term(d.asDiagonal().toDenseMatrix(), Point::Zero(n), 0.0, d.maxCoeff());
  p.g = zero_term();
  finish_composite(p, Point::Zero(n), true);
  attach_separable(p, SeparableModel{d, Point::Zero(n), 0.0, 0.0});
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box::cube(n, -1, 1);
  e.regions = {region_of(Landscape::of(p), Point::Zero(n), 1.0, kappa)};
  e.notes = "f = x'diag(1..kappa)x/2, g = 0; critical set {0}, F* = 0";
  return e;
}

CorpusEntry make_quad_l1(const ParsedId& id) {
  expect_args(id, 2);
  Index n = as_count(id.args[0], "QUAD_L1 dimension");
  double lambda = id.args[1];
  if (!(lambda >= 0)) throw ArgumentError("QUAD_L1 lambda must be nonnegative");
  Point d = spread(n, 1.0, 4.0);
  Point a(n);
  for (Index i = 0; i < n; ++i) a[i] = 1.5 * std::sin(1.3 * static_cast<double>(i + 1));
  SeparableModel model{d, a, lambda, 0.0};
  CompositeProblem p;
  p.dim = n;
  p.name = "QUAD_L1";
  p.f = quadratic_term(d.asDiagonal().toDenseMatrix(), (d.array() * a.array()).matrix(),
                       0.5 * (d.array() * a.array().square()).sum(), d.maxCoeff());
  p.g = l1_term(lambda);
  finish_composite(p, model.minimizer(), true);
  attach_separable(p, model);
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box::cube(n, -2, 2);
  e.regions = {region_of(Landscape::of(p), model.minimizer(), 0.5, 10.0)};
  e.notes = "f = sum d_i (x_i - a_i)^2/2, g = lambda ||x||_1; x* = soft(a_i, lambda/d_i)";
  return e;
}

CorpusEntry make_quad_mcp(const ParsedId& id) {
  expect_args(id, 3);
  Index n = as_count(id.args[0], "QUAD_MCP dimension");
  double lambda = id.args[1], rho = id.args[2];
  if (!(lambda > 0)) throw ArgumentError("QUAD_MCP lambda must be positive");
  if (!(rho > 0 && rho < 1)) throw ArgumentError("QUAD_MCP rho must lie in (0, 1)");
  Point d = spread(n, 1.0, 4.0);
  CompositeProblem p;
  p.dim = n;
  p.name = "QUAD_MCP";
  p.f = quadratic_term(d.asDiagonal().toDenseMatrix(), Point::Zero(n), 0.0, d.maxCoeff());
  p.g = mcp_term(lambda, 1.0 / rho);
  finish_composite(p, Point::Zero(n), true);
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box::cube(n, -1, 1);
  e.regions = {region_of(Landscape::of(p), Point::Zero(n), 0.5, 10.0)};
  e.notes = "f = sum d_i x_i^2/2 with d in [1, 4], g = MCP with rho = 1/b < 1; F is "
            "strongly convex, critical set {0}";
  return e;
}

CorpusEntry make_lasso(const ParsedId& id) {
  expect_args(id, 4);
  Index m = as_count(id.args[0], "LASSO rows");
  Index n = as_count(id.args[1], "LASSO columns");
  double lambda = id.args[2];
  if (!(lambda > 0)) throw ArgumentError("LASSO lambda must be positive");
  std::mt19937_64 rng(static_cast<std::uint64_t>(id.args[3]));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) A(i, j) = normal(rng) / std::sqrt(static_cast<double>(m));
  Point xt = Point::Zero(n);
  for (Index i = 0; i < std::max<Index>(1, n / 5); ++i) xt[i] = i % 2 == 0 ? 1.0 : -1.0;
  Point b = A * xt;
  for (Index i = 0; i < m; ++i) b[i] += 0.01 * normal(rng);
  double L = power_iteration_lambda_max(A.transpose() * A);
  CompositeProblem p;
  p.dim = n;
  p.name = "LASSO";
  p.f = least_squares_term(A, b, L);
  p.g = l1_term(lambda);
  Point xs = reference_pg(p, Point::Zero(n));
  finish_composite(p, xs, true);
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box{xs.array() - 1.0, xs.array() + 1.0};
  e.regions = {region_of(Landscape::of(p), xs, 0.5, 10.0)};
  e.reference_solution = xs;
  e.notes = "f = ||Ax - b||^2/2 with seeded Gaussian A, g = lambda ||x||_1; x* from a long "
            "proximal gradient run";
  return e;
}

CorpusEntry make_jacobi(const ParsedId& id) {
  expect_args(id, 3);
  Index n = as_count(id.args[0], "JACOBI_BLOCK dimension");
  Index nb = as_count(id.args[1], "JACOBI_BLOCK block count");
  if (nb > n) throw ArgumentError("JACOBI_BLOCK needs at most n blocks");
  std::mt19937_64 rng(static_cast<std::uint64_t>(id.args[2]));
  std::normal_distribution<double> normal(0.0, 1.0);
  Index rows = (3 * n + 1) / 2;
  Matrix A(rows, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = normal(rng);
  Matrix Q = A.transpose() * A / static_cast<double>(rows);
  Point b(n);
  for (Index i = 0; i < n; ++i) b[i] = normal(rng);
  CompositeProblem p;
  p.dim = n;
  p.name = "JACOBI_BLOCK";
  p.f = quadratic_term(Q, b, 0.0, power_iteration_lambda_max(Q));
  p.g = l1_term(0.1);
  Point xs = reference_pg(p, Point::Zero(n));
  finish_composite(p, xs, true);
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box{xs.array() - 1.0, xs.array() + 1.0};
  e.regions = {region_of(Landscape::of(p), xs, 0.5, 10.0)};
  e.reference_solution = xs;
  e.blocks = BlockPartition::equal(n, nb);
  e.notes = "f = x'Qx/2 - b'x with Q = A'A/rows, g = 0.1 ||x||_1, equal contiguous blocks";
  return e;
}

CorpusEntry make_two_well(const ParsedId& id) {
  expect_args(id, 0);
  CompositeProblem p;
  p.dim = 1;
  p.name = "TWO_WELL";
  p.f.eval = [](const Point& x) {
    double t = x[0];
    return (t * t * t * t - 4.0 / 3.0 * t * t * t - 4.0 * t * t) / 9.0 + 5.0 / 27.0;
  };
  p.f.grad = [](const Point& x) {
    double t = x[0];
    return Point{{4.0 * t * (t - 2.0) * (t + 1.0) / 9.0}};
  };
  p.f.lipschitz = 12.4;  // max |f''| on the domain box is 111/9
  p.f.domain = Box::cube(1, -2.5, 3.5);
  p.f.name = "two_well";
  p.g = zero_term();
  wire_subdiff_dist(p);
  p.analytic.critical_points =
      CriticalSet{{Point{{-1.0}}, Point{{0.0}}, Point{{2.0}}}, {}, "{-1, 0, 2}"};
  p.analytic.optimal_value = -1.0;
  // [F <= c] is a union of intervals; its boundary consists of sign changes of
  // F - c and of local minima with F = c.
  auto fe = p.f.eval;
  p.analytic.sublevel_project = [fe](const Point& x, double c) {
    if (fe(x) <= c) return x;
    std::vector<double> boundary;
    for (double m : {-1.0, 2.0})
      if (fe(Point{{m}}) <= c + 1e-14 * (1 + std::abs(c))) boundary.push_back(m);
    const int cells = 9000;
    const double a = -4.0, b = 5.0, h = (b - a) / cells;
    for (int i = 0; i < cells; ++i) {
      double lo = a + i * h, hi = lo + h;
      bool slo = fe(Point{{lo}}) <= c, shi = fe(Point{{hi}}) <= c;
      if (slo == shi) continue;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ((fe(Point{{mid}}) <= c) == slo ? lo : hi) = mid;
      }
      boundary.push_back(slo ? lo : hi);
    }
    if (boundary.empty()) throw DomainError("TWO_WELL sublevel set is empty");
    double best = boundary.front();
    for (double v : boundary)
      if (std::abs(v - x[0]) < std::abs(best - x[0])) best = v;
    return Point{{best}};
  };
  CorpusEntry e;
  e.problem = p;
  e.sample_box = Box::cube(1, -2, 3);
  Landscape land = Landscape::of(p);
  e.regions = {region_of(land, Point{{2.0}}, 0.5, 1.0), region_of(land, Point{{-1.0}}, 0.5, 0.1)};
  e.notes = "quartic with local minima F(-1) = 0, F(2) = -1 and a local maximum F(0) = 5/27";
  return e;
}

double ex51_value(const Point& x) {
  return x[1] > 0 ? x[0] * x[0] - x[1] * x[1] * x[1] : x[1] * x[1] * x[1];
}

// Nearest point of [F <= c], c >= 0: the half-plane x2 <= 0 together with
// {x2 > 0, |x1| <= sqrt(c + x2^3)}.
Point ex51_sublevel_project(const Point& x, double c) {
  if (c < 0) throw CapabilityError("EX_5_1 sublevel projection is implemented for levels >= 0");
  if (ex51_value(x) <= c) return x;
  const double ax = std::abs(x[0]);
  const double sg = x[0] < 0 ? -1.0 : 1.0;
  Point best{{x[0], 0.0}};
  double bd = x[1];
  auto phi = [&](double s) {
    double r = std::sqrt(c + s * s * s);
    return (ax - r) * (ax - r) + (x[1] - s) * (x[1] - s);
  };
  const double S = std::max(x[1], std::cbrt(std::max(ax * ax - c, 0.0)));
  const int grid = 400;
  int bi = 0;
  double bv = phi(0.0);
  for (int i = 1; i <= grid; ++i) {
    double v = phi(S * i / grid);
    if (v < bv) bv = v, bi = i;
  }
  double lo = S * std::max(bi - 1, 0) / grid, hi = S * std::min(bi + 1, grid) / grid;
  auto [s, v] = boost::math::tools::brent_find_minima(phi, lo, hi, 52);
  if (phi(S * bi / grid) < v) s = S * bi / grid, v = phi(s);
  if (std::sqrt(v) < bd) best = Point{{sg * std::sqrt(c + s * s * s), s}};
  return best;
}

RawFunction ex51_function(const std::string& name) {
  RawFunction r;
  r.dim = 2;
  r.name = name;
  r.eval = ex51_value;
  r.piecewise_grad = [](const Point& x) {
    return x[1] > 0 ? Point{{2.0 * x[0], -3.0 * x[1] * x[1]}} : Point{{0.0, 3.0 * x[1] * x[1]}};
  };
  r.seam = [](const Point& x) { return x[1] == 0.0; };
  // On the seam x2 = 0 the proximal subdifferential is {0} x [0, inf).
  r.analytic.subdiff_dist = [](const Point& x) {
    if (x[1] > 0) return std::hypot(2.0 * x[0], 3.0 * x[1] * x[1]);
    if (x[1] < 0) return 3.0 * x[1] * x[1];
    return 0.0;
  };
  r.analytic.critical_points = CriticalSet{{Point::Zero(2)}, {}, "{0}"};
  r.analytic.sublevel_project = ex51_sublevel_project;
  return r;
}

CorpusEntry make_ex51(const ParsedId& id) {
  expect_args(id, 0);
  RawFunction r = ex51_function("EX_5_1");
  CorpusEntry e;
  e.problem = r;
  e.sample_box = Box::cube(2, -1, 1);
  e.regions = {make_region(Landscape::of(r), Point::Zero(2), 0.2, 0.01)};
  WitnessSequence ws;
  for (int k = 4; k <= 20; ++k) {
    double n = std::ldexp(1.0, k);
    ws.n.push_back(n);
    ws.points.push_back(Point{{std::pow(n, -1.25), 1.0 / n}});
  }
  e.witness_sequences["weak_metric"] = ws;
  e.notes = "F = x1^2 - x2^3 for x2 > 0, x2^3 otherwise; critical set encoded as {0}";
  return e;
}

CorpusEntry make_ex53(const ParsedId& id) {
  expect_args(id, 0);
  RawFunction r = ex51_function("EX_5_3");
  CorpusEntry e;
  e.problem = r;
  e.sample_box = Box::cube(2, -1, 1);
  e.regions = {make_region(Landscape::of(r), Point::Zero(2), 0.2, 0.01)};
  WitnessSequence ws;
  for (int n = 2; n <= 50; ++n) {
    double dn = n;
    ws.n.push_back(dn);
    ws.points.push_back(Point{{1.0 / dn, 1.0 / (3.0 * dn * dn)}});
  }
  e.witness_sequences["bregman_prox"] = ws;
  auto F = r.eval;
  // Euclidean kernel with eps = 1; the closed form where it is known, a local
  // brute-force minimizer elsewhere (F is unbounded below far away).
  e.prox = [F](const Point& x) {
    if (x[0] > 2.0 * x[1] && x[1] > 0 && x.norm() < 1.0) return ex53_prox_reference(x);
    return brute_force_prox(F, x, 1.0, 0.5 * x.norm() + 0.05, 1e-4);
  };
  e.notes = "same function as EX_5_1 with the Euclidean step eps = 1";
  return e;
}

CorpusEntry make_ex52(const ParsedId& id) {
  expect_args(id, 0);
  RawFunction r;
  r.dim = 1;
  r.name = "EX_5_2";
  r.eval = [](const Point& x) { return staircase_value(x[0]); };
  r.piecewise_grad = [](const Point& x) { return Point{{x[0] > 0 ? 2.0 * x[0] : 0.0}}; };
  r.seam = [](const Point& x) {
    if (x[0] == 0) return true;
    if (x[0] < 0 || x[0] > 0.5) return false;
    double n = std::round(1.0 / x[0]);
    return std::abs(x[0] - 1.0 / n) <= 1e-15;
  };
  r.analytic.subdiff_dist = [](const Point& x) { return staircase_subdiff_dist(x[0]); };
  r.analytic.critical_points =
      CriticalSet{{}, [](const Point& x) { return Point{{std::min(x[0], 0.0)}}; }, "(-inf, 0]"};
  r.analytic.optimal_value = 0.0;
  r.analytic.critical_set_is_solution_set = true;
  r.analytic.sublevel_project = [](const Point& x, double c) {
    if (c < 0) throw DomainError("staircase sublevel set is empty below 0");
    if (staircase_value(x[0]) <= c) return x;
    double lo = 0.0, hi = x[0];
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (staircase_value(mid) <= c ? lo : hi) = mid;
    }
    return Point{{lo}};
  };
  CorpusEntry e;
  e.problem = r;
  e.sample_box = Box::cube(1, -1, 1);
  e.regions = {make_region(Landscape::of(r), Point::Zero(1), 0.5, 0.5)};
  WitnessSequence ws;
  for (int n = 3; n <= 200; ++n) {
    ws.n.push_back(n);
    ws.points.push_back(Point{{1.0 / (n - 1.0)}});
  }
  e.witness_sequences["kl"] = ws;
  e.notes = "increasing lsc staircase, x^2 + 1/n - 1/n^2 on (1/n, 1/(n-1)]; critical set (-inf, 0]";
  return e;
}

void validate_entry(const CorpusEntry& e) {
  if (e.is_composite()) {
    const auto& p = e.composite();
    ValidationReport rep = validate_problem(p, e.sample_box, 200, 1);
    if (!rep.passed())
      throw Error("corpus entry " + e.id + " failed validation (" + rep.violations.front().kind +
                  ")");
    return;
  }
  const auto& a = e.analytic();
  if (a.critical_points && a.subdiff_dist && a.critical_points->is_finite()) {
    for (const auto& c : a.critical_points->points)
      if (a.subdiff_dist(c) > 1e-10)
        throw Error("corpus entry " + e.id + " lists a non-critical point");
  }
}

CorpusEntry build(const ParsedId& id) {
  if (id.name == "QUAD_SC") return make_quad_sc(id);
  if (id.name == "QUAD_L1") return make_quad_l1(id);
  if (id.name == "QUAD_MCP") return make_quad_mcp(id);
  if (id.name == "LASSO") return make_lasso(id);
  if (id.name == "JACOBI_BLOCK") return make_jacobi(id);
  if (id.name == "TWO_WELL") return make_two_well(id);
  if (id.name == "EX_5_1") return make_ex51(id);
  if (id.name == "EX_5_2") return make_ex52(id);
  if (id.name == "EX_5_3") return make_ex53(id);
  throw ArgumentError("unknown corpus id '" + id.name + "'; " + valid_ids_message());
}

}  // namespace

CorpusEntry load_corpus(const std::string& id) {
  ParsedId parsed = parse_id(id);
  std::string key = parsed.name + "(";
  for (std::size_t i = 0; i < parsed.args.size(); ++i)
    key += (i ? "," : "") + format_double(parsed.args[i]);
  key += ")";
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  CorpusEntry e = build(parsed);
  e.id = id;
  std::visit([&](auto& p) { p.name = id; }, e.problem);
  validate_entry(e);
  spdlog::debug("loaded corpus entry {}", id);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  g_cache.emplace(key, e);
  return e;
}

}  // namespace vbpg
