#include "vbpg/config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "vbpg/terms.hpp"

namespace vbpg {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  return j.get<double>();
}

double number_or(const json& j, const char* key, double dflt, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : dflt;
}

Point vector_of(const json& j, const std::string& where) {
  try {
    return point_from_json(j);
  } catch (const std::exception& e) {
    fail(where + ": " + e.what());
  }
}

Matrix matrix_of(const json& j, const std::string& where) {
  try {
    return matrix_from_json(j);
  } catch (const std::exception& e) {
    fail(where + ": " + e.what());
  }
}

SmoothTerm parse_smooth(const json& j, Index& dim) {
  const std::string kind = required(j, "kind", "problem.f").get<std::string>();
  if (kind == "quadratic") {
    Matrix Q = matrix_of(required(j, "Q", "problem.f"), "problem.f.Q");
    if (Q.rows() != Q.cols()) fail("problem.f.Q must be square");
    if (!Q.isApprox(Q.transpose(), 1e-12)) fail("problem.f.Q must be symmetric");
    dim = Q.rows();
    Point b = j.contains("b") ? vector_of(j.at("b"), "problem.f.b") : Point::Zero(dim);
    if (b.size() != dim) fail("problem.f.b has the wrong length");
    return quadratic_term(Q, b, number_or(j, "c", 0.0, "problem.f"));
  }
  if (kind == "least_squares") {
    Matrix A = matrix_of(required(j, "A", "problem.f"), "problem.f.A");
    Point y = vector_of(required(j, "y", "problem.f"), "problem.f.y");
    if (y.size() != A.rows()) fail("problem.f.y must have one entry per row of A");
    dim = A.cols();
    Matrix AtA = A.transpose() * A;
    return least_squares_term(A, y, power_iteration_lambda_max(AtA));
  }
  fail("problem.f.kind must be \"quadratic\" or \"least_squares\", got \"" + kind + "\"");
}

NonsmoothTerm parse_nonsmooth(const json& j, Index dim) {
  const std::string kind = required(j, "kind", "problem.g").get<std::string>();
  if (kind == "zero") return zero_term();
  if (kind == "l1") {
    double lambda = number(required(j, "lambda", "problem.g"), "problem.g.lambda");
    if (!(lambda >= 0)) fail("problem.g.lambda must be nonnegative");
    return l1_term(lambda);
  }
  if (kind == "mcp") {
    double lambda = number(required(j, "lambda", "problem.g"), "problem.g.lambda");
    double b = number(required(j, "b", "problem.g"), "problem.g.b");
    if (!(lambda > 0) || !(b > 0)) fail("problem.g: mcp needs lambda > 0 and b > 0");
    return mcp_term(lambda, b);
  }
  if (kind == "indicator_box") {
    Point lo = vector_of(required(j, "lower", "problem.g"), "problem.g.lower");
    Point hi = vector_of(required(j, "upper", "problem.g"), "problem.g.upper");
    if (lo.size() != dim || hi.size() != dim) fail("problem.g box has the wrong dimension");
    if ((lo.array() > hi.array()).any()) fail("problem.g box bounds are not ordered");
    return box_indicator_term(lo, hi);
  }
  fail("problem.g.kind must be one of zero, l1, mcp, indicator_box; got \"" + kind + "\"");
}

Box parse_box(const json& j, Index dim, const std::string& where) {
  Point lo = vector_of(required(j, "lower", where), where + ".lower");
  Point hi = vector_of(required(j, "upper", where), where + ".upper");
  if (lo.size() != dim || hi.size() != dim) fail(where + " has the wrong dimension");
  if (!(lo.array() < hi.array()).all()) fail(where + " bounds must satisfy lower < upper");
  return Box{lo, hi};
}

CorpusEntry parse_inline(const json& j) {
  CompositeProblem p;
  p.name = "inline";
  p.f = parse_smooth(required(j, "f", "problem"), p.dim);
  p.g = j.contains("g") ? parse_nonsmooth(j.at("g"), p.dim) : zero_term();
  wire_subdiff_dist(p);
  if (j.contains("critical_points")) {
    CriticalSet crit;
    crit.description = "declared in the config";
    for (const auto& c : j.at("critical_points")) {
      Point x = vector_of(c, "problem.critical_points");
      if (x.size() != p.dim) fail("problem.critical_points: wrong dimension");
      crit.points.push_back(x);
    }
    if (crit.points.empty()) fail("problem.critical_points is empty");
    p.analytic.critical_points = crit;
  }
  if (j.contains("optimal_value"))
    p.analytic.optimal_value = number(j.at("optimal_value"), "problem.optimal_value");
  if (j.value("solution_set", false)) {
    if (!p.analytic.critical_points) fail("problem.solution_set needs critical_points");
    p.analytic.critical_set_is_solution_set = true;
  }
  CorpusEntry e;
  e.id = "inline";
  e.sample_box = j.contains("box") ? parse_box(j.at("box"), p.dim, "problem.box")
                                   : Box::cube(p.dim, -1, 1);
  if (p.analytic.critical_points) {
    Landscape land = Landscape::of(p);
    e.regions = {make_region(land, p.analytic.critical_points->points.front(), 1.0, 1.0)};
  }
  e.problem = std::move(p);
  return e;
}

Region parse_region(const json& j, const CorpusEntry& e, const std::string& where) {
  if (j.is_number_integer()) {
    auto i = j.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= e.regions.size())
      fail(where + ": region index " + std::to_string(i) + " out of range (entry has " +
           std::to_string(e.regions.size()) + ")");
    return e.regions[static_cast<std::size_t>(i)];
  }
  Point x_bar = vector_of(required(j, "x_bar", where), where + ".x_bar");
  if (x_bar.size() != e.dim()) fail(where + ".x_bar has the wrong dimension");
  double eta = number(required(j, "eta", where), where + ".eta");
  double nu = number(required(j, "nu", where), where + ".nu");
  if (!(eta > 0) || !(nu > 0)) fail(where + ": eta and nu must be positive");
  try {
    return make_region(e.landscape(), x_bar, eta, nu);
  } catch (const Error& err) {
    fail(where + ": " + err.what());
  }
}

KernelSpec parse_kernel(const json& j, const CorpusEntry& e) {
  KernelSpec k;
  const std::string kind = j.value("kind", std::string("euclidean"));
  const Index n = e.dim();
  if (kind == "euclidean") {
    k.kind = KernelSpec::Kind::Euclidean;
    k.scale = number_or(j, "scale", 1.0, "kernel");
    if (!(k.scale > 0)) fail("kernel.scale must be positive");
  } else if (kind == "diagonal") {
    k.kind = KernelSpec::Kind::Diagonal;
    k.weights = vector_of(required(j, "weights", "kernel"), "kernel.weights");
    if (k.weights.size() != n) fail("kernel.weights has the wrong length");
    if (!(k.weights.array() > 0).all()) fail("kernel.weights must be positive");
  } else if (kind == "spd") {
    k.kind = KernelSpec::Kind::Spd;
    k.matrix = matrix_of(required(j, "matrix", "kernel"), "kernel.matrix");
    if (k.matrix.rows() != n || k.matrix.cols() != n) fail("kernel.matrix has the wrong shape");
  } else if (kind == "diagonal_bb") {
    k.kind = KernelSpec::Kind::DiagonalBB;
    k.m = number(required(j, "m", "kernel"), "kernel.m");
    k.M = number(required(j, "M", "kernel"), "kernel.M");
    if (!(k.m > 0) || !(k.M >= k.m)) fail("kernel: diagonal_bb needs 0 < m <= M");
  } else if (kind == "block_jacobi") {
    k.kind = KernelSpec::Kind::BlockJacobi;
    if (j.contains("blocks")) {
      BlockPartition b;
      for (const auto& s : j.at("blocks")) {
        if (!s.is_number_integer() || s.get<long long>() <= 0)
          fail("kernel.blocks must be positive integers");
        b.sizes.push_back(s.get<Index>());
      }
      if (b.dim() != n) fail("kernel.blocks do not add up to the dimension");
      k.blocks = b;
    } else if (e.blocks) {
      k.blocks = e.blocks;
    } else {
      fail("kernel: block_jacobi needs \"blocks\" for " + e.id);
    }
    if (j.contains("c")) {
      for (const auto& c : j.at("c")) k.c.push_back(number(c, "kernel.c"));
    } else {
      k.c.assign(k.blocks->sizes.size(), 1.0);
    }
    if (k.c.size() != k.blocks->sizes.size()) fail("kernel.c needs one weight per block");
  } else {
    fail("kernel.kind must be one of euclidean, diagonal, spd, diagonal_bb, block_jacobi; got \"" +
         kind + "\"");
  }
  return k;
}

EpsSpec parse_eps(const json& j) {
  EpsSpec s;
  if (j.is_number()) {
    s.lo = s.hi = j.get<double>();
    s.values = {s.lo};
  } else {
    for (const auto& v : required(j, "values", "eps")) s.values.push_back(number(v, "eps.values"));
    if (s.values.empty()) fail("eps.values is empty");
    auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    s.lo = number_or(j, "lo", *mn, "eps");
    s.hi = number_or(j, "hi", *mx, "eps");
  }
  if (!(s.lo > 0) || !(s.hi >= s.lo) || !std::isfinite(s.hi))
    fail("eps bounds must satisfy 0 < lo <= hi < inf");
  for (double v : s.values)
    if (!(v >= s.lo && v <= s.hi)) fail("eps value " + format_double(v) + " outside [lo, hi]");
  return s;
}

SublevelOracle parse_sublevel(const json& j, const CorpusEntry& e) {
  const std::string method = j.is_string() ? j.get<std::string>()
                                           : required(j, "method", "sublevel").get<std::string>();
  if (method == "analytic") return SublevelOracle::analytic();
  if (method == "solution_set") return SublevelOracle::solution_set();
  if (method == "grid") {
    double res = j.is_object() ? number_or(j, "resolution", 1e-2, "sublevel") : 1e-2;
    if (!(res > 0)) fail("sublevel.resolution must be positive");
    Box box = j.is_object() && j.contains("box") ? parse_box(j.at("box"), e.dim(), "sublevel.box")
                                                 : e.sample_box;
    return SublevelOracle::grid(res, box);
  }
  fail("sublevel must be analytic, solution_set or grid; got \"" + method + "\"");
}

SublevelOracle default_sublevel(const CorpusEntry& e) {
  const auto& a = e.analytic();
  if (a.sublevel_project) return SublevelOracle::analytic();
  if (a.critical_set_is_solution_set) return SublevelOracle::solution_set();
  return SublevelOracle::grid(1e-2, e.sample_box);
}

const std::map<Condition, std::vector<std::string>>& allowed_params() {
  static const std::map<Condition, std::vector<std::string>> m{
      {Condition::LevelSetSubdiff, {"gamma"}},
      {Condition::LevelSetBregman, {"p"}},
      {Condition::StrongLevelSetSubdiff, {}},
      {Condition::StrongLevelSetBregman, {}},
      {Condition::WeakMetricSubregularity, {}},
      {Condition::BregmanProxEb, {}},
      {Condition::LuoTseng, {"xi", "sigma"}},
      {Condition::Kl, {"alpha"}},
      {Condition::BpGap, {"q"}},
      {Condition::ProxPl, {}},
  };
  return m;
}

DiagnosticRequest parse_request(const json& j, const CorpusEntry& e, std::size_t i) {
  const std::string where = "diagnostics[" + std::to_string(i) + "]";
  DiagnosticRequest r;
  const std::string name = required(j, "condition", where).get<std::string>();
  auto c = condition_from_string(name);
  if (!c) fail(where + ": unknown condition \"" + name + "\"");
  r.condition = *c;
  for (const auto& key : allowed_params().at(r.condition))
    if (j.contains(key)) r.params[key] = number(j.at(key), where + "." + key);
  if (r.condition == Condition::LuoTseng && (!r.params.count("xi") || !r.params.count("sigma")))
    fail(where + ": luo_tseng needs xi and sigma");
  if (j.contains("candidate")) r.candidate = number(j.at("candidate"), where + ".candidate");
  if (j.contains("samples")) {
    if (!j.at("samples").is_number_integer() || j.at("samples").get<long long>() <= 0)
      fail(where + ".samples must be a positive integer");
    r.samples = j.at("samples").get<std::size_t>();
  }
  if (j.contains("region")) {
    r.region = parse_region(j.at("region"), e, where + ".region");
  } else {
    if (e.regions.empty()) fail(where + ": " + e.id + " has no default region; give \"region\"");
    r.region = e.regions.front();
  }
  r.sublevel = j.contains("sublevel") ? parse_sublevel(j.at("sublevel"), e) : default_sublevel(e);
  if (j.contains("witness_sequence")) {
    std::string w = j.at("witness_sequence").get<std::string>();
    if (!e.witness_sequences.count(w)) fail(where + ": " + e.id + " has no witness sequence \"" + w + "\"");
    r.witness_sequence = w;
  }
  if (j.contains("eps")) {
    r.eps = number(j.at("eps"), where + ".eps");
    if (!(*r.eps > 0)) fail(where + ".eps must be positive");
  }
  return r;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

BregmanKernel fixed_kernel(const KernelSpec& k, Index n) {
  switch (k.kind) {
    case KernelSpec::Kind::Euclidean: return BregmanKernel::euclidean(n, k.scale);
    case KernelSpec::Kind::Diagonal: return BregmanKernel::diagonal(k.weights);
    case KernelSpec::Kind::Spd: return BregmanKernel::spd(k.matrix);
    default: return BregmanKernel::euclidean(n);
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  ExperimentConfig cfg;
  const json& pj = required(j, "problem", "config");
  try {
    if (pj.is_string() || pj.contains("corpus")) {
      cfg.problem_id = pj.is_string() ? pj.get<std::string>() : pj.at("corpus").get<std::string>();
      cfg.entry = std::make_shared<const CorpusEntry>(load_corpus(cfg.problem_id));
    } else {
      cfg.problem_id = "inline";
      cfg.entry = std::make_shared<const CorpusEntry>(parse_inline(pj));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    fail(std::string("problem: ") + e.what());
  } catch (const Error& e) {
    fail(std::string("problem: ") + e.what());
  }
  const CorpusEntry& e = *cfg.entry;

  try {
    if (j.contains("regions")) {
      auto patched = std::make_shared<CorpusEntry>(e);
      patched->regions.clear();
      for (std::size_t i = 0; i < j.at("regions").size(); ++i)
        patched->regions.push_back(
            parse_region(j.at("regions")[i], e, "regions[" + std::to_string(i) + "]"));
      cfg.entry = patched;
    }
    const CorpusEntry& entry = *cfg.entry;
    if (j.contains("kernel")) cfg.kernel = parse_kernel(j.at("kernel"), entry);
    if (j.contains("eps")) cfg.eps = parse_eps(j.at("eps"));
    if (j.contains("x0")) {
      cfg.x0 = vector_of(j.at("x0"), "x0");
      if (cfg.x0->size() != entry.dim()) fail("x0 has the wrong dimension");
    }
    if (j.contains("max_iters")) {
      if (!j.at("max_iters").is_number_integer() || j.at("max_iters").get<long long>() <= 0)
        fail("max_iters must be a positive integer");
      cfg.max_iters = j.at("max_iters").get<std::size_t>();
    }
    cfg.stop_tol = number_or(j, "stop_tol", cfg.stop_tol, "config");
    if (!(cfg.stop_tol > 0)) fail("stop_tol must be positive");
    if (j.contains("inner_tol")) {
      cfg.inner_tol = number(j.at("inner_tol"), "inner_tol");
      if (!(*cfg.inner_tol > 0)) fail("inner_tol must be positive");
    }
    if (j.contains("inner_max_iters")) {
      if (!j.at("inner_max_iters").is_number_integer() || j.at("inner_max_iters").get<long long>() <= 0)
        fail("inner_max_iters must be a positive integer");
      cfg.inner_max_iters = j.at("inner_max_iters").get<std::size_t>();
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) fail("seed must be a nonnegative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      cfg.trace_file = o.value("trace", cfg.trace_file);
      cfg.summary_file = o.value("summary", cfg.summary_file);
      for (const auto* f : {&cfg.trace_file, &cfg.summary_file})
        if (f->empty() || f->find('/') != std::string::npos)
          fail("outputs must be plain file names inside the output directory");
    }
    if (j.contains("diagnostics")) {
      if (!j.at("diagnostics").is_array()) fail("diagnostics must be an array");
      for (std::size_t i = 0; i < j.at("diagnostics").size(); ++i)
        cfg.diagnostics.push_back(parse_request(j.at("diagnostics")[i], entry, i));
    }
  } catch (const json::exception& ex) {
    fail(std::string("config: ") + ex.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": malformed JSON at " + location(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  return parse_config(j);
}

VbpgConfig solver_config(const ExperimentConfig& cfg) {
  const CompositeProblem& p = cfg.entry->composite();
  const KernelSpec& k = cfg.kernel;
  VbpgConfig v;
  v.max_iters = cfg.max_iters;
  v.stop_tol = cfg.stop_tol;
  v.inner_tol = cfg.inner_tol;
  v.inner_max_iters = cfg.inner_max_iters;
  try {
    switch (k.kind) {
      case KernelSpec::Kind::DiagonalBB:
        v.schedule = KernelSchedule::diagonal_bb(k.m, k.M);
        break;
      case KernelSpec::Kind::BlockJacobi:
        v.schedule = KernelSchedule::block_jacobi(*k.blocks, k.c);
        break;
      default:
        v.schedule = KernelSchedule::constant(fixed_kernel(k, p.dim));
    }
    const auto [m, M] = schedule_moduli(p, v.schedule);
    (void)M;
    const double L = p.f.lipschitz;
    const double limit = L > 0 ? m / L : std::numeric_limits<double>::infinity();
    EpsSpec eps;
    if (cfg.eps) {
      eps = *cfg.eps;
    } else {
      double e = L > 0 ? 0.5 * limit : 1.0;
      eps = EpsSpec{e, e, {e}};
    }
    if (!(eps.hi < limit)) {
      std::ostringstream os;
      os << "eps_hi = " << format_double(eps.hi) << " is not below m/L = " << format_double(limit)
         << " (m = " << format_double(m) << ", L = " << format_double(L)
         << "); sufficient descent F(x+) <= F(x) - a|x - x+|^2 needs a = (m/eps_hi - L)/2 > 0";
      fail(os.str());
    }
    v.eps = EpsSchedule::sequence(eps.values, eps.lo, eps.hi);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(std::string("kernel: ") + e.what());
  }
  return v;
}

Point initial_point(const ExperimentConfig& cfg) {
  if (cfg.x0) return *cfg.x0;
  const Box& box = cfg.entry->sample_box;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(box.lower.size());
  for (Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
  return x;
}

BregmanStep diagnostic_step(const ExperimentConfig& cfg, std::optional<double> eps) {
  const CompositeProblem& p = cfg.entry->composite();
  BregmanKernel k = fixed_kernel(cfg.kernel, p.dim);
  double e;
  if (eps) {
    e = *eps;
  } else if (cfg.eps) {
    e = cfg.eps->hi;
  } else {
    e = p.f.lipschitz > 0 ? 0.5 * k.m() / p.f.lipschitz : 1.0;
  }
  return BregmanStep::constant(k, e);
}

}  // namespace vbpg
