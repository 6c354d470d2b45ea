#include "vbpg/acceptance.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "vbpg/cli.hpp"
#include "vbpg/diagnostics.hpp"
#include "vbpg/scans.hpp"
#include "vbpg/terms.hpp"

namespace vbpg {

namespace fs = std::filesystem;

namespace {

struct Ctx {
  fs::path dir;  // per-check artifact directory
  double tamper = 1.0;
};

const std::vector<std::string>& composite_ids() {
  static const std::vector<std::string> ids{
      "QUAD_SC(2,10)",       "QUAD_SC(5,20)",       "QUAD_L1(5,0.5)", "QUAD_MCP(3,0.3,0.5)",
      "LASSO(20,50,0.1,7)", "LASSO(60,20,0.1,7)", "TWO_WELL",       "JACOBI_BLOCK(40,4,7)"};
  return ids;
}

CorpusEntry entry(const std::string& id, double tamper) {
  CorpusEntry e = load_corpus(id);
  if (tamper != 1.0 && e.is_composite()) std::get<CompositeProblem>(e.problem).f.lipschitz *= tamper;
  return e;
}

Point uniform_in(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x(box.lower.size());
  for (Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
  return x;
}

BregmanStep euclidean_step(const CompositeProblem& p, double fraction) {
  double eps = p.f.lipschitz > 0 ? fraction / p.f.lipschitz : 1.0;
  return BregmanStep::constant(BregmanKernel::euclidean(p.dim), eps);
}

// Largest violation seen while counting failures.
struct Tally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0;  // most negative slack
  std::string first;

  void add(double slack, const std::string& where) {
    ++checked;
    if (slack < 0) {
      if (violations == 0) first = where;
      ++violations;
    }
    worst = std::min(worst, slack);
  }
  void add(const InequalityReport& r, const std::string& where) {
    for (const auto& c : r.checks) {
      ++checked;
      if (!c.holds()) {
        if (violations == 0) first = where + ": " + c.label;
        ++violations;
      }
      worst = std::min(worst, c.slack() + c.tolerance);
    }
  }
  json to_json() const {
    return json{{"checked", checked}, {"violations", violations}, {"worst_slack", worst},
                {"first_violation", first}};
  }
};

std::string describe(const Tally& t) {
  std::ostringstream os;
  os << t.checked << " inequalities, " << t.violations << " violations";
  if (t.violations) os << " (first: " << t.first << ")";
  return os.str();
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

// 0 -------------------------------------------------------------------------

CheckResult check_validate(const Ctx& ctx) {
  CheckResult r;
  json per = json::array();
  std::vector<std::string> bad;
  for (const auto& id : composite_ids()) {
    CorpusEntry e = entry(id, ctx.tamper);
    ValidationReport v = validate_problem(e.composite(), e.sample_box, 1000, 11);
    json kinds = json::object();
    for (const auto& viol : v.violations) kinds[viol.kind] = kinds.value(viol.kind, 0) + 1;
    per.push_back({{"problem", id}, {"samples", v.n_samples}, {"violations", kinds}});
    if (!v.passed()) bad.push_back(id);
  }
  r.passed = bad.empty();
  r.detail = r.passed ? std::to_string(composite_ids().size()) + " problems validated"
                      : "oracle violations on " + bad.front();
  r.data = {{"problems", per}};
  return r;
}

// 1 -------------------------------------------------------------------------

CheckResult check_descent(const Ctx& ctx) {
  CheckResult r;
  Tally t;
  json runs = json::array();
  for (const auto& id : composite_ids()) {
    CorpusEntry e = entry(id, ctx.tamper);
    const CompositeProblem& p = e.composite();
    const double L = p.f.lipschitz;
    std::vector<std::pair<std::string, KernelSchedule>> schedules{
        {"euclidean", KernelSchedule::constant(BregmanKernel::euclidean(p.dim))},
        {"diagonal_bb", KernelSchedule::diagonal_bb(1.0, 10.0)}};
    for (const auto& [name, sched] : schedules) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(100 + seed);
        VbpgConfig cfg;
        cfg.schedule = sched;
        cfg.eps = EpsSchedule::constant(0.9 / L);
        cfg.max_iters = 200;
        cfg.stop_tol = 1e-300;
        SolverTrace tr = run_vbpg(p, cfg, uniform_in(e.sample_box, rng));
        const double a = tr.constants.a;
        for (std::size_t k = 0; k < tr.iters(); ++k) {
          const double Fk = tr.value(k), Fn = tr.value(k + 1);
          const double d = tr.records[k].step_norm;
          const double slack = (Fk - a * d * d) - Fn + 1e-8 * (1 + std::abs(Fk));
          t.add(slack, id + " " + name + " seed " + std::to_string(seed) + " k " +
                           std::to_string(k));
        }
        if (seed == 0 && name == "euclidean")
          runs.push_back({{"problem", id}, {"iters", tr.iters()}, {"F_limit", tr.F_limit}});
      }
    }
  }
  r.passed = t.violations == 0 && t.checked > 0;
  r.detail = describe(t);
  r.data = {{"tally", t.to_json()}, {"runs", runs}};
  return r;
}

// 2 -------------------------------------------------------------------------

CheckResult check_generalized_descent(const Ctx& ctx) {
  CheckResult r;
  Tally t;
  for (const auto& id : composite_ids()) {
    CorpusEntry e = entry(id, ctx.tamper);
    const CompositeProblem& p = e.composite();
    const BregmanStep step = euclidean_step(p, 0.9);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      Point x = uniform_in(e.sample_box, rng);
      Point u = uniform_in(e.sample_box, rng);
      SubproblemSolution sol = solve_subproblem(p, step, x);
      t.add(check_generalized_descent(p, step, x, u, sol), id + " pair " + std::to_string(i));
    }
  }
  r.passed = t.violations == 0 && t.checked > 0;
  r.detail = describe(t);
  r.data = {{"tally", t.to_json()}};
  return r;
}

// 3 -------------------------------------------------------------------------

CompositeProblem half_square(Index n) {
  CompositeProblem p;
  p.dim = n;
  p.name = "half_square";
  p.f = quadratic_term(Matrix::Identity(n, n), Point::Zero(n));
  p.g = zero_term();
  wire_subdiff_dist(p);
  return p;
}

CheckResult check_gap_tightness(const Ctx&) {
  CheckResult r;
  const CompositeProblem p = half_square(1);
  const BregmanStep step = BregmanStep::constant(BregmanKernel::euclidean(1), 0.5);
  const Point x = Point::Constant(1, 2.0);
  const double tol = 1e-14;
  SubproblemSolution sol = solve_subproblem(p, step, x, tol);
  InequalityReport rep = check_gap_bounds(p, step, x, sol, tol);
  json rows = json::array();
  double worst = 0;
  for (std::size_t i = 0; i < 3 && i < rep.checks.size(); ++i) {
    const auto& c = rep.checks[i];
    worst = std::max(worst, std::abs(c.lhs - c.rhs));
    rows.push_back({{"label", c.label}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  }
  r.passed = rep.checks.size() >= 3 && worst <= 1e-10 && rep.holds();
  std::ostringstream os;
  os << "max |lhs - rhs| = " << format_double(worst) << " at x = 2, eps = 0.5";
  r.detail = os.str();
  r.data = {{"inequalities", rows}, {"point", sol.point[0]}, {"gap", sol.gap_value}};
  return r;
}

// 4 -------------------------------------------------------------------------

CheckResult check_closed_form_rate(const Ctx& ctx) {
  CheckResult r;
  const CompositeProblem p = half_square(1);
  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::constant(BregmanKernel::euclidean(1));
  cfg.eps = EpsSchedule::constant(0.5);
  cfg.max_iters = 40;
  cfg.stop_tol = 1e-300;
  const Point x0 = Point::Constant(1, 2.0);
  SolverTrace tr = run_vbpg(p, cfg, x0);
  RateReport rate = measure_rates(tr, 0.0, Point::Zero(1), 1.0);
  ContractionReport cr = measure_levelset_contraction(
      p, cfg, x0, [](const Point& x) { return x.norm(); });
  double worst_q = 0, worst_c = 0;
  for (std::size_t k = 0; k < tr.iters(); ++k)
    worst_q = std::max(worst_q, std::abs(tr.value(k + 1) / tr.value(k) - 0.25));
  for (double c : cr.ratios) worst_c = std::max(worst_c, std::abs(c - 0.5));
  r.passed = std::abs(rate.beta_q - 0.25) <= 1e-10 && worst_q <= 1e-10 && !cr.empty() &&
             worst_c <= 1e-10;
  std::ostringstream os;
  os << "beta_Q = " << format_double(rate.beta_q) << ", max contraction deviation "
     << format_double(worst_c) << " over " << cr.ratios.size() << " steps";
  r.detail = os.str();
  r.data = {{"beta_q", rate.beta_q}, {"max_q_deviation", worst_q},
            {"max_contraction_deviation", worst_c}, {"steps", cr.ratios.size()}};
  atomic_write(ctx.dir / "trace.csv", trace_csv(tr));
  return r;
}

// 5 -------------------------------------------------------------------------

double soft(double v, double tau) { return v > tau ? v - tau : (v < -tau ? v + tau : 0.0); }

// Coarse-to-fine grid minimizer of a 2-D function around `center`; the last
// pass uses cells of size `resolution`.
Point grid_minimizer(const std::function<double(double, double)>& phi, Point center,
                     double half_width, double resolution) {
  const int cells = 200;
  for (;;) {
    double h = 2 * half_width / cells;
    bool last = h <= resolution;
    if (last) {
      h = resolution;
      half_width = h * cells / 2;
    }
    double best = std::numeric_limits<double>::infinity();
    Point arg = center;
    for (int i = 0; i <= cells; ++i)
      for (int j = 0; j <= cells; ++j) {
        double y0 = center[0] - half_width + i * h, y1 = center[1] - half_width + j * h;
        double v = phi(y0, y1);
        if (v < best) {
          best = v;
          arg = Point{{y0, y1}};
        }
      }
    center = arg;
    if (last) return center;
    half_width = 4 * h;
  }
}

CheckResult check_oracle_equivalence(const Ctx&) {
  CheckResult r;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 6);
  double worst_l1 = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = dims(rng);
    Point b(n), x(n);
    for (Index i = 0; i < n; ++i) {
      b[i] = 2 * gauss(rng);
      x[i] = 2 * gauss(rng);
    }
    const double lambda = u(rng), eps = 0.05 + 0.85 * u(rng);
    CompositeProblem p;
    p.dim = n;
    p.f = quadratic_term(Matrix::Identity(n, n), b);
    p.g = l1_term(lambda);
    wire_subdiff_dist(p);
    SubproblemSolution sol =
        solve_subproblem(p, BregmanStep::constant(BregmanKernel::euclidean(n), eps), x);
    for (Index i = 0; i < n; ++i) {
      double expect = soft(x[i] - eps * (x[i] - b[i]), eps * lambda);
      worst_l1 = std::max(worst_l1, std::abs(sol.point[i] - expect));
    }
  }

  Matrix H{{2.0, 0.5}, {0.5, 1.0}};
  Matrix Q{{1.0, 0.3}, {0.3, 0.5}};
  Point b{{0.4, -0.2}};
  const double lambda = 0.3;
  CompositeProblem p;
  p.dim = 2;
  p.f = quadratic_term(Q, b);
  p.g = l1_term(lambda);
  wire_subdiff_dist(p);
  const BregmanKernel K = BregmanKernel::spd(H);
  const double eps = 0.5 * K.m() / p.f.lipschitz;
  const BregmanStep step = BregmanStep::constant(K, eps);
  const double res = 1e-4, diag = res * std::sqrt(2.0);
  double worst_grid = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Point x{{1.5 * gauss(rng), 1.5 * gauss(rng)}};
    SubproblemSolution sol = solve_subproblem(p, step, x, 1e-13);
    const Point gx = Q * x - b;
    auto phi = [&](double y0, double y1) {
      Point y{{y0, y1}};
      Point d = y - x;
      double breg = 0.5 * d.dot(H * d);
      return gx.dot(d) + lambda * (std::abs(y0) + std::abs(y1)) + breg / eps;
    };
    Point g = grid_minimizer(phi, x, 3.0 + x.lpNorm<Eigen::Infinity>(), res);
    worst_grid = std::max(worst_grid, (g - sol.point).norm());
  }
  r.passed = worst_l1 <= 1e-12 && worst_grid <= diag;
  std::ostringstream os;
  os << "l1 closed form max deviation " << format_double(worst_l1) << "; spd grid distance "
     << format_double(worst_grid) << " (cell diagonal " << format_double(diag) << ")";
  r.detail = os.str();
  r.data = {{"l1_max_deviation", worst_l1}, {"spd_grid_distance", worst_grid},
            {"cell_diagonal", diag}};
  return r;
}

// 6 -------------------------------------------------------------------------

double ratio_at(const ScanReport& s, double n) {
  for (const auto& row : s.rows)
    if (row.n == n) return row.ratio;
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> range(double lo, double hi) {
  std::vector<double> v;
  for (double n = lo; n <= hi; n += 1) v.push_back(n);
  return v;
}

EBCertificate refutation(const std::string& id, Condition c, const std::string& seq,
                         std::uint64_t seed) {
  CorpusEntry e = load_corpus(id);
  Landscape land = e.landscape();
  const Region& region = e.regions.front();
  std::vector<Point> samples = sample_region(land, region, SamplerOptions{1000, seed, 0});
  CertifyOptions opts;
  opts.witness_sequence = e.witness_sequences.at(seq);
  switch (c) {
    case Condition::WeakMetricSubregularity:
      return certify_weak_metric_subregularity(land, region, samples, opts);
    case Condition::Kl:
      return certify_kl(land, region, 0.5, samples, opts);
    case Condition::BregmanProxEb:
      return certify_bregman_prox_eb(land, *e.prox, region, samples, opts);
    default:
      throw ArgumentError("no refutation target for this condition");
  }
}

CheckResult check_scans(const Ctx& ctx) {
  CheckResult r;
  std::vector<std::string> fails;
  json out = json::object();

  std::vector<double> pow2;
  for (int k = 4; k <= 20; ++k) pow2.push_back(std::ldexp(1.0, k));
  ScanReport s1 = scan_counterexample(CounterexampleId::Ex51, pow2);
  const double r16 = ratio_at(s1, 16), r256 = ratio_at(s1, 256);
  if (!(std::abs(r16 - 1.099) <= 1e-3)) fails.push_back("EX_5_1 ratio at n=16 is " + format_double(r16));
  if (!(std::abs(r256 - 2.061) <= 1e-3)) fails.push_back("EX_5_1 ratio at n=256 is " + format_double(r256));
  if (!s1.monotone) fails.push_back("EX_5_1 scan is not increasing");
  if (s1.positive.refuted()) fails.push_back("EX_5_1 subdifferential EB refuted");
  atomic_write(ctx.dir / "ex_5_1.csv", scan_csv(s1));
  out["EX_5_1"] = to_json(s1);

  ScanReport s3 = scan_counterexample(CounterexampleId::Ex53, range(2, 50));
  if (!(s3.rows.back().ratio > 10 * s3.rows.front().ratio))
    fails.push_back("EX_5_3 ratio does not grow tenfold by n=50");
  if (!s3.monotone) fails.push_back("EX_5_3 scan is not increasing");
  if (s3.positive.refuted()) fails.push_back("EX_5_3 subdifferential EB refuted");
  atomic_write(ctx.dir / "ex_5_3.csv", scan_csv(s3));
  out["EX_5_3"] = to_json(s3);

  for (double alpha : {0.25, 0.5, 0.9}) {
    ScanReport s2 = scan_counterexample(CounterexampleId::Ex52, range(3, 200), alpha);
    std::string tag = "EX_5_2 alpha=" + format_double(alpha);
    if (!s2.monotone) fails.push_back(tag + " bound is not decreasing");
    if (s2.positive.refuted()) fails.push_back(tag + " subdifferential EB refuted");
    atomic_write(ctx.dir / ("ex_5_2_alpha_" + std::to_string(static_cast<int>(alpha * 100)) + ".csv"), scan_csv(s2));
    out[tag] = to_json(s2);
  }

  struct Target {
    std::string id;
    Condition c;
    std::string seq;
  };
  for (const auto& t : std::vector<Target>{{"EX_5_1", Condition::WeakMetricSubregularity, "weak_metric"},
                                           {"EX_5_2", Condition::Kl, "kl"},
                                           {"EX_5_3", Condition::BregmanProxEb, "bregman_prox"}}) {
    EBCertificate c = refutation(t.id, t.c, t.seq, 61);
    if (!c.refuted()) fails.push_back(t.id + " " + to_string(t.c) + " was not refuted");
    write_json(ctx.dir / (t.id + "_" + to_string(t.c) + ".json"), to_json(c));
  }

  r.passed = fails.empty();
  std::ostringstream os;
  os << "EX_5_1 ratios " << format_double(r16) << " (n=16), " << format_double(r256)
     << " (n=256); EX_5_3 growth x" << format_double(s3.rows.back().ratio / s3.rows.front().ratio);
  for (const auto& f : fails) os << "; " << f;
  r.detail = os.str();
  r.data = out;
  return r;
}

// 7 -------------------------------------------------------------------------

json cert_summary(const EBCertificate& c) {
  return {{"condition", to_string(c.condition)}, {"verdict", to_string(c.verdict)},
          {"constant_estimate", c.constant_estimate}, {"n_samples", c.n_samples}};
}

CheckResult check_implications(const Ctx& ctx) {
  CheckResult r;
  std::vector<std::string> fails;
  json out = json::object();
  for (const std::string id : {"QUAD_SC(2,10)", "QUAD_L1(5,0.5)"}) {
    CorpusEntry e = entry(id, ctx.tamper);
    const CompositeProblem& p = e.composite();
    const Landscape land = e.landscape();
    const BregmanStep step = euclidean_step(p, 0.5);
    const SolverConstants k =
        derive_constants(1, 1, step.eps, step.eps, p.f.lipschitz, p.g.semiconvex_rho);
    const Region R = e.regions.front();
    const SublevelDistance dist(land, R.F_bar, SublevelOracle::solution_set());
    const ProxMap T = prox_map(p, step);
    auto samples = [&](const Region& reg, std::uint64_t seed) {
      return sample_region(land, reg, SamplerOptions{1000, seed, 0});
    };
    auto need = [&](const EBCertificate& c, const std::string& what) {
      if (c.refuted()) fails.push_back(id + ": " + what + " refuted");
    };
    json steps = json::object();

    // KL(1/2) => subdifferential EB with gamma = 1 on the half-radius region.
    EBCertificate kl = certify_kl(land, R, 0.5, samples(R, 71));
    need(kl, "KL(1/2)");
    SubdiffEbFromKl eb_from_kl = subdiff_eb_from_kl(R, 0.5, kl.constant_estimate);
    EBCertificate eb_half =
        certify_level_set_subdiff_eb(land, eb_from_kl.region, eb_from_kl.gamma,
                                     samples(eb_from_kl.region, 72), dist);
    need(eb_half, "subdifferential EB on the half-radius region");
    if (eb_from_kl.gamma != 1.0) fails.push_back(id + ": KL(1/2) gives gamma != 1");
    steps["kl_to_eb"] = {{"kl", cert_summary(kl)}, {"eb", cert_summary(eb_half)},
                         {"gamma", eb_from_kl.gamma}, {"heuristic_c1", eb_from_kl.heuristic_c1}};

    // Subdifferential EB => Bregman EB with the theta formula.
    EBCertificate eb = certify_level_set_subdiff_eb(land, R, 1.0, samples(R, 73), dist);
    need(eb, "subdifferential EB");
    BregmanEbBound bb = bregman_eb_from_subdiff(k, R, 1.0, eb.constant_estimate);
    std::vector<Point> inner = samples(bb.region, 74);
    EBCertificate breg = certify_level_set_bregman_eb(land, T, bb.region, bb.p, inner, dist);
    need(breg, "Bregman EB");
    if (!(breg.constant_estimate <= bb.theta + 1e-6))
      fails.push_back(id + ": Bregman EB constant " + format_double(breg.constant_estimate) +
                      " exceeds theta " + format_double(bb.theta));
    steps["eb_to_bregman"] = {{"c1", eb.constant_estimate}, {"theta_formula", bb.theta},
                              {"theta_measured", breg.constant_estimate}, {"N", bb.N},
                              {"eta", bb.region.eta}, {"nu", bb.region.nu}};

    // Bregman EB => gap condition with q = 1 and the explicit mu.
    GapBound gb = bp_gap_from_bregman_eb(k, step.eps, bb.p, bb.theta);
    CertifyOptions with_mu;
    with_mu.candidate = gb.mu;
    EBCertificate gap = certify_bp_gap(p, step, bb.region, gb.q, inner, with_mu);
    need(gap, "gap condition with the formula constant");
    steps["bregman_to_gap"] = {{"q", gb.q}, {"mu_formula", gb.mu ? *gb.mu : 0.0},
                               {"gap", cert_summary(gap)}};

    // Gap condition => KL(1/2) with c5 = sqrt((2 eps_lo/eps_hi)(m - eps_hi rho) mu).
    if (gb.mu) {
      KlBound kb = kl_from_bp_gap(k, gb.q, *gb.mu);
      CertifyOptions with_c5;
      with_c5.candidate = kb.c5;
      EBCertificate kl2 = certify_kl(land, bb.region, kb.alpha, inner, with_c5);
      need(kl2, "KL with the formula constant");
      steps["gap_to_kl"] = {{"alpha", kb.alpha}, {"c5_formula", kb.c5}, {"kl", cert_summary(kl2)}};
    } else {
      fails.push_back(id + ": no explicit gap constant");
    }
    out[id] = steps;
  }
  write_json(ctx.dir / "chain.json", out);
  r.passed = fails.empty();
  r.detail = fails.empty() ? "chain certified on QUAD_SC(2,10) and QUAD_L1(5,0.5)" : fails.front();
  r.data = out;
  return r;
}

// 8 -------------------------------------------------------------------------

CheckResult check_contraction_converse(const Ctx& ctx) {
  CheckResult r;
  const std::string id = "LASSO(60,20,0.1,7)";
  CorpusEntry e = entry(id, ctx.tamper);
  const CompositeProblem& p = e.composite();
  const Landscape land = e.landscape();
  const Region band = e.regions.front();
  const SublevelDistance dist(land, band.F_bar, SublevelOracle::solution_set());
  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::constant(BregmanKernel::euclidean(p.dim));
  cfg.eps = EpsSchedule::constant(0.9 / p.f.lipschitz);
  cfg.max_iters = 400;
  cfg.stop_tol = 1e-300;
  // The contraction hypothesis covers every start in the band, so beta_hat is
  // the largest ratio over runs from band samples.
  std::vector<Point> starts = sample_region(land, band, SamplerOptions{40, 81, 0});
  double beta_hat = 0;
  std::size_t ratios = 0;
  SolverConstants k;
  for (const auto& x0 : starts) {
    ContractionReport cr = measure_levelset_contraction(p, cfg, x0, dist, std::nullopt, 1e-9);
    beta_hat = std::max(beta_hat, cr.beta_hat);
    ratios += cr.ratios.size();
    k = cr.trace.constants;
  }
  if (!(beta_hat < 1)) {
    r.passed = false;
    r.detail = "measured beta_hat = " + format_double(beta_hat) + " is not below 1";
    return r;
  }
  StrongEbFromContraction sb = strong_eb_from_contraction(k, beta_hat);
  CertifyOptions opts;
  opts.candidate = sb.c1;
  EBCertificate c = certify_strong_level_set_subdiff_eb(
      land, band, sample_region(land, band, SamplerOptions{1000, 82, 0}), dist, opts);
  write_json(ctx.dir / "strong_eb.json", to_json(c));
  r.passed = !c.refuted() && c.n_samples >= 1000;
  std::ostringstream os;
  os << "beta_hat = " << format_double(beta_hat) << " over " << ratios << " ratios, c1' = "
     << format_double(sb.c1) << ", sampled worst ratio " << format_double(c.worst_ratio) << " on "
     << c.n_samples << " samples";
  r.detail = os.str();
  r.data = {{"beta_hat", beta_hat}, {"c1_prime", sb.c1}, {"theta_prime", sb.theta},
            {"certificate", cert_summary(c)}, {"worst_ratio", c.worst_ratio}};
  return r;
}

// 9 -------------------------------------------------------------------------

CheckResult check_jacobi(const Ctx& ctx) {
  CheckResult r;
  CorpusEntry e = entry("JACOBI_BLOCK(40,4,7)", ctx.tamper);
  const CompositeProblem& p = e.composite();
  const BlockPartition blocks = *e.blocks;
  const std::vector<double> c(blocks.sizes.size(), 1.0);
  const Matrix K = jacobi_kernel_matrix(p.f.quadratic->Q, blocks, c);
  const double m = Eigen::SelfAdjointEigenSolver<Matrix>(K).eigenvalues().minCoeff();
  const double eps = 0.9 * m / p.f.lipschitz;
  std::mt19937_64 rng(9);
  const Point x0 = uniform_in(e.sample_box, rng);

  VbpgConfig cfg;
  cfg.schedule = KernelSchedule::block_jacobi(blocks, c);
  cfg.eps = EpsSchedule::constant(eps);
  cfg.max_iters = 100;
  cfg.stop_tol = 1e-300;
  cfg.inner_tol = 1e-13;
  SolverTrace a = run_vbpg(p, cfg, x0);
  SolverTrace b = run_regularized_jacobi(p, blocks, c, eps, x0, 100);
  const std::size_t n = std::min(a.iters(), b.iters());
  double worst = 0;
  for (std::size_t k = 0; k <= n; ++k)
    worst = std::max(worst, (a.iterate(k) - b.iterate(k)).lpNorm<Eigen::Infinity>());
  r.passed = n == 100 && worst <= 1e-10;
  std::ostringstream os;
  os << "max iterate deviation " << format_double(worst) << " over " << n << " iterations";
  r.detail = os.str();
  r.data = {{"max_deviation", worst}, {"iterations", n}, {"eps", eps}};
  return r;
}

// 10 ------------------------------------------------------------------------

CheckResult check_mcp_pipeline(const Ctx& ctx) {
  CheckResult r;
  CorpusEntry e = entry("QUAD_MCP(2,0.3,0.5)", ctx.tamper);
  const CompositeProblem& p = e.composite();
  const Landscape land = e.landscape();
  const Region region = e.regions.front();
  const double rho = *p.g.semiconvex_rho;
  const double analytic = p.f.quadratic->Q.diagonal().minCoeff();
  ConditionReport lwsc = check_sufficient_condition(p, region.x_bar, region.eta,
                                                    SufficientCondition::LWSC, std::nullopt,
                                                    SamplerOptions{1000, 91, 0});
  const double rel = std::abs(lwsc.mu - analytic) / analytic;
  PredictionReport pred = predict_weak_metric_subregularity(
      p, region, lwsc.mu, rho, sample_region(land, region, SamplerOptions{500, 92, 0}));
  ChainAudit chain = audit_convexity_chain(p, region.x_bar, region.eta, SamplerOptions{500, 93, 0});
  write_json(ctx.dir / "prediction.json", to_json(pred.certificate));
  r.passed = rel <= 0.02 && lwsc.mu > rho && pred.verified() && pred.certificate.n_samples >= 500 &&
             chain.holds;
  std::ostringstream os;
  os << "LWSC mu = " << format_double(lwsc.mu) << " (analytic " << format_double(analytic)
     << ", rel. error " << format_double(rel) << "), c2 = " << format_double(pred.c2) << " "
     << to_string(pred.certificate.verdict) << " on " << pred.certificate.n_samples
     << " samples, chain " << (chain.holds ? "holds" : "broken");
  r.detail = os.str();
  r.data = {{"mu", lwsc.mu}, {"analytic_mu", analytic}, {"rho", rho}, {"c2", pred.c2},
            {"prediction", cert_summary(pred.certificate)},
            {"chain", {{"lsc", chain.mu_lsc}, {"lesc", chain.mu_lesc}, {"lwsc", chain.mu_lwsc}}}};
  return r;
}

// 11 ------------------------------------------------------------------------

CheckResult check_envelope(const Ctx& ctx) {
  CheckResult r;
  Tally t;
  json per = json::array();
  for (const auto& id : composite_ids()) {
    CorpusEntry e = entry(id, ctx.tamper);
    const CompositeProblem& p = e.composite();
    const auto& a = p.analytic;
    if (!a.optimal_value || (!a.sublevel_project && !a.critical_set_is_solution_set)) continue;
    const double F_bar = *a.optimal_value;
    const Landscape land = e.landscape();
    const SublevelDistance dist(land, F_bar,
                                a.sublevel_project ? SublevelOracle::analytic()
                                                   : SublevelOracle::solution_set());
    std::mt19937_64 rng(111);
    std::vector<Point> xs;
    while (xs.size() < 1000) {
      Point x = uniform_in(e.sample_box, rng);
      if (objective(p, x) > F_bar) xs.push_back(x);
    }
    const BregmanStep step = euclidean_step(p, 0.9);
    InequalityReport rep = check_envelope_proximity(p, step, F_bar, xs, dist);
    t.add(rep, id);
    per.push_back({{"problem", id}, {"samples", xs.size()}, {"holds", rep.holds()},
                   {"min_slack", rep.min_slack()}});
  }
  r.passed = t.violations == 0 && per.size() >= 6;
  r.detail = describe(t) + " on " + std::to_string(per.size()) + " problems";
  r.data = {{"tally", t.to_json()}, {"problems", per}};
  return r;
}

// 12 ------------------------------------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckResult check_determinism(const Ctx& ctx) {
  CheckResult r;
  const json cfg = {{"problem", {{"corpus", "LASSO(20,50,0.1,7)"}}},
                    {"kernel", {{"kind", "diagonal_bb"}, {"m", 1.0}, {"M", 10.0}}},
                    {"max_iters", 150},
                    {"seed", 1}};
  const fs::path config = ctx.dir / "config.json";
  write_json(config, cfg);
  std::vector<std::string> bodies;
  for (const char* sub : {"a", "b"}) {
    CliOptions o;
    o.config = config;
    o.out = ctx.dir / sub;
    o.seed = 42;
    o.quiet = true;
    int code = cmd_run(o);
    if (code != kExitOk) {
      r.detail = std::string("cmd_run exited with ") + std::to_string(code);
      return r;
    }
    bodies.push_back(slurp(o.out / "trace.csv"));
  }
  r.passed = !bodies[0].empty() && bodies[0] == bodies[1];
  r.detail = r.passed ? "two runs with seed 42 wrote identical traces (" +
                            std::to_string(bodies[0].size()) + " bytes)"
                      : "trace bytes differ between runs";
  r.data = {{"bytes", bodies[0].size()}};
  return r;
}

using CheckFn = CheckResult (*)(const Ctx&);

const std::vector<std::pair<CheckInfo, CheckFn>>& registry() {
  static const std::vector<std::pair<CheckInfo, CheckFn>> r{
      {{"validate_problem", 0}, check_validate},
      {{"descent_suite", 1}, check_descent},
      {{"generalized_descent", 2}, check_generalized_descent},
      {{"gap_bound_tightness", 3}, check_gap_tightness},
      {{"closed_form_rate", 4}, check_closed_form_rate},
      {{"oracle_equivalence", 5}, check_oracle_equivalence},
      {{"counterexample_scans", 6}, check_scans},
      {{"implication_audit", 7}, check_implications},
      {{"contraction_converse", 8}, check_contraction_converse},
      {{"jacobi_equivalence", 9}, check_jacobi},
      {{"mcp_pipeline", 10}, check_mcp_pipeline},
      {{"envelope_proximity", 11}, check_envelope},
      {{"determinism", 12}, check_determinism},
  };
  return r;
}

}  // namespace

const std::vector<CheckInfo>& acceptance_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& [info, fn] : registry()) v.push_back(info);
    return v;
  }();
  return infos;
}

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<std::pair<CheckInfo, CheckFn>> selected;
  for (const auto& entry : registry()) {
    if (opts.only.empty() ||
        std::find(opts.only.begin(), opts.only.end(), entry.first.id) != opts.only.end())
      selected.push_back(entry);
  }
  std::vector<CheckResult> results(selected.size());
  parallel_for(selected.size(), opts.jobs, [&](std::size_t i) {
    const auto& [info, fn] = selected[i];
    Ctx ctx{opts.out_dir / info.id, opts.tamper_lipschitz};
    auto t0 = std::chrono::steady_clock::now();
    CheckResult res;
    try {
      fs::create_directories(ctx.dir);
      res = fn(ctx);
    } catch (const std::exception& e) {
      res = CheckResult{};
      res.passed = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.id = info.id;
    res.criterion = info.criterion;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("{} {} in {:.2f} s", res.passed ? "PASS" : "FAIL", res.id, res.seconds);
    results[i] = std::move(res);
  });
  return results;
}

json manifest_json(const std::vector<CheckResult>& results) {
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    checks.push_back({{"id", r.id},
                      {"criterion", r.criterion},
                      {"status", r.passed ? "PASS" : "FAIL"},
                      {"detail", r.detail},
                      {"seconds", r.seconds},
                      {"data", r.data}});
  }
  return {{"schema_version", 1}, {"all_passed", all}, {"checks", checks}};
}

}  // namespace vbpg
