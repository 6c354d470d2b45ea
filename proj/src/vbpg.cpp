#include "vbpg/vbpg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vbpg/errors.hpp"

namespace vbpg {

BlockPartition BlockPartition::equal(Index n, Index blocks) {
  if (blocks < 1 || n < blocks || n % blocks != 0)
    throw ArgumentError("equal block partition needs blocks dividing n");
  return BlockPartition{std::vector<Index>(static_cast<std::size_t>(blocks), n / blocks)};
}

Index BlockPartition::dim() const { return std::accumulate(sizes.begin(), sizes.end(), Index{0}); }

Index BlockPartition::start(std::size_t b) const {
  return std::accumulate(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(b), Index{0});
}

Matrix jacobi_kernel_matrix(const Matrix& Q, const BlockPartition& blocks,
                            const std::vector<double>& c) {
  if (blocks.dim() != Q.rows() || Q.rows() != Q.cols())
    throw ArgumentError("block partition does not match the quadratic");
  if (c.size() != blocks.sizes.size()) throw ArgumentError("one proximal weight per block");
  Matrix H = Matrix::Zero(Q.rows(), Q.cols());
  for (std::size_t b = 0; b < blocks.sizes.size(); ++b) {
    if (!(c[b] >= 0)) throw ArgumentError("proximal weights must be nonnegative");
    Index s = blocks.start(b), n = blocks.sizes[b];
    H.block(s, s, n, n) = Q.block(s, s, n, n) + c[b] * Matrix::Identity(n, n);
  }
  return H;
}

KernelSchedule KernelSchedule::constant(const BregmanKernel& k) {
  KernelSchedule s;
  s.kind = Kind::Constant;
  s.kernel = k;
  s.m = k.m();
  s.M = k.M();
  return s;
}

KernelSchedule KernelSchedule::diagonal_bb(double m, double M) {
  if (!(m > 0) || !(M >= m)) throw ArgumentError("BB clipping bounds must satisfy 0 < m <= M");
  KernelSchedule s;
  s.kind = Kind::DiagonalBB;
  s.m = m;
  s.M = M;
  return s;
}

KernelSchedule KernelSchedule::block_jacobi(BlockPartition blocks, std::vector<double> c) {
  if (c.size() != blocks.sizes.size()) throw ArgumentError("one proximal weight per block");
  KernelSchedule s;
  s.kind = Kind::BlockJacobi;
  s.blocks = std::move(blocks);
  s.c_weights = std::move(c);
  return s;
}

KernelSchedule KernelSchedule::custom(std::vector<BregmanKernel> seq) {
  if (seq.empty()) throw ArgumentError("custom kernel schedule is empty");
  KernelSchedule s;
  s.kind = Kind::Custom;
  s.m = kInf;
  s.M = 0;
  for (const auto& k : seq) {
    s.m = std::min(s.m, k.m());
    s.M = std::max(s.M, k.M());
  }
  s.sequence = std::move(seq);
  return s;
}

const char* to_string(KernelSchedule::Kind k) {
  switch (k) {
    case KernelSchedule::Kind::Constant: return "constant";
    case KernelSchedule::Kind::DiagonalBB: return "diagonal_bb";
    case KernelSchedule::Kind::BlockJacobi: return "block_jacobi";
    case KernelSchedule::Kind::Custom: return "custom";
  }
  return "unknown";
}

EpsSchedule EpsSchedule::constant(double eps) { return sequence({eps}, eps, eps); }

EpsSchedule EpsSchedule::sequence(std::vector<double> values, double lo, double hi) {
  if (values.empty()) throw ArgumentError("step schedule is empty");
  if (!(lo > 0) || !(lo <= hi) || !std::isfinite(hi))
    throw ArgumentError("step bounds must satisfy 0 < eps_lo <= eps_hi < inf");
  for (double v : values)
    if (!(v >= lo && v <= hi)) throw ArgumentError("step size outside [eps_lo, eps_hi]");
  EpsSchedule e;
  e.lo = lo;
  e.hi = hi;
  e.values = std::move(values);
  return e;
}

double EpsSchedule::at(std::size_t k) const { return values[std::min(k, values.size() - 1)]; }

const char* to_string(StopReason r) {
  return r == StopReason::StepTolerance ? "step_tolerance" : "max_iterations";
}

Point SolverTrace::iterate(std::size_t k) const {
  return k < records.size() ? records[k].x : final_point;
}

double SolverTrace::value(std::size_t k) const {
  return k < records.size() ? records[k].F : F_limit;
}

namespace {

std::pair<double, double> spectrum(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

const QuadraticForm& require_quadratic(const CompositeProblem& p) {
  if (!p.f.quadratic)
    throw CapabilityError("the Jacobi kernel is implemented only for quadratic f");
  return *p.f.quadratic;
}

}  // namespace

std::pair<double, double> schedule_moduli(const CompositeProblem& p, const KernelSchedule& s) {
  switch (s.kind) {
    case KernelSchedule::Kind::Constant:
      if (!s.kernel) throw ArgumentError("constant schedule without a kernel");
      return {s.kernel->m(), s.kernel->M()};
    case KernelSchedule::Kind::BlockJacobi: {
      auto [lo, hi] = spectrum(jacobi_kernel_matrix(require_quadratic(p).Q, s.blocks, s.c_weights));
      if (!(lo > 0)) throw ArgumentError("Jacobi kernel is not positive definite");
      return {lo, hi};
    }
    case KernelSchedule::Kind::DiagonalBB:
    case KernelSchedule::Kind::Custom: return {s.m, s.M};
  }
  return {s.m, s.M};
}

SolverTrace run_vbpg(const CompositeProblem& p, const VbpgConfig& cfg, const Point& x0) {
  if (x0.size() != p.dim) throw ArgumentError("run_vbpg: x0 has the wrong dimension");
  if (!x0.allFinite()) throw ArgumentError("run_vbpg: x0 is not finite");
  if (!(cfg.stop_tol > 0)) throw ArgumentError("stop_tol must be positive");
  if (cfg.eps.values.empty()) throw ArgumentError("step schedule is empty");
  if (!std::isfinite(objective(p, x0))) throw DomainError("run_vbpg: x0 is outside dom F");

  const auto [m, M] = schedule_moduli(p, cfg.schedule);
  const double L = p.f.lipschitz;
  SolverTrace trace;
  trace.constants = derive_constants(m, M, cfg.eps.lo, cfg.eps.hi, L, p.g.semiconvex_rho);
  trace.L = L;
  trace.M = M;
  trace.eps_lo = cfg.eps.lo;
  if (!trace.constants.descent()) {
    std::ostringstream os;
    os << "non-descent regime: a = " << trace.constants.a << " <= 0; descent needs eps_hi < m/L"
       << " (eps_hi = " << cfg.eps.hi << ", m = " << m << ", L = " << L << ", m/L = " << m / L
       << ")";
    throw RegimeError(os.str());
  }

  std::optional<BregmanKernel> fixed;
  if (cfg.schedule.kind == KernelSchedule::Kind::Constant) fixed = cfg.schedule.kernel;
  if (cfg.schedule.kind == KernelSchedule::Kind::BlockJacobi)
    fixed = BregmanKernel::spd(
        jacobi_kernel_matrix(p.f.quadratic->Q, cfg.schedule.blocks, cfg.schedule.c_weights));
  if (fixed && fixed->dim() != p.dim) throw ArgumentError("kernel dimension mismatch");

  Point x = x0;
  Point prev_x, prev_grad;
  Point bb = Point::Constant(p.dim, cfg.schedule.m);
  const double resid_factor = L + M / cfg.eps.lo;
  trace.records.reserve(std::min<std::size_t>(cfg.max_iters, 100000));

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    BregmanKernel kernel = fixed ? *fixed : BregmanKernel::euclidean(p.dim);
    Point grad;
    if (cfg.schedule.kind == KernelSchedule::Kind::DiagonalBB) {
      grad = p.f.grad(x);
      if (k > 0) {
        // d_i = clip(|dg_i / dx_i|, m, M); coordinates that did not move keep
        // their previous weight.
        for (Index i = 0; i < p.dim; ++i) {
          double dx = x[i] - prev_x[i];
          if (dx != 0) bb[i] = std::clamp(std::abs((grad[i] - prev_grad[i]) / dx), cfg.schedule.m,
                                          cfg.schedule.M);
        }
      }
      kernel = BregmanKernel::diagonal(bb);
    } else if (cfg.schedule.kind == KernelSchedule::Kind::Custom) {
      kernel = cfg.schedule.sequence[std::min(k, cfg.schedule.sequence.size() - 1)];
    }

    const BregmanStep step = BregmanStep::bounded(kernel, cfg.eps.at(k), cfg.eps.lo, cfg.eps.hi);
    const double tol = cfg.inner_tol.value_or(default_inner_tol(x));
    SubproblemSolution sol;
    try {
      InnerOptions inner;
      inner.max_iters = cfg.inner_max_iters;
      sol = solve_subproblem(p, step, x, tol, inner);
    } catch (const InnerSolverError& e) {
      std::ostringstream os;
      os << "outer iteration " << k << ": " << e.what();
      throw InnerSolverError(e.residual(), k, os.str());
    }

    TraceRecord rec;
    rec.k = k;
    rec.x = x;
    rec.F = objective(p, x);
    rec.step_norm = (x - sol.point).norm();
    rec.gap = cfg.record_gap ? sol.gap_value : std::nan("");
    rec.envelope = cfg.record_gap ? sol.envelope_value : std::nan("");
    rec.residual_bound = resid_factor * rec.step_norm;
    const bool stop = rec.step_norm <= cfg.stop_tol;
    trace.records.push_back(std::move(rec));

    if (cfg.schedule.kind == KernelSchedule::Kind::DiagonalBB) {
      prev_x = x;
      prev_grad = grad;
    }
    x = sol.point;
    if (stop) {
      trace.stop = StopReason::StepTolerance;
      break;
    }
  }
  trace.final_point = x;
  trace.F_limit = objective(p, x);
  return trace;
}

namespace {

// argmin_z <s, z - xb> + g(z) + 1/2 (z - xb)' H (z - xb) by cyclic coordinate
// descent; every coordinate step is an exact one-dimensional prox.
Point block_coordinate_descent(const NonsmoothTerm& g, const Point& full_x, Index start,
                               const Matrix& H, const Point& s) {
  const Index n = H.rows();
  const Index dim = full_x.size();
  Point y = full_x;  // scratch: only the block coordinates change
  Point shift = Point::Zero(dim);
  Point w = Point::Ones(dim);
  const Point xb = full_x.segment(start, n);
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0, scale = 0;
    for (Index j = 0; j < n; ++j) {
      double sj = s[j];
      for (Index l = 0; l < n; ++l)
        if (l != j) sj += H(j, l) * (y[start + l] - xb[l]);
      shift[start + j] = sj;
      w[start + j] = H(j, j);
      Point center = y;
      center[start + j] = xb[j];
      double next = g.scaled_prox(center, shift, w)[start + j];
      shift[start + j] = 0;
      w[start + j] = 1;
      change = std::max(change, std::abs(next - y[start + j]));
      scale = std::max(scale, std::abs(next));
      y[start + j] = next;
    }
    if (change <= 1e-15 * (1 + scale)) return y.segment(start, n);
  }
  throw InnerSolverError(kInf, 200000, "block coordinate descent did not converge");
}

}  // namespace

SolverTrace run_regularized_jacobi(const CompositeProblem& p, const BlockPartition& blocks,
                                   const std::vector<double>& c, double eps, const Point& x0,
                                   std::size_t iters, double stop_tol) {
  const QuadraticForm& q = require_quadratic(p);
  if (!(eps > 0)) throw ArgumentError("eps must be positive");
  if (x0.size() != p.dim) throw ArgumentError("x0 has the wrong dimension");
  if (!p.g.is_zero && !p.g.separable)
    throw CapabilityError("regularized Jacobi needs a coordinatewise separable g");
  const Matrix H = jacobi_kernel_matrix(q.Q, blocks, c);
  const auto [m, M] = spectrum(H);
  if (!(m > 0)) throw ArgumentError("Jacobi kernel is not positive definite");

  const std::size_t nb = blocks.sizes.size();
  std::vector<Matrix> Hb(nb);
  std::vector<Eigen::LLT<Matrix>> chol(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    Index s = blocks.start(b), n = blocks.sizes[b];
    Hb[b] = H.block(s, s, n, n) / eps;
    chol[b].compute(Hb[b]);
  }

  SolverTrace trace;
  trace.constants = derive_constants(m, M, eps, eps, p.f.lipschitz, p.g.semiconvex_rho);
  trace.L = p.f.lipschitz;
  trace.M = M;
  trace.eps_lo = eps;
  const double resid_factor = p.f.lipschitz + M / eps;

  Point x = x0;
  for (std::size_t k = 0; k < iters; ++k) {
    const Point grad = p.f.grad(x);
    Point y(p.dim);
    for (std::size_t b = 0; b < nb; ++b) {
      Index s = blocks.start(b), n = blocks.sizes[b];
      if (p.g.is_zero)
        y.segment(s, n) = x.segment(s, n) - chol[b].solve(grad.segment(s, n));
      else
        y.segment(s, n) = block_coordinate_descent(p.g, x, s, Hb[b], grad.segment(s, n));
    }
    TraceRecord rec;
    rec.k = k;
    rec.x = x;
    rec.F = objective(p, x);
    rec.step_norm = (x - y).norm();
    Point d = y - x;
    double model = grad.dot(d) + p.g.eval(y) + 0.5 * d.dot(H * d) / eps;
    rec.envelope = p.f.eval(x) + model;
    rec.gap = (p.g.eval(x) - model) / eps;
    rec.residual_bound = resid_factor * rec.step_norm;
    bool stop = rec.step_norm <= stop_tol;
    trace.records.push_back(std::move(rec));
    x = y;
    if (stop) {
      trace.stop = StopReason::StepTolerance;
      break;
    }
  }
  trace.final_point = x;
  trace.F_limit = objective(p, x);
  return trace;
}

ValueProximityReport check_value_proximity(const CompositeProblem& p, const SolverTrace& trace,
                                           const Point& x_bar, double kappa_prime, double eta,
                                           double nu) {
  const double F_bar = objective(p, x_bar);
  ValueProximityReport out;
  out.report.name = "value_proximity";
  for (std::size_t k = 0; k < trace.iters(); ++k) {
    const Point next = trace.iterate(k + 1);
    const double Fn = trace.value(k + 1);
    if (!((next - x_bar).norm() < eta && Fn > F_bar && Fn < F_bar + nu)) continue;
    ++out.in_region;
    const double s2 = trace.records[k].step_norm * trace.records[k].step_norm;
    const double lhs = Fn - F_bar;
    out.minimal_kappa = std::max(out.minimal_kappa, s2 > 0 ? lhs / s2 : kInf);
    out.report.add("F(x^{k+1}) - F_bar <= kappa' |x^k - x^{k+1}|^2 at k=" + std::to_string(k), lhs,
                   kappa_prime * s2);
  }
  if (out.in_region == 0) out.report.notes.push_back("no iterate in the region; vacuous");
  return out;
}

RateReport measure_rates(const SolverTrace& trace, double F_bar, const Point& x_bar,
                         double tail_fraction) {
  if (!(tail_fraction > 0 && tail_fraction <= 1))
    throw ArgumentError("tail_fraction must lie in (0, 1]");
  const std::size_t N = trace.iters();
  RateReport r;
  r.tail_start = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(N)));
  if (r.tail_start >= N) r.tail_start = N == 0 ? 0 : N - 1;

  for (std::size_t k = r.tail_start; k <= N; ++k) {
    if (!(trace.value(k) > F_bar)) {
      std::ostringstream os;
      os << "F(x^" << k << ") = " << trace.value(k) << " is not above the target " << F_bar;
      throw TargetValueError(os.str());
    }
  }
  for (std::size_t k = r.tail_start; k < N; ++k) {
    r.beta_q = std::max(r.beta_q, (trace.value(k + 1) - F_bar) / (trace.value(k) - F_bar));
    ++r.q_pairs;
  }

  const double floor_dist = 100.0 * DBL_EPSILON * x_bar.norm();
  double log_sum = 0;
  for (std::size_t k = r.tail_start; k < N; ++k) {
    double e0 = (trace.iterate(k) - x_bar).norm();
    double e1 = (trace.iterate(k + 1) - x_bar).norm();
    if (e0 <= floor_dist || e1 <= floor_dist || e0 == 0 || e1 == 0) continue;
    log_sum += std::log(e1 / e0);
    ++r.r_pairs;
  }
  r.beta_r = r.r_pairs ? std::exp(log_sum / static_cast<double>(r.r_pairs)) : 0.0;
  r.linear = r.q_pairs > 0 && r.beta_q < 1 - 1e-6;
  return r;
}

}  // namespace vbpg
