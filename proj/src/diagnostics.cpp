#include "vbpg/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vbpg/errors.hpp"

namespace vbpg {

ContractionReport measure_levelset_contraction(const CompositeProblem& p, const VbpgConfig& cfg,
                                               const Point& x0, const DistanceFn& dist,
                                               std::optional<double> theta_prime,
                                               double dist_floor) {
  ContractionReport r;
  r.trace = run_vbpg(p, cfg, x0);
  r.theorem = contraction_from_strong_bregman_eb(r.trace.constants, theta_prime);
  const std::size_t n = r.trace.iters();
  double prev = dist(r.trace.iterate(0));
  r.distances.push_back(prev);
  for (std::size_t k = 0; k < n; ++k) {
    if (prev <= dist_floor) {
      r.truncated = true;
      break;
    }
    double next = dist(r.trace.iterate(k + 1));
    r.distances.push_back(next);
    r.ratios.push_back(next / prev);
    r.beta_hat = std::max(r.beta_hat, next / prev);
    prev = next;
  }
  return r;
}

InequalityReport check_envelope_proximity(const CompositeProblem& p, const BregmanStep& step,
                                          double F_bar, const std::vector<Point>& samples,
                                          const DistanceFn& sublevel_dist) {
  SolverConstants k = derive_constants(step.kernel.m(), step.kernel.M(), step.eps_lo,
                                       step.eps_hi, p.f.lipschitz);
  if (!k.descent()) throw RegimeError("envelope proximity needs eps_hi < m/L");
  InequalityReport rep;
  rep.name = "envelope_proximity";
  for (const auto& x : samples) {
    if (!(objective(p, x) > F_bar)) continue;
    SubproblemSolution sol = solve_subproblem(p, step, x);
    double Ft = objective(p, sol.point);
    double d = sublevel_dist(x);
    rep.add("F(t) - F_bar <= E - F_bar", Ft - F_bar, sol.envelope_value - F_bar);
    rep.add("E - F_bar <= c0 dist^2", sol.envelope_value - F_bar, k.c0 * d * d);
  }
  if (rep.checks.empty()) rep.notes.push_back("no sample above F_bar");
  return rep;
}

const char* to_string(SufficientCondition c) {
  switch (c) {
    case SufficientCondition::LSC: return "LSC";
    case SufficientCondition::LESC: return "LESC";
    case SufficientCondition::LWSC: return "LWSC";
    case SufficientCondition::LQGG: return "LQGG";
    case SufficientCondition::LRSI: return "LRSI";
    case SufficientCondition::LPL: return "LPL";
  }
  return "unknown";
}

std::optional<SufficientCondition> sufficient_condition_from_string(const std::string& s) {
  for (auto c : {SufficientCondition::LSC, SufficientCondition::LESC, SufficientCondition::LWSC,
                 SufficientCondition::LQGG, SufficientCondition::LRSI, SufficientCondition::LPL})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

namespace {

struct Constraint {
  Point x;
  double lhs;
  double weight;
};

// Nearest critical point inside the closed ball, or nullopt.
std::optional<Point> project_critical(const CriticalSet& crit, const Point& x, const Point& x_bar,
                                      double eta) {
  if (crit.is_finite()) {
    std::optional<Point> best;
    double bd = kInf;
    for (const auto& c : crit.points) {
      if ((c - x_bar).norm() > eta) continue;
      double d = (c - x).norm();
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    return best;
  }
  Point c = crit.project(x);
  if ((c - x_bar).norm() > eta) return std::nullopt;
  return c;
}

std::vector<Constraint> build_constraints(const CompositeProblem& p, const Point& x_bar,
                                          double eta, SufficientCondition which,
                                          const SamplerOptions& opts) {
  if (!p.analytic.critical_points)
    throw CapabilityError("sufficient-condition checks need the critical set of " + p.name);
  const CriticalSet& crit = *p.analytic.critical_points;
  if ((which == SufficientCondition::LRSI || which == SufficientCondition::LPL) && !p.g.is_zero)
    throw HypothesisError(std::string(to_string(which)) + " is only defined for g = 0");
  if (crit.is_finite() &&
      std::none_of(crit.points.begin(), crit.points.end(),
                   [&](const Point& c) { return (c - x_bar).norm() <= eta; }))
    throw HypothesisError("no critical point in the ball around x_bar");

  std::mt19937_64 rng(opts.seed);
  std::vector<Point> xs;
  std::vector<Point> ps;
  for (std::size_t i = 0; i < opts.count; ++i) {
    Point x = sample_ball(x_bar, eta, rng);
    auto c = project_critical(crit, x, x_bar, eta);
    if (!c) continue;
    xs.push_back(std::move(x));
    ps.push_back(std::move(*c));
  }
  if (xs.size() < kMinAcceptedSamples)
    throw InsufficientSamplingError(xs.size(), "too few ball samples with a critical projection");

  const auto& f = p.f;
  auto bregman_f = [&](const Point& x, const Point& y) {
    return f.eval(y) - f.eval(x) - f.grad(x).dot(y - x);
  };
  std::vector<Constraint> out;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& x = xs[i];
    const Point& xp = ps[i];
    const double dp2 = (x - xp).squaredNorm();
    switch (which) {
      case SufficientCondition::LSC:
      case SufficientCondition::LESC: {
        const Point& y = xs[(i + 1) % n];
        const Point& yp = ps[(i + 1) % n];
        bool same = (xp - yp).norm() <= 1e-12 * (1.0 + xp.norm());
        if (which == SufficientCondition::LSC || same) {
          double w = 0.5 * (y - x).squaredNorm();
          if (w > 0) out.push_back({x, bregman_f(x, y), w});
        }
        if (dp2 > 0) out.push_back({x, bregman_f(x, xp), 0.5 * dp2});
        break;
      }
      case SufficientCondition::LWSC:
        if (dp2 > 0) out.push_back({x, bregman_f(x, xp), 0.5 * dp2});
        break;
      case SufficientCondition::LQGG:
        if (dp2 > 0) out.push_back({x, (f.grad(x) - f.grad(xp)).dot(x - xp), dp2});
        break;
      case SufficientCondition::LRSI:
        if (dp2 > 0) out.push_back({x, f.grad(x).dot(x - xp), dp2});
        break;
      case SufficientCondition::LPL: {
        double w = f.eval(x) - f.eval(x_bar);
        if (w > 0) out.push_back({x, 0.5 * f.grad(x).squaredNorm(), w});
        break;
      }
    }
  }
  return out;
}

bool all_hold(const std::vector<Constraint>& cs, double mu) {
  for (const auto& c : cs) {
    double rhs = mu * c.weight;
    if (c.lhs < rhs - 1e-12 * (1.0 + std::abs(c.lhs) + std::abs(rhs))) return false;
  }
  return true;
}

}  // namespace

ConditionReport check_sufficient_condition(const CompositeProblem& p, const Point& x_bar,
                                           double eta, SufficientCondition which,
                                           std::optional<double> mu_candidate,
                                           const SamplerOptions& opts) {
  if (!(eta > 0)) throw ArgumentError("ball radius must be positive");
  std::vector<Constraint> cs = build_constraints(p, x_bar, eta, which, opts);
  ConditionReport r;
  r.which = which;
  r.n_constraints = cs.size();
  if (all_hold(cs, 0.0)) {
    double lo = 0.0, hi = 1.0;
    while (all_hold(cs, hi) && hi < 1e12) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (all_hold(cs, mid) ? lo : hi) = mid;
    }
    r.mu = lo;
  }
  if (mu_candidate) {
    r.candidate = mu_candidate;
    for (const auto& c : cs) {
      double rhs = *mu_candidate * c.weight;
      if (c.lhs < rhs - slack_tolerance(std::max(std::abs(c.lhs), std::abs(rhs)))) {
        r.candidate_holds = false;
        r.witness = Witness{c.x, c.lhs, rhs, std::string(to_string(which)) + " at the candidate"};
        break;
      }
    }
  }
  return r;
}

ChainAudit audit_convexity_chain(const CompositeProblem& p, const Point& x_bar, double eta,
                                 const SamplerOptions& opts) {
  ChainAudit a;
  a.mu_lsc = check_sufficient_condition(p, x_bar, eta, SufficientCondition::LSC, {}, opts).mu;
  ConditionReport lesc =
      check_sufficient_condition(p, x_bar, eta, SufficientCondition::LESC, a.mu_lsc, opts);
  a.mu_lesc = lesc.mu;
  ConditionReport lwsc =
      check_sufficient_condition(p, x_bar, eta, SufficientCondition::LWSC, a.mu_lesc, opts);
  a.mu_lwsc = lwsc.mu;
  a.holds = lesc.candidate_holds && lwsc.candidate_holds;
  return a;
}

PredictionReport predict_weak_metric_subregularity(const CompositeProblem& p, const Region& region,
                                                   double mu, double rho,
                                                   const std::vector<Point>& fresh) {
  PredictionReport r;
  r.mu = mu;
  r.rho = rho;
  r.c2 = weak_subregularity_constant(mu, rho);
  CertifyOptions opts;
  opts.candidate = r.c2;
  r.certificate = certify_weak_metric_subregularity(Landscape::of(p), region, fresh, opts);
  return r;
}

NearbyCriticalReport check_nearby_critical_values(const Landscape& land, const Point& x_bar,
                                                  std::vector<double> deltas,
                                                  std::size_t samples, std::uint64_t seed) {
  if (!land.analytic.critical_points)
    throw CapabilityError("critical-value check needs the critical set of " + land.name);
  const CriticalSet& crit = *land.analytic.critical_points;
  std::sort(deltas.begin(), deltas.end());
  NearbyCriticalReport r;
  r.deltas = deltas;
  const double Fb = land.value(x_bar);
  const double tol = slack_tolerance(Fb, 1e-10);
  std::mt19937_64 rng(seed);
  for (double delta : deltas) {
    std::vector<Point> cands;
    if (crit.is_finite()) {
      for (const auto& c : crit.points)
        if ((c - x_bar).norm() < delta) cands.push_back(c);
    } else {
      cands.push_back(crit.project(x_bar));
      for (std::size_t i = 0; i < samples; ++i)
        cands.push_back(crit.project(sample_ball(x_bar, delta, rng)));
    }
    for (const auto& c : cands) {
      if (!((c - x_bar).norm() < delta)) continue;
      ++r.checked;
      double Fc = land.value(c);
      if (Fc > Fb + tol) {
        r.witness = Witness{c, Fc, Fb, "F(critical point) <= F(x_bar)"};
        return r;
      }
    }
    r.largest_certified = delta;
  }
  return r;
}

json to_json(const ContractionReport& r) {
  json j;
  j["ratios"] = r.ratios;
  j["beta_hat"] = r.beta_hat;
  j["truncated"] = r.truncated;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["theorem"] = {{"interval_lo", num(r.theorem.lo)},
                  {"interval_hi", num(r.theorem.hi)},
                  {"interval_nonempty", r.theorem.interval_nonempty},
                  {"theta_admissible", r.theorem.theta_admissible},
                  {"beta", r.theorem.beta ? json(*r.theorem.beta) : json(nullptr)}};
  return j;
}

json to_json(const ConditionReport& r) {
  json j{{"condition", to_string(r.which)}, {"mu", r.mu}, {"n_constraints", r.n_constraints}};
  if (r.candidate) {
    j["candidate"] = *r.candidate;
    j["candidate_holds"] = r.candidate_holds;
  }
  if (r.witness)
    j["witness"] = {{"point", to_json(r.witness->point)},
                    {"lhs", r.witness->lhs},
                    {"rhs", r.witness->rhs},
                    {"relation", r.witness->relation}};
  return j;
}

json to_json(const NearbyCriticalReport& r) {
  json j{{"deltas", r.deltas}, {"checked", r.checked}, {"holds", r.holds()}};
  j["largest_certified"] = r.largest_certified ? json(*r.largest_certified) : json(nullptr);
  if (r.witness)
    j["witness"] = {{"point", to_json(r.witness->point)},
                    {"lhs", r.witness->lhs},
                    {"rhs", r.witness->rhs},
                    {"relation", r.witness->relation}};
  return j;
}

}  // namespace vbpg
