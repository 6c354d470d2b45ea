#include "vbpg/certificates.hpp"

#include <cmath>

#include "vbpg/errors.hpp"

namespace vbpg {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::LevelSetSubdiff: return "level_set_subdiff";
    case Condition::LevelSetBregman: return "level_set_bregman";
    case Condition::StrongLevelSetSubdiff: return "strong_level_set_subdiff";
    case Condition::StrongLevelSetBregman: return "strong_level_set_bregman";
    case Condition::WeakMetricSubregularity: return "weak_metric_subregularity";
    case Condition::BregmanProxEb: return "bregman_prox_eb";
    case Condition::LuoTseng: return "luo_tseng";
    case Condition::Kl: return "kl";
    case Condition::BpGap: return "bp_gap";
    case Condition::ProxPl: return "prox_pl";
  }
  return "unknown";
}

std::optional<Condition> condition_from_string(const std::string& s) {
  for (Condition c : {Condition::LevelSetSubdiff, Condition::LevelSetBregman,
                      Condition::StrongLevelSetSubdiff, Condition::StrongLevelSetBregman,
                      Condition::WeakMetricSubregularity, Condition::BregmanProxEb,
                      Condition::LuoTseng, Condition::Kl, Condition::BpGap, Condition::ProxPl})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

const char* to_string(Verdict v) {
  return v == Verdict::CertifiedOnSamples ? "CERTIFIED_ON_SAMPLES" : "REFUTED";
}

namespace {

bool monotone_tail(const std::vector<SequencePoint>& seq, bool increasing) {
  if (seq.size() < 2) return false;
  std::size_t from = seq.size() > 10 ? seq.size() - 10 : 0;
  for (std::size_t i = from + 1; i < seq.size(); ++i) {
    if (increasing ? !(seq[i].ratio > seq[i - 1].ratio) : !(seq[i].ratio < seq[i - 1].ratio))
      return false;
  }
  return true;
}

}  // namespace

SequenceAssessment assess_divergence(const std::vector<SequencePoint>& seq) {
  SequenceAssessment a;
  if (seq.empty()) return a;
  a.first = seq.front().ratio;
  a.last = seq.back().ratio;
  a.monotone = monotone_tail(seq, true);
  a.criterion_met = a.monotone && a.last > 10.0 * a.first;
  return a;
}

SequenceAssessment assess_vanishing(const std::vector<SequencePoint>& seq) {
  SequenceAssessment a;
  if (seq.empty()) return a;
  a.first = seq.front().ratio;
  a.last = seq.back().ratio;
  a.monotone = monotone_tail(seq, false);
  a.criterion_met = a.monotone && a.last < a.first / 10.0;
  return a;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    ++f.n;
  }
  if (f.n < 2) return f;
  const double n = static_cast<double>(f.n);
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  if (vx <= 0) return f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

json to_json(const EBCertificate& c) {
  json j;
  j["condition"] = to_string(c.condition);
  j["params"] = c.params;
  j["region"] = {{"x_bar", to_json(c.region.x_bar)},
                 {"eta", c.region.eta},
                 {"nu", c.region.nu},
                 {"F_bar", c.region.F_bar}};
  j["n_samples"] = c.n_samples;
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  j["constant_estimate"] = num(c.constant_estimate);
  j["worst_ratio"] = num(c.worst_ratio);
  j["verdict"] = to_string(c.verdict);
  if (c.witness) {
    j["witness"] = {{"point", to_json(c.witness->point)},
                    {"lhs", num(c.witness->lhs)},
                    {"rhs", num(c.witness->rhs)},
                    {"relation", c.witness->relation}};
  }
  if (!c.witness_sequence.empty()) {
    json s = json::array();
    for (const auto& p : c.witness_sequence) s.push_back({{"n", p.n}, {"ratio", num(p.ratio)}});
    j["witness_sequence"] = s;
    if (c.sequence_assessment)
      j["sequence_assessment"] = {{"monotone", c.sequence_assessment->monotone},
                                  {"criterion_met", c.sequence_assessment->criterion_met},
                                  {"first", c.sequence_assessment->first},
                                  {"last", c.sequence_assessment->last}};
  }
  if (c.exponent_fit)
    j["exponent_fit"] = {{"slope", c.exponent_fit->slope},
                         {"r2", c.exponent_fit->r2},
                         {"n", c.exponent_fit->n}};
  return j;
}

namespace {

// lhs <= c * rhs (Upper) or lhs >= c * rhs (Lower), evaluated per sample.
enum class Side { Upper, Lower };

struct Term {
  Point x;
  double lhs;
  double rhs;
};

void require_samples(const std::vector<Point>& samples) {
  if (samples.size() < kMinAcceptedSamples)
    throw InsufficientSamplingError(samples.size(),
                                    "certificates need at least " +
                                        std::to_string(kMinAcceptedSamples) + " samples");
}

EBCertificate assemble(Condition cond, std::map<std::string, double> params, const Region& region,
                       const std::vector<Term>& terms, Side side, const CertifyOptions& opts,
                       const std::string& relation) {
  EBCertificate cert;
  cert.condition = cond;
  cert.params = std::move(params);
  cert.region = region;
  cert.worst_ratio = side == Side::Upper ? 0.0 : kInf;

  for (const auto& t : terms) {
    if (t.lhs == 0 && t.rhs == 0) continue;  // both sides vanish: no information
    double ratio;
    if (side == Side::Upper) {
      ratio = t.rhs > 0 ? t.lhs / t.rhs : kInf;
      cert.worst_ratio = std::max(cert.worst_ratio, ratio);
    } else {
      if (t.rhs == 0) continue;  // holds for every constant
      ratio = t.lhs / t.rhs;
      cert.worst_ratio = std::min(cert.worst_ratio, ratio);
    }
    ++cert.n_samples;

    bool infinite_violation = side == Side::Upper ? std::isinf(ratio) : ratio == 0;
    bool candidate_violation = false;
    double rhs_c = 0;
    if (opts.candidate) {
      rhs_c = *opts.candidate * t.rhs;
      double tol = slack_tolerance(std::max(std::abs(t.lhs), std::abs(rhs_c)));
      candidate_violation = side == Side::Upper ? t.lhs > rhs_c + tol : t.lhs < rhs_c - tol;
    }
    if ((infinite_violation || candidate_violation) && !cert.witness) {
      cert.verdict = Verdict::Refuted;
      cert.witness = Witness{t.x, t.lhs, opts.candidate ? rhs_c : 0.0,
                             infinite_violation ? relation + " with vanishing right factor"
                                                : relation + " at the candidate constant"};
    }
  }
  if (cert.n_samples == 0) cert.worst_ratio = 0;
  cert.constant_estimate =
      (opts.candidate && !cert.refuted()) ? *opts.candidate : cert.worst_ratio;
  return cert;
}

void apply_sequence(EBCertificate& cert, const CertifyOptions& opts, Side side,
                    const std::function<std::pair<double, double>(const Point&)>& sides,
                    const std::string& relation) {
  if (!opts.witness_sequence) return;
  const auto& ws = *opts.witness_sequence;
  std::vector<Point> pts;
  std::vector<std::pair<double, double>> vals;
  for (std::size_t i = 0; i < ws.points.size(); ++i) {
    auto [l, r] = sides(ws.points[i]);
    double ratio = r > 0 ? l / r : kInf;
    cert.witness_sequence.push_back({i < ws.n.size() ? ws.n[i] : static_cast<double>(i), ratio});
    vals.emplace_back(l, r);
  }
  SequenceAssessment a = side == Side::Upper ? assess_divergence(cert.witness_sequence)
                                             : assess_vanishing(cert.witness_sequence);
  cert.sequence_assessment = a;
  if (a.criterion_met && !cert.refuted()) {
    // The inequality fails along the sequence for the constant first*10 (or first/10).
    double c = side == Side::Upper ? 10.0 * a.first : a.first / 10.0;
    auto [l, r] = vals.back();
    cert.verdict = Verdict::Refuted;
    cert.witness = Witness{ws.points.back(), l, c * r,
                           relation + " along the witness sequence, constant " +
                               format_double(c)};
  }
}

const std::function<double(const Point&)>& require_subdiff(const Landscape& land) {
  if (!land.analytic.subdiff_dist)
    throw CapabilityError("certificate needs subdiff_dist for " + land.name);
  return land.analytic.subdiff_dist;
}

const CriticalSet& require_critical(const Landscape& land) {
  if (!land.analytic.critical_points)
    throw CapabilityError("certificate needs the critical set of " + land.name);
  return *land.analytic.critical_points;
}

EBCertificate subdiff_eb(Condition cond, const Landscape& land, const Region& region,
                         double gamma, const std::vector<Point>& samples,
                         const DistanceFn& dist, const CertifyOptions& opts) {
  if (!(gamma > 0)) throw ArgumentError("exponent gamma must be positive");
  const auto& d = require_subdiff(land);
  require_samples(samples);
  std::vector<Term> terms;
  std::vector<double> xs, ys;
  for (const auto& x : samples) {
    double s = dist(x);
    double g = d(x);
    terms.push_back({x, std::pow(s, gamma), g});
    xs.push_back(s);
    ys.push_back(g);
  }
  EBCertificate c = assemble(cond, {{"gamma", gamma}}, region, terms, Side::Upper, opts,
                             "dist^gamma <= c1 dist(0,dF)");
  c.exponent_fit = fit_loglog(xs, ys);
  apply_sequence(c, opts, Side::Upper,
                 [&](const Point& x) { return std::pair{std::pow(dist(x), gamma), d(x)}; },
                 "dist^gamma <= c1 dist(0,dF)");
  return c;
}

}  // namespace

EBCertificate certify_level_set_subdiff_eb(const Landscape& land, const Region& region,
                                           double gamma, const std::vector<Point>& samples,
                                           const DistanceFn& sublevel_dist,
                                           const CertifyOptions& opts) {
  return subdiff_eb(Condition::LevelSetSubdiff, land, region, gamma, samples, sublevel_dist, opts);
}

EBCertificate certify_strong_level_set_subdiff_eb(const Landscape& land, const Region& band,
                                                  const std::vector<Point>& samples,
                                                  const DistanceFn& sublevel_dist,
                                                  const CertifyOptions& opts) {
  return subdiff_eb(Condition::StrongLevelSetSubdiff, land, band, 1.0, samples, sublevel_dist,
                    opts);
}

EBCertificate certify_level_set_bregman_eb([[maybe_unused]] const Landscape& land, const ProxMap& T,
                                           const Region& region, double p,
                                           const std::vector<Point>& samples,
                                           const DistanceFn& sublevel_dist,
                                           const CertifyOptions& opts) {
  if (!(p > 0)) throw ArgumentError("exponent p must be positive");
  require_samples(samples);
  auto sides = [&](const Point& x) {
    return std::pair{std::pow(sublevel_dist(x), p), (x - T(x)).norm()};
  };
  std::vector<Term> terms;
  for (const auto& x : samples) {
    auto [l, r] = sides(x);
    terms.push_back({x, l, r});
  }
  EBCertificate c = assemble(Condition::LevelSetBregman, {{"p", p}}, region, terms, Side::Upper,
                             opts, "dist^p <= theta |x - T(x)|");
  apply_sequence(c, opts, Side::Upper, sides, "dist^p <= theta |x - T(x)|");
  return c;
}

EBCertificate certify_weak_metric_subregularity(const Landscape& land, const Region& region,
                                                const std::vector<Point>& samples,
                                                const CertifyOptions& opts) {
  const auto& d = require_subdiff(land);
  const auto& crit = require_critical(land);
  require_samples(samples);
  auto sides = [&](const Point& x) { return std::pair{crit.distance(x), d(x)}; };
  std::vector<Term> terms;
  for (const auto& x : samples) {
    auto [l, r] = sides(x);
    terms.push_back({x, l, r});
  }
  EBCertificate c = assemble(Condition::WeakMetricSubregularity, {}, region, terms, Side::Upper,
                             opts, "dist(x,crit) <= c2 dist(0,dF)");
  apply_sequence(c, opts, Side::Upper, sides, "dist(x,crit) <= c2 dist(0,dF)");
  return c;
}

EBCertificate certify_bregman_prox_eb(const Landscape& land, const ProxMap& T,
                                      const Region& region, const std::vector<Point>& samples,
                                      const CertifyOptions& opts) {
  const auto& crit = require_critical(land);
  require_samples(samples);
  auto sides = [&](const Point& x) { return std::pair{crit.distance(x), (x - T(x)).norm()}; };
  std::vector<Term> terms;
  for (const auto& x : samples) {
    auto [l, r] = sides(x);
    terms.push_back({x, l, r});
  }
  EBCertificate c = assemble(Condition::BregmanProxEb, {}, region, terms, Side::Upper, opts,
                             "dist(x,crit) <= c3 |x - T(x)|");
  apply_sequence(c, opts, Side::Upper, sides, "dist(x,crit) <= c3 |x - T(x)|");
  return c;
}

EBCertificate certify_luo_tseng(const Landscape& land, const ProxMap& T, const Region& region,
                                double xi, double sigma, const std::vector<Point>& samples,
                                const CertifyOptions& opts) {
  if (!(sigma > 0)) throw ArgumentError("sigma must be positive");
  const auto& crit = require_critical(land);
  require_samples(samples);
  std::vector<Term> terms;
  for (const auto& x : samples) {
    double r = (x - T(x)).norm();
    if (land.value(x) > xi || r > sigma) continue;
    terms.push_back({x, crit.distance(x), r});
  }
  return assemble(Condition::LuoTseng, {{"xi", xi}, {"sigma", sigma}}, region, terms,
                  Side::Upper, opts, "dist(x,crit) <= c4 |x - T(x)|");
}

EBCertificate certify_kl(const Landscape& land, const Region& region, double alpha,
                         const std::vector<Point>& samples, const CertifyOptions& opts) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("KL exponent must lie in (0, 1)");
  const auto& d = require_subdiff(land);
  require_samples(samples);
  auto sides = [&](const Point& x) {
    double gap = land.value(x) - region.F_bar;
    return std::pair{d(x), gap > 0 ? std::pow(gap, alpha) : 0.0};
  };
  std::vector<Term> terms;
  std::vector<double> xs, ys;
  for (const auto& x : samples) {
    auto [l, r] = sides(x);
    terms.push_back({x, l, r});
    xs.push_back(land.value(x) - region.F_bar);
    ys.push_back(l);
  }
  EBCertificate c = assemble(Condition::Kl, {{"alpha", alpha}}, region, terms, Side::Lower, opts,
                             "dist(0,dF) >= c5 (F - F_bar)^alpha");
  c.exponent_fit = fit_loglog(xs, ys);
  apply_sequence(c, opts, Side::Lower, sides, "dist(0,dF) >= c5 (F - F_bar)^alpha");
  return c;
}

EBCertificate certify_bp_gap(const CompositeProblem& p, const BregmanStep& step,
                             const Region& region, double q, const std::vector<Point>& samples,
                             const CertifyOptions& opts) {
  if (!(q >= 0 && q < 2)) throw ArgumentError("gap exponent q must lie in [0, 2)");
  require_samples(samples);
  std::vector<Term> terms;
  for (const auto& x : samples) {
    double G = solve_subproblem(p, step, x).gap_value;
    double gap = objective(p, x) - region.F_bar;
    terms.push_back({x, G, gap > 0 ? std::pow(gap, q) : 0.0});
  }
  return assemble(Condition::BpGap, {{"q", q}, {"eps", step.eps}}, region, terms, Side::Lower,
                  opts, "G(x) >= mu (F - F_bar)^q");
}

EBCertificate certify_prox_pl(const CompositeProblem& p, const Region& band,
                              std::optional<double> mu_candidate,
                              const std::vector<Point>& samples) {
  if (!p.analytic.optimal_value) throw CapabilityError("proximal PL needs the optimal value");
  if (!(p.f.lipschitz > 0)) throw ArgumentError("proximal PL needs L > 0");
  require_samples(samples);
  const double Fstar = *p.analytic.optimal_value;
  const BregmanStep step = BregmanStep::constant(BregmanKernel::euclidean(p.dim), 1.0 / p.f.lipschitz);
  std::vector<Term> terms;
  for (const auto& x : samples) {
    // D_g(x, L)/2 equals the gap of the Euclidean step 1/L.
    double half_dg = solve_subproblem(p, step, x).gap_value;
    terms.push_back({x, half_dg, std::max(objective(p, x) - Fstar, 0.0)});
  }
  CertifyOptions opts;
  opts.candidate = mu_candidate;
  return assemble(Condition::ProxPl, {{"L", p.f.lipschitz}, {"F_star", Fstar}}, band, terms,
                  Side::Lower, opts, "D_g(x,L)/2 >= mu (F - F*)");
}

}  // namespace vbpg
