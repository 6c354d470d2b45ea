#include "vbpg/terms.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "vbpg/errors.hpp"

namespace vbpg {

namespace {

double sign(double v) { return (v > 0) - (v < 0); }

void require_weights(const Point& w) {
  if (!(w.array() > 0).all()) throw ArgumentError("prox weights must be positive");
}

}  // namespace

double soft_threshold(double v, double tau) {
  return sign(v) * std::max(std::abs(v) - tau, 0.0);
}

double mcp_value(double t, double lambda, double b) {
  double a = std::abs(t);
  if (a <= lambda * b) return lambda * a - t * t / (2.0 * b);
  return 0.5 * lambda * lambda * b;
}

SmoothTerm quadratic_term(const Matrix& Q, const Point& b, double c,
                          std::optional<double> lipschitz) {
  if (Q.rows() != Q.cols() || Q.rows() != b.size())
    throw ArgumentError("quadratic_term: shape mismatch");
  if (!Q.isApprox(Q.transpose(), 1e-12)) throw ArgumentError("quadratic_term: Q must be symmetric");
  SmoothTerm f;
  f.eval = [Q, b, c](const Point& x) { return 0.5 * x.dot(Q * x) - b.dot(x) + c; };
  f.grad = [Q, b](const Point& x) -> Point { return Q * x - b; };
  if (lipschitz) {
    f.lipschitz = *lipschitz;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    f.lipschitz = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  f.quadratic = QuadraticForm{Q, b, c};
  f.name = "quadratic";
  return f;
}

SmoothTerm least_squares_term(const Matrix& A, const Point& y, double lipschitz) {
  if (A.rows() != y.size()) throw ArgumentError("least_squares_term: shape mismatch");
  SmoothTerm f;
  f.eval = [A, y](const Point& x) { return 0.5 * (A * x - y).squaredNorm(); };
  f.grad = [A, y](const Point& x) -> Point { return A.transpose() * (A * x - y); };
  f.lipschitz = lipschitz;
  f.quadratic = QuadraticForm{A.transpose() * A, A.transpose() * y, 0.5 * y.squaredNorm()};
  f.name = "least_squares";
  return f;
}

NonsmoothTerm zero_term() {
  NonsmoothTerm g;
  g.eval = [](const Point&) { return 0.0; };
  g.scaled_prox = [](const Point& c, const Point& s, const Point& w) -> Point {
    require_weights(w);
    return c - s.cwiseQuotient(w);
  };
  g.semiconvex_rho = 0.0;
  g.min_norm_subgrad = [](const Point&, const Point& s) { return s.norm(); };
  g.is_zero = true;
  g.separable = true;
  g.name = "zero";
  return g;
}

NonsmoothTerm l1_term(double lambda) {
  if (!(lambda >= 0)) throw ArgumentError("l1_term: lambda must be nonnegative");
  NonsmoothTerm g;
  g.eval = [lambda](const Point& x) { return lambda * x.lpNorm<1>(); };
  g.scaled_prox = [lambda](const Point& c, const Point& s, const Point& w) -> Point {
    require_weights(w);
    Point y(c.size());
    for (Index i = 0; i < c.size(); ++i) y[i] = soft_threshold(c[i] - s[i] / w[i], lambda / w[i]);
    return y;
  };
  g.semiconvex_rho = 0.0;
  g.min_norm_subgrad = [lambda](const Point& x, const Point& s) {
    double acc = 0;
    for (Index i = 0; i < x.size(); ++i) {
      double r = x[i] == 0 ? std::max(std::abs(s[i]) - lambda, 0.0)
                           : s[i] + lambda * sign(x[i]);
      acc += r * r;
    }
    return std::sqrt(acc);
  };
  g.separable = true;
  g.name = "l1";
  return g;
}

NonsmoothTerm box_indicator_term(const Point& lower, const Point& upper) {
  if (lower.size() != upper.size() || !(lower.array() <= upper.array()).all())
    throw ArgumentError("box_indicator_term: malformed bounds");
  NonsmoothTerm g;
  g.eval = [lower, upper](const Point& x) {
    bool in = ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
    return in ? 0.0 : kInf;
  };
  g.scaled_prox = [lower, upper](const Point& c, const Point& s, const Point& w) -> Point {
    require_weights(w);
    return (c - s.cwiseQuotient(w)).cwiseMax(lower).cwiseMin(upper);
  };
  g.semiconvex_rho = 0.0;
  g.min_norm_subgrad = [lower, upper](const Point& x, const Point& s) {
    double acc = 0;
    for (Index i = 0; i < x.size(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return kInf;
      double r;
      if (lower[i] == upper[i]) r = 0;
      else if (x[i] == lower[i]) r = std::max(s[i], 0.0);
      else if (x[i] == upper[i]) r = std::max(-s[i], 0.0);
      else r = s[i];
      acc += r * r;
    }
    return std::sqrt(acc);
  };
  g.separable = true;
  g.name = "indicator_box";
  return g;
}

NonsmoothTerm mcp_term(double lambda, double b) {
  if (!(lambda > 0) || !(b > 0)) throw ArgumentError("mcp_term: lambda and b must be positive");
  NonsmoothTerm g;
  g.eval = [lambda, b](const Point& x) {
    double acc = 0;
    for (Index i = 0; i < x.size(); ++i) acc += mcp_value(x[i], lambda, b);
    return acc;
  };
  g.scaled_prox = [lambda, b](const Point& c, const Point& s, const Point& w) -> Point {
    require_weights(w);
    const double knot = lambda * b;
    Point y(c.size());
    for (Index i = 0; i < c.size(); ++i) {
      const double wi = w[i];
      const double z = c[i] - s[i] / wi;
      auto obj = [&](double t) { return mcp_value(t, lambda, b) + 0.5 * wi * (t - z) * (t - z); };
      std::array<double, 5> cand{};
      std::size_t nc = 0;
      if (wi > 1.0 / b) {
        double t = sign(z) * std::max(wi * std::abs(z) - lambda, 0.0) / (wi - 1.0 / b);
        cand[nc++] = std::clamp(t, -knot, knot);
      } else {
        cand[nc++] = 0.0;
        cand[nc++] = knot;
        cand[nc++] = -knot;
      }
      cand[nc++] = std::abs(z) >= knot ? z : (z >= 0 ? knot : -knot);
      double best = cand[0], best_v = obj(cand[0]);
      for (std::size_t k = 1; k < nc; ++k) {
        double v = obj(cand[k]);
        if (v < best_v) {
          best_v = v;
          best = cand[k];
        }
      }
      y[i] = best;
    }
    return y;
  };
  g.semiconvex_rho = 1.0 / b;
  g.min_norm_subgrad = [lambda, b](const Point& x, const Point& s) {
    double acc = 0;
    for (Index i = 0; i < x.size(); ++i) {
      double a = std::abs(x[i]), r;
      if (x[i] == 0) r = std::max(std::abs(s[i]) - lambda, 0.0);
      else if (a <= lambda * b) r = s[i] + sign(x[i]) * (lambda - a / b);
      else r = s[i];
      acc += r * r;
    }
    return std::sqrt(acc);
  };
  g.separable = true;
  g.name = "mcp";
  return g;
}

double power_iteration_lambda_max(const Matrix& S, double tol, int max_iters) {
  if (S.rows() != S.cols() || S.rows() == 0) throw ArgumentError("power iteration needs a square matrix");
  const Index n = S.rows();
  Point v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(n);
  v.normalize();
  double lam = v.dot(S * v);
  for (int it = 0; it < max_iters; ++it) {
    Point w = S * v;
    double nw = w.norm();
    if (nw == 0) return 0.0;
    v = w / nw;
    double next = v.dot(S * v);
    if (std::abs(next - lam) <= tol * std::abs(next)) return next;
    lam = next;
  }
  return lam;
}

}  // namespace vbpg
