#include "vbpg/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "vbpg/errors.hpp"

namespace vbpg {

const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Euclidean: return "euclidean";
    case KernelKind::DiagonalQuad: return "diagonal";
    case KernelKind::SpdQuad: return "spd";
    case KernelKind::General: return "general";
  }
  return "unknown";
}

BregmanKernel BregmanKernel::euclidean(Index n, double scale) {
  if (n < 1) throw ArgumentError("kernel dimension must be positive");
  if (!(scale > 0) || !std::isfinite(scale)) throw ArgumentError("euclidean kernel scale must be positive");
  BregmanKernel k;
  k.kind_ = KernelKind::Euclidean;
  k.dim_ = n;
  k.m_ = k.M_ = scale;
  k.weights_ = Point::Constant(n, scale);
  return k;
}

BregmanKernel BregmanKernel::diagonal(const Point& weights) {
  if (weights.size() < 1) throw ArgumentError("kernel dimension must be positive");
  if (!weights.allFinite() || !(weights.array() > 0).all())
    throw ArgumentError("diagonal kernel weights must be positive and finite");
  BregmanKernel k;
  k.kind_ = KernelKind::DiagonalQuad;
  k.dim_ = weights.size();
  k.weights_ = weights;
  k.m_ = weights.minCoeff();
  k.M_ = weights.maxCoeff();
  return k;
}

BregmanKernel BregmanKernel::spd(const Matrix& H, std::optional<double> m, std::optional<double> M) {
  if (H.rows() != H.cols() || H.rows() < 1) throw ArgumentError("spd kernel needs a square matrix");
  if (!H.allFinite() || !H.isApprox(H.transpose(), 1e-12))
    throw ArgumentError("spd kernel matrix must be finite and symmetric");
  BregmanKernel k;
  k.kind_ = KernelKind::SpdQuad;
  k.dim_ = H.rows();
  k.H_ = std::make_shared<const Matrix>(0.5 * (H + H.transpose()));
  if (k.dim_ <= 200 || !m || !M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(*k.H_, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0)) throw ArgumentError("spd kernel matrix is not positive definite");
    double tol = 1e-12 * hi;
    if (m && *m > lo + tol) throw ArgumentError("declared m exceeds the smallest eigenvalue");
    if (M && *M < hi - tol) throw ArgumentError("declared M is below the largest eigenvalue");
    k.m_ = m.value_or(lo);
    k.M_ = M.value_or(hi);
  } else {
    k.m_ = *m;
    k.M_ = *M;
  }
  if (!(k.m_ > 0) || k.M_ < k.m_) throw ArgumentError("spd kernel moduli must satisfy 0 < m <= M");
  return k;
}

BregmanKernel BregmanKernel::general(Index n, std::function<double(const Point&)> eval,
                                     std::function<Point(const Point&)> grad, double m, double M) {
  if (n < 1) throw ArgumentError("kernel dimension must be positive");
  if (!eval || !grad) throw ArgumentError("general kernel needs value and gradient");
  if (!(m > 0) || !(M >= m)) throw ArgumentError("kernel moduli must satisfy 0 < m <= M");
  BregmanKernel k;
  k.kind_ = KernelKind::General;
  k.dim_ = n;
  k.m_ = m;
  k.M_ = M;
  k.eval_ = std::move(eval);
  k.grad_ = std::move(grad);
  return k;
}

double BregmanKernel::eval(const Point& x) const {
  switch (kind_) {
    case KernelKind::Euclidean:
    case KernelKind::DiagonalQuad: return 0.5 * x.cwiseProduct(weights_).dot(x);
    case KernelKind::SpdQuad: return 0.5 * x.dot(*H_ * x);
    case KernelKind::General: return eval_(x);
  }
  return 0;
}

Point BregmanKernel::grad(const Point& x) const {
  switch (kind_) {
    case KernelKind::Euclidean:
    case KernelKind::DiagonalQuad: return x.cwiseProduct(weights_);
    case KernelKind::SpdQuad: return *H_ * x;
    case KernelKind::General: return grad_(x);
  }
  return x;
}

double bregman_distance(const BregmanKernel& k, const Point& x, const Point& y) {
  if (x.size() != k.dim() || y.size() != k.dim())
    throw ArgumentError("bregman_distance: dimension mismatch");
  Point d = y - x;
  switch (k.kind()) {
    case KernelKind::Euclidean:
    case KernelKind::DiagonalQuad: return 0.5 * d.cwiseProduct(k.weights()).dot(d);
    case KernelKind::SpdQuad: return 0.5 * d.dot(k.matrix() * d);
    case KernelKind::General: break;
  }
  double v = k.eval(y) - k.eval(x) - k.grad(x).dot(d);
  return std::max(v, 0.0);
}

KernelAuditReport audit_kernel(const BregmanKernel& k, const Box& box, std::size_t n_samples,
                               std::uint64_t seed) {
  if (box.dim() != k.dim()) throw ArgumentError("audit_kernel: box dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    Point x(box.dim());
    for (Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
    return x;
  };
  KernelAuditReport rep;
  rep.n_samples = n_samples;
  rep.worst_lower = kInf;
  rep.worst_upper = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Point x = draw(), y = draw();
    double nn = (x - y).squaredNorm();
    if (nn == 0) continue;
    double r = (k.grad(x) - k.grad(y)).dot(x - y) / nn;
    rep.worst_lower = std::min(rep.worst_lower, r);
    rep.worst_upper = std::max(rep.worst_upper, r);
    double tol = 1e-9 * (1 + k.M());
    if (r < k.m() - tol || r > k.M() + tol) ++rep.violations;
  }
  return rep;
}

}  // namespace vbpg
