#pragma once

#include <memory>

#include "vbpg/problem.hpp"

namespace vbpg {

enum class KernelKind { Euclidean, DiagonalQuad, SpdQuad, General };

const char* to_string(KernelKind k);

// Strongly convex generator K with m ||x-y||^2 <= <dK(x)-dK(y), x-y> <= M ||x-y||^2.
class BregmanKernel {
 public:
  // K(x) = scale/2 ||x||^2
  static BregmanKernel euclidean(Index n, double scale = 1.0);
  // K(x) = 1/2 sum w_i x_i^2; m and M are the extreme weights.
  static BregmanKernel diagonal(const Point& weights);
  // K(x) = 1/2 x'Hx. Moduli come from the spectrum; declared bounds are
  // checked against it.
  static BregmanKernel spd(const Matrix& H, std::optional<double> m = std::nullopt,
                           std::optional<double> M = std::nullopt);
  static BregmanKernel general(Index n, std::function<double(const Point&)> eval,
                               std::function<Point(const Point&)> grad, double m, double M);

  KernelKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  double m() const { return m_; }
  double M() const { return M_; }
  bool is_diagonal() const {
    return kind_ == KernelKind::Euclidean || kind_ == KernelKind::DiagonalQuad;
  }
  // Diagonal weights (Euclidean and DiagonalQuad only).
  const Point& weights() const { return weights_; }
  // Matrix of an SpdQuad kernel.
  const Matrix& matrix() const { return *H_; }

  double eval(const Point& x) const;
  Point grad(const Point& x) const;

 private:
  KernelKind kind_ = KernelKind::Euclidean;
  Index dim_ = 0;
  double m_ = 1, M_ = 1;
  Point weights_;
  std::shared_ptr<const Matrix> H_;
  std::function<double(const Point&)> eval_;
  std::function<Point(const Point&)> grad_;
};

// D(x, y) = K(y) - K(x) - <dK(x), y - x>
double bregman_distance(const BregmanKernel& k, const Point& x, const Point& y);

struct KernelAuditReport {
  std::size_t n_samples = 0;
  std::size_t violations = 0;
  double worst_lower = 0;  // min over pairs of <dK(x)-dK(y), x-y>/||x-y||^2
  double worst_upper = 0;  // max over pairs of the same ratio
  bool passed() const { return violations == 0; }
};

KernelAuditReport audit_kernel(const BregmanKernel& k, const Box& box, std::size_t n_samples,
                               std::uint64_t seed);

}  // namespace vbpg
