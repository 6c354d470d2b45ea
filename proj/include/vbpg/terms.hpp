#pragma once

#include "vbpg/problem.hpp"

namespace vbpg {

// 0.5 x'Qx - b'x + c. L defaults to the largest eigenvalue magnitude of Q.
SmoothTerm quadratic_term(const Matrix& Q, const Point& b, double c = 0.0,
                          std::optional<double> lipschitz = std::nullopt);

// 0.5 ||Ax - y||^2 with a caller-declared Lipschitz constant.
SmoothTerm least_squares_term(const Matrix& A, const Point& y, double lipschitz);

NonsmoothTerm zero_term();
NonsmoothTerm l1_term(double lambda);
NonsmoothTerm box_indicator_term(const Point& lower, const Point& upper);
// Minimax concave penalty, applied coordinatewise. rho = 1/b.
NonsmoothTerm mcp_term(double lambda, double b);

double soft_threshold(double v, double tau);
double mcp_value(double t, double lambda, double b);

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_lambda_max(const Matrix& S, double tol = 1e-14,
                                  int max_iters = 100000);

}  // namespace vbpg
