#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vbpg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: dimension mismatch, non-positive tolerances, unordered bounds.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Non-finite value inside a region where the function must be finite.
class DomainError : public Error {
 public:
  using Error::Error;
};

// NaN produced by an oracle. `term` names the offending piece ("f" or "g").
class NumericError : public Error {
 public:
  NumericError(std::string term, const std::string& what)
      : Error(what), term_(std::move(term)) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

// An operation needs an oracle the problem does not carry.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Step or kernel parameters outside the range where an inequality is claimed.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Hypotheses of a prediction are not met (e.g. mu <= rho).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class InnerSolverError : public Error {
 public:
  InnerSolverError(double residual, std::size_t iters, const std::string& what)
      : Error(what), residual_(residual), iters_(iters) {}
  double residual() const { return residual_; }
  std::size_t inner_iters() const { return iters_; }

 private:
  double residual_;
  std::size_t iters_;
};

// F_bar is not a strict lower value along the sequence being rated.
class TargetValueError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplingError : public Error {
 public:
  InsufficientSamplingError(std::size_t accepted, const std::string& what)
      : Error(what), accepted_(accepted) {}
  std::size_t accepted() const { return accepted_; }

 private:
  std::size_t accepted_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vbpg
