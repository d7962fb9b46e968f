#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cvxpoly {

// Raised when an input violates an operation's documented precondition
// (dimension mismatch, degree overflow, out-of-range index, ...).
class PreconditionFailure : public std::invalid_argument {
 public:
  explicit PreconditionFailure(const std::string& what)
      : std::invalid_argument(what) {}
};

// A function that was required to be convex is not; carries a point where
// the curvature is negative.
class NotConvex : public PreconditionFailure {
 public:
  NotConvex(const std::string& what, std::vector<double> witness)
      : PreconditionFailure(what), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const { return witness_; }

 private:
  std::vector<double> witness_;
};

// A numerically recovered certificate failed its reconstruction check.
class CertificateRejected : public std::runtime_error {
 public:
  CertificateRejected(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Malformed problem files and JSON artifacts.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A solve that could not deliver a usable answer (the status is kept in the
// message; statuses that are legitimate answers, such as infeasibility, are
// returned as values and never thrown).
class SolverFailure : public std::runtime_error {
 public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cvxpoly
