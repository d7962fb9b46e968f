#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvxpoly/moment.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sdp.hpp"

namespace cvxpoly {

/// p = z^T G z with z the monomial vector `basis` and G PSD.
struct SosWitness {
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  /// ||p - z^T G z||_1
  double residual = 0.0;

  /// z^T G z as a polynomial.
  Polynomial polynomial() const;
  double min_gram_eigenvalue() const;
  /// min eigenvalue >= -1e-7 and residual <= 1e-7 (1 + ||p||_1).
  bool valid_for(const Polynomial& p) const;

  bool operator==(const SosWitness& other) const;
};

/// Scalarized Hessian certificate: W^T Hess f(X) W is SOS in (X, W), with the
/// first n variables X and the last n variables W.
struct MatrixSosWitness {
  int n = 0;
  SosWitness scalarized;
};

struct SosOptions {
  SdpOptions sdp;
  /// Acceptance thresholds for a numerical Gram certificate.
  double eigenvalue_tol = 1e-7;
  double residual_tol = 1e-7;
};

struct SosResult {
  bool is_sos = false;
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::optional<SosWitness> witness;
  /// When the Gram SDP is infeasible: a linear functional l on the products
  /// of the basis (values at `functional_support`) whose moment matrix is
  /// PSD and with l(p) = -1.
  std::vector<Monomial> functional_support;
  std::optional<Eigen::VectorXd> separating_functional;
  std::string message;
};

/// Searches for a Gram matrix over the full half-degree basis.
SosResult sos_decompose(const Polynomial& p, const SosOptions& options = {});
/// Same, over a caller-supplied monomial basis.
SosResult sos_decompose(const Polynomial& p, const std::vector<Monomial>& basis,
                        const SosOptions& options = {});

/// W^T Hess f(X) W in 2n variables.
Polynomial hessian_form(const Polynomial& f);

struct SosConvexityResult {
  bool sos_convex = false;
  std::optional<MatrixSosWitness> witness;
  SdpStatus status = SdpStatus::kOptimal;
  std::string reason;
};

/// Decides whether Hess f = L L^T for a polynomial matrix L, by checking that
/// W^T Hess f(X) W is SOS over the basis {W_i X^alpha}.
SosConvexityResult is_sos_convex(const Polynomial& f, const SosOptions& options = {});

struct JensenReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Checks L_y(f) >= f(L_y(X)) for an SOS-convex f and a pseudo-moment vector
/// y with PSD moment matrix and y_0 = 1. Throws PreconditionFailure naming
/// the violated precondition.
JensenReport jensen_check(const Polynomial& f, const MomentVector& y,
                          const SosOptions& options = {});
/// Variant with a precomputed SOS-convexity certificate of f.
JensenReport jensen_check(const Polynomial& f, const MatrixSosWitness& witness,
                          const MomentVector& y);

/// Checks L_y(f(g)) >= f(L_y(g)) for a convex univariate f. Throws NotConvex
/// (with a point of negative curvature) if f'' is not nonnegative.
JensenReport jensen_composed_check(const Polynomial& f_uni, const Polynomial& g,
                                   const MomentVector& y,
                                   const SosOptions& options = {});

}  // namespace cvxpoly
