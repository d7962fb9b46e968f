#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvxpoly {

using BlockMatrix = std::vector<Eigen::MatrixXd>;

/// One nonzero block of a constraint matrix A_i.
struct SdpBlockEntry {
  int block = 0;
  Eigen::MatrixXd matrix;
};

struct SdpConstraint {
  std::vector<SdpBlockEntry> blocks;  // blocks not listed are zero
  double rhs = 0.0;
};

/// Standard-form semidefinite program
///
///   minimize   <C, X>
///   subject to <A_i, X> = b_i,  i = 1..m,
///              X = diag(X_1, ..., X_k) with every X_j PSD,
///
/// whose dual is  maximize b^T y  subject to  sum_i y_i A_i + Z = C, Z PSD.
struct SdpProblem {
  std::vector<int> block_sizes;
  BlockMatrix objective;
  std::vector<SdpConstraint> constraints;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int total_dimension() const;

  /// Throws PreconditionFailure on inconsistent block sizes or coefficient
  /// matrices that are not symmetric to 1e-12.
  void validate(int max_block_size = 512) const;
};

enum class SdpStatus {
  kOptimal,
  kInfeasible,  // primal infeasible (dual improving ray found)
  kUnbounded,   // primal unbounded (dual infeasible)
  kMaxIterations,
  kNumericalFailure,
};

std::string to_string(SdpStatus status);

struct SdpOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200;
  int max_block_size = 512;
  // Ray detection: a dual (primal) improving direction is accepted once its
  // normalized residual drops below this value.
  double infeasibility_tol = 1e-8;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  BlockMatrix primal;  // X
  Eigen::VectorXd dual;  // y
  BlockMatrix slack;  // Z
  double primal_value = 0.0;  // <C, X>
  double dual_value = 0.0;    // b^T y
  /// |primal_value - dual_value| / (1 + |primal_value|)
  double gap = 0.0;
  double primal_residual = 0.0;  // ||A(X) - b|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||C - A^T y - Z||_F / (1 + ||C||_F)
  double complementarity = 0.0;  // <X, Z> / (1 + |primal_value|)
  int iterations = 0;
  /// Normalized improving ray when status is kInfeasible (a y with
  /// -A^T y PSD and b^T y = 1) or kUnbounded (an X PSD with A(X) = 0 and
  /// <C, X> = -1). Empty otherwise.
  Eigen::VectorXd dual_ray;
  BlockMatrix primal_ray;
  std::string message;
};

/// Primal-dual path-following interior-point method with Nesterov-Todd
/// scaling and a Mehrotra predictor-corrector, on a dense Schur complement.
/// Starts from an infeasible point; infeasibility is reported through the
/// status, never by throwing.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Smallest eigenvalue of a symmetric matrix. Throws if `m` is not
/// symmetric to 1e-9 (relative to its largest entry).
double min_eigenvalue(const Eigen::MatrixXd& m);

/// Number of eigenvalues above tau * lambda_max. Throws if `m` is
/// indefinite beyond 1e-6 * ||m||.
int numeric_rank(const Eigen::MatrixXd& m, double tau = 1e-6);

/// <A, B> over all blocks.
double inner(const BlockMatrix& a, const BlockMatrix& b);

/// Writes the problem in sparse SDPA format. The SDPA dual form
/// max <F0, Y> s.t. <F_i, Y> = c_i is matched by F0 = -C, F_i = A_i, c = b,
/// so the SDPA objective value is the negative of ours.
void write_sdpa(const SdpProblem& problem, std::ostream& out);

}  // namespace cvxpoly
