#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cvxpoly/polynomial.hpp"

namespace cvxpoly {

/// Where a moment vector came from. Interior-point solutions sit in the
/// relative interior of the optimal face, which maximizes the rank of the
/// moment matrix, so rank tests on them carry a caveat.
enum class MomentProvenance { kSupplied, kInteriorPointSolve };

/// Truncated pseudo-moment sequence y = (y_alpha), |alpha| <= 2 * order,
/// stored densely in graded-lex order.
class MomentVector {
 public:
  MomentVector(int n, int order, Eigen::VectorXd values,
               MomentProvenance provenance = MomentProvenance::kSupplied);

  /// Moments of the Dirac measure at x.
  static MomentVector dirac(std::span<const double> x, int order);
  /// Moments of sum_k weights[k] * delta_{points[k]}.
  static MomentVector atomic(const std::vector<std::vector<double>>& points,
                             std::span<const double> weights, int order);

  int num_vars() const { return n_; }
  int order() const { return order_; }
  const Eigen::VectorXd& values() const { return values_; }
  MomentProvenance provenance() const { return provenance_; }

  double y0() const { return values_(0); }
  double operator[](const Monomial& m) const;

  bool operator==(const MomentVector& other) const {
    return n_ == other.n_ && order_ == other.order_ && values_ == other.values_ &&
           provenance_ == other.provenance_;
  }

 private:
  int n_;
  int order_;
  Eigen::VectorXd values_;
  MomentProvenance provenance_;
};

/// L_y(p) = sum_alpha p_alpha y_alpha.
double riesz(const MomentVector& y, const Polynomial& p);

/// M_d(y)(alpha, beta) = y_{alpha+beta}, alpha, beta in N^n_d.
Eigen::MatrixXd moment_matrix(const MomentVector& y, int d);

/// M_d(g y)(alpha, beta) = sum_gamma g_gamma y_{alpha+beta+gamma}.
Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g,
                                  int d);

struct FlatnessReport {
  int rank_d = 0;
  int rank_lower = 0;  // rank of M_{d - shift}
  bool flat = false;
  /// Set when y came from an interior-point solve.
  bool interior_point_caveat = false;
};

/// Compares numeric_rank(M_d(y)) with numeric_rank(M_{d-shift}(y)).
FlatnessReport flatness(const MomentVector& y, int d, double tau = 1e-6,
                        int shift = 1);

/// (L_y(X_1), ..., L_y(X_n)); requires y_0 = 1 within 1e-9.
std::vector<double> mean_point(const MomentVector& y);

}  // namespace cvxpoly
