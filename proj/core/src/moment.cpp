#include "cvxpoly/moment.hpp"

#include <cmath>
#include <string>

#include "cvxpoly/errors.hpp"
#include "cvxpoly/sdp.hpp"

namespace cvxpoly {

MomentVector::MomentVector(int n, int order, Eigen::VectorXd values,
                           MomentProvenance provenance)
    : n_(n), order_(order), values_(std::move(values)), provenance_(provenance) {
  if (n < 1) throw PreconditionFailure("MomentVector: n must be >= 1");
  if (order < 0) throw PreconditionFailure("MomentVector: negative order");
  const auto expected = basis_size(n, 2 * order);
  if (static_cast<std::size_t>(values_.size()) != expected) {
    throw PreconditionFailure("MomentVector: expected " + std::to_string(expected) +
                              " values for n=" + std::to_string(n) + ", order=" +
                              std::to_string(order) + ", got " +
                              std::to_string(values_.size()));
  }
}

MomentVector MomentVector::dirac(std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size());
  const auto basis = monomial_basis(n, 2 * order);
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = basis[i].eval(x);
  }
  return MomentVector(n, order, std::move(v));
}

MomentVector MomentVector::atomic(const std::vector<std::vector<double>>& points,
                                  std::span<const double> weights, int order) {
  if (points.empty() || points.size() != weights.size()) {
    throw PreconditionFailure("MomentVector::atomic: points/weights mismatch");
  }
  const int n = static_cast<int>(points.front().size());
  const auto basis = monomial_basis(n, 2 * order);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (static_cast<int>(points[k].size()) != n) {
      throw PreconditionFailure("MomentVector::atomic: inconsistent dimensions");
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) += weights[k] * basis[i].eval(points[k]);
    }
  }
  return MomentVector(n, order, std::move(v));
}

double MomentVector::operator[](const Monomial& m) const {
  if (m.num_vars() != n_ || m.degree() > 2 * order_) {
    throw PreconditionFailure("MomentVector: monomial " + m.to_string() +
                              " outside the stored range");
  }
  return values_(static_cast<Eigen::Index>(grlex_index(m)));
}

double riesz(const MomentVector& y, const Polynomial& p) {
  if (p.num_vars() != y.num_vars()) {
    throw PreconditionFailure("riesz: variable count mismatch");
  }
  if (p.degree() > 2 * y.order()) {
    throw PreconditionFailure("riesz: degree " + std::to_string(p.degree()) +
                              " exceeds 2*order = " + std::to_string(2 * y.order()));
  }
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * y[m];
  return s;
}

Eigen::MatrixXd moment_matrix(const MomentVector& y, int d) {
  if (d < 0 || d > y.order()) {
    throw PreconditionFailure("moment_matrix: order " + std::to_string(d) +
                              " exceeds moment order " + std::to_string(y.order()));
  }
  return localizing_matrix(y, Polynomial::constant(y.num_vars(), 1.0), d);
}

Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g,
                                  int d) {
  if (g.num_vars() != y.num_vars()) {
    throw PreconditionFailure("localizing_matrix: variable count mismatch");
  }
  if (d < 0 || 2 * d + g.degree() > 2 * y.order()) {
    throw PreconditionFailure("localizing_matrix: 2d + deg g exceeds 2*order");
  }
  const auto basis = monomial_basis(y.num_vars(), d);
  const auto s = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      const Monomial ab = basis[static_cast<std::size_t>(i)] *
                          basis[static_cast<std::size_t>(j)];
      double v = 0.0;
      for (const auto& [gamma, c] : g.terms()) v += c * y[ab * gamma];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

FlatnessReport flatness(const MomentVector& y, int d, double tau, int shift) {
  if (d < 1) throw PreconditionFailure("flatness: d must be >= 1");
  if (shift < 1 || shift > d) throw PreconditionFailure("flatness: bad shift");
  FlatnessReport r;
  r.rank_d = numeric_rank(moment_matrix(y, d), tau);
  r.rank_lower = numeric_rank(moment_matrix(y, d - shift), tau);
  r.flat = r.rank_d == r.rank_lower;
  r.interior_point_caveat = y.provenance() == MomentProvenance::kInteriorPointSolve;
  return r;
}

std::vector<double> mean_point(const MomentVector& y) {
  if (y.order() < 1) throw PreconditionFailure("mean_point: order must be >= 1");
  if (std::abs(y.y0() - 1.0) > 1e-9) {
    throw PreconditionFailure("mean_point: y_0 = " + std::to_string(y.y0()) +
                              " is not 1");
  }
  std::vector<double> x(static_cast<std::size_t>(y.num_vars()));
  for (int i = 0; i < y.num_vars(); ++i) {
    x[static_cast<std::size_t>(i)] = y[Monomial::variable(y.num_vars(), i)];
  }
  return x;
}

}  // namespace cvxpoly
