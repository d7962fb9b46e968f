#pragma once

// Reference computations used by the tests. None of them call into the
// solver code paths they are used to check.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cvxpoly/moment.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sdp.hpp"

namespace oracle {

using Point = std::vector<double>;

struct GridResult {
  double value = 0.0;
  Point point;
  long evaluated = 0;
};

/// Minimizes f over {x in box : g_j(x) >= 0} for n = 2 on a grid of step h,
/// then polishes by pattern search on grids 20x, 400x and 8000x finer.
GridResult grid_minimize(const cvxpoly::Polynomial& f, const cvxpoly::SemialgebraicSet& k,
                         double lo, double hi, double h);

/// A parametrized curve x(s), s in [lo, hi].
struct Arc {
  std::function<Point(double)> at;
  double lo = 0.0;
  double hi = 1.0;
};

/// Minimizes f over the feasible parts of the given arcs. When f is linear,
/// K is compact and convex, and the arcs cover its boundary, this is the
/// minimum over K. Each arc is sampled densely; the best sample is refined by
/// golden-section search inside its feasible bracket.
GridResult boundary_minimize(const cvxpoly::Polynomial& f, const cvxpoly::SemialgebraicSet& k,
                             const std::vector<Arc>& arcs, int samples = 200000);

/// Boundary arcs of {x1 x2 >= 1/4} cut by the disk of radius sqrt(1/2)
/// centred at (1/2, 1/2): the full circle and the hyperbola branch x1 > 0.
std::vector<Arc> hyperbola_disk_arcs();

/// Strictly feasible SDP pair built from a known interior primal X0, dual
/// (y0, Z0) and random symmetric A_i.
struct RandomSdp {
  cvxpoly::SdpProblem problem;
  cvxpoly::BlockMatrix x0;
  Eigen::VectorXd y0;
};
RandomSdp random_sdp(std::mt19937_64& rng, int blocks, int max_block, int m);

struct KktResiduals {
  double primal = 0.0;      // ||A(X) - b|| / (1 + ||b||)
  double dual = 0.0;        // ||C - A^T y - Z|| / (1 + ||C||)
  double gap = 0.0;         // |<C,X> - b^T y| / (1 + |<C,X>|)
  double min_eig_x = 0.0;   // over blocks
  double min_eig_z = 0.0;
  double primal_value = 0.0;
  double dual_value = 0.0;
};
/// Recomputes every optimality quantity from the raw data.
KktResiduals kkt(const cvxpoly::SdpProblem& p, const cvxpoly::BlockMatrix& x,
                 const Eigen::VectorXd& y, const cvxpoly::BlockMatrix& z);

/// Random SOS-convex polynomial of degree <= 4 in n variables: a positive
/// combination of (a^T x + b)^4, (a^T x + b)^2 and x_i^4 terms.
cvxpoly::Polynomial random_sos_convex(std::mt19937_64& rng, int n, int degree);

/// Pseudo-moment vector of the given order with y_0 = 1 and PSD M_order(y):
/// moments of a random atomic measure pushed along a random direction as far
/// as M_order stays PSD (so generically not a measure's moments).
cvxpoly::MomentVector random_admissible_moments(std::mt19937_64& rng, int n, int order);

/// Smallest eigenvalue with a symmetric eigensolver.
double min_eig(const Eigen::MatrixXd& m);

/// Moment matrix built directly from the definition y_{alpha+beta}.
Eigen::MatrixXd moment_matrix_direct(const cvxpoly::MomentVector& y, int d);

}  // namespace oracle
