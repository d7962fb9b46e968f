#include "cvxpoly/sos.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Polynomial SosWitness::polynomial() const {
  if (basis.empty()) return Polynomial();
  Polynomial p(basis.front().num_vars());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      p.add_term(basis[i] * basis[j],
                 gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return p;
}

double SosWitness::min_gram_eigenvalue() const { return min_eigenvalue(gram); }

bool SosWitness::valid_for(const Polynomial& p) const {
  return min_gram_eigenvalue() >= -1e-7 && residual <= 1e-7 * (1.0 + p.l1_norm());
}

bool SosWitness::operator==(const SosWitness& other) const {
  return basis == other.basis && gram == other.gram && residual == other.residual;
}

SosResult sos_decompose(const Polynomial& p, const SosOptions& options) {
  if (p.degree() % 2 != 0) {
    SosResult r;
    r.status = SdpStatus::kInfeasible;
    r.message = "odd degree " + std::to_string(p.degree()) + ": never a sum of squares";
    return r;
  }
  const int n = std::max(1, p.num_vars());
  return sos_decompose(p, monomial_basis(n, p.degree() / 2), options);
}

SosResult sos_decompose(const Polynomial& p, const std::vector<Monomial>& basis,
                        const SosOptions& options) {
  SosResult result;
  if (basis.empty()) throw PreconditionFailure("sos_decompose: empty basis");
  if (p.degree() % 2 != 0) {
    result.status = SdpStatus::kInfeasible;
    result.message = "odd degree " + std::to_string(p.degree()) +
                     ": never a sum of squares";
    return result;
  }
  const auto s = static_cast<Eigen::Index>(basis.size());
  if (p.is_zero()) {
    result.is_sos = true;
    result.status = SdpStatus::kOptimal;
    result.witness = SosWitness{basis, MatrixXd::Zero(s, s), 0.0};
    return result;
  }

  // One equality per monomial in supp(p) or in the basis products.
  std::map<Monomial, std::vector<std::pair<Eigen::Index, Eigen::Index>>, GrlexLess> cells;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      cells[basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(j)]]
          .push_back({i, j});
    }
  }
  for (const auto& [m, c] : p.terms()) {
    if (!cells.contains(m)) {
      result.status = SdpStatus::kInfeasible;
      result.message = "term " + m.to_string() + " is not a product of basis monomials";
      return result;
    }
  }

  SdpProblem sdp;
  sdp.block_sizes = {static_cast<int>(s)};
  sdp.objective = {MatrixXd::Identity(s, s)};
  std::vector<Monomial> support;
  for (const auto& [m, pairs] : cells) {
    MatrixXd a = MatrixXd::Zero(s, s);
    for (const auto& [i, j] : pairs) {
      if (i == j) {
        a(i, i) = 1.0;
      } else {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
    sdp.constraints.push_back({{{0, std::move(a)}}, p.coeff(m)});
    support.push_back(m);
  }

  const SdpSolution sol = solve_sdp(sdp, options.sdp);
  result.status = sol.status;
  if (sol.status == SdpStatus::kInfeasible) {
    result.message = "Gram SDP infeasible";
    result.functional_support = support;
    result.separating_functional = -sol.dual_ray;
    return result;
  }

  SosWitness w;
  w.basis = basis;
  w.gram = 0.5 * (sol.primal[0] + sol.primal[0].transpose());
  w.residual = (p - w.polynomial()).l1_norm();
  const bool psd = w.min_gram_eigenvalue() >= -options.eigenvalue_tol;
  const bool matches = w.residual <= options.residual_tol * (1.0 + p.l1_norm());
  result.is_sos = psd && matches &&
                  (sol.status == SdpStatus::kOptimal ||
                   sol.status == SdpStatus::kMaxIterations ||
                   sol.status == SdpStatus::kNumericalFailure);
  if (result.is_sos) {
    result.message = sol.status == SdpStatus::kOptimal
                         ? "Gram certificate found"
                         : "Gram certificate accepted from a non-converged solve (" +
                               to_string(sol.status) + ")";
  } else {
    result.message = "no Gram certificate: solver status " + to_string(sol.status) +
                     ", residual " + std::to_string(w.residual);
  }
  result.witness = std::move(w);
  return result;
}

Polynomial hessian_form(const Polynomial& f) {
  const int n = f.num_vars();
  const Derivatives d = differentiate(f);
  Polynomial q(2 * n);
  for (int i = 0; i < n; ++i) {
    const Polynomial wi = Polynomial::variable(2 * n, n + i);
    for (int j = 0; j < n; ++j) {
      const Polynomial wj = Polynomial::variable(2 * n, n + j);
      q += d.hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
               .embed(2 * n, 0) *
           wi * wj;
    }
  }
  return q;
}

SosConvexityResult is_sos_convex(const Polynomial& f, const SosOptions& options) {
  SosConvexityResult out;
  const int n = f.num_vars();
  const int deg = f.degree();
  if (deg >= 3 && deg % 2 != 0) {
    out.status = SdpStatus::kInfeasible;
    out.reason = "odd degree " + std::to_string(deg) + ": Hessian cannot be PSD everywhere";
    return out;
  }
  const Polynomial q = hessian_form(f);
  // Basis W_i X^alpha with |alpha| <= (deg f - 2) / 2.
  std::vector<Monomial> basis;
  const int half = std::max(0, (deg - 2) / 2);
  for (int i = 0; i < n; ++i) {
    for (const auto& xa : monomial_basis(n, half)) {
      std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
      for (int k = 0; k < n; ++k) e[static_cast<std::size_t>(k)] = xa[k];
      e[static_cast<std::size_t>(n + i)] = 1;
      basis.emplace_back(std::move(e));
    }
  }
  std::sort(basis.begin(), basis.end(), GrlexLess{});
  const SosResult r = sos_decompose(q, basis, options);
  out.status = r.status;
  if (r.is_sos) {
    out.sos_convex = true;
    out.witness = MatrixSosWitness{n, *r.witness};
    out.reason = "W^T Hess f W is SOS";
  } else {
    out.reason = r.message;
  }
  return out;
}

namespace {

void require_admissible(const MomentVector& y, int needed_degree,
                        const char* who) {
  if (std::abs(y.y0() - 1.0) > 1e-9) {
    throw PreconditionFailure(std::string(who) + ": precondition y_0 = 1 violated (y_0 = " +
                              std::to_string(y.y0()) + ")");
  }
  if (needed_degree > 2 * y.order()) {
    throw PreconditionFailure(std::string(who) + ": precondition deg <= 2*order(y) violated (" +
                              std::to_string(needed_degree) + " > " +
                              std::to_string(2 * y.order()) + ")");
  }
  const MatrixXd m = moment_matrix(y, y.order());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double scale = std::max(1.0, es.eigenvalues()(es.eigenvalues().size() - 1));
  if (lmin < -1e-7 * scale) {
    throw PreconditionFailure(std::string(who) +
                              ": precondition M_d(y) PSD violated (min eigenvalue " +
                              std::to_string(lmin) + ")");
  }
}

bool jensen_holds(double lhs, double rhs) {
  return lhs >= rhs - 1e-7 * (1.0 + std::abs(rhs));
}

}  // namespace

JensenReport jensen_check(const Polynomial& f, const MomentVector& y,
                          const SosOptions& options) {
  if (f.num_vars() != y.num_vars()) {
    throw PreconditionFailure("jensen_check: variable count mismatch");
  }
  const SosConvexityResult sc = is_sos_convex(f, options);
  if (!sc.sos_convex) {
    throw PreconditionFailure("jensen_check: precondition f SOS-convex violated (" +
                              sc.reason + ")");
  }
  return jensen_check(f, *sc.witness, y);
}

JensenReport jensen_check(const Polynomial& f, const MatrixSosWitness& witness,
                          const MomentVector& y) {
  if (f.num_vars() != y.num_vars() || witness.n != f.num_vars()) {
    throw PreconditionFailure("jensen_check: variable count mismatch");
  }
  require_admissible(y, f.degree(), "jensen_check");
  JensenReport r;
  r.lhs = riesz(y, f);
  r.rhs = f.eval(mean_point(y));
  r.holds = jensen_holds(r.lhs, r.rhs);
  return r;
}

namespace {

// A point where the univariate polynomial h is most negative on a grid
// covering all its real roots.
double most_negative_point(const Polynomial& h) {
  const int deg = h.degree();
  double bound = 1.0;
  if (deg > 0) {
    const double lead = std::abs(h.coeff(Monomial(std::vector<int>{deg})));
    for (const auto& [m, c] : h.terms()) {
      if (m.degree() < deg) bound = std::max(bound, 1.0 + std::abs(c) / lead);
    }
  }
  bound += 1.0;
  double best_t = 0.0;
  double best_v = h.eval(std::vector<double>{0.0});
  const int steps = 20000;
  for (int k = 0; k <= steps; ++k) {
    const double t = -bound + 2.0 * bound * k / steps;
    const double v = h.eval(std::vector<double>{t});
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

JensenReport jensen_composed_check(const Polynomial& f_uni, const Polynomial& g,
                                   const MomentVector& y, const SosOptions& options) {
  if (f_uni.num_vars() != 1) {
    throw PreconditionFailure("jensen_composed_check: outer function must be univariate");
  }
  if (g.num_vars() != y.num_vars()) {
    throw PreconditionFailure("jensen_composed_check: variable count mismatch");
  }
  const Polynomial second = f_uni.partial(0).partial(0);
  if (!second.is_zero()) {
    bool convex = false;
    if (second.degree() % 2 == 0) convex = sos_decompose(second, options).is_sos;
    if (!convex) {
      const double t = most_negative_point(second);
      throw NotConvex("jensen_composed_check: outer function is not convex (f''(" +
                          std::to_string(t) + ") = " +
                          std::to_string(second.eval(std::vector<double>{t})) + ")",
                      {t});
    }
  }
  const std::vector<Polynomial> images{g};
  const Polynomial composed = f_uni.compose(images);
  require_admissible(y, composed.degree(), "jensen_composed_check");
  JensenReport r;
  r.lhs = riesz(y, composed);
  r.rhs = f_uni.eval(std::vector<double>{riesz(y, g)});
  r.holds = jensen_holds(r.lhs, r.rhs);
  return r;
}

}  // namespace cvxpoly
