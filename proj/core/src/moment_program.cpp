#include "cvxpoly/moment_program.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MomentProgram::MomentProgram(int n, int order)
    : n_(n), order_(order), objective_(n) {
  if (n < 1) throw PreconditionFailure("MomentProgram: n must be >= 1");
  if (order < 0) throw PreconditionFailure("MomentProgram: negative order");
}

void MomentProgram::check_degree(const std::string& what, int degree) const {
  if (degree > 2 * order_) {
    throw PreconditionFailure(what + ": degree " + std::to_string(degree) +
                              " exceeds 2*order = " + std::to_string(2 * order_));
  }
}

void MomentProgram::minimize(const Polynomial& f) {
  if (f.num_vars() != n_) throw PreconditionFailure("minimize: variable count mismatch");
  check_degree("objective", f.degree());
  objective_ = f;
}

int MomentProgram::add_psd_block(const std::string& label, const Polynomial& g,
                                 int d) {
  if (g.num_vars() != n_) throw PreconditionFailure(label + ": variable count mismatch");
  if (d < 0) throw PreconditionFailure(label + ": negative order");
  check_degree(label, 2 * d + g.degree());
  MomentBlock b;
  b.label = label;
  b.localizer = g;
  b.order = d;
  b.kind = MomentBlockKind::kPsd;
  b.size = static_cast<int>(basis_size(n_, d));
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

int MomentProgram::add_scalar_inequality(const std::string& label,
                                         const Polynomial& g) {
  if (g.num_vars() != n_) throw PreconditionFailure(label + ": variable count mismatch");
  check_degree(label, g.degree());
  MomentBlock b;
  b.label = label;
  b.localizer = g;
  b.order = 0;
  b.kind = MomentBlockKind::kScalar;
  b.size = 1;
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

void MomentProgram::add_zero_block(const std::string& label, const Polynomial& g,
                                   int d) {
  if (g.num_vars() != n_) throw PreconditionFailure(label + ": variable count mismatch");
  if (d < 0) throw PreconditionFailure(label + ": negative order");
  check_degree(label, 2 * d + g.degree());
  zero_blocks_.push_back({label, g, d});
}

void MomentProgram::add_equality(const std::string& label, const Polynomial& p,
                                 double value) {
  if (p.num_vars() != n_) throw PreconditionFailure(label + ": variable count mismatch");
  check_degree(label, p.degree());
  equalities_.push_back({label, p, value});
}

int MomentProgram::equality_row_count() const {
  int rows = 1;
  for (const auto& z : zero_blocks_) {
    const int s = static_cast<int>(basis_size(n_, z.order));
    rows += s * (s + 1) / 2;
  }
  return rows + static_cast<int>(equalities_.size());
}

namespace {

struct CellTerm {
  int moment;
  int row;
  int col;
  double coeff;
};

// Entries of M_d(g y) as (moment index, row, col, coefficient), upper
// triangle only.
std::vector<CellTerm> block_terms(const MomentBlock& b, int n) {
  std::vector<CellTerm> out;
  const auto basis = monomial_basis(n, b.order);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Monomial ab = basis[i] * basis[j];
      for (const auto& [gamma, c] : b.localizer.terms()) {
        out.push_back({static_cast<int>(grlex_index(ab * gamma)),
                       static_cast<int>(i), static_cast<int>(j), c});
      }
    }
  }
  return out;
}

// Orthonormal basis of the complement of span{g m} inside the coefficient
// space of M_e(h y), over the zero blocks M_{e0}(g y) = 0. Such g m lie in
// the kernel of M_e(h y) for every feasible y whenever
// deg m <= e - deg g and deg h + e + deg m <= 2 e0: then v^T M v and M v
// are both combinations of the zeroed moments L(g q), deg q <= 2 e0.
MatrixXd face_basis(const MomentBlock& b, const std::vector<MomentZeroBlock>& zeros, int n) {
  const auto basis = monomial_basis(n, b.order);
  const auto s = static_cast<Eigen::Index>(basis.size());
  std::vector<VectorXd> kernel;
  for (const auto& z : zeros) {
    const int dg = z.localizer.degree();
    const int top = std::min(b.order - dg, 2 * z.order - b.localizer.degree() - b.order);
    if (top < 0) continue;
    for (const auto& m : monomial_basis(n, top)) {
      VectorXd v = VectorXd::Zero(s);
      for (const auto& [gamma, c] : z.localizer.terms()) {
        v(static_cast<Eigen::Index>(grlex_index(gamma * m))) += c;
      }
      kernel.push_back(std::move(v));
    }
  }
  if (kernel.empty()) return MatrixXd();
  MatrixXd v(s, static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t k = 0; k < kernel.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = kernel[k];
  Eigen::JacobiSVD<MatrixXd> svd(v, Eigen::ComputeFullU);
  const VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;
  if (rank == 0) return MatrixXd();
  return svd.matrixU().rightCols(s - rank);
}

void add_symmetric(MatrixXd& m, int i, int j, double v) {
  m(i, j) += v;
  if (i != j) m(j, i) += v;
}

}  // namespace

CompiledMomentProgram MomentProgram::compile() const {
  CompiledMomentProgram out(*this);
  const int num_moments = static_cast<int>(basis_size(n_, 2 * order_));

  // Raw equality rows.
  out.eq_polys_.push_back(Polynomial::constant(n_, 1.0));
  out.eq_values_.push_back(1.0);
  out.eq_owner_.push_back(-1);
  for (std::size_t zb = 0; zb < zero_blocks_.size(); ++zb) {
    const auto& z = zero_blocks_[zb];
    const auto basis = monomial_basis(n_, z.order);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = i; j < basis.size(); ++j) {
        out.eq_polys_.push_back(z.localizer *
                                Polynomial::monomial(basis[i] * basis[j]));
        out.eq_values_.push_back(0.0);
        out.eq_owner_.push_back(static_cast<int>(zb));
      }
    }
  }
  for (std::size_t k = 0; k < equalities_.size(); ++k) {
    out.eq_polys_.push_back(equalities_[k].polynomial);
    out.eq_values_.push_back(equalities_[k].value);
    out.eq_owner_.push_back(-2 - static_cast<int>(k));
  }

  // Gauss-Jordan elimination to reduced row-echelon form.
  const auto p = static_cast<Eigen::Index>(out.eq_polys_.size());
  MatrixXd e = MatrixXd::Zero(p, num_moments);
  VectorXd rhs(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    for (const auto& [m, c] : out.eq_polys_[static_cast<std::size_t>(r)].terms()) {
      e(r, static_cast<Eigen::Index>(grlex_index(m))) += c;
    }
    rhs(r) = out.eq_values_[static_cast<std::size_t>(r)];
  }
  std::vector<Eigen::Index> pivot_rows;
  std::vector<int> pivot_cols;
  std::vector<char> is_pivot(static_cast<std::size_t>(num_moments), 0);
  for (Eigen::Index r = 0; r < p; ++r) {
    const double scale = std::max(e.row(r).cwiseAbs().maxCoeff(), std::abs(rhs(r)));
    for (std::size_t k = 0; k < pivot_rows.size(); ++k) {
      const double f = e(r, pivot_cols[k]);
      if (f != 0.0) {
        e.row(r) -= f * e.row(pivot_rows[k]);
        rhs(r) -= f * rhs(pivot_rows[k]);
      }
    }
    Eigen::Index col = 0;
    const double best = e.row(r).cwiseAbs().maxCoeff(&col);
    if (best <= 1e-10 * std::max(scale, 1.0)) {
      if (std::abs(rhs(r)) > 1e-9 * std::max(scale, 1.0)) {
        throw PreconditionFailure("MomentProgram: inconsistent equality constraints");
      }
      continue;
    }
    rhs(r) /= e(r, col);
    e.row(r) /= e(r, col);
    for (std::size_t k = 0; k < pivot_rows.size(); ++k) {
      const double f = e(pivot_rows[k], col);
      if (f != 0.0) {
        e.row(pivot_rows[k]) -= f * e.row(r);
        rhs(pivot_rows[k]) -= f * rhs(r);
      }
    }
    pivot_rows.push_back(r);
    pivot_cols.push_back(static_cast<int>(col));
    is_pivot[static_cast<std::size_t>(col)] = 1;
  }

  std::vector<int> free_position(static_cast<std::size_t>(num_moments), -1);
  for (int c = 0; c < num_moments; ++c) {
    if (!is_pivot[static_cast<std::size_t>(c)]) {
      free_position[static_cast<std::size_t>(c)] =
          static_cast<int>(out.free_columns_.size());
      out.free_columns_.push_back(c);
    }
  }
  out.particular_ = VectorXd::Zero(num_moments);
  out.null_rows_.assign(static_cast<std::size_t>(num_moments), {});
  for (int c : out.free_columns_) {
    out.null_rows_[static_cast<std::size_t>(c)].push_back(
        {free_position[static_cast<std::size_t>(c)], 1.0});
  }
  for (std::size_t k = 0; k < pivot_rows.size(); ++k) {
    const Eigen::Index r = pivot_rows[k];
    const auto pc = static_cast<std::size_t>(pivot_cols[k]);
    out.particular_(pivot_cols[k]) = rhs(r);
    for (int c : out.free_columns_) {
      const double v = e(r, c);
      if (std::abs(v) > 1e-14) {
        out.null_rows_[pc].push_back({free_position[static_cast<std::size_t>(c)], -v});
      }
    }
  }

  // Objective coefficients over moments.
  out.objective_coeffs_ = VectorXd::Zero(num_moments);
  for (const auto& [m, c] : objective_.terms()) {
    out.objective_coeffs_(static_cast<Eigen::Index>(grlex_index(m))) += c;
  }

  // Blocks: C_b = sum_alpha y_p,alpha B_alpha; A_k,b = -sum_alpha N_alpha,k B_alpha.
  const int nfree = static_cast<int>(out.free_columns_.size());
  SdpProblem& sdp = out.sdp_;
  std::vector<std::map<int, MatrixXd>> per_free(static_cast<std::size_t>(nfree));
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& b = blocks_[bi];
    const int s = b.size;
    out.reducers_.push_back(facial_reduction_ && b.kind == MomentBlockKind::kPsd
                                ? face_basis(b, zero_blocks_, n_)
                                : MatrixXd());
    MatrixXd c = MatrixXd::Zero(s, s);
    for (const auto& t : block_terms(b, n_)) {
      add_symmetric(c, t.row, t.col, t.coeff * out.particular_(t.moment));
      for (const auto& [k, v] : out.null_rows_[static_cast<std::size_t>(t.moment)]) {
        auto& slot = per_free[static_cast<std::size_t>(k)];
        auto it = slot.find(static_cast<int>(bi));
        if (it == slot.end()) it = slot.emplace(static_cast<int>(bi), MatrixXd::Zero(s, s)).first;
        add_symmetric(it->second, t.row, t.col, -v * t.coeff);
      }
    }
    const MatrixXd& q = out.reducers_.back();
    if (q.size() > 0) {
      c = q.transpose() * c * q;
      for (auto& slot : per_free) {
        auto it = slot.find(static_cast<int>(bi));
        if (it != slot.end()) it->second = q.transpose() * it->second * q;
      }
    }
    sdp.block_sizes.push_back(static_cast<int>(c.rows()));
    sdp.objective.push_back(std::move(c));
  }

  // b = -N^T f.
  VectorXd b = VectorXd::Zero(nfree);
  for (int c = 0; c < num_moments; ++c) {
    for (const auto& [k, v] : out.null_rows_[static_cast<std::size_t>(c)]) {
      b(k) -= v * out.objective_coeffs_(c);
    }
  }
  out.sdp_row_of_free_.assign(static_cast<std::size_t>(nfree), -1);
  for (int k = 0; k < nfree; ++k) {
    const double bk = b(k);
    SdpConstraint con;
    con.rhs = bk;
    for (auto& [bi, m] : per_free[static_cast<std::size_t>(k)]) {
      if (m.cwiseAbs().maxCoeff() > 1e-14) con.blocks.push_back({bi, std::move(m)});
    }
    if (con.blocks.empty()) {
      if (std::abs(bk) > 1e-12) {
        throw PreconditionFailure(
            "MomentProgram: the objective depends on a moment that no block "
            "constrains; the relaxation is unbounded");
      }
      continue;
    }
    out.sdp_row_of_free_[static_cast<std::size_t>(k)] = sdp.num_constraints();
    sdp.constraints.push_back(std::move(con));
  }
  return out;
}

int CompiledMomentProgram::reduced_dimension(std::size_t b) const {
  const MatrixXd& q = reducers_.at(b);
  return q.size() > 0 ? static_cast<int>(q.rows() - q.cols()) : 0;
}

MomentVector CompiledMomentProgram::moments(const SdpSolution& solution) const {
  VectorXd w = VectorXd::Zero(num_free());
  for (int k = 0; k < num_free(); ++k) {
    const int row = sdp_row_of_free_[static_cast<std::size_t>(k)];
    if (row >= 0 && row < solution.dual.size()) w(k) = solution.dual(row);
  }
  VectorXd y = particular_;
  for (int c = 0; c < num_moments(); ++c) {
    for (const auto& [k, v] : null_rows_[static_cast<std::size_t>(c)]) y(c) += v * w(k);
  }
  return MomentVector(source_.num_vars(), source_.order(), std::move(y),
                      MomentProvenance::kInteriorPointSolve);
}

double CompiledMomentProgram::moment_value(const SdpSolution& solution) const {
  return objective_coeffs_.dot(moments(solution).values());
}

double CompiledMomentProgram::sos_value(const SdpSolution& solution) const {
  return objective_coeffs_.dot(particular_) - solution.primal_value;
}

MomentMultipliers CompiledMomentProgram::multipliers(const SdpSolution& solution) const {
  const int n = source_.num_vars();
  MomentMultipliers out;
  const auto& blocks = source_.blocks();
  // s = coefficients of sum_b g_b * (z^T X_b z).
  VectorXd s = VectorXd::Zero(num_moments());
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const MatrixXd& q = reducers_[bi];
    const MatrixXd x = q.size() > 0 ? MatrixXd(q * solution.primal[bi] * q.transpose())
                                    : solution.primal[bi];
    out.grams.push_back(x);
    for (const auto& t : block_terms(blocks[bi], n)) {
      const double cell = t.row == t.col ? x(t.row, t.col) : 2.0 * x(t.row, t.col);
      s(t.moment) += t.coeff * cell;
    }
  }
  const VectorXd target = s - objective_coeffs_;

  // Least-squares multipliers of the equality rows: E^T mu = s - f.
  const auto p = static_cast<Eigen::Index>(eq_polys_.size());
  MatrixXd et = MatrixXd::Zero(num_moments(), p);
  for (Eigen::Index r = 0; r < p; ++r) {
    for (const auto& [m, c] : eq_polys_[static_cast<std::size_t>(r)].terms()) {
      et(static_cast<Eigen::Index>(grlex_index(m)), r) += c;
    }
  }
  const VectorXd mu = et.completeOrthogonalDecomposition().solve(target);
  out.residual = (target - et * mu).cwiseAbs().sum();
  out.bound = 0.0;
  for (Eigen::Index r = 0; r < p; ++r) {
    out.bound -= mu(r) * eq_values_[static_cast<std::size_t>(r)];
  }

  const auto& zb = source_.zero_blocks();
  out.zero_block_multipliers.assign(zb.size(), Polynomial(n));
  out.equality_multipliers.assign(source_.equalities().size(), 0.0);
  std::vector<std::vector<Monomial>> zb_basis;
  for (const auto& z : zb) zb_basis.push_back(monomial_basis(n, z.order));
  std::vector<std::size_t> zb_cursor(zb.size(), 0);
  for (Eigen::Index r = 0; r < p; ++r) {
    const int owner = eq_owner_[static_cast<std::size_t>(r)];
    if (owner >= 0) {
      const auto o = static_cast<std::size_t>(owner);
      const auto& basis = zb_basis[o];
      // Rows were generated over (i <= j) pairs in order.
      std::size_t idx = zb_cursor[o]++;
      std::size_t i = 0;
      std::size_t row_len = basis.size();
      while (idx >= row_len) {
        idx -= row_len;
        ++i;
        --row_len;
      }
      const std::size_t j = i + idx;
      out.zero_block_multipliers[o].add_term(basis[i] * basis[j], -mu(r));
    } else if (owner <= -2) {
      out.equality_multipliers[static_cast<std::size_t>(-2 - owner)] = -mu(r);
    }
  }
  return out;
}

}  // namespace cvxpoly
