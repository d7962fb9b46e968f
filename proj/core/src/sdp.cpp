#include "cvxpoly/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::kOptimal:
      return "optimal";
    case SdpStatus::kInfeasible:
      return "infeasible";
    case SdpStatus::kUnbounded:
      return "unbounded";
    case SdpStatus::kMaxIterations:
      return "max_iterations";
    case SdpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

int SdpProblem::total_dimension() const {
  int n = 0;
  for (int s : block_sizes) n += s;
  return n;
}

namespace {

double asymmetry(const MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

void SdpProblem::validate(int max_block_size) const {
  const auto nb = block_sizes.size();
  if (objective.size() != nb) {
    throw PreconditionFailure("SdpProblem: objective has " +
                              std::to_string(objective.size()) +
                              " blocks, expected " + std::to_string(nb));
  }
  for (std::size_t k = 0; k < nb; ++k) {
    const int s = block_sizes[k];
    if (s < 1) throw PreconditionFailure("SdpProblem: empty block");
    if (s > max_block_size) {
      throw PreconditionFailure("SdpProblem: block size " + std::to_string(s) +
                                " exceeds cap " + std::to_string(max_block_size));
    }
    if (objective[k].rows() != s || objective[k].cols() != s) {
      throw PreconditionFailure("SdpProblem: objective block shape mismatch");
    }
    if (asymmetry(objective[k]) > 1e-12) {
      throw PreconditionFailure("SdpProblem: objective block not symmetric");
    }
  }
  for (const auto& c : constraints) {
    for (const auto& e : c.blocks) {
      if (e.block < 0 || static_cast<std::size_t>(e.block) >= nb) {
        throw PreconditionFailure("SdpProblem: constraint block index out of range");
      }
      const int s = block_sizes[static_cast<std::size_t>(e.block)];
      if (e.matrix.rows() != s || e.matrix.cols() != s) {
        throw PreconditionFailure("SdpProblem: constraint block shape mismatch");
      }
      if (asymmetry(e.matrix) > 1e-12) {
        throw PreconditionFailure("SdpProblem: constraint matrix not symmetric");
      }
    }
  }
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double min_eigenvalue(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw PreconditionFailure("min_eigenvalue: not square");
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asymmetry(m) > 1e-9 * scale) {
    throw PreconditionFailure("min_eigenvalue: matrix is not symmetric");
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

int numeric_rank(const MatrixXd& m, double tau) {
  if (m.rows() != m.cols()) throw PreconditionFailure("numeric_rank: not square");
  if (m.size() == 0) return 0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asymmetry(m) > 1e-9 * scale) {
    throw PreconditionFailure("numeric_rank: matrix is not symmetric");
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const VectorXd& ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  const double norm = std::max(std::abs(ev(0)), std::abs(lmax));
  if (ev(0) < -1e-6 * norm) {
    throw PreconditionFailure("numeric_rank: matrix is indefinite (min eigenvalue " +
                              std::to_string(ev(0)) + ")");
  }
  if (lmax <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tau * lmax) ++rank;
  }
  return rank;
}

namespace {

// Nesterov-Todd scaling data for one block: W = G G^T with
// G^T Z G = G^{-1} X G^{-T} = diag(d).
struct NtScaling {
  MatrixXd g;
  MatrixXd g_inv;
  MatrixXd w;
  VectorXd d;
};

class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& p, const SdpOptions& o)
      : prob_(p), opt_(o), nb_(p.block_sizes.size()), m_(p.num_constraints()) {
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_(i) = p.constraints[static_cast<std::size_t>(i)].rhs;
    by_block_.resize(nb_);
    for (int i = 0; i < m_; ++i) {
      const auto& c = p.constraints[static_cast<std::size_t>(i)];
      for (std::size_t e = 0; e < c.blocks.size(); ++e) {
        by_block_[static_cast<std::size_t>(c.blocks[e].block)].push_back({i, e});
      }
    }
    norm_b_ = b_.norm();
    norm_c_ = 0.0;
    for (const auto& c : p.objective) norm_c_ += c.squaredNorm();
    norm_c_ = std::sqrt(norm_c_);
    total_dim_ = p.total_dimension();
    factor_gram();
  }

  SdpSolution run();

 private:
  struct Ref {
    int constraint;
    std::size_t entry;
  };

  const MatrixXd& a(const Ref& r) const {
    return prob_.constraints[static_cast<std::size_t>(r.constraint)]
        .blocks[r.entry]
        .matrix;
  }

  VectorXd apply_a(const BlockMatrix& x) const {
    VectorXd out = VectorXd::Zero(m_);
    for (std::size_t k = 0; k < nb_; ++k) {
      for (const auto& r : by_block_[k]) {
        out(r.constraint) += a(r).cwiseProduct(x[k]).sum();
      }
    }
    return out;
  }

  BlockMatrix apply_at(const VectorXd& y) const {
    BlockMatrix out(nb_);
    for (std::size_t k = 0; k < nb_; ++k) {
      const int s = prob_.block_sizes[k];
      out[k] = MatrixXd::Zero(s, s);
      for (const auto& r : by_block_[k]) out[k] += y(r.constraint) * a(r);
    }
    return out;
  }

  void initial_point();
  void factor_gram();
  void restore_primal_feasibility(BlockMatrix& dx, const VectorXd& rp) const;
  bool compute_scaling();
  bool factor_schur();
  void solve_direction(const BlockMatrix& rc, const VectorXd& rp,
                       const BlockMatrix& rd, BlockMatrix& dx, VectorXd& dy,
                       BlockMatrix& dz) const;
  double max_step(const BlockMatrix& x, const BlockMatrix& dx) const;
  void fill_solution(SdpSolution& sol) const;

  const SdpProblem& prob_;
  const SdpOptions& opt_;
  std::size_t nb_;
  int m_;
  VectorXd b_;
  std::vector<std::vector<Ref>> by_block_;
  double norm_b_ = 0.0;
  double norm_c_ = 0.0;
  int total_dim_ = 0;

  BlockMatrix x_, z_;
  VectorXd y_;
  std::vector<NtScaling> scaling_;
  enum class SchurMode { kQr, kLlt, kLdlt };
  VectorXd schur_solve(const VectorXd& v) const;
  VectorXd schur_apply(const VectorXd& v) const;

  SchurMode schur_mode_ = SchurMode::kQr;
  MatrixXd schur_t_;
  MatrixXd schur_r_;
  MatrixXd schur_;
  Eigen::LDLT<MatrixXd> schur_ldlt_;
  Eigen::LLT<MatrixXd> schur_llt_;
  // Factorization of A A^T, used to pull primal steps back onto A(X) = b.
  bool has_gram_ = false;
  Eigen::LDLT<MatrixXd> gram_ldlt_;
};

void InteriorPoint::factor_gram() {
  if (m_ == 0 || m_ > 4000) return;
  MatrixXd gram = MatrixXd::Zero(m_, m_);
  for (std::size_t k = 0; k < nb_; ++k) {
    const auto& refs = by_block_[k];
    for (std::size_t i = 0; i < refs.size(); ++i) {
      for (std::size_t j = i; j < refs.size(); ++j) {
        const double v = a(refs[i]).cwiseProduct(a(refs[j])).sum();
        gram(refs[i].constraint, refs[j].constraint) += v;
        if (refs[i].constraint != refs[j].constraint) {
          gram(refs[j].constraint, refs[i].constraint) += v;
        }
      }
    }
  }
  gram_ldlt_.compute(gram);
  has_gram_ = gram_ldlt_.info() == Eigen::Success &&
              gram_ldlt_.vectorD().minCoeff() > 1e-12 * gram_ldlt_.vectorD().maxCoeff();
}

void InteriorPoint::restore_primal_feasibility(BlockMatrix& dx, const VectorXd& rp) const {
  if (!has_gram_) return;
  const VectorXd miss = rp - apply_a(dx);
  const BlockMatrix fix = apply_at(gram_ldlt_.solve(miss));
  for (std::size_t k = 0; k < nb_; ++k) dx[k] += fix[k];
}

void InteriorPoint::initial_point() {
  x_.resize(nb_);
  z_.resize(nb_);
  for (std::size_t k = 0; k < nb_; ++k) {
    const int s = prob_.block_sizes[k];
    const double rs = std::sqrt(static_cast<double>(s));
    double norm_a = 0.0;
    double xi = std::max(10.0, rs);
    for (const auto& r : by_block_[k]) {
      const double na = a(r).norm();
      norm_a = std::max(norm_a, na);
      xi = std::max(xi, rs * (1.0 + std::abs(b_(r.constraint))) / (1.0 + na));
    }
    const double eta =
        std::max({10.0, rs, norm_a, prob_.objective[k].norm()});
    x_[k] = xi * MatrixXd::Identity(s, s);
    z_[k] = eta * MatrixXd::Identity(s, s);
  }
  y_ = VectorXd::Zero(m_);
}

bool InteriorPoint::compute_scaling() {
  scaling_.resize(nb_);
  for (std::size_t k = 0; k < nb_; ++k) {
    Eigen::LLT<MatrixXd> lx(x_[k]);
    Eigen::LLT<MatrixXd> lz(z_[k]);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const MatrixXd l = lx.matrixL();
    const MatrixXd r = lz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(r.transpose() * l,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& s = svd.singularValues();
    if (s.minCoeff() <= 0.0 || !std::isfinite(s.maxCoeff())) return false;
    const VectorXd s_isqrt = s.cwiseSqrt().cwiseInverse();
    NtScaling& sc = scaling_[k];
    sc.d = s;
    sc.g = l * svd.matrixV() * s_isqrt.asDiagonal();
    const MatrixXd l_inv =
        lx.matrixL().solve(MatrixXd::Identity(l.rows(), l.cols()));
    sc.g_inv = s.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * l_inv;
    sc.w = sc.g * sc.g.transpose();
  }
  return true;
}

bool InteriorPoint::factor_schur() {
  if (m_ == 0) return true;
  // Columns of T hold svec(G^T A_i G), so the Schur matrix is T^T T. A QR
  // factorization of T avoids squaring its condition number.
  Eigen::Index rows = 0;
  for (std::size_t k = 0; k < nb_; ++k) {
    const Eigen::Index s = prob_.block_sizes[k];
    rows += s * (s + 1) / 2;
  }
  if (rows >= m_) {
    MatrixXd t = MatrixXd::Zero(rows, m_);
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < nb_; ++k) {
      const MatrixXd& g = scaling_[k].g;
      const Eigen::Index s = g.rows();
      for (const auto& r : by_block_[k]) {
        const MatrixXd sa = g.transpose() * a(r) * g;
        Eigen::Index pos = off;
        for (Eigen::Index j = 0; j < s; ++j) {
          t(pos++, r.constraint) += sa(j, j);
          for (Eigen::Index i = j + 1; i < s; ++i) {
            t(pos++, r.constraint) += std::sqrt(2.0) * sa(i, j);
          }
        }
      }
      off += s * (s + 1) / 2;
    }
    Eigen::HouseholderQR<MatrixXd> qr(t);
    MatrixXd rfac = qr.matrixQR().topRows(m_).triangularView<Eigen::Upper>();
    const VectorXd diag = rfac.diagonal().cwiseAbs();
    if (diag.minCoeff() > 1e-15 * diag.maxCoeff()) {
      schur_r_ = std::move(rfac);
      schur_t_ = std::move(t);
      schur_mode_ = SchurMode::kQr;
      return true;
    }
  }

  // Normal equations for rank-deficient or overdetermined structures.
  MatrixXd schur = MatrixXd::Zero(m_, m_);
  for (std::size_t k = 0; k < nb_; ++k) {
    const MatrixXd& w = scaling_[k].w;
    const auto& refs = by_block_[k];
    for (std::size_t jj = 0; jj < refs.size(); ++jj) {
      const MatrixXd t = w * a(refs[jj]) * w;
      for (std::size_t ii = 0; ii <= jj; ++ii) {
        const double v = a(refs[ii]).cwiseProduct(t).sum();
        schur(refs[ii].constraint, refs[jj].constraint) += v;
        if (refs[ii].constraint != refs[jj].constraint) {
          schur(refs[jj].constraint, refs[ii].constraint) += v;
        }
      }
    }
  }
  schur_ = schur;
  schur_llt_.compute(schur);
  if (schur_llt_.info() == Eigen::Success) {
    schur_mode_ = SchurMode::kLlt;
    return true;
  }
  // Nearly singular Schur complements show up on problems without strictly
  // feasible points; a tiny diagonal shift keeps the direction usable.
  const double shift = 1e-13 * std::max(1.0, schur.diagonal().maxCoeff());
  schur.diagonal().array() += shift;
  schur_llt_.compute(schur);
  if (schur_llt_.info() == Eigen::Success) {
    schur_mode_ = SchurMode::kLlt;
    return true;
  }
  schur_ldlt_.compute(schur);
  schur_mode_ = SchurMode::kLdlt;
  return schur_ldlt_.info() == Eigen::Success;
}

VectorXd InteriorPoint::schur_solve(const VectorXd& v) const {
  switch (schur_mode_) {
    case SchurMode::kQr: {
      const VectorXd u = schur_r_.transpose().triangularView<Eigen::Lower>().solve(v);
      return schur_r_.triangularView<Eigen::Upper>().solve(u);
    }
    case SchurMode::kLlt: return schur_llt_.solve(v);
    case SchurMode::kLdlt: return schur_ldlt_.solve(v);
  }
  return VectorXd::Zero(v.size());
}

VectorXd InteriorPoint::schur_apply(const VectorXd& v) const {
  if (schur_mode_ == SchurMode::kQr) return schur_t_.transpose() * (schur_t_ * v);
  return schur_ * v;
}

void InteriorPoint::solve_direction(const BlockMatrix& rc, const VectorXd& rp,
                                    const BlockMatrix& rd, BlockMatrix& dx,
                                    VectorXd& dy, BlockMatrix& dz) const {
  BlockMatrix xh(nb_), wrw(nb_);
  for (std::size_t k = 0; k < nb_; ++k) {
    const NtScaling& sc = scaling_[k];
    const Eigen::Index s = sc.d.size();
    MatrixXd h(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = 0; j < s; ++j) {
        h(i, j) = 2.0 * rc[k](i, j) / (sc.d(i) + sc.d(j));
      }
    }
    xh[k] = sc.g * h * sc.g.transpose();
    wrw[k] = sc.w * rd[k] * sc.w;
  }
  const VectorXd rhs = rp - apply_a(xh) + apply_a(wrw);
  if (m_ == 0) {
    dy = VectorXd::Zero(0);
  } else {
    dy = schur_solve(rhs);
    // Iterative refinement.
    const double rhs_norm = rhs.norm();
    for (int pass = 0; pass < 3; ++pass) {
      const VectorXd res = rhs - schur_apply(dy);
      if (!(res.norm() > 1e-15 * rhs_norm)) break;
      dy += schur_solve(res);
    }
  }
  const BlockMatrix aty = apply_at(dy);
  dz.resize(nb_);
  dx.resize(nb_);
  for (std::size_t k = 0; k < nb_; ++k) {
    dz[k] = rd[k] - aty[k];
    dz[k] = 0.5 * (dz[k] + dz[k].transpose()).eval();
    const MatrixXd& w = scaling_[k].w;
    dx[k] = xh[k] - w * dz[k] * w;
    dx[k] = 0.5 * (dx[k] + dx[k].transpose()).eval();
  }
  restore_primal_feasibility(dx, rp);
}

double InteriorPoint::max_step(const BlockMatrix& x, const BlockMatrix& dx) const {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nb_; ++k) {
    if (x[k].rows() == 1) {
      if (dx[k](0, 0) < 0.0) step = std::min(step, -x[k](0, 0) / dx[k](0, 0));
      continue;
    }
    Eigen::LLT<MatrixXd> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd t = llt.matrixL().solve(dx[k]);
    t = llt.matrixL().solve(t.transpose().eval());
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) step = std::min(step, -1.0 / lmin);
  }
  return step;
}

void InteriorPoint::fill_solution(SdpSolution& sol) const {
  sol.primal = x_;
  sol.dual = y_;
  sol.slack = z_;
  sol.primal_value = inner(prob_.objective, x_);
  sol.dual_value = m_ > 0 ? b_.dot(y_) : 0.0;
  sol.gap = std::abs(sol.primal_value - sol.dual_value) /
            (1.0 + std::abs(sol.primal_value));
  sol.primal_residual = (apply_a(x_) - b_).norm() / (1.0 + norm_b_);
  const BlockMatrix aty = apply_at(y_);
  double rd = 0.0;
  for (std::size_t k = 0; k < nb_; ++k) {
    rd += (prob_.objective[k] - aty[k] - z_[k]).squaredNorm();
  }
  sol.dual_residual = std::sqrt(rd) / (1.0 + norm_c_);
  sol.complementarity = inner(x_, z_) / (1.0 + std::abs(sol.primal_value));
}

SdpSolution InteriorPoint::run() {
  SdpSolution sol;
  initial_point();
  int tiny_steps = 0;
  // Best iterate seen, by max(relp, reld, gap, compl).
  double best_merit = std::numeric_limits<double>::infinity();
  BlockMatrix best_x, best_z;
  VectorXd best_y;
  // Falls back to the best iterate; accepts it when it meets the tolerances
  // relaxed by 100x.
  auto settle = [&](SdpStatus status, const char* message) {
    if (std::isfinite(best_merit)) {
      x_ = best_x;
      y_ = best_y;
      z_ = best_z;
    }
    fill_solution(sol);
    sol.status = status;
    sol.message = message;
    const double loose = 100.0;
    if (sol.primal_residual <= loose * opt_.feasibility_tol &&
        sol.dual_residual <= loose * opt_.feasibility_tol &&
        sol.gap <= loose * opt_.gap_tol &&
        sol.complementarity <= loose * opt_.gap_tol) {
      sol.status = SdpStatus::kOptimal;
      sol.message = std::string("reduced accuracy after: ") + message;
    }
    return sol;
  };

  for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
    sol.iterations = iter;
    // Residuals.
    const VectorXd rp = b_ - apply_a(x_);
    const BlockMatrix aty = apply_at(y_);
    BlockMatrix rd(nb_);
    double rd_norm2 = 0.0;
    for (std::size_t k = 0; k < nb_; ++k) {
      rd[k] = prob_.objective[k] - aty[k] - z_[k];
      rd_norm2 += rd[k].squaredNorm();
    }
    const double xz = inner(x_, z_);
    const double mu = xz / total_dim_;
    const double pobj = inner(prob_.objective, x_);
    const double dobj = m_ > 0 ? b_.dot(y_) : 0.0;
    const double relp = rp.norm() / (1.0 + norm_b_);
    const double reld = std::sqrt(rd_norm2) / (1.0 + norm_c_);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    const double compl_rel = xz / (1.0 + std::abs(pobj));

    if (opt_.verbose) {
      std::cerr << "iter " << iter << " pobj " << pobj << " dobj " << dobj
                << " relp " << relp << " reld " << reld << " gap " << gap
                << " mu " << mu << '\n';
    }
    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
      return settle(SdpStatus::kNumericalFailure, "non-finite iterate");
    }
    const double merit = std::max({relp, reld, gap, compl_rel});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x_;
      best_y = y_;
      best_z = z_;
    }
    if (relp <= opt_.feasibility_tol && reld <= opt_.feasibility_tol &&
        gap <= opt_.gap_tol && compl_rel <= opt_.gap_tol) {
      fill_solution(sol);
      sol.status = SdpStatus::kOptimal;
      return sol;
    }
    // Improving rays. A^T y + Z = C - Rd and A(X) = b - Rp.
    if (dobj > 0.0 && m_ > 0) {
      double ray_res = 0.0;
      for (std::size_t k = 0; k < nb_; ++k) {
        ray_res += (aty[k] + z_[k]).squaredNorm();
      }
      ray_res = std::sqrt(ray_res) / dobj;
      if (ray_res < opt_.infeasibility_tol && dobj > 1.0) {
        fill_solution(sol);
        sol.status = SdpStatus::kInfeasible;
        sol.dual_ray = y_ / dobj;
        sol.message = "dual improving ray detected";
        return sol;
      }
    }
    if (pobj < 0.0) {
      const double ray_res = (b_ - rp).norm() / (-pobj);
      if (ray_res < opt_.infeasibility_tol && -pobj > 1.0) {
        fill_solution(sol);
        sol.status = SdpStatus::kUnbounded;
        sol.primal_ray.resize(nb_);
        for (std::size_t k = 0; k < nb_; ++k) sol.primal_ray[k] = x_[k] / (-pobj);
        sol.message = "primal improving ray detected";
        return sol;
      }
    }
    if (iter == opt_.max_iterations) break;

    if (!compute_scaling() || !factor_schur()) {
      return settle(SdpStatus::kNumericalFailure,
                    "scaling or Schur complement factorization failed");
    }

    // Predictor.
    BlockMatrix rc(nb_);
    for (std::size_t k = 0; k < nb_; ++k) {
      rc[k] = -MatrixXd(scaling_[k].d.cwiseAbs2().asDiagonal());
    }
    BlockMatrix dx_a, dz_a;
    VectorXd dy_a;
    solve_direction(rc, rp, rd, dx_a, dy_a, dz_a);
    const double ap_a = std::min(1.0, max_step(x_, dx_a));
    const double ad_a = std::min(1.0, max_step(z_, dz_a));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb_; ++k) {
      mu_aff += (x_[k] + ap_a * dx_a[k]).cwiseProduct(z_[k] + ad_a * dz_a[k]).sum();
    }
    mu_aff /= total_dim_;
    const double min_a = std::min(ap_a, ad_a);
    const double expon = std::max(1.0, 3.0 * min_a * min_a);
    const double sigma =
        std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

    // Corrector.
    for (std::size_t k = 0; k < nb_; ++k) {
      const NtScaling& sc = scaling_[k];
      const MatrixXd dxs = sc.g_inv * dx_a[k] * sc.g_inv.transpose();
      const MatrixXd dzs = sc.g.transpose() * dz_a[k] * sc.g;
      const MatrixXd prod = dxs * dzs;
      rc[k] = -0.5 * (prod + prod.transpose());
      rc[k].diagonal().array() += sigma * mu;
      rc[k].diagonal() -= sc.d.cwiseAbs2();
    }
    BlockMatrix dx, dz;
    VectorXd dy;
    solve_direction(rc, rp, rd, dx, dy, dz);

    const double gamma = 0.95;
    const double ap = std::min(1.0, gamma * max_step(x_, dx));
    const double ad = std::min(1.0, gamma * max_step(z_, dz));
    if (!(ap > 0.0) || !(ad > 0.0)) {
      return settle(SdpStatus::kNumericalFailure, "zero step length");
    }
    tiny_steps = (std::max(ap, ad) < 1e-8) ? tiny_steps + 1 : 0;
    if (tiny_steps >= 5) {
      return settle(SdpStatus::kNumericalFailure, "stalled: step lengths below 1e-8");
    }
    for (std::size_t k = 0; k < nb_; ++k) {
      x_[k] += ap * dx[k];
      z_[k] += ad * dz[k];
      x_[k] = 0.5 * (x_[k] + x_[k].transpose()).eval();
      z_[k] = 0.5 * (z_[k] + z_[k].transpose()).eval();
    }
    if (m_ > 0) y_ += ad * dy;
  }
  return settle(SdpStatus::kMaxIterations, "iteration cap reached");
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate(options.max_block_size);
  InteriorPoint ipm(problem, options);
  return ipm.run();
}

}  // namespace cvxpoly
