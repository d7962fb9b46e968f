#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvxpoly/moment.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sdp.hpp"

namespace cvxpoly {

enum class MomentBlockKind {
  kPsd,     // M_d(g y) PSD
  kScalar,  // L_y(g) >= 0, a 1x1 block
};

struct MomentBlock {
  std::string label;
  Polynomial localizer;
  int order = 0;  // d in M_d(g y); 0 for scalar rows
  MomentBlockKind kind = MomentBlockKind::kPsd;
  int size = 1;
};

/// M_d(g y) = 0, imposed entry by entry as linear equality rows.
struct MomentZeroBlock {
  std::string label;
  Polynomial localizer;
  int order = 0;
};

/// L_y(p) = value.
struct MomentEquality {
  std::string label;
  Polynomial polynomial;
  double value = 0.0;
};

/// Multipliers read off the primal (SOS) side of a solved moment program.
struct MomentMultipliers {
  /// Gram matrix (or 1x1 scalar) per block, in block order.
  std::vector<Eigen::MatrixXd> grams;
  /// Polynomial multiplier of each zero block's localizer.
  std::vector<Polynomial> zero_block_multipliers;
  /// Multiplier of each explicit equality row (y_0 = 1 excluded).
  std::vector<double> equality_multipliers;
  /// The SOS-side bound implied by the multipliers.
  double bound = 0.0;
  /// l1 norm of f - bound - sum_b sigma_b g_b - (zero-block and equality
  /// terms), i.e. how far the reconstructed identity is from exact.
  double residual = 0.0;
};

class CompiledMomentProgram;

/// Builder for moment relaxations: minimize L_y(f) over pseudo-moments
/// y indexed by N^n_{2*order}, subject to PSD localizing blocks, scalar rows,
/// zero blocks, linear equalities and y_0 = 1.
///
/// Compilation puts the problem in the dual form of SdpProblem. Moment
/// aliasing (one variable per y_alpha shared by every matrix cell) is
/// structural; linear equalities are eliminated by a reduced row-echelon
/// parametrization y = y_p + N w, so w are the SDP dual variables.
class MomentProgram {
 public:
  MomentProgram(int n, int order);

  int num_vars() const { return n_; }
  int order() const { return order_; }

  void minimize(const Polynomial& f);
  /// Returns the block index.
  int add_psd_block(const std::string& label, const Polynomial& g, int d);
  int add_scalar_inequality(const std::string& label, const Polynomial& g);
  void add_zero_block(const std::string& label, const Polynomial& g, int d);
  void add_equality(const std::string& label, const Polynomial& p, double value);

  const Polynomial& objective() const { return objective_; }
  const std::vector<MomentBlock>& blocks() const { return blocks_; }
  const std::vector<MomentZeroBlock>& zero_blocks() const { return zero_blocks_; }
  const std::vector<MomentEquality>& equalities() const { return equalities_; }

  /// Number of raw equality rows (before elimination), y_0 = 1 included.
  int equality_row_count() const;

  /// When on (the default), PSD blocks are restricted to the complement of
  /// the kernel vectors g*m forced by the zero blocks, so the compiled SDP
  /// keeps a strictly feasible moment side.
  void set_facial_reduction(bool on) { facial_reduction_ = on; }
  bool facial_reduction() const { return facial_reduction_; }

  CompiledMomentProgram compile() const;

 private:
  void check_degree(const std::string& what, int degree) const;

  int n_;
  int order_;
  Polynomial objective_;
  std::vector<MomentBlock> blocks_;
  std::vector<MomentZeroBlock> zero_blocks_;
  std::vector<MomentEquality> equalities_;
  bool facial_reduction_ = true;
};

class CompiledMomentProgram {
 public:
  const SdpProblem& sdp() const { return sdp_; }
  const MomentProgram& source() const { return source_; }
  int num_moments() const { return static_cast<int>(particular_.size()); }
  int num_free() const { return static_cast<int>(free_columns_.size()); }
  /// Rows removed from block b by facial reduction (0 when not reduced).
  int reduced_dimension(std::size_t b) const;

  /// y = y_p + N w with w the SDP dual vector.
  MomentVector moments(const SdpSolution& solution) const;
  /// L_y(f) at the recovered moments.
  double moment_value(const SdpSolution& solution) const;
  /// Bound certified by the SOS side: L_{y_p}(f) - <C, X>.
  double sos_value(const SdpSolution& solution) const;

  MomentMultipliers multipliers(const SdpSolution& solution) const;

 private:
  friend class MomentProgram;
  explicit CompiledMomentProgram(MomentProgram source) : source_(std::move(source)) {}

  MomentProgram source_;
  SdpProblem sdp_;
  Eigen::VectorXd particular_;
  // Sparse rows of N: for every moment index, (free position, coefficient).
  std::vector<std::vector<std::pair<int, double>>> null_rows_;
  std::vector<int> free_columns_;  // moment index of every free variable
  std::vector<int> sdp_row_of_free_;  // -1 if the free variable was dropped
  // Raw equality system (rows of polynomials and values).
  std::vector<Polynomial> eq_polys_;
  std::vector<double> eq_values_;
  std::vector<int> eq_owner_;  // zero block index, -1 for y0, -2 - k for equality k
  // Per block: orthonormal basis Q of the retained face (empty: no reduction).
  // The SDP block is Q^T M Q.
  std::vector<Eigen::MatrixXd> reducers_;
  Eigen::VectorXd objective_coeffs_;
};

}  // namespace cvxpoly
