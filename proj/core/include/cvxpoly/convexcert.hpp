#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvxpoly/moment.hpp"
#include "cvxpoly/moment_program.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sampling.hpp"
#include "cvxpoly/sdp.hpp"
#include "cvxpoly/sos.hpp"

namespace cvxpoly {

// Constraint indices j are 0-based throughout this header.

/// min L_z(<grad g_j(Y), X - Y>) over pseudo-moments z in (X, Y), 2n
/// variables, order d:
///   M_d(z) PSD, M_{d-r_k}(g_k(X) z) PSD for all k,
///   M_{d-r_k}(g_k(Y) z) PSD for k != j, M_{d-r_j}(g_j(Y) z) = 0, z_0 = 1.
/// Variables are ordered X_1..X_n, Y_1..Y_n.
CompiledMomentProgram rho_program(const SemialgebraicSet& k, int j, int d);

/// Smallest order accepted by rho_program for constraint j.
int rho_min_order(const SemialgebraicSet& k, int j);

/// <grad g_j(Y), X - Y> in 2n variables.
Polynomial supporting_form(const SemialgebraicSet& k, int j);

/// Multipliers of the rho_j program:
///   <grad g_j(Y), X-Y> - bound = sum_b sigma_b h_b + psi g_j(Y)
/// with h_b the block localizers (1, g_k(X), g_k(Y)).
struct RhoWeights {
  std::vector<std::string> labels;
  std::vector<Polynomial> localizers;
  std::vector<SosWitness> sigmas;
  Polynomial psi;
  double bound = 0.0;
  /// l1 norm (over (X, Y)) of the identity's mismatch.
  double residual = 0.0;
};

RhoWeights recover_rho_weights(const CompiledMomentProgram& program,
                               const SdpSolution& solution);

enum class CertificationMethod { kRhoSdp, kQuadraticConcaveShortcut };
std::string to_string(CertificationMethod m);

enum class CertificationStatus { kCertifiedNumerically, kInconclusive, kRefutedBySample };
std::string to_string(CertificationStatus s);

struct RhoAttempt {
  int d = 0;
  SdpStatus status = SdpStatus::kNumericalFailure;
  double rho = 0.0;
  double seconds = 0.0;
};

struct ConstraintCertificate {
  int j = 0;
  int d_j = 0;
  double rho_j = 0.0;
  CertificationMethod method = CertificationMethod::kRhoSdp;
  bool closed = false;
  std::vector<RhoAttempt> attempts;
  std::optional<RhoWeights> weights;
  /// The optimal pseudo-moments of the closing rho_j solve.
  std::optional<MomentVector> moments;
};

struct NondegeneracyReport {
  int j = 0;
  int active_samples = 0;
  double min_gradient_norm = 0.0;
  bool degenerate = false;
  std::string note;
};

struct SlaterReport {
  bool found = false;
  bool waived = false;
  Point point;
  double margin = 0.0;
};

struct ConvexityCertificate {
  std::vector<ConstraintCertificate> constraints;
  CertificationStatus status = CertificationStatus::kInconclusive;
  double tol = 0.0;
  /// (x, y) with x, y in K, g_j(y) ~ 0 and <grad g_j(y), x - y> < 0.
  std::optional<std::pair<Point, Point>> refuting_pair;
  int refuted_constraint = -1;
  std::vector<NondegeneracyReport> probe;
  bool degenerate = false;
  SlaterReport slater;
  std::string verdict;

  /// max_j d_j over the constraints.
  int max_degree() const;
};

struct CertifyOptions {
  /// First order tried for every rho_j (raised to rho_min_order when lower).
  int d_min = 0;
  int d_max = 4;
  double tol = 1e-6;
  bool recover_weights = true;
  int probe_samples = 2000;
  int refute_samples = 2000;
  std::uint64_t seed = kDefaultSeed;
  double slater_margin = 1e-6;
  bool waive_slater = false;
  /// Used only when K carries no bounding information.
  double fallback_box = 10.0;
  SdpOptions sdp;
};

/// Samples points near each boundary piece {g_j = 0} of K and reports the
/// smallest gradient norm seen; DEGENERATE below 1e-6.
std::vector<NondegeneracyReport> nondegeneracy_probe(const SemialgebraicSet& k,
                                                     int samples,
                                                     std::uint64_t seed = kDefaultSeed,
                                                     double band = 1e-4,
                                                     double fallback_box = 10.0);

/// Looks for x0 with min_j g_j(x0) >= margin by sampling and local ascent.
SlaterReport slater_heuristic(const SemialgebraicSet& k, double margin,
                              std::uint64_t seed = kDefaultSeed,
                              double fallback_box = 10.0);

/// Runs the rho_j test for every constraint (or the quadratic-concave
/// shortcut), then the nondegeneracy probe. The verdict never claims
/// convexity beyond "certified numerically at tolerance tol".
/// Throws PreconditionFailure when no Slater point is found and the
/// heuristic was not waived.
ConvexityCertificate certify_convexity(const SemialgebraicSet& k,
                                       const CertifyOptions& options = {});

enum class SdrForm {
  kLocalizing,  // M_d(y), M_{d-r_j}(g_j y)
  kScalarRows,  // M_d(y), L_y(g_j) >= 0
};
std::string to_string(SdrForm f);

/// One entry of a lifted LMI block: block(row, col) += coeff * y[moment]
/// (and symmetrically).
struct LmiEntry {
  int moment = 0;
  int row = 0;
  int col = 0;
  double coeff = 0.0;
};

struct LmiBlock {
  std::string label;
  int size = 0;
  std::vector<LmiEntry> entries;
};

/// Omega = {(x, y) : blocks(y) PSD, L_y(X_i) = x_i, y_0 = 1}.
struct SdrRepresentation {
  int d = 0;
  SdrForm form = SdrForm::kLocalizing;
  SemialgebraicSet base_set;
  /// s(2d): number of lifted moment variables.
  int lift_dimension = 0;
  std::vector<Monomial> moment_basis;
  std::vector<LmiBlock> blocks;

  int num_vars() const { return base_set.num_vars(); }
  /// Evaluates block b at the moment vector y.
  Eigen::MatrixXd block_value(std::size_t b, const MomentVector& y) const;
  /// max(-min eigenvalue over blocks, |y_0 - 1|, max_i |L_y(X_i) - x_i|).
  double violation(const Point& x, const MomentVector& y) const;
};

/// Omega at d = cert.max_degree(). Throws PreconditionFailure unless the
/// certificate is certified_numerically.
SdrRepresentation build_sdr(const SemialgebraicSet& k, const ConvexityCertificate& cert);
/// Override route with an explicit order and form (no certificate needed).
SdrRepresentation build_sdr(const SemialgebraicSet& k, int d, SdrForm form);

struct SupportResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  double value = 0.0;
  Point point;
};

/// min c^T x over the projection of Omega.
SupportResult sdr_support(const SdrRepresentation& sdr, const Point& c,
                          const SdpOptions& options = {});

/// Whether x lifts into Omega (feasibility SDP with L_y(X) = x fixed).
bool sdr_contains(const SdrRepresentation& sdr, const Point& x,
                  const SdpOptions& options = {});

}  // namespace cvxpoly
