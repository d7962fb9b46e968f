#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvxpoly/moment.hpp"
#include "cvxpoly/moment_program.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sampling.hpp"
#include "cvxpoly/sdp.hpp"
#include "cvxpoly/sos.hpp"

namespace cvxpoly {

/// min { f(x) : x in K }.
struct PolyOptProblem {
  Polynomial objective;
  SemialgebraicSet feasible_set;

  PolyOptProblem(Polynomial f, SemialgebraicSet k);
  int num_vars() const { return feasible_set.num_vars(); }
};

enum class Exactness { kFlatRank, kConvexMeanPoint, kSosConvexSingleShot, kNone };
std::string to_string(Exactness e);

enum class RelaxationKind { kQhat, kQr };
std::string to_string(RelaxationKind k);

/// f - lambda_star = sigma_0 + sum_j sigma_j g_j (up to `residual`).
/// For the simplified relaxation every sigma_j, j >= 1, is a scalar lambda_j.
struct PutinarCertificate {
  double lambda_star = 0.0;
  /// sigma_0, ..., sigma_m as Gram witnesses (1x1 constant basis for scalars).
  std::vector<SosWitness> sigmas;
  /// True for certificates of the simplified relaxation (Q_c form).
  bool scalar_multipliers = false;
  /// lambda_j for the scalar form, empty otherwise.
  std::vector<double> lambdas;
  /// l1 norm of f - lambda_star - sigma_0 - sum_j sigma_j g_j.
  double residual = 0.0;
  /// Whether the recovered sigma_0 passes is_sos_convex.
  bool sigma0_sos_convex = false;

  /// f - lambda_star - sigma_0 - sum_j sigma_j g_j, recomputed.
  Polynomial reconstruction_error(const PolyOptProblem& problem) const;
};

struct RelaxationResult {
  int order = 0;
  RelaxationKind kind = RelaxationKind::kQr;
  SdpStatus status = SdpStatus::kNumericalFailure;
  /// Bound reported after the monotonicity clamp.
  double lower_bound = 0.0;
  /// Bound as solved, before clamping.
  double raw_bound = 0.0;
  std::optional<MomentVector> moments;
  std::optional<FlatnessReport> flatness;
  std::optional<PutinarCertificate> certificate;
  std::string certificate_note;
  Exactness exactness = Exactness::kNone;
  std::optional<Point> minimizer;
  double seconds = 0.0;
  std::string message;

  bool solved() const { return status == SdpStatus::kOptimal; }
};

/// K with M^2 - |X|^2 >= 0 appended.
SemialgebraicSet ball_augment(const SemialgebraicSet& k, double m);

/// Whether one constraint alone makes Q(g) Archimedean: a quadratic g_j with
/// negative definite Hessian.
bool has_archimedean_constraint(const SemialgebraicSet& k);

/// Smallest admissible relaxation order: max(ceil(deg f / 2), max_j r_j).
int minimal_order(const PolyOptProblem& problem);

/// Moment relaxation of order r: M_r(y) PSD, M_{r-r_j}(g_j y) PSD, y_0 = 1.
CompiledMomentProgram build_qr(const PolyOptProblem& problem, int r);

/// Simplified relaxation at d = minimal_order: M_d(y) PSD, L_y(g_j) >= 0.
CompiledMomentProgram build_qhat(const PolyOptProblem& problem);

/// Reads sigma_j (and lambda_j) off the SOS side of a solved relaxation and
/// checks f - lambda_star - sum sigma_j g_j against 1e-6 (1 + |f|_1).
/// Throws CertificateRejected when the check fails.
PutinarCertificate recover_dual_certificate(const PolyOptProblem& problem,
                                            const CompiledMomentProgram& program,
                                            const SdpSolution& solution,
                                            const SosOptions& sos_options = {});

struct LagrangianReport {
  Polynomial lagrangian;
  /// |grad L_f(x*)|_2 and lambda_j g_j(x*), when x* was supplied.
  std::optional<double> gradient_norm;
  std::vector<double> complementarity;
};

/// L_f = f - fstar - sum_j lambda_j g_j.
LagrangianReport lagrangian(const Polynomial& f, std::span<const double> lambda,
                            double fstar, const SemialgebraicSet& k,
                            std::optional<Point> candidate = std::nullopt);

struct StrictConvexityProbe {
  /// min over sampled x in K of the smallest Hessian eigenvalue of f.
  double delta = 0.0;
  int samples = 0;
  bool strictly_convex_on_samples = false;
};

StrictConvexityProbe probe_strict_convexity(const PolyOptProblem& problem, int samples,
                                            std::uint64_t seed = kDefaultSeed);

struct HierarchyOptions {
  int r_max = 5;
  /// Rank threshold for the flatness test.
  double tau = 1e-6;
  /// Tolerance for the mean-point acceptance (objective gap and feasibility).
  double point_tol = 1e-5;
  int convexity_samples = 500;
  std::uint64_t seed = kDefaultSeed;
  bool waive_archimedean = false;
  bool try_qhat = true;
  SdpOptions sdp;
  SosOptions sos;
};

struct HierarchyReport {
  std::vector<RelaxationResult> relaxations;
  /// The set actually relaxed (possibly ball-augmented).
  SemialgebraicSet relaxed_set;
  std::string archimedean;  // "constraint", "ball_augmented", or "waived"
  bool convexity_sampled = false;
  bool f_convex_sampled = false;
  bool constraints_concave_sampled = false;
  std::optional<StrictConvexityProbe> strict_convexity;

  /// The last relaxation with exactness != kNone, if any.
  const RelaxationResult* exact() const;
};

/// Solves the simplified relaxation first (stopping there when f and every
/// -g_j are SOS-convex), then ascends r = minimal_order .. r_max.
/// Throws PreconditionFailure when K is not known to be Archimedean and no
/// waiver was given, or when r_max is below the minimal order.
HierarchyReport solve_hierarchy(const PolyOptProblem& problem,
                                const HierarchyOptions& options = {});

}  // namespace cvxpoly
