#include "cvxpoly/hierarchy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

PolyOptProblem::PolyOptProblem(Polynomial f, SemialgebraicSet k)
    : objective(std::move(f)), feasible_set(std::move(k)) {
  if (objective.num_vars() != feasible_set.num_vars()) {
    throw PreconditionFailure("PolyOptProblem: objective has " +
                              std::to_string(objective.num_vars()) +
                              " variables, K has " +
                              std::to_string(feasible_set.num_vars()));
  }
}

std::string to_string(Exactness e) {
  switch (e) {
    case Exactness::kFlatRank: return "flat_rank";
    case Exactness::kConvexMeanPoint: return "convex_mean_point";
    case Exactness::kSosConvexSingleShot: return "sos_convex_single_shot";
    case Exactness::kNone: return "none";
  }
  return "none";
}

std::string to_string(RelaxationKind k) {
  return k == RelaxationKind::kQhat ? "qhat" : "qr";
}

Polynomial PutinarCertificate::reconstruction_error(const PolyOptProblem& problem) const {
  const int n = problem.num_vars();
  Polynomial err = problem.objective - Polynomial::constant(n, lambda_star);
  if (sigmas.empty()) return err;
  err -= sigmas[0].polynomial();
  const auto& g = problem.feasible_set.constraints();
  for (std::size_t j = 0; j < g.size() && j + 1 < sigmas.size(); ++j) {
    err -= sigmas[j + 1].polynomial() * g[j];
  }
  return err;
}

SemialgebraicSet ball_augment(const SemialgebraicSet& k, double m) {
  if (!(m > 0.0)) throw PreconditionFailure("ball_augment: M must be > 0");
  const int n = k.num_vars();
  Polynomial ball = Polynomial::constant(n, m * m);
  for (int i = 0; i < n; ++i) ball -= Polynomial::variable(n, i).pow(2);
  std::vector<Polynomial> g = k.constraints();
  g.push_back(std::move(ball));
  return SemialgebraicSet(n, std::move(g), k.ball_bound());
}

bool has_archimedean_constraint(const SemialgebraicSet& k) {
  const int n = k.num_vars();
  for (const auto& g : k.constraints()) {
    if (g.degree() != 2) continue;
    Eigen::MatrixXd h(n, n);
    const auto hess = differentiate(g).hessian;
    bool constant = true;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Polynomial& e = hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (e.degree() > 0) constant = false;
        h(i, j) = e.constant_term();
      }
    }
    if (!constant) continue;
    const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .maxCoeff();
    if (top < -1e-12) return true;
  }
  return false;
}

int minimal_order(const PolyOptProblem& problem) {
  int d = std::max(1, half_ceil(problem.objective.degree()));
  return std::max(d, problem.feasible_set.max_half_degree());
}

CompiledMomentProgram build_qr(const PolyOptProblem& problem, int r) {
  const int r0 = minimal_order(problem);
  if (r < r0) {
    throw PreconditionFailure("build_qr: order " + std::to_string(r) +
                              " is below the minimal order " + std::to_string(r0));
  }
  const auto& k = problem.feasible_set;
  MomentProgram prog(problem.num_vars(), r);
  prog.minimize(problem.objective);
  prog.add_psd_block("M_r(y)", Polynomial::constant(problem.num_vars(), 1.0), r);
  for (int j = 0; j < k.num_constraints(); ++j) {
    prog.add_psd_block("M(g" + std::to_string(j + 1) + " y)", k.constraint(j),
                       r - k.half_degree(j));
  }
  return prog.compile();
}

CompiledMomentProgram build_qhat(const PolyOptProblem& problem) {
  const int d = minimal_order(problem);
  const auto& k = problem.feasible_set;
  MomentProgram prog(problem.num_vars(), d);
  prog.minimize(problem.objective);
  prog.add_psd_block("M_d(y)", Polynomial::constant(problem.num_vars(), 1.0), d);
  for (int j = 0; j < k.num_constraints(); ++j) {
    prog.add_scalar_inequality("L(g" + std::to_string(j + 1) + ")", k.constraint(j));
  }
  return prog.compile();
}

PutinarCertificate recover_dual_certificate(const PolyOptProblem& problem,
                                            const CompiledMomentProgram& program,
                                            const SdpSolution& solution,
                                            const SosOptions& sos_options) {
  if (solution.status != SdpStatus::kOptimal) {
    throw PreconditionFailure("recover_dual_certificate: solution status is " +
                              to_string(solution.status));
  }
  const int n = problem.num_vars();
  const auto& blocks = program.source().blocks();
  const MomentMultipliers mult = program.multipliers(solution);

  PutinarCertificate cert;
  cert.lambda_star = mult.bound;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    SosWitness w;
    if (blocks[b].kind == MomentBlockKind::kScalar) {
      cert.scalar_multipliers = true;
      cert.lambdas.push_back(mult.grams[b](0, 0));
      w.basis = {Monomial(n)};
    } else {
      w.basis = monomial_basis(n, blocks[b].order);
    }
    w.gram = mult.grams[b];
    cert.sigmas.push_back(std::move(w));
  }
  cert.residual = cert.reconstruction_error(problem).l1_norm();
  const double limit = 1e-6 * (1.0 + problem.objective.l1_norm());
  if (cert.residual > limit) {
    throw CertificateRejected("recover_dual_certificate: reconstruction residual " +
                                  std::to_string(cert.residual) + " exceeds " +
                                  std::to_string(limit),
                              cert.residual);
  }
  for (std::size_t b = 0; b < cert.sigmas.size(); ++b) {
    const double lmin = cert.sigmas[b].min_gram_eigenvalue();
    if (lmin < -1e-7) {
      throw CertificateRejected("recover_dual_certificate: sigma_" + std::to_string(b) +
                                    " Gram matrix has eigenvalue " + std::to_string(lmin),
                                cert.residual);
    }
  }
  cert.sigma0_sos_convex = is_sos_convex(cert.sigmas[0].polynomial(), sos_options).sos_convex;
  return cert;
}

LagrangianReport lagrangian(const Polynomial& f, std::span<const double> lambda,
                            double fstar, const SemialgebraicSet& k,
                            std::optional<Point> candidate) {
  if (static_cast<int>(lambda.size()) != k.num_constraints()) {
    throw PreconditionFailure("lagrangian: expected " + std::to_string(k.num_constraints()) +
                              " multipliers, got " + std::to_string(lambda.size()));
  }
  const int n = k.num_vars();
  LagrangianReport out;
  out.lagrangian = f - Polynomial::constant(n, fstar);
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (lambda[j] < 0.0) {
      throw PreconditionFailure("lagrangian: multiplier " + std::to_string(j + 1) +
                                " is negative");
    }
    out.lagrangian -= lambda[j] * k.constraint(static_cast<int>(j));
  }
  if (candidate) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = out.lagrangian.partial(i).eval(*candidate);
      sq += d * d;
    }
    out.gradient_norm = std::sqrt(sq);
    for (std::size_t j = 0; j < lambda.size(); ++j) {
      out.complementarity.push_back(lambda[j] *
                                    k.constraint(static_cast<int>(j)).eval(*candidate));
    }
  }
  return out;
}

StrictConvexityProbe probe_strict_convexity(const PolyOptProblem& problem, int samples,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box box = bounding_box_or(problem.feasible_set, 10.0);
  const auto pts = sample_set(problem.feasible_set, box, samples, rng);
  StrictConvexityProbe out;
  out.samples = static_cast<int>(pts.size());
  if (pts.empty()) return out;
  out.delta = sampled_min_curvature(problem.objective, pts);
  out.strictly_convex_on_samples = out.delta > 0.0;
  return out;
}

const RelaxationResult* HierarchyReport::exact() const {
  for (auto it = relaxations.rbegin(); it != relaxations.rend(); ++it) {
    if (it->exactness != Exactness::kNone) return &*it;
  }
  return nullptr;
}

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Relaxation status from the moment side: the SDP primal is the SOS side, so
// a primal ray (unbounded SOS side) means the moment relaxation is infeasible.
SdpStatus moment_status(SdpStatus s) {
  if (s == SdpStatus::kUnbounded) return SdpStatus::kInfeasible;
  if (s == SdpStatus::kInfeasible) return SdpStatus::kUnbounded;
  return s;
}

void describe_failure(RelaxationResult& r) {
  switch (r.status) {
    case SdpStatus::kInfeasible:
      r.message = "relaxation infeasible (K is empty)";
      r.raw_bound = std::numeric_limits<double>::infinity();
      break;
    case SdpStatus::kUnbounded:
      r.message = "relaxation unbounded below";
      r.raw_bound = -std::numeric_limits<double>::infinity();
      break;
    default:
      r.message = "solver failure: " + to_string(r.status);
      r.raw_bound = std::numeric_limits<double>::quiet_NaN();
  }
  r.lower_bound = r.raw_bound;
}

void attach_certificate(RelaxationResult& r, const PolyOptProblem& problem,
                        const CompiledMomentProgram& prog, const SdpSolution& sol,
                        const SosOptions& sos) {
  try {
    r.certificate = recover_dual_certificate(problem, prog, sol, sos);
  } catch (const CertificateRejected& e) {
    r.certificate_note = e.what();
  }
}

}  // namespace

HierarchyReport solve_hierarchy(const PolyOptProblem& problem,
                                const HierarchyOptions& options) {
  const auto& k = problem.feasible_set;
  HierarchyReport report{{}, k, "", false, false, false, std::nullopt};
  if (k.ball_bound()) {
    report.relaxed_set = ball_augment(k, *k.ball_bound());
    report.archimedean = "ball_augmented";
  } else if (has_archimedean_constraint(k)) {
    report.archimedean = "constraint";
  } else if (options.waive_archimedean) {
    report.archimedean = "waived";
  } else {
    throw PreconditionFailure(
        "solve_hierarchy: K is not known to be Archimedean; supply a ball bound "
        "or waive the requirement");
  }
  const PolyOptProblem relaxed(problem.objective, report.relaxed_set);
  const int r0 = minimal_order(relaxed);
  if (options.r_max < r0) {
    throw PreconditionFailure("solve_hierarchy: r_max = " + std::to_string(options.r_max) +
                              " is below the minimal order " + std::to_string(r0));
  }
  const auto& g = report.relaxed_set.constraints();

  if (options.try_qhat) {
    const auto t0 = std::chrono::steady_clock::now();
    RelaxationResult res;
    res.kind = RelaxationKind::kQhat;
    res.order = r0;
    const CompiledMomentProgram prog = build_qhat(relaxed);
    const SdpSolution sol = solve_sdp(prog.sdp(), options.sdp);
    res.status = moment_status(sol.status);
    if (res.solved()) {
      res.moments = prog.moments(sol);
      res.raw_bound = prog.moment_value(sol);
      res.lower_bound = res.raw_bound;
      attach_certificate(res, relaxed, prog, sol, options.sos);
      bool all_sos_convex = is_sos_convex(relaxed.objective, options.sos).sos_convex;
      for (std::size_t j = 0; all_sos_convex && j < g.size(); ++j) {
        all_sos_convex = is_sos_convex(-g[j], options.sos).sos_convex;
      }
      if (all_sos_convex) {
        res.minimizer = mean_point(*res.moments);
        res.exactness = Exactness::kSosConvexSingleShot;
        res.message = "f and every -g_j are SOS-convex: the simplified relaxation is exact";
      } else {
        res.message = "not all data SOS-convex; the simplified bound is not known to be exact";
      }
    } else {
      describe_failure(res);
    }
    res.seconds = elapsed_since(t0);
    const bool stop = res.exactness != Exactness::kNone || res.status == SdpStatus::kInfeasible;
    report.relaxations.push_back(std::move(res));
    if (stop) return report;
  }

  // Sampled convexity of f and of every -g_j gates the mean-point test.
  {
    std::mt19937_64 rng(options.seed);
    const Box box = bounding_box_or(report.relaxed_set, 10.0);
    const auto pts = sample_box(box, options.convexity_samples, rng);
    report.convexity_sampled = true;
    report.f_convex_sampled = sampled_min_curvature(relaxed.objective, pts) >= -1e-9;
    report.constraints_concave_sampled = true;
    for (const auto& gj : g) {
      if (sampled_min_curvature(-gj, pts) < -1e-9) report.constraints_concave_sampled = false;
    }
    report.strict_convexity =
        probe_strict_convexity(relaxed, options.convexity_samples, options.seed);
  }

  int shift = 1;
  for (int j = 0; j < report.relaxed_set.num_constraints(); ++j) {
    shift = std::max(shift, report.relaxed_set.half_degree(j));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (int r = r0; r <= options.r_max; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    RelaxationResult res;
    res.kind = RelaxationKind::kQr;
    res.order = r;
    const CompiledMomentProgram prog = build_qr(relaxed, r);
    const SdpSolution sol = solve_sdp(prog.sdp(), options.sdp);
    res.status = moment_status(sol.status);
    if (!res.solved()) {
      describe_failure(res);
      res.seconds = elapsed_since(t0);
      const bool infeasible = res.status == SdpStatus::kInfeasible;
      report.relaxations.push_back(std::move(res));
      if (infeasible) break;
      continue;
    }
    res.moments = prog.moments(sol);
    res.raw_bound = prog.moment_value(sol);
    res.lower_bound = std::max(res.raw_bound, best);
    best = res.lower_bound;
    attach_certificate(res, relaxed, prog, sol, options.sos);

    const MomentVector& y = *res.moments;
    const double tol = options.point_tol * (1.0 + std::abs(res.raw_bound));
    auto accept_mean_point = [&](Exactness tag) {
      const Point x = mean_point(y);
      if (!report.relaxed_set.contains(x, tol)) return false;
      if (relaxed.objective.eval(x) > res.raw_bound + tol) return false;
      res.minimizer = x;
      res.exactness = tag;
      return true;
    };

    if (r - shift >= 0) {
      res.flatness = flatness(y, r, options.tau, shift);
      if (res.flatness->flat) {
        if (res.flatness->rank_d == 1) {
          if (accept_mean_point(Exactness::kFlatRank)) {
            res.message = "flat with rank 1: minimizer is the mean point";
          }
        } else {
          res.message = "flat with rank " + std::to_string(res.flatness->rank_d) +
                        ": bound exact, several minimizers (atom extraction not provided)";
        }
      }
    }
    if (res.exactness == Exactness::kNone && report.f_convex_sampled &&
        report.constraints_concave_sampled) {
      if (accept_mean_point(Exactness::kConvexMeanPoint)) {
        res.message = "convex data (sampled): the mean point attains the bound";
      }
    }
    res.seconds = elapsed_since(t0);
    const bool stop = res.exactness != Exactness::kNone ||
                      (res.flatness && res.flatness->flat);
    report.relaxations.push_back(std::move(res));
    if (stop) break;
  }
  return report;
}

}  // namespace cvxpoly
