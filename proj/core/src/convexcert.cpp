#include "cvxpoly/convexcert.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

namespace {

void check_index(const SemialgebraicSet& k, int j, const char* who) {
  if (j < 0 || j >= k.num_constraints()) {
    throw PreconditionFailure(std::string(who) + ": constraint index " + std::to_string(j) +
                              " out of range (m = " + std::to_string(k.num_constraints()) +
                              ")");
  }
}

std::vector<double> gradient_at(const Polynomial& g, std::span<const double> x) {
  std::vector<double> out;
  for (int i = 0; i < g.num_vars(); ++i) out.push_back(g.partial(i).eval(x));
  return out;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

// -g has a constant PSD Hessian: g is affine or a concave quadratic.
bool concave_quadratic(const Polynomial& g) {
  if (g.degree() > 2) return false;
  const int n = g.num_vars();
  const auto hess = differentiate(g).hessian;
  Eigen::MatrixXd h(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      h(a, b) = hess[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].constant_term();
    }
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly)
             .eigenvalues()
             .maxCoeff() <= 1e-12;
}

SdpStatus moment_side(SdpStatus s) {
  if (s == SdpStatus::kUnbounded) return SdpStatus::kInfeasible;
  if (s == SdpStatus::kInfeasible) return SdpStatus::kUnbounded;
  return s;
}

}  // namespace

std::string to_string(CertificationMethod m) {
  return m == CertificationMethod::kRhoSdp ? "rho_sdp" : "quadratic_concave_shortcut";
}

std::string to_string(CertificationStatus s) {
  switch (s) {
    case CertificationStatus::kCertifiedNumerically: return "certified_numerically";
    case CertificationStatus::kInconclusive: return "inconclusive";
    case CertificationStatus::kRefutedBySample: return "refuted_by_sample";
  }
  return "inconclusive";
}

std::string to_string(SdrForm f) {
  return f == SdrForm::kLocalizing ? "localizing" : "scalar_rows";
}

Polynomial supporting_form(const SemialgebraicSet& k, int j) {
  check_index(k, j, "supporting_form");
  const int n = k.num_vars();
  const Polynomial& g = k.constraint(j);
  Polynomial out(2 * n);
  for (int i = 0; i < n; ++i) {
    const Polynomial diff = Polynomial::variable(2 * n, i) - Polynomial::variable(2 * n, n + i);
    out += g.partial(i).embed(2 * n, n) * diff;
  }
  return out;
}

int rho_min_order(const SemialgebraicSet& k, int j) {
  int d = std::max(1, half_ceil(supporting_form(k, j).degree()));
  for (int i = 0; i < k.num_constraints(); ++i) d = std::max(d, k.half_degree(i));
  return d;
}

CompiledMomentProgram rho_program(const SemialgebraicSet& k, int j, int d) {
  check_index(k, j, "rho_program");
  const int dmin = rho_min_order(k, j);
  if (d < dmin) {
    throw PreconditionFailure("rho_program: order " + std::to_string(d) +
                              " is below the admissible minimum " + std::to_string(dmin));
  }
  const int n = k.num_vars();
  MomentProgram prog(2 * n, d);
  prog.minimize(supporting_form(k, j));
  prog.add_psd_block("M_d(z)", Polynomial::constant(2 * n, 1.0), d);
  for (int i = 0; i < k.num_constraints(); ++i) {
    prog.add_psd_block("M(g" + std::to_string(i + 1) + "(X) z)",
                       k.constraint(i).embed(2 * n, 0), d - k.half_degree(i));
  }
  for (int i = 0; i < k.num_constraints(); ++i) {
    if (i == j) continue;
    prog.add_psd_block("M(g" + std::to_string(i + 1) + "(Y) z)",
                       k.constraint(i).embed(2 * n, n), d - k.half_degree(i));
  }
  prog.add_zero_block("M(g" + std::to_string(j + 1) + "(Y) z) = 0",
                      k.constraint(j).embed(2 * n, n), d - k.half_degree(j));
  return prog.compile();
}

RhoWeights recover_rho_weights(const CompiledMomentProgram& program,
                               const SdpSolution& solution) {
  const MomentProgram& src = program.source();
  const int nv = src.num_vars();
  const MomentMultipliers mult = program.multipliers(solution);
  RhoWeights w;
  w.bound = mult.bound;
  Polynomial err = src.objective() - Polynomial::constant(nv, mult.bound);
  for (std::size_t b = 0; b < src.blocks().size(); ++b) {
    const MomentBlock& blk = src.blocks()[b];
    SosWitness s;
    s.basis = monomial_basis(nv, blk.order);
    s.gram = mult.grams[b];
    err -= s.polynomial() * blk.localizer;
    w.labels.push_back(blk.label);
    w.localizers.push_back(blk.localizer);
    w.sigmas.push_back(std::move(s));
  }
  if (!mult.zero_block_multipliers.empty()) {
    w.psi = mult.zero_block_multipliers.front();
    err -= w.psi * src.zero_blocks().front().localizer;
  } else {
    w.psi = Polynomial(nv);
  }
  w.residual = err.l1_norm();
  return w;
}

int ConvexityCertificate::max_degree() const {
  int d = 0;
  for (const auto& c : constraints) d = std::max(d, c.d_j);
  return d;
}

std::vector<NondegeneracyReport> nondegeneracy_probe(const SemialgebraicSet& k,
                                                     int samples, std::uint64_t seed,
                                                     double band, double fallback_box) {
  if (samples < 1) throw PreconditionFailure("nondegeneracy_probe: samples must be >= 1");
  const Box box = bounding_box_or(k, fallback_box);
  std::vector<NondegeneracyReport> out;
  for (int j = 0; j < k.num_constraints(); ++j) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
    const Polynomial& g = k.constraint(j);
    NondegeneracyReport rep;
    rep.j = j;
    rep.min_gradient_norm = std::numeric_limits<double>::infinity();
    for (auto& x : sample_box(box, samples, rng)) {
      const Point y = project_to_zero_set(g, std::move(x));
      if (std::abs(g.eval(y)) > band || !k.contains(y, band)) continue;
      ++rep.active_samples;
      rep.min_gradient_norm = std::min(rep.min_gradient_norm, norm2(gradient_at(g, y)));
    }
    if (rep.active_samples == 0) {
      rep.min_gradient_norm = 0.0;
      rep.note = "no active samples";
    } else {
      rep.degenerate = rep.min_gradient_norm < 1e-6;
      rep.note = rep.degenerate ? "DEGENERATE: gradient vanishes on the boundary piece"
                                : "gradient bounded away from zero on sampled boundary";
    }
    out.push_back(std::move(rep));
  }
  return out;
}

SlaterReport slater_heuristic(const SemialgebraicSet& k, double margin,
                              std::uint64_t seed, double fallback_box) {
  const Box box = bounding_box_or(k, fallback_box);
  const int n = k.num_vars();
  SlaterReport rep;
  if (k.num_constraints() == 0) {
    rep.found = true;
    rep.margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      rep.point.push_back(0.5 * (box.lo[u] + box.hi[u]));
    }
    return rep;
  }
  std::mt19937_64 rng(seed);
  Point best;
  double best_v = -std::numeric_limits<double>::infinity();
  for (auto& x : sample_box(box, 4000, rng)) {
    const double v = k.min_constraint_value(x);
    if (v > best_v) {
      best_v = v;
      best = std::move(x);
    }
  }
  // Random local ascent on min_j g_j.
  double step = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    step = std::max(step, 0.05 * (box.hi[u] - box.lo[u]));
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  int failures = 0;
  for (int it = 0; it < 2000 && step > 1e-10; ++it) {
    Point trial = best;
    for (double& t : trial) t += step * gauss(rng);
    const double v = k.min_constraint_value(trial);
    if (v > best_v) {
      best_v = v;
      best = std::move(trial);
      failures = 0;
    } else if (++failures >= 20) {
      step /= 2.0;
      failures = 0;
    }
  }
  rep.point = best;
  rep.margin = best_v;
  rep.found = best_v >= margin;
  return rep;
}

namespace {

std::optional<std::pair<Point, Point>> refute(const SemialgebraicSet& k, int j,
                                              const Box& box, int samples,
                                              std::mt19937_64& rng) {
  const Polynomial& g = k.constraint(j);
  const auto xs = sample_set(k, box, samples, rng);
  if (xs.empty()) return std::nullopt;
  for (auto& start : sample_box(box, samples, rng)) {
    const Point y = project_to_zero_set(g, std::move(start));
    if (std::abs(g.eval(y)) > 1e-9 || !k.contains(y, 1e-9)) continue;
    const auto grad = gradient_at(g, y);
    const double slack = 1e-4 * (1.0 + norm2(grad));
    for (const auto& x : xs) {
      double inner = 0.0;
      for (std::size_t i = 0; i < grad.size(); ++i) inner += grad[i] * (x[i] - y[i]);
      if (inner < -slack) return std::make_pair(x, y);
    }
  }
  return std::nullopt;
}

}  // namespace

ConvexityCertificate certify_convexity(const SemialgebraicSet& k,
                                       const CertifyOptions& options) {
  ConvexityCertificate cert;
  cert.tol = options.tol;
  cert.slater = slater_heuristic(k, options.slater_margin, options.seed, options.fallback_box);
  cert.slater.waived = options.waive_slater;
  if (!cert.slater.found && !options.waive_slater) {
    throw PreconditionFailure("certify_convexity: no Slater point found (best margin " +
                              std::to_string(cert.slater.margin) +
                              "); waive the heuristic to proceed");
  }

  bool all_closed = true;
  bool solver_trouble = false;
  for (int j = 0; j < k.num_constraints(); ++j) {
    ConstraintCertificate c;
    c.j = j;
    if (concave_quadratic(k.constraint(j))) {
      c.method = CertificationMethod::kQuadraticConcaveShortcut;
      c.d_j = 1;
      c.rho_j = 0.0;
      c.closed = true;
      cert.constraints.push_back(std::move(c));
      continue;
    }
    c.method = CertificationMethod::kRhoSdp;
    const int dmin = std::max(rho_min_order(k, j), options.d_min);
    for (int d = dmin; d <= options.d_max; ++d) {
      const auto t0 = std::chrono::steady_clock::now();
      const CompiledMomentProgram prog = rho_program(k, j, d);
      const SdpSolution sol = solve_sdp(prog.sdp(), options.sdp);
      RhoAttempt at;
      at.d = d;
      at.status = moment_side(sol.status);
      if (at.status == SdpStatus::kOptimal) {
        at.rho = prog.moment_value(sol);
      } else {
        at.rho = std::numeric_limits<double>::quiet_NaN();
        solver_trouble = true;
      }
      at.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.attempts.push_back(at);
      c.d_j = d;
      c.rho_j = at.rho;
      if (at.status == SdpStatus::kOptimal && std::abs(at.rho) <= options.tol) {
        c.closed = true;
        c.moments = prog.moments(sol);
        if (options.recover_weights) c.weights = recover_rho_weights(prog, sol);
        break;
      }
    }
    if (c.attempts.empty()) c.d_j = dmin;
    all_closed = all_closed && c.closed;
    cert.constraints.push_back(std::move(c));
  }

  cert.probe = nondegeneracy_probe(k, options.probe_samples, options.seed, 1e-4,
                                   options.fallback_box);
  std::vector<int> degenerate;
  for (const auto& p : cert.probe) {
    if (p.degenerate) degenerate.push_back(p.j);
  }
  cert.degenerate = !degenerate.empty();

  if (!all_closed) {
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    const Box box = bounding_box_or(k, options.fallback_box);
    for (const auto& c : cert.constraints) {
      if (c.closed) continue;
      if (auto pair = refute(k, c.j, box, options.refute_samples, rng)) {
        cert.refuting_pair = std::move(pair);
        cert.refuted_constraint = c.j;
        break;
      }
    }
  }

  std::ostringstream verdict;
  if (cert.refuting_pair) {
    cert.status = CertificationStatus::kRefutedBySample;
    verdict << "refuted by sample: the supporting-hyperplane inequality fails for g"
            << cert.refuted_constraint + 1;
  } else if (all_closed && !cert.degenerate) {
    cert.status = CertificationStatus::kCertifiedNumerically;
    verdict << "certified numerically at tolerance " << options.tol;
  } else {
    cert.status = CertificationStatus::kInconclusive;
    verdict << "inconclusive";
    if (!all_closed) {
      verdict << (solver_trouble ? ": solver failure or rho_j not closed by d_max = "
                                 : ": rho_j not closed by d_max = ")
              << options.d_max;
    }
  }
  if (cert.degenerate) {
    verdict << " [DEGENERATE boundary for";
    for (int j : degenerate) verdict << " g" << j + 1;
    verdict << ": the rho test can hold vacuously]";
  }
  if (cert.slater.waived && !cert.slater.found) verdict << " [Slater heuristic waived]";
  cert.verdict = verdict.str();
  return cert;
}

// ---------------------------------------------------------------------------
// Semidefinite representation.

namespace {

LmiBlock make_block(const std::string& label, const Polynomial& g, int order, int n) {
  LmiBlock b;
  b.label = label;
  const auto basis = monomial_basis(n, order);
  b.size = static_cast<int>(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Monomial ab = basis[i] * basis[j];
      for (const auto& [gamma, c] : g.terms()) {
        b.entries.push_back({static_cast<int>(grlex_index(ab * gamma)), static_cast<int>(i),
                             static_cast<int>(j), c});
      }
    }
  }
  return b;
}

MomentProgram sdr_program(const SdrRepresentation& sdr) {
  const int n = sdr.num_vars();
  const auto& k = sdr.base_set;
  MomentProgram prog(n, sdr.d);
  prog.add_psd_block("M_d(y)", Polynomial::constant(n, 1.0), sdr.d);
  for (int j = 0; j < k.num_constraints(); ++j) {
    const std::string label = "g" + std::to_string(j + 1);
    if (sdr.form == SdrForm::kLocalizing) {
      prog.add_psd_block("M(" + label + " y)", k.constraint(j), sdr.d - k.half_degree(j));
    } else {
      prog.add_scalar_inequality("L(" + label + ")", k.constraint(j));
    }
  }
  return prog;
}

}  // namespace

SdrRepresentation build_sdr(const SemialgebraicSet& k, int d, SdrForm form) {
  const int n = k.num_vars();
  int dmin = 1;
  for (int j = 0; j < k.num_constraints(); ++j) dmin = std::max(dmin, k.half_degree(j));
  if (d < dmin) {
    throw PreconditionFailure("build_sdr: order " + std::to_string(d) +
                              " is below the minimum " + std::to_string(dmin));
  }
  SdrRepresentation sdr{d, form, k, static_cast<int>(basis_size(n, 2 * d)),
                        monomial_basis(n, 2 * d), {}};
  sdr.blocks.push_back(make_block("M_d(y)", Polynomial::constant(n, 1.0), d, n));
  for (int j = 0; j < k.num_constraints(); ++j) {
    const std::string label = "g" + std::to_string(j + 1);
    if (form == SdrForm::kLocalizing) {
      sdr.blocks.push_back(
          make_block("M(" + label + " y)", k.constraint(j), d - k.half_degree(j), n));
    } else {
      sdr.blocks.push_back(make_block("L(" + label + ")", k.constraint(j), 0, n));
    }
  }
  return sdr;
}

SdrRepresentation build_sdr(const SemialgebraicSet& k, const ConvexityCertificate& cert) {
  if (cert.status != CertificationStatus::kCertifiedNumerically) {
    throw PreconditionFailure("build_sdr: certificate status is " + to_string(cert.status) +
                              "; an override order is required");
  }
  if (static_cast<int>(cert.constraints.size()) != k.num_constraints()) {
    throw PreconditionFailure("build_sdr: certificate does not match the set");
  }
  return build_sdr(k, std::max(1, cert.max_degree()), SdrForm::kLocalizing);
}

Eigen::MatrixXd SdrRepresentation::block_value(std::size_t b, const MomentVector& y) const {
  const LmiBlock& blk = blocks.at(b);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (const auto& e : blk.entries) {
    const double v = e.coeff * y.values()(e.moment);
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
  return m;
}

double SdrRepresentation::violation(const Point& x, const MomentVector& y) const {
  if (y.num_vars() != num_vars() || y.order() < d ||
      static_cast<int>(x.size()) != num_vars()) {
    throw PreconditionFailure("SdrRepresentation::violation: dimension mismatch");
  }
  const MomentVector lifted(num_vars(), d, y.values().head(lift_dimension));
  double worst = std::abs(lifted.y0() - 1.0);
  for (int i = 0; i < num_vars(); ++i) {
    const double mi = lifted[Monomial::variable(num_vars(), i)];
    worst = std::max(worst, std::abs(mi - x[static_cast<std::size_t>(i)]));
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    worst = std::max(worst, -min_eigenvalue(block_value(b, lifted)));
  }
  return worst;
}

SupportResult sdr_support(const SdrRepresentation& sdr, const Point& c,
                          const SdpOptions& options) {
  const int n = sdr.num_vars();
  if (static_cast<int>(c.size()) != n) {
    throw PreconditionFailure("sdr_support: direction has dimension " +
                              std::to_string(c.size()) + ", expected " + std::to_string(n));
  }
  MomentProgram prog = sdr_program(sdr);
  Polynomial f(n);
  for (int i = 0; i < n; ++i) f += c[static_cast<std::size_t>(i)] * Polynomial::variable(n, i);
  prog.minimize(f);
  const CompiledMomentProgram compiled = prog.compile();
  const SdpSolution sol = solve_sdp(compiled.sdp(), options);
  SupportResult out;
  out.status = moment_side(sol.status);
  if (out.status == SdpStatus::kOptimal) {
    const MomentVector y = compiled.moments(sol);
    out.value = compiled.moment_value(sol);
    out.point = mean_point(y);
  } else if (out.status == SdpStatus::kMaxIterations ||
             out.status == SdpStatus::kNumericalFailure) {
    throw SolverFailure("sdr_support: " + to_string(sol.status) + " (" + sol.message + ")");
  }
  return out;
}

bool sdr_contains(const SdrRepresentation& sdr, const Point& x, const SdpOptions& options) {
  const int n = sdr.num_vars();
  if (static_cast<int>(x.size()) != n) {
    throw PreconditionFailure("sdr_contains: point dimension mismatch");
  }
  MomentProgram prog = sdr_program(sdr);
  for (int i = 0; i < n; ++i) {
    prog.add_equality("L(X" + std::to_string(i + 1) + ")", Polynomial::variable(n, i),
                      x[static_cast<std::size_t>(i)]);
  }
  const SdpSolution sol = solve_sdp(prog.compile().sdp(), options);
  return sol.status == SdpStatus::kOptimal;
}

}  // namespace cvxpoly
