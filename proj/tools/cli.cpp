#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cvxpoly/convexcert.hpp"
#include "cvxpoly/errors.hpp"
#include "cvxpoly/hierarchy.hpp"
#include "cvxpoly/problem_file.hpp"
#include "cvxpoly/serialize.hpp"
#include "cvxpoly/sos.hpp"

namespace cvxpoly::cli {

namespace {

struct Flags {
  std::string file;
  std::optional<int> order;
  std::optional<int> dmax;
  std::optional<double> tol;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string sdpa_path;
  bool force = false;
  bool json = false;
  bool timing = false;
};

std::string num(double v, int digits = 10) {
  std::ostringstream s;
  s << std::setprecision(digits) << v + 0.0;
  return s.str();
}

std::string point_text(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p[i], 8);
  return s + ")";
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << contents;
}

// Wall-clock fields would make reports differ between identical runs, so
// they are only kept on request.
void strip_timing(Json& j) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (key == "seconds") {
        value = 0.0;
      } else {
        strip_timing(value);
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

void emit(const Json& artifact, const Flags& f, std::ostream& out) {
  Json j = artifact;
  if (!f.timing) strip_timing(j);
  const std::string text = j.dump(2) + "\n";
  if (!f.out_path.empty()) write_file(f.out_path, text);
  if (f.json) out << text;
}

// ---------------------------------------------------------------------------

int cmd_solve(const Flags& f, std::ostream& out) {
  const ProblemFile pf = load_problem(f.file);
  const PolyOptProblem problem = pf.problem();
  HierarchyOptions opt;
  if (pf.options.r_max) opt.r_max = *pf.options.r_max;
  if (pf.options.tau) opt.tau = *pf.options.tau;
  if (pf.options.seed) opt.seed = *pf.options.seed;
  opt.waive_archimedean = pf.options.waive_archimedean;
  if (f.order) opt.r_max = *f.order;
  if (f.tau) opt.tau = *f.tau;
  if (f.seed) opt.seed = *f.seed;

  const HierarchyReport report = solve_hierarchy(problem, opt);
  if (!f.sdpa_path.empty()) {
    const PolyOptProblem relaxed(problem.objective, report.relaxed_set);
    std::ofstream s(f.sdpa_path);
    if (!s) throw ParseError("cannot write '" + f.sdpa_path + "'");
    write_sdpa(build_qr(relaxed, minimal_order(relaxed)).sdp(), s);
  }
  emit(to_json(report), f, out);

  bool any_solved = false;
  for (const auto& r : report.relaxations) any_solved = any_solved || r.solved();
  if (!f.json) {
    out << "problem: n = " << pf.n << ", " << report.relaxed_set.num_constraints()
        << " constraint(s), archimedean via " << report.archimedean << "\n";
    out << std::left << std::setw(6) << "kind" << std::setw(7) << "order" << std::setw(19)
        << "status" << std::setw(20) << "lower bound" << "exactness\n";
    for (const auto& r : report.relaxations) {
      out << std::setw(6) << to_string(r.kind) << std::setw(7) << r.order << std::setw(19)
          << to_string(r.status) << std::setw(20) << (r.solved() ? num(r.lower_bound, 12) : "-")
          << to_string(r.exactness) << "\n";
    }
    if (const RelaxationResult* ex = report.exact()) {
      out << "exact: " << to_string(ex->exactness) << " at order " << ex->order
          << ", f* = " << num(ex->lower_bound, 12) << "\n";
      if (ex->minimizer) out << "minimizer: " << point_text(*ex->minimizer) << "\n";
      if (ex->certificate) {
        out << "certificate: lambda* = " << num(ex->certificate->lambda_star, 12)
            << ", residual " << num(ex->certificate->residual, 3)
            << (ex->certificate->scalar_multipliers ? ", scalar multipliers" : "")
            << (ex->certificate->sigma0_sos_convex ? ", sigma_0 SOS-convex" : "") << "\n";
      } else if (!ex->certificate_note.empty()) {
        out << "certificate: " << ex->certificate_note << "\n";
      }
    } else {
      out << "no exactness test fired up to r_max = " << opt.r_max << "\n";
      if (!report.relaxations.empty()) out << "last note: " << report.relaxations.back().message << "\n";
    }
  }
  return any_solved ? kOk : kSolverFailure;
}

CertifyOptions certify_options(const ProblemFile& pf, const Flags& f) {
  CertifyOptions opt;
  if (pf.options.d_min) opt.d_min = *pf.options.d_min;
  if (pf.options.d_max) opt.d_max = *pf.options.d_max;
  if (pf.options.tol) opt.tol = *pf.options.tol;
  if (pf.options.seed) opt.seed = *pf.options.seed;
  opt.waive_slater = pf.options.waive_slater;
  if (f.order) opt.d_min = *f.order;
  if (f.dmax) opt.d_max = *f.dmax;
  if (f.tol) opt.tol = *f.tol;
  if (f.seed) opt.seed = *f.seed;
  return opt;
}

void print_certificate(const ConvexityCertificate& c, std::ostream& out) {
  out << std::left << std::setw(12) << "constraint" << std::setw(28) << "method" << std::setw(5)
      << "d_j" << std::setw(16) << "rho_j" << "closed\n";
  for (const auto& cc : c.constraints) {
    out << std::setw(12) << ("g" + std::to_string(cc.j + 1)) << std::setw(28)
        << to_string(cc.method) << std::setw(5) << cc.d_j << std::setw(16) << num(cc.rho_j, 6)
        << (cc.closed ? "yes" : "no") << "\n";
  }
  for (const auto& p : c.probe) {
    if (p.degenerate) {
      out << "*** DEGENERATE: g" << p.j + 1 << " has min |grad| = " << num(p.min_gradient_norm, 3)
          << " on its boundary piece; " << p.note << " ***\n";
    } else {
      out << "nondegeneracy g" << p.j + 1 << ": min |grad| = " << num(p.min_gradient_norm, 6)
          << " over " << p.active_samples << " boundary samples\n";
    }
  }
  if (c.refuting_pair) {
    out << "refuting pair: x = " << point_text(c.refuting_pair->first)
        << ", y = " << point_text(c.refuting_pair->second) << "\n";
  }
  out << "status: " << to_string(c.status) << "\n";
  out << "verdict: " << c.verdict << "\n";
}

bool solver_trouble(const ConvexityCertificate& c) {
  if (c.status != CertificationStatus::kInconclusive) return false;
  for (const auto& cc : c.constraints) {
    if (cc.closed) continue;
    for (const auto& a : cc.attempts) {
      if (a.status == SdpStatus::kNumericalFailure || a.status == SdpStatus::kMaxIterations) {
        return true;
      }
    }
  }
  return false;
}

int cmd_certify(const Flags& f, std::ostream& out) {
  const ProblemFile pf = load_problem(f.file);
  const SemialgebraicSet k = pf.feasible_set();
  const CertifyOptions opt = certify_options(pf, f);
  const ConvexityCertificate cert = certify_convexity(k, opt);
  if (!f.sdpa_path.empty()) {
    for (int j = 0; j < k.num_constraints(); ++j) {
      if (cert.constraints[static_cast<std::size_t>(j)].method == CertificationMethod::kRhoSdp) {
        std::ofstream s(f.sdpa_path);
        if (!s) throw ParseError("cannot write '" + f.sdpa_path + "'");
        write_sdpa(rho_program(k, j, std::max(rho_min_order(k, j), opt.d_min)).sdp(), s);
        break;
      }
    }
  }
  emit(to_json(cert, k.num_vars()), f, out);
  if (!f.json) print_certificate(cert, out);
  return solver_trouble(cert) ? kSolverFailure : kOk;
}

int cmd_sdr(const Flags& f, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load_problem(f.file);
  const SemialgebraicSet k = pf.feasible_set();
  const CertifyOptions opt = certify_options(pf, f);
  std::optional<SdrRepresentation> sdr;
  std::optional<ConvexityCertificate> cert;
  try {
    cert = certify_convexity(k, opt);
  } catch (const PreconditionFailure& e) {
    if (!f.force) throw;
    err << "certification skipped: " << e.what() << "\n";
  }
  if (cert && cert->status == CertificationStatus::kCertifiedNumerically) {
    sdr = build_sdr(k, *cert);
  } else if (!f.force) {
    err << "refusing to emit an SDr lift: certification status is "
        << (cert ? to_string(cert->status) : "unavailable") << " (use --force with --order)\n";
    return kRefused;
  } else {
    int d = 1;
    for (int j = 0; j < k.num_constraints(); ++j) d = std::max(d, k.half_degree(j));
    if (f.order) d = *f.order;
    sdr = build_sdr(k, d, SdrForm::kLocalizing);
    err << "warning: forced lift without a convexity certificate\n";
  }
  const Json j = to_json(*sdr);
  if (!f.out_path.empty()) write_file(f.out_path, j.dump(2) + "\n");
  if (f.json || f.out_path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    out << "Omega: d = " << sdr->d << ", lift dimension s(" << 2 * sdr->d
        << ") = " << sdr->lift_dimension << ", " << sdr->blocks.size() << " LMI blocks ("
        << to_string(sdr->form) << ")\n";
    for (const auto& b : sdr->blocks) {
      out << "  " << b.label << ": " << b.size << "x" << b.size << ", " << b.entries.size()
          << " entries\n";
    }
    out << "written to " << f.out_path << "\n";
  }
  return kOk;
}

int cmd_jensen(const Flags& f, std::ostream& out) {
  const ProblemFile pf = load_problem(f.file);
  if (!pf.jensen) throw ParseError("the file has no 'jensen' section");
  const JensenSpec& spec = *pf.jensen;
  const JensenReport r = spec.f ? jensen_check(*spec.f, spec.moments)
                                : jensen_composed_check(*spec.f_uni, *spec.g, spec.moments);
  emit(to_json(r), f, out);
  if (!f.json) {
    out << num(r.lhs, 6) << " ≥ " << num(r.rhs, 6) << " : "
        << (r.holds ? "HOLDS" : "VIOLATED") << "\n";
  }
  return kOk;
}

int cmd_sos_check(const Flags& f, std::ostream& out) {
  const ProblemFile pf = load_problem(f.file);
  const std::optional<Polynomial>& p = pf.polynomial ? pf.polynomial : pf.objective;
  if (!p) throw ParseError("the file has neither 'polynomial' nor 'objective'");
  const SosResult r = sos_decompose(*p);
  emit(to_json(r, pf.n), f, out);
  if (!f.json) {
    out << "polynomial: " << p->to_string() << "\n";
    out << "SOS: " << (r.is_sos ? "yes" : "no") << " (" << to_string(r.status) << ")\n";
    if (r.witness) {
      out << "Gram basis size " << r.witness->basis.size() << ", min eigenvalue "
          << num(r.witness->min_gram_eigenvalue(), 3) << ", residual "
          << num(r.witness->residual, 3) << "\n";
    }
    if (r.separating_functional) out << "separating functional found (infeasibility certificate)\n";
    if (!r.message.empty()) out << "note: " << r.message << "\n";
  }
  const bool answered = r.is_sos || r.status == SdpStatus::kInfeasible;
  return answered ? kOk : kSolverFailure;
}

int cmd_probe(const Flags& f, std::ostream& out) {
  const ProblemFile pf = load_problem(f.file);
  const SemialgebraicSet k = pf.feasible_set();
  const std::uint64_t seed = f.seed ? *f.seed : pf.options.seed.value_or(kDefaultSeed);
  const auto probe = nondegeneracy_probe(k, 2000, seed);
  const SlaterReport slater = slater_heuristic(k, 1e-6, seed);
  Json j{{"probe", Json::array()},
         {"slater", {{"found", slater.found}, {"point", slater.point}, {"margin", slater.margin}}}};
  for (const auto& p : probe) j["probe"].push_back(to_json(p));
  emit(j, f, out);
  if (!f.json) {
    for (const auto& p : probe) {
      out << "g" << p.j + 1 << ": " << (p.degenerate ? "DEGENERATE" : "nondegenerate")
          << ", min |grad| = " << num(p.min_gradient_norm, 6) << " over " << p.active_samples
          << " boundary samples" << (p.note.empty() ? "" : "; " + p.note) << "\n";
    }
    out << "Slater point: "
        << (slater.found ? point_text(slater.point) + ", margin " + num(slater.margin, 6)
                         : "not found (best margin " + num(slater.margin, 6) + ")")
        << "\n";
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convex polynomial optimization: moment/SOS relaxations and convexity certificates"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("file", f.file, "Problem file (JSON)")->required();
    sub->add_option("--seed", f.seed, "Seed for every sampling step");
    sub->add_option("--out", f.out_path, "Write the JSON artifact to this path");
    sub->add_flag("--json", f.json, "Print the JSON artifact instead of a table");
    sub->add_flag("--timing", f.timing, "Keep wall-clock fields in JSON artifacts");
  };
  auto add_certify = [&f](CLI::App* sub) {
    sub->add_option("--dmax", f.dmax, "Largest rho_j order tried");
    sub->add_option("--tol", f.tol, "Tolerance on |rho_j|");
    sub->add_option("--order", f.order, "First rho_j order tried (SDr order with --force)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Run the relaxation hierarchy");
  add_common(solve);
  solve->add_option("--order", f.order, "Largest relaxation order r_max");
  solve->add_option("--tau", f.tau, "Rank threshold of the flatness test");
  solve->add_option("--dump-sdpa", f.sdpa_path, "Write the order-r0 relaxation in SDPA format");

  CLI::App* certify = app.add_subcommand("certify", "Certify convexity of K");
  add_common(certify);
  add_certify(certify);
  certify->add_option("--dump-sdpa", f.sdpa_path, "Write the first rho_j program in SDPA format");

  CLI::App* sdr = app.add_subcommand("sdr", "Emit the lifted LMI description of K");
  add_common(sdr);
  add_certify(sdr);
  sdr->add_flag("--force", f.force, "Emit a lift even without a certificate");

  CLI::App* jensen = app.add_subcommand("jensen", "Check a Jensen-type inequality");
  add_common(jensen);

  CLI::App* sos = app.add_subcommand("sos-check", "Search for an SOS decomposition");
  add_common(sos);

  CLI::App* probe = app.add_subcommand("probe", "Nondegeneracy and Slater probes");
  add_common(probe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(f, out);
    if (certify->parsed()) return cmd_certify(f, out);
    if (sdr->parsed()) return cmd_sdr(f, out, err);
    if (jensen->parsed()) return cmd_jensen(f, out);
    if (sos->parsed()) return cmd_sos_check(f, out);
    if (probe->parsed()) return cmd_probe(f, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kBadInput;
  } catch (const PreconditionFailure& e) {
    err << "rejected: " << e.what() << "\n";
    return kBadInput;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const CertificateRejected& e) {
    err << "certificate rejected: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kBadInput;
}

}  // namespace cvxpoly::cli
