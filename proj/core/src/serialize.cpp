#include "cvxpoly/serialize.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

namespace {

// Non-finite doubles are stored as null and read back as NaN.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double num(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw ParseError("expected a number, got " + j.dump());
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

int integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

bool flag(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw ParseError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

template <typename E, std::size_t N>
E enum_from(const std::string& s, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw ParseError(std::string("unknown ") + what + " '" + s + "'");
}

SdpStatus status_from(const std::string& s) {
  static constexpr SdpStatus kAll[] = {SdpStatus::kOptimal, SdpStatus::kInfeasible,
                                       SdpStatus::kUnbounded, SdpStatus::kMaxIterations,
                                       SdpStatus::kNumericalFailure};
  return enum_from(s, kAll, "SDP status");
}

Json vec(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vec_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = num(j[i]);
  return v;
}

Json mat(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a matrix as an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = num(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json point(const Point& p) {
  Json out = Json::array();
  for (double v : p) out.push_back(v);
  return out;
}

Point point_from(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a point as an array of numbers");
  Point p;
  for (const auto& v : j) p.push_back(num(v));
  return p;
}

Json basis(const std::vector<Monomial>& b) {
  Json out = Json::array();
  for (const auto& m : b) out.push_back(to_json(m));
  return out;
}

std::vector<Monomial> basis_from(const Json& j, int n) {
  if (!j.is_array()) throw ParseError("expected a list of exponent vectors");
  std::vector<Monomial> b;
  for (const auto& m : j) b.push_back(monomial_from_json(m, n));
  return b;
}

Json polys(const std::vector<Polynomial>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(to_json(p));
  return out;
}

std::vector<Polynomial> polys_from(const Json& j, int n) {
  if (!j.is_array()) throw ParseError("expected a list of polynomials");
  std::vector<Polynomial> out;
  for (const auto& p : j) out.push_back(polynomial_from_json(p, n));
  return out;
}

Json witnesses(const std::vector<SosWitness>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back(to_json(w));
  return out;
}

std::vector<SosWitness> witnesses_from(const Json& j, int n) {
  if (!j.is_array()) throw ParseError("expected a list of witnesses");
  std::vector<SosWitness> out;
  for (const auto& w : j) out.push_back(sos_witness_from_json(w, n));
  return out;
}

template <typename T, typename F>
Json optional_json(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : Json(nullptr);
}

}  // namespace

Json parse_json(const std::string& text_in) {
  try {
    return Json::parse(text_in);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

Json to_json(const Monomial& m) { return Json(m.exponents()); }

Monomial monomial_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ParseError("exponent vector must have length " + std::to_string(n) + ": " + j.dump());
  }
  std::vector<int> e;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() < 0) {
      throw ParseError("exponents must be nonnegative integers: " + j.dump());
    }
    e.push_back(v.get<int>());
  }
  return Monomial(std::move(e));
}

Json to_json(const Polynomial& p) {
  Json out = Json::array();
  for (const auto& [m, c] : p.terms()) {
    out.push_back({{"exponents", to_json(m)}, {"coeff", c}});
  }
  return out;
}

Polynomial polynomial_from_json(const Json& j, int n) {
  if (!j.is_array()) throw ParseError("a polynomial must be a list of terms");
  Polynomial p(n);
  std::set<std::vector<int>> seen;
  for (const auto& term : j) {
    const Monomial m = monomial_from_json(field(term, "exponents"), n);
    if (!seen.insert(m.exponents()).second) {
      throw ParseError("duplicate monomial " + m.to_string() + " in polynomial");
    }
    const double c = num(field(term, "coeff"));
    if (!std::isfinite(c)) throw ParseError("non-finite coefficient");
    p.add_term(m, c);
  }
  return p;
}

Json to_json(const SemialgebraicSet& k) {
  Json out{{"n", k.num_vars()}, {"constraints", polys(k.constraints())}};
  out["ball_bound"] = k.ball_bound() ? Json(*k.ball_bound()) : Json(nullptr);
  return out;
}

SemialgebraicSet semialgebraic_set_from_json(const Json& j) {
  const int n = integer(j, "n");
  if (n < 1) throw ParseError("n must be positive");
  std::optional<double> ball;
  if (j.contains("ball_bound") && !j["ball_bound"].is_null()) ball = num(j["ball_bound"]);
  try {
    return SemialgebraicSet(n, polys_from(field(j, "constraints"), n), ball);
  } catch (const PreconditionFailure& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const MomentVector& y) {
  return {{"n", y.num_vars()},
          {"order", y.order()},
          {"values", vec(y.values())},
          {"provenance", y.provenance() == MomentProvenance::kInteriorPointSolve
                             ? "interior_point_solve"
                             : "supplied"}};
}

MomentVector moment_vector_from_json(const Json& j) {
  const int n = integer(j, "n");
  const int order = integer(j, "order");
  MomentProvenance prov = MomentProvenance::kSupplied;
  if (j.contains("provenance")) {
    const std::string p = text(j, "provenance");
    if (p == "interior_point_solve") {
      prov = MomentProvenance::kInteriorPointSolve;
    } else if (p != "supplied") {
      throw ParseError("unknown moment provenance '" + p + "'");
    }
  }
  try {
    return MomentVector(n, order, vec_from(field(j, "values")), prov);
  } catch (const PreconditionFailure& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const SosWitness& w) {
  return {{"basis", basis(w.basis)}, {"gram", mat(w.gram)}, {"residual", w.residual}};
}

SosWitness sos_witness_from_json(const Json& j, int n) {
  SosWitness w;
  w.basis = basis_from(field(j, "basis"), n);
  w.gram = mat_from(field(j, "gram"));
  w.residual = num(field(j, "residual"));
  const auto s = static_cast<Eigen::Index>(w.basis.size());
  if (w.gram.rows() != s || w.gram.cols() != s) {
    throw ParseError("Gram matrix size does not match the basis");
  }
  return w;
}

Json to_json(const MatrixSosWitness& w) {
  return {{"n", w.n}, {"scalarized", to_json(w.scalarized)}};
}

MatrixSosWitness matrix_sos_witness_from_json(const Json& j) {
  MatrixSosWitness w;
  w.n = integer(j, "n");
  w.scalarized = sos_witness_from_json(field(j, "scalarized"), 2 * w.n);
  return w;
}

Json to_json(const SosResult& r, int n) {
  Json out{{"is_sos", r.is_sos}, {"status", to_string(r.status)}, {"message", r.message}};
  out["n"] = n;
  out["witness"] = optional_json(r.witness, [](const SosWitness& w) { return to_json(w); });
  out["functional_support"] = basis(r.functional_support);
  out["separating_functional"] =
      optional_json(r.separating_functional, [](const Eigen::VectorXd& v) { return vec(v); });
  return out;
}

SosResult sos_result_from_json(const Json& j, int n) {
  SosResult r;
  r.is_sos = flag(j, "is_sos");
  r.status = status_from(text(j, "status"));
  r.message = text(j, "message");
  if (!field(j, "witness").is_null()) r.witness = sos_witness_from_json(j["witness"], n);
  r.functional_support = basis_from(field(j, "functional_support"), n);
  if (!field(j, "separating_functional").is_null()) {
    r.separating_functional = vec_from(j["separating_functional"]);
  }
  return r;
}

Json to_json(const JensenReport& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
}

JensenReport jensen_report_from_json(const Json& j) {
  return {num(field(j, "lhs")), num(field(j, "rhs")), flag(j, "holds")};
}

// ---------------------------------------------------------------------------

Json to_json(const PutinarCertificate& c, int /*n*/) {
  return {{"lambda_star", c.lambda_star},
          {"sigmas", witnesses(c.sigmas)},
          {"scalar_multipliers", c.scalar_multipliers},
          {"lambdas", c.lambdas},
          {"residual", c.residual},
          {"sigma0_sos_convex", c.sigma0_sos_convex}};
}

PutinarCertificate putinar_certificate_from_json(const Json& j, int n) {
  PutinarCertificate c;
  c.lambda_star = num(field(j, "lambda_star"));
  c.sigmas = witnesses_from(field(j, "sigmas"), n);
  c.scalar_multipliers = flag(j, "scalar_multipliers");
  for (const auto& v : field(j, "lambdas")) c.lambdas.push_back(num(v));
  c.residual = num(field(j, "residual"));
  c.sigma0_sos_convex = flag(j, "sigma0_sos_convex");
  return c;
}

Json to_json(const RelaxationResult& r, int n) {
  Json out{{"order", r.order},
           {"kind", to_string(r.kind)},
           {"status", to_string(r.status)},
           {"lower_bound", real(r.lower_bound)},
           {"raw_bound", real(r.raw_bound)},
           {"exactness", to_string(r.exactness)},
           {"certificate_note", r.certificate_note},
           {"seconds", r.seconds},
           {"message", r.message}};
  out["moments"] = optional_json(r.moments, [](const MomentVector& y) { return to_json(y); });
  out["flatness"] = optional_json(r.flatness, [](const FlatnessReport& f) {
    return Json{{"rank_d", f.rank_d},
                {"rank_lower", f.rank_lower},
                {"flat", f.flat},
                {"interior_point_caveat", f.interior_point_caveat}};
  });
  out["certificate"] = optional_json(
      r.certificate, [n](const PutinarCertificate& c) { return to_json(c, n); });
  out["minimizer"] = optional_json(r.minimizer, [](const Point& p) { return point(p); });
  return out;
}

RelaxationResult relaxation_result_from_json(const Json& j, int n) {
  static constexpr RelaxationKind kKinds[] = {RelaxationKind::kQhat, RelaxationKind::kQr};
  static constexpr Exactness kExact[] = {Exactness::kFlatRank, Exactness::kConvexMeanPoint,
                                         Exactness::kSosConvexSingleShot, Exactness::kNone};
  RelaxationResult r;
  r.order = integer(j, "order");
  r.kind = enum_from(text(j, "kind"), kKinds, "relaxation kind");
  r.status = status_from(text(j, "status"));
  r.lower_bound = num(field(j, "lower_bound"));
  r.raw_bound = num(field(j, "raw_bound"));
  r.exactness = enum_from(text(j, "exactness"), kExact, "exactness tag");
  r.certificate_note = text(j, "certificate_note");
  r.seconds = num(field(j, "seconds"));
  r.message = text(j, "message");
  if (!field(j, "moments").is_null()) r.moments = moment_vector_from_json(j["moments"]);
  if (const Json& f = field(j, "flatness"); !f.is_null()) {
    r.flatness = FlatnessReport{integer(f, "rank_d"), integer(f, "rank_lower"), flag(f, "flat"),
                                flag(f, "interior_point_caveat")};
  }
  if (!field(j, "certificate").is_null()) {
    r.certificate = putinar_certificate_from_json(j["certificate"], n);
  }
  if (!field(j, "minimizer").is_null()) r.minimizer = point_from(j["minimizer"]);
  return r;
}

Json to_json(const HierarchyReport& r) {
  const int n = r.relaxed_set.num_vars();
  Json rel = Json::array();
  for (const auto& x : r.relaxations) rel.push_back(to_json(x, n));
  Json out{{"relaxed_set", to_json(r.relaxed_set)},
           {"archimedean", r.archimedean},
           {"convexity_sampled", r.convexity_sampled},
           {"f_convex_sampled", r.f_convex_sampled},
           {"constraints_concave_sampled", r.constraints_concave_sampled},
           {"relaxations", std::move(rel)}};
  out["strict_convexity"] = optional_json(r.strict_convexity, [](const StrictConvexityProbe& p) {
    return Json{{"delta", real(p.delta)},
                {"samples", p.samples},
                {"strictly_convex_on_samples", p.strictly_convex_on_samples}};
  });
  const RelaxationResult* ex = r.exact();
  out["exactness"] = ex ? to_string(ex->exactness) : "none";
  return out;
}

HierarchyReport hierarchy_report_from_json(const Json& j) {
  HierarchyReport r{{}, semialgebraic_set_from_json(field(j, "relaxed_set")), "", false,
                    false, false, std::nullopt};
  const int n = r.relaxed_set.num_vars();
  r.archimedean = text(j, "archimedean");
  r.convexity_sampled = flag(j, "convexity_sampled");
  r.f_convex_sampled = flag(j, "f_convex_sampled");
  r.constraints_concave_sampled = flag(j, "constraints_concave_sampled");
  for (const auto& x : field(j, "relaxations")) {
    r.relaxations.push_back(relaxation_result_from_json(x, n));
  }
  if (const Json& s = field(j, "strict_convexity"); !s.is_null()) {
    r.strict_convexity = StrictConvexityProbe{num(field(s, "delta")), integer(s, "samples"),
                                              flag(s, "strictly_convex_on_samples")};
  }
  return r;
}

// ---------------------------------------------------------------------------

Json to_json(const RhoWeights& w, int /*n2*/) {
  return {{"labels", w.labels},
          {"localizers", polys(w.localizers)},
          {"sigmas", witnesses(w.sigmas)},
          {"psi", to_json(w.psi)},
          {"bound", real(w.bound)},
          {"residual", w.residual}};
}

RhoWeights rho_weights_from_json(const Json& j, int n2) {
  RhoWeights w;
  for (const auto& l : field(j, "labels")) {
    if (!l.is_string()) throw ParseError("labels must be strings");
    w.labels.push_back(l.get<std::string>());
  }
  w.localizers = polys_from(field(j, "localizers"), n2);
  w.sigmas = witnesses_from(field(j, "sigmas"), n2);
  w.psi = polynomial_from_json(field(j, "psi"), n2);
  w.bound = num(field(j, "bound"));
  w.residual = num(field(j, "residual"));
  return w;
}

Json to_json(const NondegeneracyReport& r) {
  return {{"j", r.j},
          {"active_samples", r.active_samples},
          {"min_gradient_norm", real(r.min_gradient_norm)},
          {"degenerate", r.degenerate},
          {"note", r.note}};
}

NondegeneracyReport nondegeneracy_report_from_json(const Json& j) {
  NondegeneracyReport r;
  r.j = integer(j, "j");
  r.active_samples = integer(j, "active_samples");
  r.min_gradient_norm = num(field(j, "min_gradient_norm"));
  r.degenerate = flag(j, "degenerate");
  r.note = text(j, "note");
  return r;
}

Json to_json(const ConvexityCertificate& c, int n) {
  static_cast<void>(n);
  Json cons = Json::array();
  for (const auto& cc : c.constraints) {
    Json attempts = Json::array();
    for (const auto& a : cc.attempts) {
      attempts.push_back(
          {{"d", a.d}, {"status", to_string(a.status)}, {"rho", real(a.rho)}, {"seconds", a.seconds}});
    }
    Json e{{"j", cc.j},
           {"d_j", cc.d_j},
           {"rho_j", cc.rho_j},
           {"method", to_string(cc.method)},
           {"closed", cc.closed},
           {"attempts", std::move(attempts)}};
    e["weights"] =
        optional_json(cc.weights, [n](const RhoWeights& w) { return to_json(w, 2 * n); });
    e["moments"] = optional_json(cc.moments, [](const MomentVector& y) { return to_json(y); });
    cons.push_back(std::move(e));
  }
  Json probe = Json::array();
  for (const auto& p : c.probe) probe.push_back(to_json(p));
  Json out{{"n", n},
           {"status", to_string(c.status)},
           {"tol", c.tol},
           {"constraints", std::move(cons)},
           {"refuted_constraint", c.refuted_constraint},
           {"probe", std::move(probe)},
           {"degenerate", c.degenerate},
           {"slater",
            {{"found", c.slater.found},
             {"waived", c.slater.waived},
             {"point", point(c.slater.point)},
             {"margin", real(c.slater.margin)}}},
           {"verdict", c.verdict}};
  out["refuting_pair"] = optional_json(c.refuting_pair, [](const std::pair<Point, Point>& p) {
    return Json{{"x", point(p.first)}, {"y", point(p.second)}};
  });
  return out;
}

ConvexityCertificate convexity_certificate_from_json(const Json& j, int n) {
  static constexpr CertificationStatus kStatus[] = {CertificationStatus::kCertifiedNumerically,
                                                    CertificationStatus::kInconclusive,
                                                    CertificationStatus::kRefutedBySample};
  static constexpr CertificationMethod kMethod[] = {
      CertificationMethod::kRhoSdp, CertificationMethod::kQuadraticConcaveShortcut};
  if (j.contains("n") && integer(j, "n") != n) {
    throw ParseError("certificate was written for a different variable count");
  }
  ConvexityCertificate c;
  c.status = enum_from(text(j, "status"), kStatus, "certification status");
  c.tol = num(field(j, "tol"));
  for (const auto& e : field(j, "constraints")) {
    ConstraintCertificate cc;
    cc.j = integer(e, "j");
    cc.d_j = integer(e, "d_j");
    cc.rho_j = num(field(e, "rho_j"));
    cc.method = enum_from(text(e, "method"), kMethod, "certification method");
    cc.closed = flag(e, "closed");
    for (const auto& a : field(e, "attempts")) {
      cc.attempts.push_back({integer(a, "d"), status_from(text(a, "status")),
                             num(field(a, "rho")), num(field(a, "seconds"))});
    }
    if (!field(e, "weights").is_null()) cc.weights = rho_weights_from_json(e["weights"], 2 * n);
    if (!field(e, "moments").is_null()) cc.moments = moment_vector_from_json(e["moments"]);
    c.constraints.push_back(std::move(cc));
  }
  c.refuted_constraint = integer(j, "refuted_constraint");
  if (const Json& p = field(j, "refuting_pair"); !p.is_null()) {
    c.refuting_pair = std::make_pair(point_from(field(p, "x")), point_from(field(p, "y")));
  }
  for (const auto& p : field(j, "probe")) c.probe.push_back(nondegeneracy_report_from_json(p));
  c.degenerate = flag(j, "degenerate");
  const Json& s = field(j, "slater");
  c.slater.found = flag(s, "found");
  c.slater.waived = flag(s, "waived");
  c.slater.point = point_from(field(s, "point"));
  c.slater.margin = num(field(s, "margin"));
  c.verdict = text(j, "verdict");
  return c;
}

// ---------------------------------------------------------------------------

Json to_json(const SdrRepresentation& sdr) {
  Json blocks = Json::array();
  for (const auto& b : sdr.blocks) {
    Json entries = Json::array();
    for (const auto& e : b.entries) entries.push_back({e.moment, e.row, e.col, e.coeff});
    blocks.push_back({{"label", b.label}, {"size", b.size}, {"entries", std::move(entries)}});
  }
  return {{"d", sdr.d},
          {"form", to_string(sdr.form)},
          {"base_set", to_json(sdr.base_set)},
          {"lift_dimension", sdr.lift_dimension},
          {"moment_basis", basis(sdr.moment_basis)},
          {"entry_layout", {"moment", "row", "col", "coeff"}},
          {"blocks", std::move(blocks)}};
}

SdrRepresentation sdr_from_json(const Json& j) {
  static constexpr SdrForm kForms[] = {SdrForm::kLocalizing, SdrForm::kScalarRows};
  SemialgebraicSet k = semialgebraic_set_from_json(field(j, "base_set"));
  const int n = k.num_vars();
  SdrRepresentation sdr{integer(j, "d"),
                        enum_from(text(j, "form"), kForms, "SDr form"),
                        std::move(k),
                        integer(j, "lift_dimension"),
                        basis_from(field(j, "moment_basis"), n),
                        {}};
  if (static_cast<int>(sdr.moment_basis.size()) != sdr.lift_dimension) {
    throw ParseError("moment basis size does not match lift_dimension");
  }
  for (const auto& b : field(j, "blocks")) {
    LmiBlock blk;
    blk.label = text(b, "label");
    blk.size = integer(b, "size");
    for (const auto& e : field(b, "entries")) {
      if (!e.is_array() || e.size() != 4) throw ParseError("LMI entries are [moment, row, col, coeff]");
      LmiEntry le{e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), num(e[3])};
      if (le.moment < 0 || le.moment >= sdr.lift_dimension || le.row < 0 || le.col < 0 ||
          le.row >= blk.size || le.col >= blk.size) {
        throw ParseError("LMI entry out of range in block '" + blk.label + "'");
      }
      blk.entries.push_back(le);
    }
    sdr.blocks.push_back(std::move(blk));
  }
  return sdr;
}

Json to_json(const SdpSolution& s) {
  Json out{{"status", to_string(s.status)},
           {"primal_value", s.primal_value},
           {"dual_value", s.dual_value},
           {"gap", s.gap},
           {"primal_residual", s.primal_residual},
           {"dual_residual", s.dual_residual},
           {"complementarity", s.complementarity},
           {"iterations", s.iterations},
           {"message", s.message},
           {"dual", vec(s.dual)}};
  Json x = Json::array();
  for (const auto& b : s.primal) x.push_back(mat(b));
  out["primal"] = std::move(x);
  return out;
}

}  // namespace cvxpoly
