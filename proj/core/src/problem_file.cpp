#include "cvxpoly/problem_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cvxpoly/errors.hpp"

namespace cvxpoly {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
  }
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ParseError("'" + key + "' must be a number");
  return j.get<double>();
}

int whole(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ParseError("'" + key + "' must be an integer");
  return j.get<int>();
}

bool boolean(const Json& j, const std::string& key) {
  if (!j.is_boolean()) throw ParseError("'" + key + "' must be true or false");
  return j.get<bool>();
}

ProblemOptions parse_options(const Json& j) {
  if (!j.is_object()) throw ParseError("'options' must be an object");
  check_keys(j, {"tol", "tau", "d_min", "d_max", "r_max", "seed", "waive_archimedean", "waive_slater"},
             "options");
  ProblemOptions o;
  if (j.contains("tol")) o.tol = number(j["tol"], "tol");
  if (j.contains("tau")) o.tau = number(j["tau"], "tau");
  if (j.contains("d_min")) o.d_min = whole(j["d_min"], "d_min");
  if (j.contains("d_max")) o.d_max = whole(j["d_max"], "d_max");
  if (j.contains("r_max")) o.r_max = whole(j["r_max"], "r_max");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("'seed' must be a nonnegative integer");
    o.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("waive_archimedean")) {
    o.waive_archimedean = boolean(j["waive_archimedean"], "waive_archimedean");
  }
  if (j.contains("waive_slater")) o.waive_slater = boolean(j["waive_slater"], "waive_slater");
  return o;
}

JensenSpec parse_jensen(const Json& j, int n) {
  if (!j.is_object()) throw ParseError("'jensen' must be an object");
  check_keys(j, {"f", "f_uni", "g", "moments"}, "jensen");
  if (!j.contains("moments")) throw ParseError("'jensen' needs 'moments'");
  Json mj = j["moments"];
  if (!mj.is_object()) throw ParseError("'moments' must be an object");
  if (!mj.contains("n")) mj["n"] = n;
  MomentVector y = moment_vector_from_json(mj);
  if (y.num_vars() != n) throw ParseError("'moments' has the wrong variable count");
  JensenSpec spec{std::nullopt, std::nullopt, std::nullopt, std::move(y)};
  if (j.contains("f")) spec.f = polynomial_from_json(j["f"], n);
  if (j.contains("f_uni")) spec.f_uni = polynomial_from_json(j["f_uni"], 1);
  if (j.contains("g")) spec.g = polynomial_from_json(j["g"], n);
  if (spec.f.has_value() == (spec.f_uni.has_value() || spec.g.has_value())) {
    throw ParseError("'jensen' needs either 'f' or both 'f_uni' and 'g'");
  }
  if (spec.f_uni.has_value() != spec.g.has_value()) {
    throw ParseError("'f_uni' and 'g' go together");
  }
  return spec;
}

}  // namespace

SemialgebraicSet ProblemFile::feasible_set() const {
  return SemialgebraicSet(n, constraints, ball_bound);
}

PolyOptProblem ProblemFile::problem() const {
  if (!objective) throw ParseError("the problem file has no 'objective'");
  return PolyOptProblem(*objective, feasible_set());
}

ProblemFile parse_problem(const Json& j) {
  if (!j.is_object()) throw ParseError("a problem file must be a JSON object");
  check_keys(j,
             {"n", "variables", "objective", "constraints", "ball_bound", "options",
              "polynomial", "jensen"},
             "problem file");
  if (!j.contains("n")) throw ParseError("missing 'n'");
  ProblemFile p;
  p.n = whole(j["n"], "n");
  if (p.n < 1) throw ParseError("'n' must be positive");
  if (j.contains("variables")) {
    const Json& v = j["variables"];
    if (!v.is_array() || static_cast<int>(v.size()) != p.n) {
      throw ParseError("'variables' must list n names");
    }
    for (const auto& name : v) {
      if (!name.is_string()) throw ParseError("variable names must be strings");
      p.variables.push_back(name.get<std::string>());
    }
  } else {
    for (int i = 0; i < p.n; ++i) p.variables.push_back("x" + std::to_string(i + 1));
  }
  if (j.contains("objective")) p.objective = polynomial_from_json(j["objective"], p.n);
  if (j.contains("constraints")) {
    if (!j["constraints"].is_array()) throw ParseError("'constraints' must be a list");
    for (const auto& g : j["constraints"]) p.constraints.push_back(polynomial_from_json(g, p.n));
  }
  if (j.contains("ball_bound")) {
    p.ball_bound = number(j["ball_bound"], "ball_bound");
    if (!(*p.ball_bound > 0.0)) throw ParseError("'ball_bound' must be positive");
  }
  if (j.contains("options")) p.options = parse_options(j["options"]);
  if (j.contains("polynomial")) p.polynomial = polynomial_from_json(j["polynomial"], p.n);
  if (j.contains("jensen")) p.jensen = parse_jensen(j["jensen"], p.n);
  return p;
}

ProblemFile parse_problem_text(const std::string& text) { return parse_problem(parse_json(text)); }

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

Json to_json(const ProblemFile& p) {
  Json out{{"n", p.n}, {"variables", p.variables}};
  if (p.objective) out["objective"] = to_json(*p.objective);
  Json cons = Json::array();
  for (const auto& g : p.constraints) cons.push_back(to_json(g));
  out["constraints"] = std::move(cons);
  if (p.ball_bound) out["ball_bound"] = *p.ball_bound;
  Json o = Json::object();
  const ProblemOptions& po = p.options;
  if (po.tol) o["tol"] = *po.tol;
  if (po.tau) o["tau"] = *po.tau;
  if (po.d_min) o["d_min"] = *po.d_min;
  if (po.d_max) o["d_max"] = *po.d_max;
  if (po.r_max) o["r_max"] = *po.r_max;
  if (po.seed) o["seed"] = *po.seed;
  if (po.waive_archimedean) o["waive_archimedean"] = true;
  if (po.waive_slater) o["waive_slater"] = true;
  out["options"] = std::move(o);
  if (p.polynomial) out["polynomial"] = to_json(*p.polynomial);
  if (p.jensen) {
    Json jj{{"moments", to_json(p.jensen->moments)}};
    if (p.jensen->f) jj["f"] = to_json(*p.jensen->f);
    if (p.jensen->f_uni) jj["f_uni"] = to_json(*p.jensen->f_uni);
    if (p.jensen->g) jj["g"] = to_json(*p.jensen->g);
    out["jensen"] = std::move(jj);
  }
  return out;
}

}  // namespace cvxpoly
