#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvxpoly/hierarchy.hpp"
#include "cvxpoly/moment.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/serialize.hpp"

namespace cvxpoly {

/// Settings a problem file may carry; command-line flags override them.
struct ProblemOptions {
  std::optional<double> tol;
  std::optional<double> tau;
  std::optional<int> d_min;
  std::optional<int> d_max;
  std::optional<int> r_max;
  std::optional<std::uint64_t> seed;
  bool waive_archimedean = false;
  bool waive_slater = false;

  bool operator==(const ProblemOptions&) const = default;
};

/// Data for the Jensen commands: either f (SOS-convex, in n variables) or
/// the composed pair f_uni (one variable) and g (n variables), always with
/// a pseudo-moment vector in n variables.
struct JensenSpec {
  std::optional<Polynomial> f;
  std::optional<Polynomial> f_uni;
  std::optional<Polynomial> g;
  MomentVector moments;

  bool operator==(const JensenSpec&) const = default;
};

/// A problem file:
///
///   { "n": 2, "variables": ["x1", "x2"],
///     "objective":   [{"exponents": [1, 0], "coeff": 1.0}],
///     "constraints": [[...], ...],
///     "ball_bound": 2.0,
///     "options": {"tol": 1e-6, "d_min": 3, "d_max": 4, "r_max": 5, "seed": 7, "tau": 1e-6,
///                 "waive_archimedean": false, "waive_slater": false},
///     "polynomial": [...],
///     "jensen": {"f": [...], "moments": {"order": 2, "values": [...]}} }
///
/// Only "n" is mandatory; commands check for the keys they need.
struct ProblemFile {
  int n = 0;
  std::vector<std::string> variables;
  std::optional<Polynomial> objective;
  std::vector<Polynomial> constraints;
  std::optional<double> ball_bound;
  ProblemOptions options;
  /// Stand-alone polynomial for sos-check (falls back to the objective).
  std::optional<Polynomial> polynomial;
  std::optional<JensenSpec> jensen;

  SemialgebraicSet feasible_set() const;
  /// Throws ParseError when the file has no objective.
  PolyOptProblem problem() const;

  bool operator==(const ProblemFile&) const = default;
};

/// Throws ParseError on malformed JSON, unknown keys, wrong exponent
/// lengths and duplicate monomials within one polynomial.
ProblemFile parse_problem(const Json& j);
ProblemFile parse_problem_text(const std::string& text);
/// Throws ParseError when the file cannot be read.
ProblemFile load_problem(const std::string& path);

Json to_json(const ProblemFile& p);

}  // namespace cvxpoly
