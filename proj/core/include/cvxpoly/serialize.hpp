#pragma once

// JSON encoding of every artifact the library emits. Each `to_json` has a
// matching reader so artifacts can be re-read and audited; readers throw
// ParseError on malformed input.
//
// Polynomials are encoded as lists of {"exponents": [...], "coeff": c}; the
// variable count lives once in the enclosing object ("n").

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvxpoly/convexcert.hpp"
#include "cvxpoly/hierarchy.hpp"
#include "cvxpoly/moment.hpp"
#include "cvxpoly/polynomial.hpp"
#include "cvxpoly/sdp.hpp"
#include "cvxpoly/sos.hpp"

namespace cvxpoly {

using Json = nlohmann::json;

Json to_json(const Monomial& m);
Monomial monomial_from_json(const Json& j, int n);

Json to_json(const Polynomial& p);
/// Rejects exponent vectors of the wrong length, negative exponents and
/// duplicate monomials.
Polynomial polynomial_from_json(const Json& j, int n);

Json to_json(const SemialgebraicSet& k);
SemialgebraicSet semialgebraic_set_from_json(const Json& j);

Json to_json(const MomentVector& y);
MomentVector moment_vector_from_json(const Json& j);

Json to_json(const SosWitness& w);
SosWitness sos_witness_from_json(const Json& j, int n);

Json to_json(const MatrixSosWitness& w);
MatrixSosWitness matrix_sos_witness_from_json(const Json& j);

Json to_json(const SosResult& r, int n);
SosResult sos_result_from_json(const Json& j, int n);

Json to_json(const JensenReport& r);
JensenReport jensen_report_from_json(const Json& j);

Json to_json(const PutinarCertificate& c, int n);
PutinarCertificate putinar_certificate_from_json(const Json& j, int n);

Json to_json(const RelaxationResult& r, int n);
RelaxationResult relaxation_result_from_json(const Json& j, int n);

Json to_json(const HierarchyReport& r);
HierarchyReport hierarchy_report_from_json(const Json& j);

Json to_json(const RhoWeights& w, int n2);
RhoWeights rho_weights_from_json(const Json& j, int n2);

Json to_json(const NondegeneracyReport& r);
NondegeneracyReport nondegeneracy_report_from_json(const Json& j);

/// `n` is the variable count of K (the rho programs live in 2n variables).
Json to_json(const ConvexityCertificate& c, int n);
ConvexityCertificate convexity_certificate_from_json(const Json& j, int n);

/// Includes the raw LMI data: for every block its size and the entries
/// (moment, row, col, coeff), with moments indexed by `moment_basis`.
Json to_json(const SdrRepresentation& sdr);
SdrRepresentation sdr_from_json(const Json& j);

Json to_json(const SdpSolution& s);

/// Parses text, mapping syntax errors to ParseError.
Json parse_json(const std::string& text);

}  // namespace cvxpoly
