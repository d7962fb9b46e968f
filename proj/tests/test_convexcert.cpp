#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvxpoly/convexcert.hpp"
#include "cvxpoly/errors.hpp"
#include "oracles.hpp"

namespace cvxpoly {
namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }
Polynomial cst(int n, double c) { return Polynomial::constant(n, c); }

SemialgebraicSet unit_disk() {
  return SemialgebraicSet(2, {cst(2, 1.0) - var(2, 0).pow(2) - var(2, 1).pow(2)});
}

SemialgebraicSet hyperbola_disk() {
  const Polynomial x1 = var(2, 0), x2 = var(2, 1), h = cst(2, 0.5);
  return SemialgebraicSet(2, {x1 * x2 - cst(2, 0.25), h - (x1 - h).pow(2) - (x2 - h).pow(2)});
}

SemialgebraicSet cubed_hyperbola() {
  const Polynomial x1 = var(2, 0), x2 = var(2, 1);
  return SemialgebraicSet(2, {(cst(2, 1.0) - x1 * x1 + x2 * x2).pow(3),
                              cst(2, 10.0) - x1 * x1 - x2 * x2});
}

std::size_t s4(int d) { return basis_size(4, d); }

// The certificate is expensive, so the fixtures share one.
const ConvexityCertificate& hyperbola_disk_certificate() {
  static const ConvexityCertificate cert = [] {
    CertifyOptions opt;
    opt.d_min = 3;
    return certify_convexity(hyperbola_disk(), opt);
  }();
  return cert;
}

TEST(RhoProgram, ZeroBlockEqualityRows) {
  const SemialgebraicSet k = hyperbola_disk();
  for (int d = 1; d <= 3; ++d) {
    const CompiledMomentProgram prog = rho_program(k, 0, d);
    const std::size_t s = s4(d - k.half_degree(0));
    EXPECT_EQ(prog.source().equality_row_count(), static_cast<int>(1 + s * (s + 1) / 2));
    EXPECT_EQ(prog.source().num_vars(), 4);
  }
}

TEST(RhoProgram, IndexAndOrderChecks) {
  const SemialgebraicSet k = hyperbola_disk();
  EXPECT_THROW(rho_program(k, 2, 3), PreconditionFailure);
  EXPECT_THROW(rho_program(k, -1, 3), PreconditionFailure);
  EXPECT_EQ(rho_min_order(k, 0), 1);
  EXPECT_THROW(rho_program(cubed_hyperbola(), 0, 2), PreconditionFailure);
}

TEST(RhoProgram, SupportingForm) {
  // <grad g(Y), X - Y> for g = X1 X2 - 1/4 is Y2 (X1 - Y1) + Y1 (X2 - Y2).
  const Polynomial x1 = var(4, 0), x2 = var(4, 1), y1 = var(4, 2), y2 = var(4, 3);
  EXPECT_EQ(supporting_form(hyperbola_disk(), 0), y2 * (x1 - y1) + y1 * (x2 - y2));
}

TEST(Certify, HyperbolaDiskCertifiedAtOrderThree) {
  const ConvexityCertificate& cert = hyperbola_disk_certificate();
  EXPECT_EQ(cert.status, CertificationStatus::kCertifiedNumerically) << cert.verdict;
  ASSERT_EQ(cert.constraints.size(), 2u);
  const ConstraintCertificate& c1 = cert.constraints[0];
  EXPECT_EQ(c1.method, CertificationMethod::kRhoSdp);
  EXPECT_EQ(c1.d_j, 3);
  EXPECT_LE(std::abs(c1.rho_j), 1e-6);
  EXPECT_LE(c1.rho_j, 1e-6);
  const ConstraintCertificate& c2 = cert.constraints[1];
  EXPECT_EQ(c2.method, CertificationMethod::kQuadraticConcaveShortcut);
  EXPECT_EQ(c2.d_j, 1);
  EXPECT_TRUE(c2.attempts.empty());
  EXPECT_EQ(cert.max_degree(), 3);
  EXPECT_FALSE(cert.degenerate);
  EXPECT_NE(cert.verdict.find("certified numerically"), std::string::npos);
  EXPECT_EQ(cert.verdict.find("convex set"), std::string::npos);
}

TEST(Certify, HyperbolaDiskMomentSymmetry) {
  const ConstraintCertificate& c1 = hyperbola_disk_certificate().constraints[0];
  ASSERT_TRUE(c1.moments);
  const MomentVector& z = *c1.moments;
  auto at = [&](std::vector<int> e) { return z[Monomial(std::move(e))]; };
  // (X1, X2, Y1, Y2) exponents.
  EXPECT_NEAR(at({1, 0, 0, 0}), at({0, 1, 0, 0}), 1e-4);
  EXPECT_NEAR(at({0, 0, 1, 0}), at({0, 0, 0, 1}), 1e-4);
  EXPECT_NEAR(at({1, 0, 1, 0}), at({2, 0, 0, 0}), 1e-4);
  EXPECT_NEAR(at({0, 1, 0, 1}), at({0, 2, 0, 0}), 1e-4);
  EXPECT_NEAR(at({1, 0, 0, 1}), at({0, 1, 1, 0}), 1e-4);
  EXPECT_NEAR(at({2, 0, 0, 0}), at({0, 2, 0, 0}), 1e-4);
}

TEST(Certify, HyperbolaDiskWeightsReconstruct) {
  const ConstraintCertificate& c1 = hyperbola_disk_certificate().constraints[0];
  ASSERT_TRUE(c1.weights);
  const Polynomial g = hyperbola_disk().constraint(0);
  double grad_l1 = 0.0;
  for (int i = 0; i < 2; ++i) grad_l1 += g.partial(i).l1_norm();
  EXPECT_LE(c1.weights->residual, 1e-5 * (1.0 + grad_l1));
  EXPECT_EQ(c1.weights->sigmas.size(), c1.weights->localizers.size());
  for (const auto& s : c1.weights->sigmas) EXPECT_GE(s.min_gram_eigenvalue(), -1e-7);
}

TEST(Certify, DiskUsesShortcutOnly) {
  const ConvexityCertificate cert = certify_convexity(unit_disk());
  EXPECT_EQ(cert.status, CertificationStatus::kCertifiedNumerically);
  ASSERT_EQ(cert.constraints.size(), 1u);
  EXPECT_EQ(cert.constraints[0].method, CertificationMethod::kQuadraticConcaveShortcut);
  EXPECT_TRUE(cert.constraints[0].attempts.empty());
}

TEST(Certify, HyperbolaAloneIsNotCertified) {
  const SemialgebraicSet k(2, {var(2, 0) * var(2, 1) - cst(2, 0.25)}, 3.0);
  CertifyOptions opt;
  opt.d_max = 2;
  const ConvexityCertificate cert = certify_convexity(k, opt);
  EXPECT_NE(cert.status, CertificationStatus::kCertifiedNumerically);
  ASSERT_EQ(cert.status, CertificationStatus::kRefutedBySample) << cert.verdict;
  ASSERT_TRUE(cert.refuting_pair);
  const auto& [x, y] = *cert.refuting_pair;
  const Polynomial& g = k.constraint(0);
  EXPECT_TRUE(k.contains(x, 1e-9));
  EXPECT_NEAR(g.eval(y), 0.0, 1e-8);
  const double inner = g.partial(0).eval(y) * (x[0] - y[0]) + g.partial(1).eval(y) * (x[1] - y[1]);
  EXPECT_LT(inner, 0.0);
}

TEST(Certify, CubedHyperbolaCarriesDegenerateFlag) {
  CertifyOptions opt;
  opt.d_max = 3;
  const ConvexityCertificate cert = certify_convexity(cubed_hyperbola(), opt);
  EXPECT_TRUE(cert.degenerate);
  EXPECT_NE(cert.status, CertificationStatus::kCertifiedNumerically);
  EXPECT_NE(cert.verdict.find("DEGENERATE"), std::string::npos);
  ASSERT_FALSE(cert.probe.empty());
  EXPECT_TRUE(cert.probe[0].degenerate);
}

TEST(Certify, NoSlaterPointIsAPrecondition) {
  const SemialgebraicSet k(1, {-var(1, 0).pow(2)}, 1.0);
  EXPECT_THROW(certify_convexity(k), PreconditionFailure);
  CertifyOptions opt;
  opt.waive_slater = true;
  const ConvexityCertificate cert = certify_convexity(k, opt);
  EXPECT_NE(cert.verdict.find("waived"), std::string::npos);
}

TEST(NondegeneracyProbe, Examples) {
  const auto cubed = nondegeneracy_probe(cubed_hyperbola(), 2000);
  ASSERT_EQ(cubed.size(), 2u);
  EXPECT_TRUE(cubed[0].degenerate);
  EXPECT_GT(cubed[0].active_samples, 0);
  EXPECT_FALSE(cubed[1].degenerate);

  const auto disk = nondegeneracy_probe(unit_disk(), 2000);
  ASSERT_EQ(disk.size(), 1u);
  EXPECT_FALSE(disk[0].degenerate);
  EXPECT_NEAR(disk[0].min_gradient_norm, 2.0, 1e-3);

  for (const auto& r : nondegeneracy_probe(hyperbola_disk(), 2000)) {
    EXPECT_FALSE(r.degenerate);
    EXPECT_GT(r.active_samples, 0);
  }
}

TEST(Sdr, HyperbolaDiskLift) {
  const SdrRepresentation sdr = build_sdr(hyperbola_disk(), hyperbola_disk_certificate());
  EXPECT_EQ(sdr.d, 3);
  EXPECT_EQ(sdr.lift_dimension, 28);
  EXPECT_EQ(sdr.moment_basis.size(), 28u);
  ASSERT_EQ(sdr.blocks.size(), 3u);
  EXPECT_EQ(sdr.blocks[0].size, 10);
  EXPECT_EQ(sdr.blocks[1].size, 6);
  EXPECT_EQ(sdr.blocks[2].size, 6);
}

TEST(Sdr, DiskLiftAndRefusal) {
  const SdrRepresentation sdr = build_sdr(unit_disk(), certify_convexity(unit_disk()));
  EXPECT_EQ(sdr.d, 1);
  EXPECT_EQ(sdr.lift_dimension, 6);
  ASSERT_EQ(sdr.blocks.size(), 2u);
  EXPECT_EQ(sdr.blocks[0].size, 3);
  EXPECT_EQ(sdr.blocks[1].size, 1);

  ConvexityCertificate none;
  EXPECT_THROW(build_sdr(unit_disk(), none), PreconditionFailure);
}

TEST(Sdr, OverrideWithScalarRows) {
  const Polynomial x1 = var(2, 0), x2 = var(2, 1);
  const SemialgebraicSet tri(2, {x1, x2, cst(2, 1.0) - x1 - x2});
  const SdrRepresentation sdr = build_sdr(tri, 2, SdrForm::kScalarRows);
  EXPECT_EQ(sdr.form, SdrForm::kScalarRows);
  ASSERT_EQ(sdr.blocks.size(), 4u);
  EXPECT_EQ(sdr.blocks[0].size, 6);
  for (std::size_t b = 1; b < 4; ++b) EXPECT_EQ(sdr.blocks[b].size, 1);
  const SupportResult r = sdr_support(sdr, Point{-1.0, -1.0});
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_NEAR(r.value, -1.0, 1e-6);
}

TEST(SdrSupport, DiskDirection) {
  const SdrRepresentation sdr = build_sdr(unit_disk(), certify_convexity(unit_disk()));
  const SupportResult r = sdr_support(sdr, Point{1.0, 0.0});
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_NEAR(r.value, -1.0, 1e-6);
  EXPECT_NEAR(r.point[0], -1.0, 1e-4);
  EXPECT_NEAR(r.point[1], 0.0, 1e-4);

  const SupportResult zero = sdr_support(sdr, Point{0.0, 0.0});
  ASSERT_EQ(zero.status, SdpStatus::kOptimal);
  EXPECT_NEAR(zero.value, 0.0, 1e-8);
  EXPECT_TRUE(unit_disk().contains(zero.point, 1e-6));

  EXPECT_THROW(sdr_support(sdr, Point{1.0}), PreconditionFailure);
}

TEST(SdrSupport, HyperbolaDiskSandwich) {
  const SemialgebraicSet k = hyperbola_disk();
  const ConvexityCertificate& cert = hyperbola_disk_certificate();
  const SdrRepresentation sdr = build_sdr(k, cert);
  const Polynomial f = var(2, 0) + var(2, 1);
  const double fstar = oracle::boundary_minimize(f, k, oracle::hyperbola_disk_arcs()).value;
  const SupportResult r = sdr_support(sdr, Point{1.0, 1.0});
  ASSERT_EQ(r.status, SdpStatus::kOptimal);
  EXPECT_GE(r.value, fstar + cert.constraints[0].rho_j - 1e-5);
  EXPECT_LE(r.value, fstar + 1e-5);
}

TEST(SdrProperties, SampledPointsLiftAndDiracsSatisfyBlocks) {
  const SemialgebraicSet k = hyperbola_disk();
  const SdrRepresentation sdr = build_sdr(k, hyperbola_disk_certificate());
  std::mt19937_64 rng(53);
  const auto pts = sample_set(k, bounding_box_or(k, 2.0), 40, rng);
  ASSERT_EQ(pts.size(), 40u);
  for (const auto& x : pts) {
    EXPECT_LE(sdr.violation(x, MomentVector::dirac(x, sdr.d)), 1e-9);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(sdr_contains(sdr, pts[i]));
  EXPECT_FALSE(sdr_contains(sdr, Point{0.1, 0.1}));
}

TEST(CertifyProperties, SupportingHyperplaneSoundness) {
  const SemialgebraicSet k = hyperbola_disk();
  ASSERT_EQ(hyperbola_disk_certificate().status, CertificationStatus::kCertifiedNumerically);
  std::mt19937_64 rng(61);
  const Box box = bounding_box_or(k, 2.0);
  const auto xs = sample_set(k, box, 2000, rng);
  ASSERT_EQ(xs.size(), 2000u);
  for (int j = 0; j < k.num_constraints(); ++j) {
    const Polynomial& g = k.constraint(j);
    int checked = 0;
    for (const auto& start : sample_box(box, 4000, rng)) {
      const Point y = project_to_zero_set(g, start);
      if (std::abs(g.eval(y)) > 1e-4 || !k.contains(y, 1e-4)) continue;
      const double gx = g.partial(0).eval(y), gy = g.partial(1).eval(y);
      const double slack = 1e-4 * (1.0 + std::hypot(gx, gy));
      const Point& x = xs[static_cast<std::size_t>(checked) % xs.size()];
      EXPECT_GE(gx * (x[0] - y[0]) + gy * (x[1] - y[1]), -slack);
      if (++checked == 2000) break;
    }
    EXPECT_GT(checked, 100);
  }
}

}  // namespace
}  // namespace cvxpoly
