#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvxpoly/errors.hpp"
#include "cvxpoly/moment.hpp"
#include "cvxpoly/moment_program.hpp"
#include "cvxpoly/sdp.hpp"
#include "oracles.hpp"

namespace cvxpoly {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }
Polynomial cst(int n, double c) { return Polynomial::constant(n, c); }

SemialgebraicSet hyperbola_disk() {
  const Polynomial x1 = var(2, 0), x2 = var(2, 1), h = cst(2, 0.5);
  return SemialgebraicSet(2, {x1 * x2 - cst(2, 0.25), h - (x1 - h).pow(2) - (x2 - h).pow(2)});
}

MomentVector uni(std::vector<double> v, int order) {
  return MomentVector(1, order, Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

TEST(Riesz, Examples) {
  const std::vector<double> pt{1.0, 2.0};
  const MomentVector y = MomentVector::dirac(pt, 1);
  EXPECT_DOUBLE_EQ(riesz(y, var(2, 0) * var(2, 1)), 2.0);
  EXPECT_DOUBLE_EQ(riesz(y, cst(2, 1.0)), y.y0());

  const MomentVector two_point = uni({1.0, 0.0, 1.0}, 1);
  EXPECT_DOUBLE_EQ(riesz(two_point, var(1, 0).pow(2)), 1.0);
}

TEST(Riesz, DegreeOverflowThrows) {
  const MomentVector y = uni({1.0, 0.0, 1.0}, 1);
  EXPECT_THROW(riesz(y, var(1, 0).pow(3)), PreconditionFailure);
}

TEST(MomentMatrix, Examples) {
  const MomentVector y = uni({1.0, 0.3, 0.7}, 1);
  MatrixXd expected(2, 2);
  expected << 1.0, 0.3, 0.3, 0.7;
  EXPECT_EQ(moment_matrix(y, 1), expected);

  const std::vector<double> one{1.0};
  const MatrixXd m = moment_matrix(MomentVector::dirac(one, 1), 1);
  EXPECT_EQ(m, MatrixXd::Ones(2, 2));
  EXPECT_EQ(numeric_rank(m), 1);

  const std::vector<double> pt{0.2, -0.4};
  EXPECT_EQ(moment_matrix(MomentVector::dirac(pt, 3), 3).rows(), 10);
  EXPECT_THROW(moment_matrix(y, 2), PreconditionFailure);
}

TEST(MomentMatrix, MatchesDefinition) {
  std::mt19937_64 rng(17);
  const MomentVector y = oracle::random_admissible_moments(rng, 2, 3);
  for (int d = 0; d <= 3; ++d) {
    EXPECT_EQ(moment_matrix(y, d), oracle::moment_matrix_direct(y, d));
  }
}

TEST(LocalizingMatrix, Examples) {
  std::mt19937_64 rng(23);
  const MomentVector y = oracle::random_admissible_moments(rng, 2, 2);
  EXPECT_EQ(localizing_matrix(y, cst(2, 1.0), 2), moment_matrix(y, 2));

  const MomentVector u = uni({1.0, 0.2, 0.6}, 1);
  const MatrixXd l = localizing_matrix(u, cst(1, 1.0) - var(1, 0).pow(2), 0);
  ASSERT_EQ(l.rows(), 1);
  EXPECT_DOUBLE_EQ(l(0, 0), 1.0 - 0.6);
}

TEST(LocalizingMatrix, DiracIsScaledRankOne) {
  const std::vector<double> x{0.6, 0.8};
  const MomentVector y = MomentVector::dirac(x, 3);
  const Polynomial g = hyperbola_disk().constraint(0);
  const MatrixXd l = localizing_matrix(y, g, 2);
  VectorXd v(6);
  const auto basis = monomial_basis(2, 2);
  for (int i = 0; i < 6; ++i) v(i) = basis[static_cast<std::size_t>(i)].eval(x);
  EXPECT_LE((l - g.eval(x) * v * v.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GE(oracle::min_eig(l), -1e-12);
}

TEST(LocalizingMatrix, DegreeOverflowThrows) {
  const MomentVector y = uni({1.0, 0.0, 1.0, 0.0, 3.0}, 2);
  EXPECT_THROW(localizing_matrix(y, var(1, 0).pow(2), 2), PreconditionFailure);
  EXPECT_NO_THROW(localizing_matrix(y, var(1, 0).pow(2), 1));
}

TEST(Flatness, DiracIsFlat) {
  const std::vector<double> x{0.3, -0.7};
  for (int d = 1; d <= 3; ++d) {
    const FlatnessReport r = flatness(MomentVector::dirac(x, d), d);
    EXPECT_EQ(r.rank_d, 1);
    EXPECT_EQ(r.rank_lower, 1);
    EXPECT_TRUE(r.flat);
    EXPECT_FALSE(r.interior_point_caveat);
  }
}

TEST(Flatness, TwoAtomMixture) {
  const std::vector<std::vector<double>> pts{{-1.0}, {2.0}};
  const std::vector<double> w{0.5, 0.5};
  const FlatnessReport r = flatness(MomentVector::atomic(pts, w, 2), 2);
  EXPECT_EQ(r.rank_d, 2);
  EXPECT_EQ(r.rank_lower, 2);
  EXPECT_TRUE(r.flat);
}

TEST(Flatness, CaveatFollowsProvenance) {
  const std::vector<double> x{0.5};
  const MomentVector dirac = MomentVector::dirac(x, 2);
  const MomentVector solved(1, 2, dirac.values(), MomentProvenance::kInteriorPointSolve);
  EXPECT_TRUE(flatness(solved, 2).interior_point_caveat);
  EXPECT_FALSE(flatness(dirac, 2).interior_point_caveat);
}

TEST(Flatness, RejectsIndefiniteMatrix) {
  const MomentVector y = uni({1.0, 2.0, 1.0}, 1);
  EXPECT_THROW(flatness(y, 1), PreconditionFailure);
}

TEST(MeanPoint, Examples) {
  const std::vector<double> x{0.3, -0.2};
  const auto m = mean_point(MomentVector::dirac(x, 1));
  EXPECT_DOUBLE_EQ(m[0], 0.3);
  EXPECT_DOUBLE_EQ(m[1], -0.2);

  const std::vector<std::vector<double>> pts{{0.0}, {2.0}};
  const std::vector<double> w{0.5, 0.5};
  EXPECT_DOUBLE_EQ(mean_point(MomentVector::atomic(pts, w, 1))[0], 1.0);

  EXPECT_THROW(mean_point(uni({2.0, 0.0, 1.0}, 1)), PreconditionFailure);
}

TEST(MomentProperties, AtomicMeasuresOnSetAreFeasible) {
  const SemialgebraicSet k = hyperbola_disk();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.3);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  const int d = 3;
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> pts;
    std::vector<double> wts;
    while (pts.size() < 4) {
      std::vector<double> x{u(rng), u(rng)};
      if (k.contains(x)) {
        pts.push_back(x);
        wts.push_back(w(rng));
      }
    }
    double total = 0.0;
    for (double v : wts) total += v;
    for (double& v : wts) v /= total;
    const MomentVector y = MomentVector::atomic(pts, wts, d);
    EXPECT_GE(oracle::min_eig(moment_matrix(y, d)), -1e-9);
    for (int j = 0; j < k.num_constraints(); ++j) {
      const MatrixXd l = localizing_matrix(y, k.constraint(j), d - k.half_degree(j));
      EXPECT_GE(oracle::min_eig(l), -1e-9);
    }
  }
}

TEST(MomentProperties, RieszIsLinear) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> nd;
  const auto basis = monomial_basis(2, 4);
  for (int t = 0; t < 30; ++t) {
    const MomentVector y = oracle::random_admissible_moments(rng, 2, 2);
    Polynomial p(2), q(2);
    for (const auto& m : basis) {
      p.add_term(m, nd(rng));
      q.add_term(m, nd(rng));
    }
    const double a = nd(rng), b = nd(rng);
    const double lhs = riesz(y, a * p + b * q);
    const double rhs = a * riesz(y, p) + b * riesz(y, q);
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST(MomentProperties, LeadingSubmatrixAndRankMonotone) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 3;
    const MomentVector y = oracle::random_admissible_moments(rng, n, 3);
    for (int d = 1; d <= 3; ++d) {
      const MatrixXd big = moment_matrix(y, d);
      const MatrixXd small = moment_matrix(y, d - 1);
      EXPECT_EQ(big.topLeftCorner(small.rows(), small.cols()), small);
    }
    const FlatnessReport r = flatness(y, 3);
    EXPECT_LE(r.rank_lower, r.rank_d);
  }
}

TEST(MomentProgram, EqualityRowsAndAliasing) {
  const Polynomial x = var(1, 0);
  MomentProgram prog(1, 2);
  prog.minimize(x);
  prog.add_psd_block("moment", cst(1, 1.0), 2);
  prog.add_zero_block("zero", cst(1, 1.0) - x * x, 1);
  // One y_0 row plus the 3 entries of a 2x2 symmetric block.
  EXPECT_EQ(prog.equality_row_count(), 1 + 3);
  const CompiledMomentProgram compiled = prog.compile();
  EXPECT_EQ(compiled.num_moments(), 5);
  const SdpSolution s = solve_sdp(compiled.sdp());
  ASSERT_EQ(s.status, SdpStatus::kOptimal) << s.message;
  // x^2 = 1 on the support: the minimum of x is -1.
  EXPECT_NEAR(compiled.moment_value(s), -1.0, 1e-6);
  const MomentVector y = compiled.moments(s);
  EXPECT_EQ(y.provenance(), MomentProvenance::kInteriorPointSolve);
  EXPECT_NEAR(y[Monomial(std::vector<int>{2})], 1.0, 1e-6);
}

}  // namespace
}  // namespace cvxpoly
