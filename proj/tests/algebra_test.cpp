#include <gtest/gtest.h>

#include <cmath>

#include "qinv/algebra.hpp"

namespace qinv {
namespace {

TEST(AlgebraKind, DConstant) {
  EXPECT_EQ(AlgebraKind::su2().d_constant(), 2);
  EXPECT_EQ(AlgebraKind::su11().d_constant(), -2);
}

TEST(Su2, SpinHalf) {
  const auto rep = su2_generators(0.5);
  EXPECT_EQ(rep.dim(), 2u);
  EXPECT_EQ(rep.k0(), (CMatrix{{0.5, 0.0}, {0.0, -0.5}}));
  EXPECT_EQ(rep.kplus(), (CMatrix{{0.0, 1.0}, {0.0, 0.0}}));
  EXPECT_EQ(rep.kminus(), adjoint(rep.kplus()));
}

TEST(Su2, SpinOneLadderCoefficients) {
  const auto rep = su2_generators(1.0);
  EXPECT_EQ(rep.k0(), (CMatrix{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, -1.0}}));
  // sqrt(j(j+1) - m(m+1)) for m = 0 and m = -1 is sqrt(2) in both cases.
  EXPECT_NEAR(rep.kplus()(0, 1).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(rep.kplus()(1, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(rep.kplus()(0, 2), cplx{});
}

TEST(Su2, AlgebraHoldsForSeveralSpins) {
  for (double j : {0.5, 1.0, 1.5, 2.0, 3.5, 5.0}) {
    const auto rep = su2_generators(j);
    const auto report = check_commutation(rep);
    EXPECT_TRUE(report.pass) << "j = " << j;
    EXPECT_LE(report.max_residual(), 1e-12);
    EXPECT_TRUE(report.boundary_rows.empty());
  }
  EXPECT_LT(check_commutation(su2_generators(1.5)).max_residual(), 1e-14);
}

TEST(Su2, RejectsNonHalfInteger) {
  EXPECT_THROW(su2_generators(0.3), DomainError);
  EXPECT_THROW(su2_generators(0.0), DomainError);
  EXPECT_THROW(su2_generators(-1.0), DomainError);
}

TEST(Su11, BosonMatrixElements) {
  const auto rep = su11_boson_generators(8);
  EXPECT_DOUBLE_EQ(rep.k0()(0, 0).real(), 0.25);
  EXPECT_DOUBLE_EQ(rep.k0()(3, 3).real(), 1.75);
  EXPECT_NEAR(rep.kplus()(2, 0).real(), 0.5 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(rep.kplus()(5, 3).real(), 0.5 * std::sqrt(20.0), 1e-15);
  EXPECT_EQ(rep.kminus(), adjoint(rep.kplus()));
}

TEST(Su11, InteriorAlgebraAndBoundaryLocalization) {
  for (std::size_t n : {16u, 32u, 48u}) {
    const auto rep = su11_boson_generators(n);
    const auto report = check_commutation(rep);
    EXPECT_TRUE(report.pass);
    EXPECT_LT(report.max_residual(), 1e-15 * static_cast<double>(n * n));
    // [K+,K-] + 2K0 = -(1/4)(n+1)(n+2) + ... fails only where K+ runs off the truncation.
    EXPECT_EQ(report.boundary_rows, (std::vector<std::size_t>{n - 2, n - 1}));
    const double top = static_cast<double>(n - 1);
    EXPECT_NEAR(report.kplus_kminus_full, 0.25 * top * (top - 1.0) + top + 0.5, 1e-9);
  }
}

TEST(Su11, RejectsSmallTruncation) { EXPECT_THROW(su11_boson_generators(5), DomainError); }

TEST(K0Eigenbasis, Su11Progression) {
  const auto levels = k0_eigenbasis(su11_boson_generators(8));
  ASSERT_EQ(levels.size(), 8u);
  EXPECT_DOUBLE_EQ(levels[1].lambda, 0.75);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    EXPECT_DOUBLE_EQ(levels[i].lambda, 0.25 + 0.5 * static_cast<double>(i));
    EXPECT_EQ(levels[i].index, i);
  }
}

TEST(K0Eigenbasis, Su2MagneticNumbers) {
  const auto rep = su2_generators(1.0);
  const auto levels = k0_eigenbasis(rep);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_DOUBLE_EQ(levels[0].lambda, 1.0);
  EXPECT_DOUBLE_EQ(levels[1].lambda, 0.0);
  EXPECT_DOUBLE_EQ(levels[2].lambda, -1.0);
  for (const auto& lv : levels) EXPECT_DOUBLE_EQ(rep.k0()(lv.index, lv.index).real(), lv.lambda);
}

TEST(Spinor, FaithfulSu11Relations) {
  const auto g = su11_spinor_generators();
  EXPECT_EQ(commutator(g.k0, g.kplus), g.kplus);
  EXPECT_EQ(commutator(g.k0, g.kminus), -g.kminus);
  EXPECT_EQ(commutator(g.kplus, g.kminus), -2.0 * g.k0);
}

}  // namespace
}  // namespace qinv
