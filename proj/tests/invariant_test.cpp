#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qinv/invariant.hpp"

namespace qinv {
namespace {

constexpr ModelParams kRef = kReferenceParams;

// The auxiliary condition evaluated with complex alpha = eps sqrt(D/2),
// independent of the real parametrization used by the library.
double complex_auxiliary(AlgebraKind kind, const ModelParams& p, double eps) {
  const double d = kind.d_constant();
  const cplx alpha = eps * std::sqrt(cplx{d / 2.0});
  const cplx r = p.coupling * std::cosh(alpha) +
                 (p.phase_rate + p.omega_drive) / std::sqrt(cplx{2.0 * d}) * std::sinh(alpha);
  return std::abs(r);
}

TEST(SolveEpsilon, DecoupledIsZero) {
  EXPECT_EQ(solve_epsilon(AlgebraKind::su2(), ModelParams{1.0, 0.0, 0.5}), 0.0);
  EXPECT_EQ(solve_epsilon(AlgebraKind::su11(), ModelParams{1.0, 0.0, 0.5}), 0.0);
}

TEST(SolveEpsilon, ReferenceValuesSatisfyAuxiliaryCondition) {
  const double e2 = solve_epsilon(AlgebraKind::su2(), kRef);
  const double e11 = solve_epsilon(AlgebraKind::su11(), kRef);
  EXPECT_NEAR(e2, -0.34657359027997264, 1e-15);
  EXPECT_NEAR(e11, -0.32175055439664219, 1e-15);
  EXPECT_LE(complex_auxiliary(AlgebraKind::su2(), kRef, e2), 1e-12);
  EXPECT_LE(complex_auxiliary(AlgebraKind::su11(), kRef, e11), 1e-12);
  EXPECT_LE(std::abs(auxiliary_residual(AlgebraKind::su2(), kRef, e2)), 1e-12);
  EXPECT_LE(std::abs(auxiliary_residual(AlgebraKind::su11(), kRef, e11)), 1e-12);
}

TEST(SolveEpsilon, NegativeSumAbsorbsSign) {
  const ModelParams p{-1.0, 0.25, -0.5};
  for (auto kind : {AlgebraKind::su2(), AlgebraKind::su11()}) {
    const double eps = solve_epsilon(kind, p);
    EXPECT_GT(eps, 0.0);
    EXPECT_LE(complex_auxiliary(kind, p, eps), 1e-12);
  }
}

TEST(SolveEpsilon, BrokenAndSingularRegimes) {
  try {
    solve_epsilon(AlgebraKind::su2(), ModelParams{1.0, 1.0, 0.5});
    FAIL();
  } catch (const RegimeError& e) {
    EXPECT_NEAR(e.ratio(), 4.0 / 3.0, 1e-15);
  }
  EXPECT_THROW(solve_epsilon(AlgebraKind::su2(), ModelParams{1.0, 0.75, 0.5}), RegimeError);
  EXPECT_NO_THROW(solve_epsilon(AlgebraKind::su11(), ModelParams{1.0, 1.0, 0.5}));
  EXPECT_THROW(solve_epsilon(AlgebraKind::su11(), ModelParams{0.5, 0.2, -0.5}),
               SingularConditionError);
}

TEST(Transformation, ZeroEpsilonIsIdentity) {
  const auto rep = su11_boson_generators(16);
  EXPECT_LE(max_norm(build_R(rep, kRef, 0.0, 1.0) - CMatrix::identity(16)), 1e-15);
}

TEST(Transformation, SpinHalfSeries) {
  const auto rep = su2_generators(0.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  for (double t : {0.0, 1.1, 4.0}) {
    const double phi = kRef.phase_rate * t;
    const CMatrix m = rep.kplus() * std::polar(1.0, phi) + rep.kminus() * std::polar(1.0, -phi);
    const CMatrix closed = std::cosh(eps / 2) * CMatrix::identity(2) + std::sinh(eps / 2) * m;
    EXPECT_LE(max_norm(build_R(rep, kRef, eps, t) - closed), 1e-15);
    EXPECT_LE(max_norm(build_R(rep, kRef, eps, t) * build_R_inverse(rep, kRef, eps, t) -
                       CMatrix::identity(2)),
              1e-10);
  }
}

TEST(Transformation, HermitianAndPositive) {
  for (const auto& rep : {su2_generators(2.0), su11_boson_generators(32)}) {
    const double eps = solve_epsilon(rep.kind(), kRef);
    const CMatrix r = build_R(rep, kRef, eps, 0.7);
    EXPECT_LT(hermiticity_defect(r), 1e-12 * std::max(1.0, max_norm(r)));
    EXPECT_GT(herm_eig(0.5 * (r + adjoint(r))).values.front(), 0.0);
  }
}

TEST(Invariant, ZeroEpsilonGivesK0) {
  const auto rep = su2_generators(1.0);
  EXPECT_LE(max_norm(build_invariant(rep, kRef, 0.0, 0.3) - rep.k0()), 1e-15);
}

TEST(Invariant, SpinHalfClosedForm) {
  const auto rep = su2_generators(0.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const CMatrix expected =
      std::cosh(eps) * rep.k0() - 0.5 * std::sinh(eps) * (rep.kplus() - rep.kminus());
  const CMatrix inv = build_invariant(rep, kRef, eps, 0.0);
  EXPECT_LE(max_norm(inv - expected), 1e-14);
  EXPECT_GT(hermiticity_defect(inv), 0.1);
}

TEST(Invariant, Su11InteriorAgreement) {
  const auto rep = su11_boson_generators(48);
  const double eps = solve_epsilon(rep.kind(), kRef);
  for (double t : {0.0, 1.0, 2.5}) {
    const CMatrix r = build_R(rep, kRef, eps, t);
    const CMatrix ri = build_R_inverse(rep, kRef, eps, t);
    const auto idx = guarded_indices(rep, {&r, &ri});
    EXPECT_GE(idx.size(), 12u);
    EXPECT_LE(max_norm_on(build_invariant(rep, kRef, eps, t) -
                              closed_form_invariant(rep, kRef, eps, t),
                          idx),
              1e-9);
  }
}

TEST(Metric, IdentityAtZeroEpsilon) {
  const auto rep = su2_generators(1.0);
  EXPECT_LE(max_norm(build_metric(rep, kRef, 0.0, 2.0) - CMatrix::identity(3)), 1e-15);
}

TEST(Metric, PositiveDefiniteAndInverseOfRSquared) {
  const auto rep = su2_generators(1.0);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const CMatrix eta = build_metric(rep, kRef, eps, 0.4);
  EXPECT_LT(hermiticity_defect(eta), 1e-12);
  for (double v : herm_eig(eta).values) EXPECT_GT(v, 0.0);
  const CMatrix r = build_R(rep, kRef, eps, 0.4);
  EXPECT_LE(max_norm(eta * r * r - CMatrix::identity(3)), 1e-10);
}

TEST(PseudoHermiticity, TrivialAtZeroEpsilon) {
  const auto rep = su2_generators(1.5);
  const auto r = check_pseudo_hermiticity(rep, make_frame(rep, kRef, 0.0, 0.0));
  EXPECT_EQ(r.pseudo_hermitian, 0.0);
  EXPECT_EQ(r.dyson, 0.0);
}

TEST(PseudoHermiticity, Su2Generic) {
  const auto rep = su2_generators(1.5);
  const ModelParams p{1.2, -0.31, 0.7};
  for (double t : {0.0, 0.9, 3.7}) {
    const auto r = check_pseudo_hermiticity(rep, make_frame(rep, p, t));
    EXPECT_LT(r.pseudo_hermitian, 1e-10);
    EXPECT_LT(r.dyson, 1e-10);
  }
}

TEST(PseudoHermiticity, Su11Interior) {
  const auto rep = su11_boson_generators(48);
  for (double t : {0.0, 0.7, 3.1}) {
    const auto f = make_frame(rep, kRef, t);
    EXPECT_GE(f.metric_interior.size(), 6u);
    const auto r = check_pseudo_hermiticity(rep, f);
    EXPECT_LT(r.pseudo_hermitian, 1e-9);
    EXPECT_LT(r.dyson, 1e-9);
  }
}

TEST(InvariantEquation, DecoupledIsRoundOff) {
  const auto rep = su2_generators(1.0);
  const auto r = check_invariant_equation(rep, ModelParams{1.0, 0.0, 0.5}, 0.0, 0.3, 1e-5);
  EXPECT_LT(r.residual, 1e-14);
}

TEST(InvariantEquation, SpinHalfSecondOrder) {
  const auto rep = su2_generators(0.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const auto r = check_invariant_equation(rep, kRef, eps, 0.6, 1e-5);
  EXPECT_LT(r.residual, 1e-8);
  EXPECT_LE(r.residual, r.bound());
  EXPECT_NEAR(r.observed_order, 2.0, 0.05);
}

TEST(InvariantEquation, WrongEpsilonIsNotInvariant) {
  const auto rep = su2_generators(0.5);
  const auto r = check_invariant_equation(rep, kRef, -0.2, 0.6, 1e-5);
  EXPECT_GT(r.residual, 1e-3);
}

TEST(InvariantEquation, StepOutOfRange) {
  const auto rep = su2_generators(0.5);
  EXPECT_THROW(check_invariant_equation(rep, kRef, 0.0, 0.0, 1e-2), ContractError);
}

TEST(SimilarityIdentities, ZeroEpsilon) {
  const auto rep = su2_generators(1.0);
  for (double r : similarity_identities_residual(rep, kRef, 0.0, 0.5)) EXPECT_LT(r, 1e-13);
}

TEST(SimilarityIdentities, BothAlgebras) {
  const auto su2 = su2_generators(1.0);
  for (double r : similarity_identities_residual(su2, kRef, solve_epsilon(su2.kind(), kRef), 0.8))
    EXPECT_LT(r, 1e-9);
  const auto su11 = su11_boson_generators(48);
  for (double r :
       similarity_identities_residual(su11, kRef, solve_epsilon(su11.kind(), kRef), 0.8))
    EXPECT_LT(r, 1e-8);
}

TEST(Eigenframe, ZeroEpsilonIsCoordinateBasis) {
  const auto rep = su2_generators(1.0);
  const auto f = invariant_eigenframe(rep, kRef, 0.0, 1.0);
  ASSERT_EQ(f.states.size(), 3u);
  for (const auto& s : f.states) {
    EXPECT_LE(max_norm(std::span<const cplx>(s.state)) - 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.state[s.index]), 1.0, 1e-15);
  }
}

TEST(Eigenframe, SpinHalfReference) {
  const auto rep = su2_generators(0.5);
  const auto f = invariant_eigenframe(rep, kRef, solve_epsilon(rep.kind(), kRef), 0.0);
  ASSERT_EQ(f.states.size(), 2u);
  EXPECT_DOUBLE_EQ(f.states[0].lambda, 0.5);
  EXPECT_DOUBLE_EQ(f.states[1].lambda, -0.5);
  EXPECT_LT(f.gram_defect, 1e-10);
  EXPECT_TRUE(f.excluded.empty());
}

TEST(Eigenframe, Su11GroundStateAndExclusions) {
  const auto rep = su11_boson_generators(48);
  const auto f = invariant_eigenframe(rep, kRef, solve_epsilon(rep.kind(), kRef), 0.0);
  ASSERT_FALSE(f.states.empty());
  EXPECT_EQ(f.states[0].index, 0u);
  EXPECT_DOUBLE_EQ(f.states[0].lambda, 0.25);
  EXPECT_LT(f.states[0].eigen_residual, 1e-9);
  EXPECT_FALSE(f.excluded.empty());
  for (const auto& x : f.excluded) EXPECT_GE(x.tail_mass, 1e-10);
}

TEST(Eigenframe, NonHermitianInvariantWithRealSpectrum) {
  const auto rep = su2_generators(2.0);
  const ModelParams p{0.8, 0.3, 0.9};
  const double eps = solve_epsilon(rep.kind(), p);
  const auto frame = make_frame(rep, p, eps, 1.3);
  EXPECT_GT(hermiticity_defect(frame.invariant_i), 1e-3);
  const auto f = invariant_eigenframe(rep, p, eps, 1.3);
  const auto levels = k0_eigenbasis(rep);
  ASSERT_EQ(f.states.size(), levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) EXPECT_EQ(f.states[i].lambda, levels[i].lambda);
}

}  // namespace
}  // namespace qinv
