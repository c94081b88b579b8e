#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qinv/dynamics.hpp"

namespace qinv {
namespace {

constexpr ModelParams kRef = kReferenceParams;

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double analytic_error(const Representation& rep, const ModelParams& p, std::size_t n,
                      const Trajectory& tr) {
  const double eps = solve_epsilon(rep.kind(), p);
  double d = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    d = std::max(d, max_diff(tr.states[k], analytic_state(rep, p, eps, n, tr.times[k]).state));
  return d;
}

Trajectory run(const Representation& rep, const ModelParams& p, std::size_t n, Method m,
               double step = 0.0, std::size_t samples = 32) {
  const double eps = solve_epsilon(rep.kind(), p);
  PropagationOptions o;
  o.method = m;
  o.step = step;
  o.track_index = n;
  const double t = p.phase_rate == 0.0 ? 4 * std::numbers::pi : p.period();
  return propagate(rep, p, frame_initial_state(rep, p, eps, n), uniform_grid(t, samples), o);
}

TEST(Propagate, DecoupledIsDiagonal) {
  const ModelParams p{1.3, 0.0, 0.5};
  for (const auto& rep : {su2_generators(1.0), su11_boson_generators(16)}) {
    for (auto m : {Method::rk4, Method::magnus2}) {
      const std::size_t n = 2;
      const double lambda = k0_eigenbasis(rep)[n].lambda;
      const auto tr = run(rep, p, n, m, 0.0, 16);
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        CVector expected = basis_vector(rep.dim(), n);
        expected[n] = std::polar(1.0, -p.omega_drive * lambda * tr.times[k]);
        EXPECT_LT(max_diff(tr.states[k], expected), 1e-10);
        EXPECT_NEAR(tr.extracted_phase[k], -p.omega_drive * lambda * tr.times[k], 1e-9);
      }
    }
  }
}

TEST(Propagate, SpinHalfMatchesAnalytic) {
  const auto rep = su2_generators(0.5);
  for (auto m : {Method::rk4, Method::magnus2})
    for (std::size_t n : {0u, 1u}) EXPECT_LT(analytic_error(rep, kRef, n, run(rep, kRef, n, m)), 1e-6);
}

TEST(Propagate, HigherSpinMatchesAnalytic) {
  const auto rep = su2_generators(2.5);
  EXPECT_LT(analytic_error(rep, kRef, 1, run(rep, kRef, 1, Method::magnus2)), 1e-6);
}

TEST(Propagate, Su11CarrierMatchesAnalytic) {
  const auto rep = su11_boson_generators(48);
  for (auto m : {Method::rk4, Method::magnus2})
    for (std::size_t n : {0u, 3u}) EXPECT_LT(analytic_error(rep, kRef, n, run(rep, kRef, n, m)), 1e-6);
}

TEST(Propagate, Su11DirectFockIsUnreliable) {
  // The truncated Fock H has complex eigenvalues; stepping it directly drifts
  // away from the analytic solution or out of the invariant eigenstate.
  for (std::size_t n : {16u, 48u}) {
    const auto rep = su11_boson_generators(n);
    const double eps = solve_epsilon(rep.kind(), kRef);
    PropagationOptions o;
    o.carrier = Carrier::direct;
    o.track_index = 0;
    bool failed = false;
    try {
      const auto tr = propagate(rep, kRef, frame_initial_state(rep, kRef, eps, 0),
                                uniform_grid(4 * std::numbers::pi, 32), o);
      failed = analytic_error(rep, kRef, 0, tr) > 1e-3;
    } catch (const Error&) {
      failed = true;
    }
    EXPECT_TRUE(failed) << n;
  }
}

TEST(Propagate, Rk4FourthOrder) {
  const auto rep = su2_generators(0.5);
  const double e1 = analytic_error(rep, kRef, 0, run(rep, kRef, 0, Method::rk4, 0.04));
  const double e2 = analytic_error(rep, kRef, 0, run(rep, kRef, 0, Method::rk4, 0.02));
  EXPECT_GT(e1 / e2, 13.0);
  EXPECT_LT(e1 / e2, 19.0);
}

TEST(Propagate, Magnus2SecondOrder) {
  const auto rep = su2_generators(0.5);
  const double e1 = analytic_error(rep, kRef, 0, run(rep, kRef, 0, Method::magnus2, 0.02));
  const double e2 = analytic_error(rep, kRef, 0, run(rep, kRef, 0, Method::magnus2, 0.01));
  EXPECT_NEAR(e1 / e2, 4.0, 0.3);
}

TEST(Propagate, Linearity) {
  const auto rep = su2_generators(1.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const auto grid = uniform_grid(3.0, 6);
  const CVector a = frame_initial_state(rep, kRef, eps, 0);
  const CVector b = basis_vector(rep.dim(), 2);
  const cplx ca{0.3, -0.2}, cb{-1.1, 0.4};
  CVector mix(rep.dim());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = ca * a[i] + cb * b[i];
  const auto ta = propagate(rep, kRef, a, grid);
  const auto tb = propagate(rep, kRef, b, grid);
  const auto tm = propagate(rep, kRef, mix, grid);
  CVector expect(rep.dim());
  for (std::size_t i = 0; i < expect.size(); ++i)
    expect[i] = ca * ta.states.back()[i] + cb * tb.states.back()[i];
  EXPECT_LT(max_diff(tm.states.back(), expect), 1e-12);
}

TEST(Propagate, EtaNormConservedWhileTwoNormVaries) {
  for (const auto& rep : {su2_generators(0.5), su2_generators(2.0), su11_boson_generators(48)}) {
    const auto tr = propagate(rep, kRef, basis_vector(rep.dim(), 1), uniform_grid(kRef.period(), 32));
    double lo = INFINITY, hi = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      lo = std::min(lo, tr.eta_norms[k]);
      hi = std::max(hi, tr.eta_norms[k]);
      lo2 = std::min(lo2, norm2(tr.states[k]));
      hi2 = std::max(hi2, norm2(tr.states[k]));
    }
    EXPECT_LT(hi - lo, 1e-8);
    EXPECT_NEAR(lo, eta_norm(rep, kRef, solve_epsilon(rep.kind(), kRef), 0.0, tr.states[0]), 1e-8);
    EXPECT_GT(hi2 - lo2, 1e-2);
  }
}

TEST(Propagate, StaysInInvariantEigenstate) {
  for (const auto& rep : {su2_generators(1.5), su11_boson_generators(48)}) {
    const auto tr = run(rep, kRef, 2, Method::magnus2);
    ASSERT_EQ(tr.invariant_eigen_residuals.size(), tr.times.size());
    for (double r : tr.invariant_eigen_residuals) EXPECT_LE(r, 1e-6);
    EXPECT_LE(tr.max_leakage, 1e-6);
  }
}

TEST(Propagate, StepTooLarge) {
  const auto rep = su2_generators(0.5);
  EXPECT_THROW(run(rep, kRef, 0, Method::rk4, 1.0), AccuracyError);
  EXPECT_THROW(run(rep, kRef, 0, Method::magnus2, 1.0), AccuracyError);
}

TEST(Propagate, NonFiniteStateDiverges) {
  const auto rep = su2_generators(0.5);
  const CVector psi{std::numeric_limits<double>::quiet_NaN(), 1.0};
  const auto grid = uniform_grid(1.0, 2);
  PropagationOptions o;
  o.check_accuracy = false;
  EXPECT_THROW(propagate(rep, kRef, psi, grid, o), DivergenceError);
}

TEST(Propagate, Preconditions) {
  const auto rep = su2_generators(0.5);
  const CVector zero(2);
  const std::vector<double> grid{0.0, 1.0};
  const std::vector<double> bad{0.0, 0.0};
  EXPECT_THROW(propagate(rep, kRef, zero, grid), ContractError);
  EXPECT_THROW(propagate(rep, kRef, basis_vector(2, 0), bad), ContractError);
  PropagationOptions o;
  o.step = -1.0;
  EXPECT_THROW(propagate(rep, kRef, basis_vector(2, 0), grid, o), ContractError);
  EXPECT_THROW(propagate(rep, kRef, basis_vector(3, 0), grid), SizingError);
}

TEST(AnalyticState, DecoupledPhase) {
  const auto rep = su2_generators(1.0);
  const ModelParams p{0.7, 0.0, 0.5};
  const auto a = analytic_state(rep, p, 0.0, 0, 3.0);
  EXPECT_DOUBLE_EQ(a.total_phase, -0.7 * 3.0);
  EXPECT_NEAR(std::abs(a.state[0]), 1.0, 1e-15);
}

TEST(AnalyticState, BrokenRegimePropagates) {
  const auto rep = su2_generators(0.5);
  EXPECT_THROW(run(rep, ModelParams{1.0, 1.0, 0.5}, 0, Method::magnus2), RegimeError);
}

TEST(ExtractPhase, MatchesClosedForm) {
  const auto rep = su2_generators(1.0);
  const ModelParams p{1.0, -0.2, 0.8};
  const double eps = solve_epsilon(rep.kind(), p);
  const auto tr = run(rep, p, 0, Method::magnus2, 0.0, 64);
  EXPECT_EQ(tr.extracted_phase.front(), 0.0);
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    EXPECT_NEAR(tr.extracted_phase[k], lr_phase(rep.kind(), p, eps, 1.0, tr.times[k]), 1e-6);
}

TEST(ExtractPhase, LeakageDetected) {
  const auto rep = su2_generators(0.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const auto tr = propagate(rep, kRef, basis_vector(2, 0), uniform_grid(2.0, 4));
  EXPECT_THROW(extract_phase(tr, rep, kRef, eps, 0), FrameLeakageError);
}

TEST(EtaNorm, FrameStatesAndSuperpositions) {
  const auto rep = su2_generators(1.5);
  const double eps = solve_epsilon(rep.kind(), kRef);
  const double t = 0.9;
  const CMatrix r = build_R(rep, kRef, eps, t);
  EXPECT_NEAR(eta_norm(rep, kRef, eps, t, r.column(2)), 1.0, 1e-12);
  const cplx c[] = {{0.6, 0.1}, {0.0, -0.5}, {0.2, 0.2}, {-0.3, 0.0}};
  CVector psi(rep.dim());
  double expect = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const cplx ph = c[n] * std::polar(1.0, lr_phase(rep.kind(), kRef, eps, *rep.j() - n, t));
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += ph * r(i, n);
    expect += std::norm(c[n]);
  }
  EXPECT_NEAR(eta_norm(rep, kRef, eps, t, psi), expect, 1e-12);
}

TEST(EtaNorm, ComplexValueIsAMetricError) {
  const CMatrix skew{{0.0, 1.0}, {-1.0, 0.0}};
  const CVector psi{1.0, cplx{0.0, 1.0}};
  EXPECT_THROW(eta_norm_with(skew, psi), MetricError);
}

TEST(ReferenceStep, WithinThousandthOfPeriod) {
  for (const auto& rep : {su2_generators(0.5), su2_generators(5.0), su11_boson_generators(48)})
    EXPECT_LE(reference_step(rep, kRef), 1e-3 * kRef.period());
}

}  // namespace
}  // namespace qinv
