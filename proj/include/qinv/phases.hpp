#pragma once

// Closed-form Lewis-Riesenfeld, geometric and adiabatic phases, their
// numerical counterparts, and the su(2) breaking diagram.
//
// With phi = w t the LR phase integrand is time independent:
//
//   alpha_n(t) = -lambda_n t [W + 2 sqrt(D/2) G sinh(a) + 2 (W + w) sinh^2(a/2)]
//
// and splits into a dynamic part -lambda_n t [W cosh(a) + 2 sqrt(D/2) G sinh(a)]
// and a geometric part -2 lambda_n w t sinh^2(a/2).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qinv/algebra.hpp"
#include "qinv/constants.hpp"
#include "qinv/errors.hpp"
#include "qinv/invariant.hpp"
#include "qinv/model.hpp"

namespace qinv {

struct SinhSqHalf {
  double value = 0.0;      // sinh^2(alpha/2), principal branch
  double companion = 0.0;  // su(1,1): sin^2(eps/2) = -value; su(2): equals value
  double epsilon = 0.0;
};

/// -1/2 + |w+W| / (2 sqrt((w+W)^2 - 2 D G^2)), checked against eps.
inline SinhSqHalf sinh_sq_half(AlgebraKind kind, const ModelParams& p) {
  SinhSqHalf out;
  out.epsilon = solve_epsilon(kind, p);
  if (p.coupling == 0.0) return out;
  const double sum = std::abs(p.phase_rate + p.omega_drive);
  const double d = kind.d_constant();
  out.value = -0.5 + sum / (2.0 * std::sqrt(sum * sum - 2.0 * d * p.coupling * p.coupling));
  out.companion = kind.is_su11() ? -out.value : out.value;
  const double via_eps = alpha_functions(kind, out.epsilon).sinh_sq_half;
  if (std::abs(via_eps - out.value) > tol::parameter_chain)
    throw ConsistencyError("sinh_sq_half: closed form " + std::to_string(out.value) +
                           " disagrees with the value from epsilon " + std::to_string(via_eps));
  return out;
}

inline double lr_phase(AlgebraKind kind, const ModelParams& p, double eps, double lambda, double t) {
  const auto a = alpha_functions(kind, eps);
  return -lambda * t *
         (p.omega_drive + 2.0 * p.coupling * a.sqrt_half_d_sinh +
          2.0 * (p.omega_drive + p.phase_rate) * a.sinh_sq_half);
}

/// The specialized single-G coefficient:
///   su(1,1): -lambda t (W - G sin(eps) + 2 (W + w) sin^2(eps/2))
///   su(2):   -lambda t (W + G sinh(eps) + 2 (W + w) sinh^2(eps/2))
/// where the su(1,1) "sin^2(eps/2)" symbol carries the value sinh^2(alpha/2).
inline double lr_phase_paper_specialized(AlgebraKind kind, const ModelParams& p, double eps,
                                         double lambda, double t) {
  const auto a = alpha_functions(kind, eps);
  return -lambda * t *
         (p.omega_drive + p.coupling * a.sqrt_half_d_sinh +
          2.0 * (p.omega_drive + p.phase_rate) * a.sinh_sq_half);
}

inline double dynamic_phase(AlgebraKind kind, const ModelParams& p, double eps, double lambda,
                            double t) {
  const auto a = alpha_functions(kind, eps);
  return -lambda * t * (p.omega_drive * a.cosh_alpha + 2.0 * p.coupling * a.sqrt_half_d_sinh);
}

inline double geometric_phase(AlgebraKind kind, const ModelParams& p, double eps, double lambda,
                              double t) {
  return -2.0 * lambda * p.phase_rate * t * alpha_functions(kind, eps).sinh_sq_half;
}

/// Geometric phase over one period 2 pi / |w|.
inline double berry_phase(AlgebraKind kind, const ModelParams& p, double eps, double lambda) {
  if (p.phase_rate == 0.0)
    throw DomainError("berry_phase: w = 0 gives no closed loop; use adiabatic_berry_phase");
  return geometric_phase(kind, p, eps, lambda, p.period());
}

/// -4 pi lambda (-1/2 + |W| / (2 sqrt(W^2 - 2 D G^2))), the w -> 0+ limit.
inline double adiabatic_berry_phase(AlgebraKind kind, const ModelParams& p, double lambda) {
  const double w = std::abs(p.omega_drive);
  const double g = p.coupling;
  if (g == 0.0) return 0.0;
  const double disc = w * w - 2.0 * kind.d_constant() * g * g;
  if (disc <= 0.0)
    throw RegimeError("adiabatic_berry_phase: W^2 <= 4 G^2, no real adiabatic invariant",
                      w == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * g / w);
  return -4.0 * std::numbers::pi * lambda * (-0.5 + w / (2.0 * std::sqrt(disc)));
}

namespace detail {

// Periodic trapezoid of f over [0, t] with m samples.
template <class F>
double trapezoid(F&& f, double t, int m) {
  double s = 0.0;
  for (int k = 0; k < m; ++k) s += f(t * k / m);
  return s * t / m;
}

}  // namespace detail

/// i * integral_0^t <n(t')| eta d/dt' |n(t')> dt' with |n(t)> = R(t)|n>,
/// by 5-point differences and the trapezoid rule. R(t) is rotated from R(0)
/// by exp(i w t K0).
inline double geometric_phase_integral(const Representation& rep, const ModelParams& p, double eps,
                                       std::size_t n, double t, int samples = 64) {
  const auto k0 = rep.k0_diagonal();
  const CMatrix r0 = build_R(rep, p, eps, 0.0);
  const CMatrix ri0 = build_R_inverse(rep, p, eps, 0.0);
  auto r_at = [&](double s) { return detail::conjugate_by_phase(r0, k0, p.phase_rate * s); };
  const double h = tol::derivative_step;
  auto rate = [&](double s) {
    const CMatrix ri = detail::conjugate_by_phase(ri0, k0, p.phase_rate * s);
    const CMatrix dr = (1.0 / (12.0 * h)) * (r_at(s - 2 * h) - 8.0 * r_at(s - h) +
                                             8.0 * r_at(s + h) - r_at(s + 2 * h));
    cplx v{};
    for (std::size_t k = 0; k < rep.dim(); ++k) v += ri(n, k) * dr(k, n);
    return (kI * v).real();
  };
  return detail::trapezoid(rate, t, samples);
}

/// -integral_0^t <n(t')| eta H |n(t')> dt'.
inline double dynamic_phase_integral(const Representation& rep, const ModelParams& p, double eps,
                                     std::size_t n, double t, int samples = 64) {
  const auto k0 = rep.k0_diagonal();
  const CMatrix r0 = build_R(rep, p, eps, 0.0);
  const CMatrix ri0 = build_R_inverse(rep, p, eps, 0.0);
  auto rate = [&](double s) {
    const CVector col = detail::conjugate_by_phase(r0, k0, p.phase_rate * s).column(n);
    const CVector hcol = build_hamiltonian(rep, p, s) * std::span<const cplx>(col);
    const CMatrix ri = detail::conjugate_by_phase(ri0, k0, p.phase_rate * s);
    cplx v{};
    for (std::size_t k = 0; k < rep.dim(); ++k) v += ri(n, k) * hcol[k];
    return -v.real();
  };
  return detail::trapezoid(rate, t, samples);
}

struct ArbitrationRecord {
  bool generic_matches_numeric = false;
  bool specialized_matches_numeric = false;
  /// G-coefficient implied by the numerics over the specialized form's (2 vs 1).
  double coefficient_ratio = std::numeric_limits<double>::quiet_NaN();
  double generic_deviation = 0.0;
  double specialized_deviation = 0.0;
  /// specialized - numeric at the final time, and its predicted value
  /// lambda t G sqrt(D/2) sinh(alpha).
  double specialized_offset = 0.0;
  double predicted_offset = 0.0;
  std::string winner = "undecided";
};

struct PhaseReport {
  std::size_t n = 0;
  double lambda_n = 0.0;
  double t = 0.0;
  double lr_total = 0.0;
  double dynamic_part = 0.0;
  double geometric_part = 0.0;
  double dynamic_numeric = 0.0;
  double geometric_numeric = 0.0;
  double berry_exact = std::numeric_limits<double>::quiet_NaN();
  double berry_adiabatic = std::numeric_limits<double>::quiet_NaN();
  std::string branch = "principal";
  std::optional<ArbitrationRecord> arbitration;
};

inline PhaseReport phase_decompose(const Representation& rep, const ModelParams& p, double eps,
                                   std::size_t n, double t) {
  const auto levels = k0_eigenbasis(rep);
  if (n >= levels.size()) throw DomainError("phase_decompose: index out of range");
  const AlgebraKind kind = rep.kind();
  PhaseReport r;
  r.n = n;
  r.lambda_n = levels[n].lambda;
  r.t = t;
  r.lr_total = lr_phase(kind, p, eps, r.lambda_n, t);
  r.dynamic_part = dynamic_phase(kind, p, eps, r.lambda_n, t);
  r.geometric_part = geometric_phase(kind, p, eps, r.lambda_n, t);
  const double split = std::abs(r.dynamic_part + r.geometric_part - r.lr_total);
  if (split > tol::phase_split * std::max(1.0, std::abs(r.lr_total)))
    throw ConsistencyError("phase_decompose: dynamic + geometric differs from the total by " +
                           std::to_string(split));
  r.dynamic_numeric = dynamic_phase_integral(rep, p, eps, n, t);
  r.geometric_numeric = geometric_phase_integral(rep, p, eps, n, t);
  if (p.phase_rate != 0.0) r.berry_exact = berry_phase(kind, p, eps, r.lambda_n);
  try {
    r.berry_adiabatic = adiabatic_berry_phase(kind, p, r.lambda_n);
  } catch (const RegimeError&) {
  }
  return r;
}

// ---- sweeps ----

enum class Regime { unbroken, broken, singular };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::unbroken: return "unbroken";
    case Regime::broken: return "broken";
    case Regime::singular: return "singular";
  }
  return "";
}

struct GridAxis {
  double min = 0.0, max = 0.0;
  std::size_t count = 1;

  double at(std::size_t i) const {
    if (count <= 1) return min;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct SweepGrid {
  GridAxis omega_drive, coupling, phase_rate;
  std::size_t size() const { return omega_drive.count * coupling.count * phase_rate.count; }
};

struct SweepPoint {
  ModelParams params;
  Regime regime = Regime::unbroken;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double sinh_sq_half = std::numeric_limits<double>::quiet_NaN();
  double berry_exact = std::numeric_limits<double>::quiet_NaN();
};

inline SweepPoint sweep_point(AlgebraKind kind, const ModelParams& p, double lambda) {
  SweepPoint s;
  s.params = p;
  try {
    const auto sh = sinh_sq_half(kind, p);
    s.epsilon = sh.epsilon;
    s.sinh_sq_half = sh.value;
    if (p.phase_rate != 0.0) s.berry_exact = berry_phase(kind, p, sh.epsilon, lambda);
  } catch (const RegimeError&) {
    s.regime = Regime::broken;
  } catch (const SingularConditionError&) {
    s.regime = Regime::singular;
  }
  return s;
}

/// Points in lexicographic order (W outermost, then G, then w).
inline std::vector<SweepPoint> sweep(AlgebraKind kind, const SweepGrid& grid, double lambda,
                                     unsigned threads = 1) {
  const std::size_t total = grid.size();
  std::vector<SweepPoint> out(total);
  auto params_at = [&](std::size_t k) {
    const std::size_t iw = k % grid.phase_rate.count;
    const std::size_t ig = (k / grid.phase_rate.count) % grid.coupling.count;
    const std::size_t io = k / (grid.phase_rate.count * grid.coupling.count);
    return ModelParams{grid.omega_drive.at(io), grid.coupling.at(ig), grid.phase_rate.at(iw)};
  };
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < total; k += stride) out[k] = sweep_point(kind, params_at(k), lambda);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (threads == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
  for (auto& th : pool) th.join();
  return out;
}

/// su(2) regime map; boundary points |w + W| = 2|G| are broken.
inline std::vector<SweepPoint> breaking_diagram(const SweepGrid& grid, unsigned threads = 1) {
  return sweep(AlgebraKind::su2(), grid, 0.5, threads);
}

}  // namespace qinv
