#pragma once

// The pseudo-Hermitian invariant I(t) = R(t) K0 R(t)^-1 built from the
// Hermitian, non-unitary transformation
//
//   R(t) = exp[(eps/2)(K+ e^{i w t} + K- e^{-i w t})],
//
// the metric eta = R^-2, and residual checks for every identity the
// construction relies on.
//
// alpha = eps sqrt(D/2) is real for su(2) and i*eps for su(1,1). Everything
// below works with the real combinations of alpha collected in
// AlphaFunctions, so su(1,1) quantities come out in trigonometric form with
// no imaginary round-off.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qinv/algebra.hpp"
#include "qinv/constants.hpp"
#include "qinv/errors.hpp"
#include "qinv/matkit.hpp"
#include "qinv/model.hpp"

namespace qinv {

struct AlphaFunctions {
  cplx alpha;                // eps sqrt(D/2)
  double cosh_alpha;         // cosh(alpha)
  double cosh_sq_half;       // cosh^2(alpha/2)
  double sinh_sq_half;       // sinh^2(alpha/2); <= 0 for su(1,1)
  double sqrt_half_d_sinh;   // sqrt(D/2) sinh(alpha)
  double sinh_over_sqrt_2d;  // sinh(alpha) / sqrt(2D)
};

inline AlphaFunctions alpha_functions(AlgebraKind kind, double eps) {
  if (kind.is_su2()) {
    const double sh = std::sinh(0.5 * eps);
    return {cplx{eps, 0.0},     std::cosh(eps),       1.0 + sh * sh, sh * sh,
            std::sinh(eps), 0.5 * std::sinh(eps)};
  }
  const double s = std::sin(0.5 * eps);
  return {cplx{0.0, eps}, std::cos(eps), 1.0 - s * s, -s * s, -std::sin(eps), 0.5 * std::sin(eps)};
}

/// G cosh(alpha) + ((w + W)/sqrt(2D)) sinh(alpha), in real form.
inline double auxiliary_residual(AlgebraKind kind, const ModelParams& p, double eps) {
  const double sum = p.phase_rate + p.omega_drive;
  if (kind.is_su2()) return p.coupling * std::cosh(eps) + 0.5 * sum * std::sinh(eps);
  return p.coupling * std::cos(eps) + 0.5 * sum * std::sin(eps);
}

/// Principal real solution of the auxiliary condition.
inline double solve_epsilon(AlgebraKind kind, const ModelParams& p) {
  if (!p.finite()) throw DomainError("solve_epsilon: parameters must be finite");
  const double sum = p.phase_rate + p.omega_drive;
  if (p.coupling == 0.0) return 0.0;
  if (sum == 0.0)
    throw SingularConditionError(
        "solve_epsilon: w + W = 0 with G != 0, the auxiliary condition has no regular solution");
  const double ratio = -2.0 * p.coupling / sum;
  if (kind.is_su2()) {
    if (std::abs(ratio) >= 1.0)
      throw RegimeError("solve_epsilon: broken regime, |2G/(w+W)| = " +
                            std::to_string(std::abs(ratio)) + " >= 1 admits no real eps",
                        std::abs(ratio));
    return std::atanh(ratio);
  }
  return std::atan(ratio);
}

namespace detail {

inline CMatrix transformation(const Representation& rep, const ModelParams& p, double eps,
                              double t) {
  const CMatrix exponent =
      (0.5 * eps) * drive_symmetric(rep.kplus(), rep.kminus(), p.phase_rate * t);
  try {
    return mat_exp(exponent);
  } catch (const RangeError& e) {
    throw RangeError(std::string(e.what()) +
                     "; reduce |eps| * fock_dim or raise the exponential bound");
  }
}

inline double tail_mass(const CMatrix& m, std::size_t column) {
  const std::size_t n = m.dim();
  const std::size_t k = std::min<std::size_t>(n, tol::tail_components);
  double s = 0.0;
  for (std::size_t r = n - k; r < n; ++r) s += std::norm(m(r, column));
  return s;
}

}  // namespace detail

inline CMatrix build_R(const Representation& rep, const ModelParams& p, double eps, double t) {
  return detail::transformation(rep, p, eps, t);
}

inline CMatrix build_R_inverse(const Representation& rep, const ModelParams& p, double eps,
                               double t) {
  return detail::transformation(rep, p, -eps, t);
}

/// K0 cosh(alpha) - sinh(alpha)/sqrt(2D) (K+ e^{i phi} - K- e^{-i phi}).
inline CMatrix closed_form_invariant(const Representation& rep, const ModelParams& p, double eps,
                                     double t) {
  const auto a = alpha_functions(rep.kind(), eps);
  return a.cosh_alpha * rep.k0() -
         a.sinh_over_sqrt_2d *
             detail::drive_antisymmetric(rep.kplus(), rep.kminus(), p.phase_rate * t);
}

/// Indices n whose images under every operator in ops keep their top-4 tail
/// mass below the guard. Every index passes for su(2).
inline std::vector<std::size_t> guarded_indices(const Representation& rep,
                                                std::initializer_list<const CMatrix*> ops) {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < rep.dim(); ++n) {
    bool ok = true;
    if (rep.kind().is_su11())
      for (const CMatrix* m : ops) ok = ok && detail::tail_mass(*m, n) < tol::tail_mass_guard;
    if (ok) idx.push_back(n);
  }
  return idx;
}

/// Similarity product R K0 R^-1, cross-checked against the closed form.
inline CMatrix build_invariant(const Representation& rep, const ModelParams& p, double eps,
                               double t) {
  const CMatrix r = build_R(rep, p, eps, t);
  const CMatrix ri = build_R_inverse(rep, p, eps, t);
  CMatrix inv = r * rep.k0() * ri;
  const auto idx = guarded_indices(rep, {&r, &ri});
  const double diff = max_norm_on(inv - closed_form_invariant(rep, p, eps, t), idx);
  if (diff > tol::closed_form_agreement)
    throw ConsistencyError("build_invariant: similarity and closed form disagree by " +
                           std::to_string(diff) + " (truncation too small?)");
  return inv;
}

/// eta = R^-1 R^-1 (= (R^-1)^dag R^-1 since R is Hermitian).
inline CMatrix build_metric(const Representation& rep, const ModelParams& p, double eps,
                            double t) {
  const CMatrix ri = build_R_inverse(rep, p, eps, t);
  return ri * ri;
}

struct InvariantFrame {
  double epsilon = 0.0;
  cplx alpha;
  double t = 0.0;
  CMatrix r_matrix, r_inverse, invariant_i, metric_eta;
  std::string branch = "principal";
  /// Indices guarded for R and R^-1.
  std::vector<std::size_t> interior;
  /// Indices additionally guarded for eta and eta^-1 = R^2.
  std::vector<std::size_t> metric_interior;
};

inline InvariantFrame make_frame(const Representation& rep, const ModelParams& p, double eps,
                                 double t) {
  InvariantFrame f;
  f.epsilon = eps;
  f.alpha = alpha_functions(rep.kind(), eps).alpha;
  f.t = t;
  f.r_matrix = build_R(rep, p, eps, t);
  f.r_inverse = build_R_inverse(rep, p, eps, t);
  f.invariant_i = f.r_matrix * rep.k0() * f.r_inverse;
  f.metric_eta = f.r_inverse * f.r_inverse;
  f.interior = guarded_indices(rep, {&f.r_matrix, &f.r_inverse});
  const CMatrix eta_inv = f.r_matrix * f.r_matrix;
  f.metric_interior = guarded_indices(rep, {&f.r_matrix, &f.r_inverse, &f.metric_eta, &eta_inv});
  return f;
}

inline InvariantFrame make_frame(const Representation& rep, const ModelParams& p, double t) {
  return make_frame(rep, p, solve_epsilon(rep.kind(), p), t);
}

struct PseudoHermiticityReport {
  double pseudo_hermitian = 0.0;  // ||I^dag - eta I eta^-1||
  double dyson = 0.0;             // ||R^-1 I R - K0||
};

inline PseudoHermiticityReport check_pseudo_hermiticity(const Representation& rep,
                                                        const InvariantFrame& f) {
  const CMatrix eta_inv = f.r_matrix * f.r_matrix;
  PseudoHermiticityReport out;
  out.pseudo_hermitian =
      max_norm_on(adjoint(f.invariant_i) - f.metric_eta * f.invariant_i * eta_inv,
                  f.metric_interior);
  out.dyson = max_norm_on(f.r_inverse * f.invariant_i * f.r_matrix - rep.k0(), f.interior);
  return out;
}

struct InvariantEquationReport {
  double h = 0.0;
  double residual = 0.0;
  /// C in residual ~ C h^2, from the probe pair h = 1e-3, 5e-4.
  double constant = 0.0;
  /// log2 of the probe residual ratio; NaN when both are at round-off level.
  double observed_order = 0.0;
  double bound() const { return constant * h * h + tol::invariant_equation_floor; }
};

namespace detail {

inline double invariant_equation_residual(const Representation& rep, const ModelParams& p,
                                          double eps, double t, double h) {
  const InvariantFrame f = make_frame(rep, p, eps, t);
  const CMatrix i_plus = build_R(rep, p, eps, t + h) * rep.k0() * build_R_inverse(rep, p, eps, t + h);
  const CMatrix i_minus = build_R(rep, p, eps, t - h) * rep.k0() * build_R_inverse(rep, p, eps, t - h);
  const CMatrix h_t = build_hamiltonian(rep, p, t);
  const CMatrix res = (kI / (2.0 * h)) * (i_plus - i_minus) + commutator(f.invariant_i, h_t);
  return max_norm_on(res, f.interior);
}

}  // namespace detail

/// ||i (I(t+h) - I(t-h))/(2h) + [I(t), H(t)]||.
inline InvariantEquationReport check_invariant_equation(const Representation& rep,
                                                        const ModelParams& p, double eps, double t,
                                                        double h) {
  if (!(h >= tol::min_fd_step && h <= tol::max_fd_step))
    throw ContractError("check_invariant_equation: h must lie in [1e-7, 1e-3], got " +
                        std::to_string(h));
  InvariantEquationReport out;
  out.h = h;
  out.residual = detail::invariant_equation_residual(rep, p, eps, t, h);
  const double r1 = detail::invariant_equation_residual(rep, p, eps, t, 1e-3);
  const double r2 = detail::invariant_equation_residual(rep, p, eps, t, 5e-4);
  out.constant = r1 / 1e-6;
  out.observed_order = (r1 > 1e-12 && r2 > 1e-12) ? std::log2(r1 / r2)
                                                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

/// dR/dt by a 5-point central stencil.
inline CMatrix transformation_derivative(const Representation& rep, const ModelParams& p,
                                         double eps, double t) {
  const double h = tol::derivative_step;
  return (1.0 / (12.0 * h)) * (build_R(rep, p, eps, t - 2 * h) - 8.0 * build_R(rep, p, eps, t - h) +
                               8.0 * build_R(rep, p, eps, t + h) - build_R(rep, p, eps, t + 2 * h));
}

/// Residuals of the four transformation identities, in order
/// R K+ R^-1, R K- R^-1, R K0 R^-1, i R^-1 dR/dt.
inline std::array<double, 4> similarity_identities_residual(const Representation& rep,
                                                            const ModelParams& p, double eps,
                                                            double t) {
  const auto a = alpha_functions(rep.kind(), eps);
  const InvariantFrame f = make_frame(rep, p, eps, t);
  const double phi = p.phase_rate * t;
  const cplx e1 = std::polar(1.0, phi);
  const cplx e2 = e1 * e1;
  const CMatrix& k0 = rep.k0();
  const CMatrix& kp = rep.kplus();
  const CMatrix& km = rep.kminus();
  const CMatrix drive = detail::drive_antisymmetric(kp, km, phi);

  const CMatrix rhs_plus =
      a.cosh_sq_half * kp - (std::conj(e2) * a.sinh_sq_half) * km - (std::conj(e1) * a.sqrt_half_d_sinh) * k0;
  const CMatrix rhs_minus =
      a.cosh_sq_half * km - (e2 * a.sinh_sq_half) * kp + (e1 * a.sqrt_half_d_sinh) * k0;
  const CMatrix rhs_zero = a.cosh_alpha * k0 - a.sinh_over_sqrt_2d * drive;
  const CMatrix rhs_gauge =
      (-2.0 * p.phase_rate * a.sinh_sq_half) * k0 - (p.phase_rate * a.sinh_over_sqrt_2d) * drive;

  const CMatrix gauge = kI * (f.r_inverse * transformation_derivative(rep, p, eps, t));
  return {max_norm_on(f.r_matrix * kp * f.r_inverse - rhs_plus, f.interior),
          max_norm_on(f.r_matrix * km * f.r_inverse - rhs_minus, f.interior),
          max_norm_on(f.invariant_i - rhs_zero, f.interior),
          max_norm_on(gauge - rhs_gauge, f.interior)};
}

struct FrameState {
  std::size_t index;
  double lambda;
  CVector state;  // R(t)|n>
  double eigen_residual;
};

struct ExcludedState {
  std::size_t index;
  double tail_mass;
};

struct EigenFrame {
  std::vector<FrameState> states;
  /// max |<n(t)|eta|m(t)> - delta_nm| over the returned states.
  double gram_defect = 0.0;
  std::vector<ExcludedState> excluded;
};

/// |n(t)> = R(t)|n> with I(t)|n(t)> = lambda_n |n(t)>, eta-orthonormal.
inline EigenFrame invariant_eigenframe(const Representation& rep, const ModelParams& p, double eps,
                                       double t) {
  const InvariantFrame f = make_frame(rep, p, eps, t);
  const auto levels = k0_eigenbasis(rep);
  EigenFrame out;
  std::vector<bool> inside(rep.dim(), false);
  for (auto i : f.interior) inside[i] = true;
  for (const auto& lv : levels) {
    if (!inside[lv.index]) {
      out.excluded.push_back(
          {lv.index, std::max(detail::tail_mass(f.r_matrix, lv.index),
                              detail::tail_mass(f.r_inverse, lv.index))});
      continue;
    }
    CVector v = f.r_matrix.column(lv.index);
    CVector iv = f.invariant_i * v;
    for (std::size_t k = 0; k < v.size(); ++k) iv[k] -= lv.lambda * v[k];
    const double res = norm2(iv);
    if (res > tol::eigen_residual_rel * norm2(v))
      throw ConsistencyError("invariant_eigenframe: eigen-residual " + std::to_string(res) +
                             " for n = " + std::to_string(lv.index));
    out.states.push_back({lv.index, lv.lambda, std::move(v), res});
  }
  for (const auto& a : out.states) {
    const CVector eta_a = f.metric_eta * a.state;
    for (const auto& b : out.states) {
      const cplx g = dot(eta_a, b.state);
      const double target = a.index == b.index ? 1.0 : 0.0;
      out.gram_defect = std::max(out.gram_defect, std::abs(g - target));
    }
  }
  if (out.gram_defect > tol::gram_identity)
    throw ConsistencyError("invariant_eigenframe: eta-Gram matrix deviates from identity by " +
                           std::to_string(out.gram_defect));
  return out;
}

}  // namespace qinv
