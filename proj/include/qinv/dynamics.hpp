#pragma once

// Direct integration of i d|psi>/dt = H(t)|psi>, the analytic solution
// e^{i alpha_n(t)} R(t)|n>, and phase extraction along a trajectory.
//
// Every operator built from the generators with phase phi = w t obeys
//   X(t) = U(t) X(0) U(t)^dag,   U(t) = exp(i w t K0),
// and K0 is diagonal, so H(t), R(t), eta(t) and I(t) are all obtained from
// their t = 0 values by a diagonal phase conjugation.
//
// su(1,1) is propagated in the faithful 2x2 carrier (K0 = sigma_z/2,
// K+ = sigma_+, K- = -sigma_-) and mapped to the Fock space through the Gauss
// factorization U = exp(a K+) exp(b K0) exp(c K-). The truncated Fock matrix
// H has complex eigenvalues that grow with the truncation, so integrating it
// directly is unstable; the carrier route only meets the truncation when
// the nilpotent exponentials act on the initial state.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qinv/algebra.hpp"
#include "qinv/constants.hpp"
#include "qinv/errors.hpp"
#include "qinv/invariant.hpp"
#include "qinv/matkit.hpp"
#include "qinv/model.hpp"
#include "qinv/phases.hpp"

namespace qinv {

enum class Method { rk4, magnus2 };
enum class Carrier { automatic, direct };

inline std::string method_name(Method m) { return m == Method::rk4 ? "rk4" : "magnus2"; }

struct PropagationOptions {
  Method method = Method::magnus2;
  /// Maximum step; 0 selects reference_step.
  double step = 0.0;
  Carrier carrier = Carrier::automatic;
  /// Invariant eigenstate the trajectory started in; enables eigen-residuals
  /// and phase extraction.
  std::optional<std::size_t> track_index;
  bool check_accuracy = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<double> eta_norms;
  std::vector<double> invariant_eigen_residuals;
  std::vector<double> extracted_phase;
  double max_leakage = 0.0;
  double step = 0.0;
  Method method = Method::magnus2;
};

namespace detail {

// H(t) = U(t) H0 U(t)^dag with U diagonal.
class LinearDrive {
 public:
  LinearDrive(std::vector<double> k0, CMatrix h0, double w)
      : k0_(std::move(k0)), h0_(std::move(h0)), w_(w) {}

  std::size_t dim() const { return k0_.size(); }
  const CMatrix& h0() const { return h0_; }

  CVector apply(double t, std::span<const cplx> v) const {
    CVector tmp(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) tmp[j] = std::polar(1.0, -w_ * t * k0_[j]) * v[j];
    CVector y = h0_ * std::span<const cplx>(tmp);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] *= std::polar(1.0, w_ * t * k0_[j]);
    return y;
  }

  void rk4(CVector& v, double t, double h) const {
    const std::size_t n = v.size();
    auto f = [&](double s, const CVector& x) {
      CVector y = apply(s, x);
      for (auto& e : y) e *= -kI;
      return y;
    };
    auto axpy = [n](const CVector& x, cplx a, const CVector& d) {
      CVector r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = x[i] + a * d[i];
      return r;
    };
    const CVector k1 = f(t, v);
    const CVector k2 = f(t + h / 2, axpy(v, h / 2, k1));
    const CVector k3 = f(t + h / 2, axpy(v, h / 2, k2));
    const CVector k4 = f(t + h, axpy(v, h, k3));
    for (std::size_t i = 0; i < n; ++i) v[i] += (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  // exp(-i h H(t + h/2)) = U(tm) exp(-i h H0) U(tm)^dag
  void magnus2(CVector& v, double t, double h, const CMatrix& e) const {
    const double tm = t + h / 2;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= std::polar(1.0, -w_ * tm * k0_[j]);
    v = e * std::span<const cplx>(v);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= std::polar(1.0, w_ * tm * k0_[j]);
  }

  const CMatrix& step_exponential(double h) const {
    for (const auto& [key, m] : cache_)
      if (key == h) return m;
    if (cache_.size() > 8) cache_.clear();
    cache_.emplace_back(h, mat_exp((-kI * h) * h0_));
    return cache_.back().second;
  }

 private:
  std::vector<double> k0_;
  CMatrix h0_;
  double w_;
  mutable std::vector<std::pair<double, CMatrix>> cache_;
};

inline void require_finite_state(std::span<const cplx> v, double t) {
  if (!all_finite(v))
    throw DivergenceError("propagate: non-finite state at t = " + std::to_string(t));
}

// Advances a set of vectors from t0 to t1 in equal steps no larger than
// max_step, with an optional step-halving check on the first step.
inline void advance(const LinearDrive& drive, Method method, std::vector<CVector>& vs, double t0,
                    double t1, double max_step, bool check) {
  const double span = t1 - t0;
  if (span <= 0.0) return;
  const auto m = static_cast<std::size_t>(std::ceil(span / max_step - 1e-9));
  const double h = span / static_cast<double>(std::max<std::size_t>(m, 1));
  auto one = [&](CVector& v, double t, double dt) {
    if (method == Method::rk4)
      drive.rk4(v, t, dt);
    else
      drive.magnus2(v, t, dt, drive.step_exponential(dt));
  };
  if (check) {
    for (const auto& v : vs) {
      CVector full = v, half = v;
      one(full, t0, h);
      one(half, t0, h / 2);
      one(half, t0 + h / 2, h / 2);
      double diff = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(full[i] - half[i]));
      const double scale = std::max(1.0, max_norm(std::span<const cplx>(v)));
      if (!(diff <= tol::local_step_error * scale))
        throw AccuracyError("propagate: local error estimate " + std::to_string(diff / scale) +
                            " exceeds 1e-6 at step " + std::to_string(h) + "; reduce the step");
    }
  }
  for (std::size_t s = 0; s < std::max<std::size_t>(m, 1); ++s) {
    const double t = t0 + span * static_cast<double>(s) / static_cast<double>(std::max<std::size_t>(m, 1));
    for (auto& v : vs) one(v, t, h);
  }
  for (const auto& v : vs) require_finite_state(v, t1);
}

inline LinearDrive spinor_drive(const ModelParams& p) {
  const auto g = su11_spinor_generators();
  std::vector<double> k0{0.5, -0.5};
  return LinearDrive(std::move(k0), hamiltonian_from(g.k0, g.kplus, g.kminus, p, 0.0), p.phase_rate);
}

inline LinearDrive fock_drive(const Representation& rep, const ModelParams& p) {
  return LinearDrive(rep.k0_diagonal(), build_hamiltonian(rep, p, 0.0), p.phase_rate);
}

inline bool uses_carrier(const Representation& rep, Carrier c) {
  return rep.kind().is_su11() && c == Carrier::automatic;
}

// exp(z X) v for nilpotent X, summed until the series terminates.
inline CVector nilpotent_exp(const CMatrix& x, cplx z, std::span<const cplx> v) {
  CVector out(v.begin(), v.end());
  CVector term(v.begin(), v.end());
  for (std::size_t k = 1; k <= x.dim(); ++k) {
    term = x * std::span<const cplx>(term);
    const cplx f = z / static_cast<double>(k);
    bool zero = true;
    for (auto& e : term) {
      e *= f;
      if (e != cplx{}) zero = false;
    }
    if (zero) break;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += term[i];
  }
  return out;
}

// Fock image of the 2x2 group element with columns (u11, u21), (u12, u22).
inline CVector carrier_to_fock(const Representation& rep, cplx u12, cplx u21, cplx u22, cplx r,
                               std::span<const cplx> psi0, double t) {
  const cplx a = u12 / u22;
  const cplx c = -u21 / u22;
  if (!(std::abs(a) < 1.0) || !std::isfinite(std::abs(c)))
    throw DivergenceError("propagate: Gauss factor |a| = " + std::to_string(std::abs(a)) +
                          " at t = " + std::to_string(t) + "; the boson image is not normalizable");
  CVector v = nilpotent_exp(rep.kminus(), c, psi0);
  const cplx r2 = r * r;
  cplx d = r;
  for (std::size_t n = 0; n < v.size(); ++n) {
    v[n] *= d;
    d *= r2;
  }
  return nilpotent_exp(rep.kplus(), a, v);
}

}  // namespace detail

/// 2 pi / (4096 nu) with nu = ||H(0)||_1 + |w| of the propagated carrier.
inline double reference_step(const Representation& rep, const ModelParams& p,
                             Carrier carrier = Carrier::automatic) {
  const CMatrix h0 = detail::uses_carrier(rep, carrier) ? detail::spinor_drive(p).h0()
                                                         : build_hamiltonian(rep, p, 0.0);
  const double nu = norm1(h0) + std::abs(p.phase_rate);
  if (nu == 0.0) return 1.0;
  return 2.0 * std::numbers::pi / (tol::steps_per_unit_rate * nu);
}

/// R(0)|n>, the invariant eigenstate used as initial condition.
inline CVector frame_initial_state(const Representation& rep, const ModelParams& p, double eps,
                                   std::size_t n, double t = 0.0) {
  if (n >= rep.dim()) throw DomainError("frame_initial_state: index out of range");
  return build_R(rep, p, eps, t).column(n);
}

/// <psi| eta(t) |psi>.
inline double eta_norm_with(const CMatrix& eta, std::span<const cplx> psi) {
  const CVector e = eta * psi;
  const cplx v = dot(psi, e);
  if (std::abs(v.imag()) > tol::metric_imag_rel * std::max(1.0, std::abs(v.real())))
    throw MetricError("eta_norm: <psi|eta|psi> has imaginary part " + std::to_string(v.imag()));
  return v.real();
}

inline double eta_norm(const Representation& rep, const ModelParams& p, double eps, double t,
                       std::span<const cplx> psi) {
  if (psi.size() != rep.dim()) throw SizingError("eta_norm: state dimension mismatch");
  return eta_norm_with(build_metric(rep, p, eps, t), psi);
}

struct AnalyticState {
  CVector state;
  double total_phase;
};

/// e^{i alpha_n(t)} R(t)|n>.
inline AnalyticState analytic_state(const Representation& rep, const ModelParams& p, double eps,
                                    std::size_t n, double t) {
  const auto levels = k0_eigenbasis(rep);
  if (n >= levels.size()) throw DomainError("analytic_state: index out of range");
  AnalyticState out;
  out.total_phase = lr_phase(rep.kind(), p, eps, levels[n].lambda, t);
  out.state = build_R(rep, p, eps, t).column(n);
  const cplx ph = std::polar(1.0, out.total_phase);
  for (auto& e : out.state) e *= ph;
  return out;
}

struct ExtractedPhase {
  std::vector<double> phase;
  double max_leakage = 0.0;
};

/// Unwrapped arg c_n(t), c_n(t) = <n| R(t)^-1 |psi(t)>.
inline ExtractedPhase extract_phase(std::span<const double> times, std::span<const CVector> states,
                                    const Representation& rep, const ModelParams& p, double eps,
                                    std::size_t n) {
  if (n >= rep.dim()) throw DomainError("extract_phase: index out of range");
  if (times.size() != states.size()) throw SizingError("extract_phase: length mismatch");
  const CMatrix ri0 = build_R_inverse(rep, p, eps, 0.0);
  const auto k0 = rep.k0_diagonal();
  ExtractedPhase out;
  double prev = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const double theta = p.phase_rate * times[s];
    cplx c{};
    for (std::size_t k = 0; k < rep.dim(); ++k)
      c += std::polar(1.0, theta * (k0[n] - k0[k])) * ri0(n, k) * states[s][k];
    const double leak = std::abs(1.0 - std::abs(c));
    out.max_leakage = std::max(out.max_leakage, leak);
    if (!(leak <= tol::leakage_fail))
      throw FrameLeakageError("extract_phase: |c_n| = " + std::to_string(std::abs(c)) +
                              " at t = " + std::to_string(times[s]) +
                              "; the state left the invariant eigenstate");
    const double a = std::arg(c);
    const double v = s == 0 ? a : prev + std::remainder(a - prev, 2.0 * std::numbers::pi);
    out.phase.push_back(v);
    prev = v;
  }
  return out;
}

inline ExtractedPhase extract_phase(const Trajectory& traj, const Representation& rep,
                                    const ModelParams& p, double eps, std::size_t n) {
  return extract_phase(traj.times, traj.states, rep, p, eps, n);
}

/// Samples psi(t) on t_grid starting from psi0 at t_grid[0].
inline Trajectory propagate(const Representation& rep, const ModelParams& p,
                            std::span<const cplx> psi0, std::span<const double> t_grid,
                            const PropagationOptions& opt = {}) {
  detail::require_finite(p);
  if (psi0.size() != rep.dim()) throw SizingError("propagate: initial state dimension mismatch");
  if (norm2(psi0) == 0.0) throw ContractError("propagate: initial state must be nonzero");
  if (t_grid.empty()) throw ContractError("propagate: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw ContractError("propagate: times must increase strictly");
  const double step = opt.step == 0.0 ? reference_step(rep, p, opt.carrier) : opt.step;
  if (!(step > 0.0)) throw ContractError("propagate: step must be positive");

  const double eps = solve_epsilon(rep.kind(), p);
  const auto k0 = rep.k0_diagonal();
  const CMatrix r0 = build_R(rep, p, eps, 0.0);
  const CMatrix ri0 = build_R_inverse(rep, p, eps, 0.0);
  const CMatrix eta0 = ri0 * ri0;
  const CMatrix inv0 = r0 * rep.k0() * ri0;
  std::optional<double> lambda;
  if (opt.track_index) {
    if (*opt.track_index >= rep.dim()) throw DomainError("propagate: track_index out of range");
    lambda = k0_eigenbasis(rep)[*opt.track_index].lambda;
  }

  Trajectory tr;
  tr.step = step;
  tr.method = opt.method;
  auto record = [&](double t, CVector psi) {
    const double theta = p.phase_rate * t;
    tr.eta_norms.push_back(eta_norm_with(detail::conjugate_by_phase(eta0, k0, theta), psi));
    if (lambda) {
      CVector r = detail::conjugate_by_phase(inv0, k0, theta) * std::span<const cplx>(psi);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= *lambda * psi[i];
      tr.invariant_eigen_residuals.push_back(norm2(r) / norm2(psi));
    }
    tr.times.push_back(t);
    tr.states.push_back(std::move(psi));
  };

  if (detail::uses_carrier(rep, opt.carrier)) {
    const auto drive = detail::spinor_drive(p);
    std::vector<CVector> cols{{1.0, 0.0}, {0.0, 1.0}};
    // The carrier starts at the identity at t_grid[0].
    const double t_start = t_grid[0];
    cplx r = 1.0;
    auto track_root = [&]() {
      const cplx cand = std::sqrt(1.0 / cols[1][1]);
      r = std::abs(cand - r) <= std::abs(cand + r) ? cand : -cand;
    };
    record(t_start, CVector(psi0.begin(), psi0.end()));
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
      const double span = t_grid[k] - t_grid[k - 1];
      const auto m = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
      const std::size_t substeps = std::max<std::size_t>(m, 1);
      for (std::size_t s = 0; s < substeps; ++s) {
        const double a = t_grid[k - 1] + span * static_cast<double>(s) / substeps;
        const double b = t_grid[k - 1] + span * static_cast<double>(s + 1) / substeps;
        detail::advance(drive, opt.method, cols, a, b, step, opt.check_accuracy && s == 0);
        track_root();
      }
      record(t_grid[k], detail::carrier_to_fock(rep, cols[1][0], cols[0][1], cols[1][1], r, psi0,
                                                t_grid[k]));
      detail::require_finite_state(tr.states.back(), t_grid[k]);
    }
  } else {
    const auto drive = detail::fock_drive(rep, p);
    std::vector<CVector> v{CVector(psi0.begin(), psi0.end())};
    record(t_grid[0], v[0]);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
      detail::advance(drive, opt.method, v, t_grid[k - 1], t_grid[k], step, opt.check_accuracy);
      record(t_grid[k], v[0]);
    }
  }

  if (opt.track_index) {
    auto ex = extract_phase(tr, rep, p, eps, *opt.track_index);
    tr.extracted_phase = std::move(ex.phase);
    tr.max_leakage = ex.max_leakage;
  }
  return tr;
}

/// count + 1 equally spaced samples on [0, t_final].
inline std::vector<double> uniform_grid(double t_final, std::size_t count) {
  if (!(t_final > 0.0) || count == 0) throw ContractError("uniform_grid: need t_final > 0, count > 0");
  std::vector<double> t(count + 1);
  for (std::size_t k = 0; k <= count; ++k) t[k] = t_final * static_cast<double>(k) / count;
  return t;
}

}  // namespace qinv
