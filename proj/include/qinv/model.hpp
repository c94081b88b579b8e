#pragma once

// The driven Hamiltonian
//
//   H(t) = W K0 + G (K+ e^{i w t} - K- e^{-i w t})
//
// its adjoint, and the PT checks.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qinv/algebra.hpp"
#include "qinv/constants.hpp"
#include "qinv/matkit.hpp"

namespace qinv {

struct ModelParams {
  double omega_drive = 1.0;  // W
  double coupling = 0.25;    // G
  double phase_rate = 0.5;   // w, phi(t) = w t

  /// 2 pi / |w|; infinite when w = 0.
  double period() const {
    return phase_rate == 0.0 ? std::numeric_limits<double>::infinity()
                             : 2.0 * std::numbers::pi / std::abs(phase_rate);
  }

  bool finite() const {
    return std::isfinite(omega_drive) && std::isfinite(coupling) && std::isfinite(phase_rate);
  }
};

/// The reference parameters used throughout the tests and the example config.
inline constexpr ModelParams kReferenceParams{1.0, 0.25, 0.5};

namespace detail {

inline void require_finite(const ModelParams& p) {
  if (!p.finite()) throw DomainError("model parameters must be finite");
}

// K+ e^{i phi} - K- e^{-i phi}
inline CMatrix drive_antisymmetric(const CMatrix& kp, const CMatrix& km, double phi) {
  const cplx e = std::polar(1.0, phi);
  return kp * e - km * std::conj(e);
}

// K+ e^{i phi} + K- e^{-i phi}
inline CMatrix drive_symmetric(const CMatrix& kp, const CMatrix& km, double phi) {
  const cplx e = std::polar(1.0, phi);
  return kp * e + km * std::conj(e);
}

// X(t)_{jk} = X(0)_{jk} e^{i theta (k_j - k_k)}: the action of exp(i theta K0)
// on any operator built from the generators with phase phi = w t.
inline CMatrix conjugate_by_phase(const CMatrix& x0, std::span<const double> k0, double theta) {
  CMatrix x = x0;
  for (std::size_t j = 0; j < x.dim(); ++j)
    for (std::size_t k = 0; k < x.dim(); ++k) x(j, k) *= std::polar(1.0, theta * (k0[j] - k0[k]));
  return x;
}

}  // namespace detail

inline CMatrix hamiltonian_from(const CMatrix& k0, const CMatrix& kp, const CMatrix& km,
                                const ModelParams& p, double t) {
  return p.omega_drive * k0 + p.coupling * detail::drive_antisymmetric(kp, km, p.phase_rate * t);
}

inline CMatrix build_hamiltonian(const Representation& rep, const ModelParams& p, double t) {
  detail::require_finite(p);
  return hamiltonian_from(rep.k0(), rep.kplus(), rep.kminus(), p, t);
}

inline CMatrix build_adjoint_hamiltonian(const Representation& rep, const ModelParams& p,
                                         double t) {
  detail::require_finite(p);
  return p.omega_drive * rep.k0() -
         p.coupling * detail::drive_antisymmetric(rep.kplus(), rep.kminus(), p.phase_rate * t);
}

/// Coordinates of m in span{1, K0, K+, K-} (least squares) and the fit residual.
struct GeneratorExpansion {
  cplx identity, k0, kplus, kminus;
  double residual = 0.0;
};

inline GeneratorExpansion generator_expansion(const Representation& rep, const CMatrix& m) {
  if (m.dim() != rep.dim()) throw SizingError("generator_expansion: dimension mismatch");
  const std::size_t n = rep.dim();
  // K+ and K- have disjoint supports off the diagonal, so they decouple from
  // the diagonal pair {1, K0}, which is a 2x2 normal-equation solve.
  auto frob = [](const CMatrix& a, const CMatrix& b) {
    cplx s{};
    for (std::size_t k = 0; k < a.data().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
    return s;
  };
  GeneratorExpansion g;
  g.kplus = frob(rep.kplus(), m) / frob(rep.kplus(), rep.kplus());
  g.kminus = frob(rep.kminus(), m) / frob(rep.kminus(), rep.kminus());

  const CMatrix id = CMatrix::identity(n);
  const cplx g11 = static_cast<double>(n), g12 = frob(id, rep.k0()),
             g22 = frob(rep.k0(), rep.k0());
  const cplx b1 = frob(id, m), b2 = frob(rep.k0(), m);
  const cplx det = g11 * g22 - g12 * std::conj(g12);
  g.identity = (g22 * b1 - g12 * b2) / det;
  g.k0 = (g11 * b2 - std::conj(g12) * b1) / det;

  const CMatrix fit =
      g.identity * id + g.k0 * rep.k0() + g.kplus * rep.kplus() + g.kminus * rep.kminus();
  g.residual = max_norm(m - fit);
  return g;
}

/// Algebraic PT action: K0 -> -K0, K+ -> -K-, K- -> -K+, i -> -i.
/// Defined on the linear span of {1, K0, K+, K-}.
inline CMatrix pt_map(const Representation& rep, const CMatrix& m) {
  const auto g = generator_expansion(rep, m);
  const double scale = std::max(1.0, max_norm(m));
  if (g.residual > tol::generator_fit * scale)
    throw ShapeError("pt_map: input is not linear in the generators (fit residual " +
                     std::to_string(g.residual) + ")");
  return std::conj(g.identity) * CMatrix::identity(rep.dim()) - std::conj(g.k0) * rep.k0() -
         std::conj(g.kplus) * rep.kminus() - std::conj(g.kminus) * rep.kplus();
}

/// Boson parity (-1)^n composed with complex conjugation in the Fock basis.
inline CMatrix parity_conjugate(const Representation& rep, const CMatrix& m) {
  if (!rep.kind().is_su11()) throw DomainError("parity_conjugate: needs the su(1,1) boson realization");
  if (m.dim() != rep.dim()) throw SizingError("parity_conjugate: dimension mismatch");
  CMatrix r(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      r(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0) * std::conj(m(i, j));
  return r;
}

struct PtReport {
  std::string map;  // "parity-conjugation" or "generator-substitution"
  std::vector<double> times;
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool symmetric = false;
};

/// su(1,1): ||P conj(H(t)) P - H(-t)||, time reversal sending t to -t.
/// su(2): ||pt_map(H(t)) - H(t)|| with the algebraic substitution rule.
inline PtReport check_pt_symmetry(const Representation& rep, const ModelParams& p,
                                  std::span<const double> times) {
  PtReport out;
  out.map = rep.kind().is_su11() ? "parity-conjugation" : "generator-substitution";
  for (double t : times) {
    const CMatrix h = build_hamiltonian(rep, p, t);
    double r = 0.0;
    if (rep.kind().is_su11())
      r = max_norm(parity_conjugate(rep, h) - build_hamiltonian(rep, p, -t));
    else
      r = max_norm(pt_map(rep, h) - h);
    out.times.push_back(t);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  out.symmetric = out.max_residual <= tol::pt_verdict;
  return out;
}

}  // namespace qinv
