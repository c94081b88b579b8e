#pragma once

// Matrix realizations of the su(2) and su(1,1) generators K0, K+, K-.
//
//   [K0, K+-] = +-K+-,   [K+, K-] = D K0,   D = +2 (su(2)), -2 (su(1,1)).
//
// su(2) uses the spin-j matrices ordered m = j, j-1, ..., -j (index 0 is the
// top state). su(1,1) uses the single-mode boson quadratics
// K0 = (a^dag a + 1/2)/2, K+ = (a^dag)^2/2, K- = a^2/2 on a truncated Fock
// space; relations then hold only away from the two highest Fock states.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qinv/constants.hpp"
#include "qinv/errors.hpp"
#include "qinv/matkit.hpp"

namespace qinv {

enum class AlgebraTag { su2, su11 };

class AlgebraKind {
 public:
  static constexpr AlgebraKind su2() { return AlgebraKind(AlgebraTag::su2); }
  static constexpr AlgebraKind su11() { return AlgebraKind(AlgebraTag::su11); }

  constexpr AlgebraTag tag() const noexcept { return tag_; }
  /// The structure constant D in [K+, K-] = D K0.
  constexpr int d_constant() const noexcept { return tag_ == AlgebraTag::su2 ? 2 : -2; }
  constexpr bool is_su2() const noexcept { return tag_ == AlgebraTag::su2; }
  constexpr bool is_su11() const noexcept { return tag_ == AlgebraTag::su11; }

  std::string name() const { return is_su2() ? "su2" : "su11"; }

  friend constexpr bool operator==(AlgebraKind, AlgebraKind) = default;

 private:
  constexpr explicit AlgebraKind(AlgebraTag t) : tag_(t) {}
  AlgebraTag tag_;
};

inline constexpr int kMinFockDim = 6;

class Representation {
 public:
  AlgebraKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return k0_.dim(); }
  /// Spin quantum number (su(2) only).
  std::optional<double> j() const noexcept { return j_; }
  /// Number of Fock states kept (su(1,1) only).
  std::optional<std::size_t> fock_dim() const noexcept { return fock_dim_; }

  const CMatrix& k0() const noexcept { return k0_; }
  const CMatrix& kplus() const noexcept { return kplus_; }
  const CMatrix& kminus() const noexcept { return kminus_; }

  /// Diagonal of K0 (every representation built here has diagonal K0).
  std::vector<double> k0_diagonal() const {
    std::vector<double> d(dim());
    for (std::size_t i = 0; i < dim(); ++i) d[i] = k0_(i, i).real();
    return d;
  }

  /// Indices on which the commutation relations hold exactly: everything
  /// for su(2), n <= fock_dim - 3 for su(1,1).
  std::vector<std::size_t> algebraic_interior() const {
    const std::size_t top = kind_.is_su2() ? dim() : dim() - 2;
    std::vector<std::size_t> idx(top);
    for (std::size_t i = 0; i < top; ++i) idx[i] = i;
    return idx;
  }

  friend Representation su2_generators(double j);
  friend Representation su11_boson_generators(std::size_t fock_dim);

 private:
  Representation(AlgebraKind kind, CMatrix k0, CMatrix kplus)
      : kind_(kind), k0_(std::move(k0)), kplus_(std::move(kplus)), kminus_(adjoint(kplus_)) {}

  AlgebraKind kind_;
  std::optional<double> j_;
  std::optional<std::size_t> fock_dim_;
  CMatrix k0_, kplus_, kminus_;
};

/// Spin-j generators; 2j must be a positive integer.
inline Representation su2_generators(double j) {
  const double twice = 2.0 * j;
  if (!std::isfinite(j) || twice < 1.0 || std::abs(twice - std::round(twice)) > 1e-12)
    throw DomainError("su2_generators: j must be a positive half-integer, got " +
                      std::to_string(j));
  const auto n = static_cast<std::size_t>(std::llround(twice)) + 1;
  const double jj = 0.5 * std::round(twice);
  CMatrix k0(n), kp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = jj - static_cast<double>(k);
    k0(k, k) = m;
    // K+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
    if (k > 0) kp(k - 1, k) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
  }
  Representation rep(AlgebraKind::su2(), std::move(k0), std::move(kp));
  rep.j_ = jj;
  return rep;
}

/// Boson quadratics on the Fock states |0> ... |fock_dim - 1>.
inline Representation su11_boson_generators(std::size_t fock_dim) {
  if (fock_dim < static_cast<std::size_t>(kMinFockDim))
    throw DomainError("su11_boson_generators: fock_dim must be >= " +
                      std::to_string(kMinFockDim) + ", got " + std::to_string(fock_dim));
  CMatrix k0(fock_dim), kp(fock_dim);
  for (std::size_t n = 0; n < fock_dim; ++n) {
    const double x = static_cast<double>(n);
    k0(n, n) = 0.5 * (x + 0.5);
    if (n + 2 < fock_dim) kp(n + 2, n) = 0.5 * std::sqrt((x + 1.0) * (x + 2.0));
  }
  Representation rep(AlgebraKind::su11(), std::move(k0), std::move(kp));
  rep.fock_dim_ = fock_dim;
  return rep;
}

/// Generators of the faithful two-dimensional (non-unitary) su(1,1)
/// representation K0 = sigma_z/2, K+ = sigma_+, K- = -sigma_-. Here K- is not
/// the adjoint of K+, so this is not a Representation; it carries group
/// elements exactly, which the Fock realization cannot do under truncation.
struct GeneratorTriple {
  CMatrix k0, kplus, kminus;
};

inline GeneratorTriple su11_spinor_generators() {
  return {CMatrix{{0.5, 0.0}, {0.0, -0.5}}, CMatrix{{0.0, 1.0}, {0.0, 0.0}},
          CMatrix{{0.0, 0.0}, {-1.0, 0.0}}};
}

struct CommutationReport {
  double k0_kplus = 0.0;      // ||[K0,K+] - K+||
  double k0_kminus = 0.0;     // ||[K0,K-] + K-||
  double kplus_kminus = 0.0;  // ||[K+,K-] - D K0||
  /// Full-space [K+,K-] - D K0 residual (differs from kplus_kminus for su(1,1)).
  double kplus_kminus_full = 0.0;
  /// Rows where the full-space residual exceeds the tolerance.
  std::vector<std::size_t> boundary_rows;
  bool pass = false;

  double max_residual() const { return std::max({k0_kplus, k0_kminus, kplus_kminus}); }
};

inline CommutationReport check_commutation(const Representation& rep) {
  const auto idx = rep.algebraic_interior();
  const double d = rep.kind().d_constant();
  const CMatrix r_plus = commutator(rep.k0(), rep.kplus()) - rep.kplus();
  const CMatrix r_minus = commutator(rep.k0(), rep.kminus()) + rep.kminus();
  const CMatrix r_pm = commutator(rep.kplus(), rep.kminus()) - d * rep.k0();

  CommutationReport out;
  out.k0_kplus = max_norm_on(r_plus, idx);
  out.k0_kminus = max_norm_on(r_minus, idx);
  out.kplus_kminus = max_norm_on(r_pm, idx);
  out.kplus_kminus_full = max_norm(r_pm);
  for (std::size_t i = 0; i < rep.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rep.dim(); ++j) row = std::max(row, std::abs(r_pm(i, j)));
    if (row > tol::commutation) out.boundary_rows.push_back(i);
  }
  out.pass = out.max_residual() <= tol::commutation;
  return out;
}

struct K0Level {
  double lambda;
  std::size_t index;
};

/// K0 eigenvalues in basis order; the eigenvectors are coordinate vectors.
inline std::vector<K0Level> k0_eigenbasis(const Representation& rep) {
  std::vector<K0Level> out;
  out.reserve(rep.dim());
  for (std::size_t i = 0; i < rep.dim(); ++i) {
    double lambda = 0.0;
    if (rep.kind().is_su11())
      lambda = 0.5 * (static_cast<double>(i) + 0.5);
    else
      lambda = *rep.j() - static_cast<double>(i);
    out.push_back({lambda, i});
  }
  return out;
}

inline CVector basis_vector(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DomainError("basis index " + std::to_string(index) + " out of range");
  CVector v(dim);
  v[index] = 1.0;
  return v;
}

}  // namespace qinv
