#pragma once

// Dense complex linear algebra for the small square operators used by the
// invariant construction: products, adjoints, commutators, a Jacobi
// Hermitian eigensolver, LU solves and the matrix exponential.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qinv/constants.hpp"
#include "qinv/errors.hpp"

namespace qinv {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;

  explicit CMatrix(std::size_t n) : n_(n), data_(n * n, cplx{}) {}

  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& r : rows) {
      if (r.size() != n_) throw SizingError("CMatrix: rows must form a square matrix");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const cplx> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static CMatrix diagonal(std::span<const double> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  CVector column(std::size_t j) const {
    CVector c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  CMatrix& operator+=(const CMatrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(double s, CMatrix a) { return a *= cplx{s}; }
  friend CMatrix operator*(CMatrix a, double s) { return a *= cplx{s}; }
  friend CMatrix operator-(CMatrix a) { return a *= cplx{-1.0}; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    a.require_same(b);
    const std::size_t n = a.n_;
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        const cplx* brow = &b.data_[k * n];
        cplx* crow = &c.data_[i * n];
        for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
      }
    }
    return c;
  }

  friend CVector operator*(const CMatrix& a, std::span<const cplx> v) {
    if (v.size() != a.n_) throw SizingError("CMatrix * vector: dimension mismatch");
    CVector r(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i) {
      cplx s{};
      const cplx* row = &a.data_[i * a.n_];
      for (std::size_t j = 0; j < a.n_; ++j) s += row[j] * v[j];
      r[i] = s;
    }
    return r;
  }

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  void require_same(const CMatrix& o) const {
    if (o.n_ != n_)
      throw SizingError("CMatrix: dimension mismatch (" + std::to_string(n_) + " vs " +
                        std::to_string(o.n_) + ")");
  }

  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

inline CMatrix adjoint(const CMatrix& a) {
  CMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(j, i) = std::conj(a(i, j));
  return r;
}

inline CMatrix conjugate(const CMatrix& a) {
  CMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = std::conj(a(i, j));
  return r;
}

/// [a, b] = ab - ba
inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw SizingError("commutator: dimension mismatch");
  return a * b - b * a;
}

inline cplx trace(const CMatrix& a) {
  cplx s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += a(i, i);
  return s;
}

inline double max_norm(const CMatrix& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Max absolute column sum.
inline double norm1(const CMatrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw SizingError("dot: dimension mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

inline bool all_finite(const CMatrix& a) { return all_finite(a.data()); }

/// Max-norm of m restricted to the rows and columns listed in idx.
inline double max_norm_on(const CMatrix& m, std::span<const std::size_t> idx) {
  double r = 0.0;
  for (auto i : idx)
    for (auto j : idx) r = std::max(r, std::abs(m(i, j)));
  return r;
}

inline double hermiticity_defect(const CMatrix& a) { return max_norm(a - adjoint(a)); }

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
inline HermEig herm_eig(const CMatrix& h) {
  const std::size_t n = h.dim();
  const double scale = max_norm(h);
  if (hermiticity_defect(h) > tol::hermitian_input_rel * std::max(scale, 1e-300) &&
      hermiticity_defect(h) > 0.0)
    throw ContractError("herm_eig: input is not Hermitian (defect " +
                        std::to_string(hermiticity_defect(h)) + ")");

  CMatrix a = h;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  CMatrix v = CMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  const double target = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300) * 1e-2;
  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Phase-reduce to a real symmetric 2x2 block, then rotate.
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermEig out{std::vector<double>(n), CMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

struct LU {
  CMatrix lu;
  std::vector<std::size_t> perm;
};

inline LU lu_factor(const CMatrix& a) {
  const std::size_t n = a.dim();
  LU f{a, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const double floor = tol::singular_pivot_rel * max_norm(a);
  CMatrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    const double mag = std::abs(m(piv, k));
    if (mag <= floor || mag == 0.0)
      throw SingularError("solve: matrix singular to working precision (pivot " +
                              std::to_string(mag) + " at column " + std::to_string(k) + ")",
                          mag);
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx l = m(i, k) / m(k, k);
      m(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

inline CMatrix lu_solve(const LU& f, const CMatrix& b) {
  const std::size_t n = f.lu.dim();
  if (b.dim() != n) throw SizingError("solve: dimension mismatch");
  CMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) = b(f.perm[i], j);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = x(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * x(k, j);
      x(i, j) = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      cplx s = x(i, j);
      for (std::size_t k = i + 1; k < n; ++k) s -= f.lu(i, k) * x(k, j);
      x(i, j) = s / f.lu(i, i);
    }
  }
  return x;
}

/// Solves a x = b by LU with partial pivoting.
inline CMatrix solve(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw SizingError("solve: dimension mismatch");
  return lu_solve(lu_factor(a), b);
}

namespace detail {

inline constexpr int kPadeOrder = 8;

inline std::array<double, kPadeOrder + 1> pade_coefficients() {
  std::array<double, kPadeOrder + 1> c{};
  c[0] = 1.0;
  const int q = kPadeOrder;
  for (int k = 1; k <= q; ++k)
    c[k] = c[k - 1] * static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
  return c;
}

}  // namespace detail

/// exp(a) by scaling and squaring around a diagonal [8/8] Pade approximant.
inline CMatrix mat_exp(const CMatrix& a) {
  if (!all_finite(a)) throw RangeError("mat_exp: non-finite input");
  const std::size_t n = a.dim();
  const double norm = norm1(a);
  if (norm > tol::exp_max_norm)
    throw RangeError("mat_exp: ||a||_1 = " + std::to_string(norm) + " exceeds the bound " +
                     std::to_string(tol::exp_max_norm));
  int squarings = 0;
  if (norm > tol::exp_scaled_norm)
    squarings = static_cast<int>(std::ceil(std::log2(norm / tol::exp_scaled_norm)));
  const CMatrix x = a * std::ldexp(1.0, -squarings);

  static const auto c = detail::pade_coefficients();
  CMatrix num = CMatrix::identity(n) * c[0];
  CMatrix den = CMatrix::identity(n) * c[0];
  CMatrix power = CMatrix::identity(n);
  for (int k = 1; k <= detail::kPadeOrder; ++k) {
    power = power * x;
    num += power * c[k];
    den += power * ((k % 2 == 0) ? c[k] : -c[k]);
  }
  CMatrix r = solve(den, num);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

/// exp(h) for Hermitian h through its eigendecomposition.
inline CMatrix mat_exp_hermitian(const CMatrix& h) {
  const auto eig = herm_eig(h);
  const std::size_t n = h.dim();
  if (!eig.values.empty() && eig.values.back() > 700.0)
    throw RangeError("mat_exp_hermitian: largest eigenvalue exceeds 700");
  CMatrix r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::exp(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = eig.vectors(i, k) * e;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(eig.vectors(j, k));
    }
  }
  return r;
}

}  // namespace qinv
