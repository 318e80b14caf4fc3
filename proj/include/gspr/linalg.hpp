#pragma once

#include "gspr/polynomial.hpp"

#include <optional>
#include <random>
#include <vector>

namespace gspr {

// Rational function over the polynomial ring.  Kept only lightly normalized
// (monomial content and equal-polynomial cancellation); full gcd reduction is
// out of scope and not needed at desk scale.
class RatFunc {
 public:
  RatFunc() = default;
  explicit RatFunc(Polynomial num)
      : num_(std::move(num)), den_(Polynomial::constant(num_.context(), Rational(1))) {}
  RatFunc(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("ratfunc: zero denominator");
    normalize();
  }

  static RatFunc zero(const ContextPtr& ctx) { return RatFunc(Polynomial::zero(ctx)); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  const ContextPtr& context() const { return num_.context(); }

  RatFunc operator-() const {
    RatFunc r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw std::domain_error("ratfunc: division by zero");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }

  bool operator==(const RatFunc& o) const { return (num_ * o.den_) == (o.num_ * den_); }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Polynomial::constant(den_.context(), Rational(1));
      return;
    }
    if (num_ == den_) {
      num_ = Polynomial::constant(num_.context(), Rational(1));
      den_ = num_;
      return;
    }
    // Cancel a common constant so denominators stay small, and flip the sign
    // onto the numerator.
    if (den_.is_constant()) {
      Rational c = den_.constant_value();
      num_ *= Rational(1) / c;
      den_ = Polynomial::constant(den_.context(), Rational(1));
      return;
    }
    Rational lead = den_.terms().rbegin()->second;
    num_ *= Rational(1) / lead;
    den_ *= Rational(1) / lead;
  }

  Polynomial num_;
  Polynomial den_;
};

template <typename T>
using Matrix = std::vector<std::vector<T>>;

using PolyMatrix = Matrix<Polynomial>;
using RatMatrix = Matrix<Rational>;

// ---------------------------------------------------------------------------
// Rank over the rationals.

inline std::size_t rank(RatMatrix m) {
  std::size_t rows = m.size();
  if (rows == 0) return 0;
  std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && is_zero(m[piv][c])) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

// Generic rank over the fraction field Q(x): Gaussian elimination with
// polynomial cross-multiplication.
inline std::size_t generic_rank(PolyMatrix m) {
  std::size_t rows = m.size();
  if (rows == 0) return 0;
  std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    // pick the lowest-degree nonzero pivot to slow degree growth
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!m[i][c].is_zero() &&
          (piv == rows || m[i][c].total_degree() < m[piv][c].total_degree()))
        piv = i;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      Polynomial a = m[r][c], b = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] = a * m[i][j] - b * m[r][j];
    }
    ++r;
  }
  return r;
}

inline RatMatrix eval_matrix(const PolyMatrix& m, const std::vector<Rational>& point) {
  RatMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) {
    std::vector<Rational> r;
    r.reserve(row.size());
    for (const auto& p : row) r.push_back(p.eval(point));
    out.push_back(std::move(r));
  }
  return out;
}

// Nullspace basis over Q(x), denominators cleared to polynomial vectors.
inline std::vector<std::vector<Polynomial>> generic_nullspace(const PolyMatrix& m) {
  if (m.empty()) return {};
  const ContextPtr ctx = m[0][0].context();
  std::size_t rows = m.size(), cols = m[0].size();
  Matrix<RatFunc> a(rows, std::vector<RatFunc>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = RatFunc(m[i][j]);

  // reduced row echelon form over the fraction field
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!a[i][c].is_zero()) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    RatFunc inv = RatFunc(Polynomial::constant(ctx, Rational(1))) / a[r][c];
    for (std::size_t j = 0; j < cols; ++j) a[r][j] = a[r][j] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      RatFunc f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = a[i][j] - f * a[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }

  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<Polynomial>> basis;
  for (std::size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    std::vector<RatFunc> v(cols, RatFunc::zero(ctx));
    v[free_c] = RatFunc(Polynomial::constant(ctx, Rational(1)));
    for (std::size_t k = 0; k < pivot_col.size(); ++k) v[pivot_col[k]] = -a[k][free_c];
    // Basis vectors are only defined up to scale, so clear denominators by
    // scaling with the full product: entry k becomes num_k * prod_{j!=k} den_j.
    std::vector<Polynomial> pv(cols, Polynomial::zero(ctx));
    for (std::size_t k = 0; k < cols; ++k) {
      if (v[k].is_zero()) continue;
      Polynomial scaled = v[k].num();
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == k || v[j].is_zero() || v[j].den().is_constant()) continue;
        scaled = scaled * v[j].den();
      }
      pv[k] = scaled;
    }
    basis.push_back(std::move(pv));
  }
  return basis;
}

// Deterministic small-height rational sample points for rank probing.
inline std::vector<std::vector<Rational>> sample_points(std::size_t arity, std::size_t count,
                                                        unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  std::vector<std::vector<Rational>> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<Rational> p;
    p.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) p.emplace_back(num(rng), den(rng));
    pts.push_back(std::move(p));
  }
  return pts;
}

// Exact solve of A x = b over Q.  Returns the canonical solution with free
// variables set to zero, or nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve_rational(RatMatrix a,
                                                           std::vector<Rational> b) {
  std::size_t rows = a.size();
  std::size_t cols = rows ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!is_zero(a[i][c])) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    Rational inv = Rational(1) / a[r][c];
    for (std::size_t j = 0; j < cols; ++j) a[r][j] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(a[i][c])) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (!is_zero(b[i])) return std::nullopt;
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = b[k];
  return x;
}

}  // namespace gspr
