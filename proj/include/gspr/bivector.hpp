#pragma once

#include "gspr/graded.hpp"

#include <map>
#include <utility>
#include <vector>

namespace gspr {

// Antisymmetric component matrix pi^{ij} of polynomials, stored as the upper
// triangle i < j.  pi^{ji} = -pi^{ij} is structural, never stored.
class PoissonBivector {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  PoissonBivector() = default;
  explicit PoissonBivector(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  const ContextPtr& context() const { return ctx_; }
  const std::map<Key, Polynomial>& upper() const { return comp_; }

  void set(std::size_t i, std::size_t j, const Polynomial& p) {
    require_same_context(ctx_, p.context());
    if (i == j) {
      if (!p.is_zero()) throw std::invalid_argument("bivector: nonzero diagonal");
      return;
    }
    bool flip = i > j;
    Key k = flip ? Key{j, i} : Key{i, j};
    Polynomial v = flip ? -p : p;
    if (v.is_zero())
      comp_.erase(k);
    else
      comp_[k] = v;
  }

  // pi^{ij} for arbitrary index order.
  Polynomial component(std::size_t i, std::size_t j) const {
    if (i == j) return Polynomial::zero(ctx_);
    bool flip = i > j;
    auto it = comp_.find(flip ? Key{j, i} : Key{i, j});
    if (it == comp_.end()) return Polynomial::zero(ctx_);
    return flip ? -it->second : it->second;
  }

  bool is_zero() const { return comp_.empty(); }

  bool operator==(const PoissonBivector& o) const {
    require_same_context(ctx_, o.ctx_);
    return comp_ == o.comp_;
  }
  bool operator!=(const PoissonBivector& o) const { return !(*this == o); }

  // S = (1/2) pi^{ij} th_i th_j = sum_{i<j} pi^{ij} th_i th_j.
  GradedFunction to_graded() const {
    GradedFunction s(ctx_);
    for (const auto& [k, p] : comp_)
      s.add_term((OddSet(1) << k.first) | (OddSet(1) << k.second), p);
    return s;
  }

  static PoissonBivector from_graded(const GradedFunction& s) {
    if (!s.is_homogeneous(2))
      throw degree_error("bivector: graded function must be homogeneous degree 2");
    PoissonBivector pi(s.context());
    for (const auto& [set, p] : s.terms()) {
      std::size_t i = 0, j = 0;
      bool have_i = false;
      for (std::size_t b = 0; b < 31; ++b) {
        if (set & (OddSet(1) << b)) {
          if (!have_i) {
            i = b;
            have_i = true;
          } else {
            j = b;
          }
        }
      }
      pi.set(i, j, p);
    }
    return pi;
  }

  // pi(df,dg): the direct contraction.
  Polynomial pair(const Polynomial& f, const Polynomial& g) const {
    require_same_context(ctx_, f.context());
    require_same_context(ctx_, g.context());
    Polynomial r(ctx_);
    for (const auto& [k, p] : comp_) {
      auto [i, j] = k;
      r += p * (f.diff(i) * g.diff(j) - f.diff(j) * g.diff(i));
    }
    return r;
  }

  // Contraction with a covector; component a of sharp(xi) is pi^{ab} xi_b.
  // The orientation matches the bracket calibration:
  // hamiltonian_field(S, f) == sharp(df).
  std::vector<Polynomial> sharp(const std::vector<Polynomial>& xi) const {
    if (xi.size() != ctx_->size()) throw context_error("sharp: wrong covector arity");
    std::vector<Polynomial> out(ctx_->size(), Polynomial::zero(ctx_));
    for (const auto& [k, p] : comp_) {
      auto [i, j] = k;
      out[i] += p * xi[j];
      out[j] -= p * xi[i];
    }
    return out;
  }

  // Contraction with a 2-form given by two covectors: pi(xi, eta).
  Polynomial pair_covectors(const std::vector<Polynomial>& xi,
                            const std::vector<Polynomial>& eta) const {
    Polynomial r(ctx_);
    for (const auto& [k, p] : comp_) {
      auto [i, j] = k;
      r += p * (xi[i] * eta[j] - xi[j] * eta[i]);
    }
    return r;
  }

 private:
  ContextPtr ctx_;
  std::map<Key, Polynomial> comp_;
};

// L_X pi as a degree-2 function, computed as -{S,X}.  Under the calibrated
// bracket this equals the component formula
// (L_X pi)^{ab} = X(pi^{ab}) - pi^{ai} dX^b/dx_i - pi^{ib} dX^a/dx_i.
inline GradedFunction lie_derivative_bivector(const GradedFunction& x, const PoissonBivector& pi) {
  if (!x.is_homogeneous(1)) throw degree_error("lie_derivative: X must be degree 1");
  return -schouten_bracket(pi.to_graded(), x);
}

// {S,S} measures the failure of Jacobi.  Normalized with a leading minus so
// that the coefficient of th_i th_j th_k equals twice the coordinate
// Jacobiator sum_cyc {{x_i,x_j},x_k}; this orientation is part of the
// calibration suite.
inline GradedFunction jacobi_defect(const PoissonBivector& pi) {
  GradedFunction s = pi.to_graded();
  return -schouten_bracket(s, s);
}

// Scalar Jacobiator of a coordinate triple, the independent cross-check for
// jacobi_defect.
inline Polynomial jacobiator(const PoissonBivector& pi, std::size_t i, std::size_t j,
                             std::size_t k) {
  const ContextPtr& ctx = pi.context();
  Polynomial xi = Polynomial::variable(ctx, i);
  Polynomial xj = Polynomial::variable(ctx, j);
  Polynomial xk = Polynomial::variable(ctx, k);
  Polynomial r = pi.pair(pi.pair(xi, xj), xk);
  r += pi.pair(pi.pair(xj, xk), xi);
  r += pi.pair(pi.pair(xk, xi), xj);
  return r;
}

}  // namespace gspr
