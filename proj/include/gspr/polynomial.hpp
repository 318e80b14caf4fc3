#pragma once

#include "gspr/rational.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gspr {

struct context_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Ordered list of even coordinate names.  Every odd coordinate th<k> is the
// fiber partner of the k-th even coordinate, so a single context serves both
// the polynomial ring and the graded algebra built on top of it.
class Context {
 public:
  explicit Context(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw context_error("context: empty variable name");
      if (!seen.insert(n).second) throw context_error("context: duplicate variable " + n);
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::string odd_name(std::size_t i) const { return "th" + std::to_string(i + 1); }

  // Index lookup; -1 when absent.
  int index_of(const std::string& v) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == v) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const Context& o) const { return names_ == o.names_; }
  bool operator!=(const Context& o) const { return !(*this == o); }

 private:
  std::vector<std::string> names_;
};

using ContextPtr = std::shared_ptr<const Context>;

inline ContextPtr make_context(std::vector<std::string> names) {
  return std::make_shared<const Context>(std::move(names));
}

inline void require_same_context(const ContextPtr& a, const ContextPtr& b) {
  if (a.get() == b.get()) return;
  if (!a || !b || *a != *b) throw context_error("operands live in different variable contexts");
}

// Exponent vector, one entry per context variable.
using Monomial = std::vector<unsigned>;

namespace detail {
// Graded lexicographic order on exponent vectors (total degree first).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = std::accumulate(a.begin(), a.end(), 0u);
    unsigned db = std::accumulate(b.begin(), b.end(), 0u);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};
}  // namespace detail

// Multivariate polynomial with exact rational coefficients, kept in canonical
// form: no zero coefficients, terms ordered grlex.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, detail::GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  static Polynomial zero(ContextPtr ctx) { return Polynomial(std::move(ctx)); }

  static Polynomial constant(ContextPtr ctx, const Rational& c) {
    Polynomial p(std::move(ctx));
    if (!gspr::is_zero(c)) p.terms_[Monomial(p.ctx_->size(), 0)] = c;
    return p;
  }

  static Polynomial variable(ContextPtr ctx, const std::string& v, unsigned power = 1) {
    int idx = ctx->index_of(v);
    if (idx < 0) throw context_error("unknown variable " + v);
    return variable(std::move(ctx), static_cast<std::size_t>(idx), power);
  }

  static Polynomial variable(ContextPtr ctx, std::size_t idx, unsigned power = 1) {
    Polynomial p(std::move(ctx));
    Monomial m(p.ctx_->size(), 0);
    m.at(idx) = power;
    p.terms_[m] = Rational(1);
    return p;
  }

  const ContextPtr& context() const { return ctx_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && total_degree() == 0;
  }

  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::domain_error("polynomial is not constant");
    return terms_.begin()->second;
  }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_)
      d = std::max(d, std::accumulate(m.begin(), m.end(), 0u));
    return d;
  }

  bool depends_on(std::size_t idx) const {
    for (const auto& [m, c] : terms_)
      if (m.at(idx) > 0) return true;
    return false;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (gspr::is_zero(c)) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (gspr::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial operator-() const {
    Polynomial r(ctx_);
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same_context(ctx_, o.ctx_);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same_context(ctx_, o.ctx_);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& c) {
    if (gspr::is_zero(c)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_same_context(a.ctx_, b.ctx_);
    Polynomial r(a.ctx_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(ma);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
        r.add_term(m, ca * cb);
      }
    return r;
  }

  bool operator==(const Polynomial& o) const {
    require_same_context(ctx_, o.ctx_);
    return terms_ == o.terms_;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  // Exact partial derivative with respect to a context variable.
  Polynomial diff(std::size_t idx) const {
    if (idx >= ctx_->size()) throw context_error("diff: variable index out of range");
    Polynomial r(ctx_);
    for (const auto& [m, c] : terms_) {
      if (m[idx] == 0) continue;
      Monomial d(m);
      d[idx] -= 1;
      r.add_term(d, c * Rational(m[idx]));
    }
    return r;
  }
  Polynomial diff(const std::string& v) const {
    int idx = ctx_->index_of(v);
    if (idx < 0) throw context_error("diff: unknown variable " + v);
    return diff(static_cast<std::size_t>(idx));
  }

  // Simultaneous substitution of variables by polynomials over the same
  // context.  A substituted variable may not reappear in any image; this keeps
  // the rewriting triangular and simultaneous == sequential.
  Polynomial subst(const std::map<std::size_t, Polynomial>& images) const {
    if (images.empty()) return *this;
    for (const auto& [idx, img] : images) {
      require_same_context(ctx_, img.context());
      if (idx >= ctx_->size()) throw context_error("subst: variable index out of range");
      for (const auto& [jdx, img2] : images)
        if (img.depends_on(jdx))
          throw std::invalid_argument("subst: cyclic assignment through " + ctx_->name(jdx));
    }
    Polynomial r(ctx_);
    for (const auto& [m, c] : terms_) {
      Polynomial term = Polynomial::constant(ctx_, c);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        auto it = images.find(i);
        if (it == images.end()) {
          term = term * Polynomial::variable(ctx_, i, m[i]);
        } else {
          Polynomial p = it->second;
          for (unsigned k = 0; k < m[i]; ++k) term = term * p;
        }
      }
      r += term;
    }
    return r;
  }

  // Evaluation at a rational point (one value per context variable).
  Rational eval(const std::vector<Rational>& point) const {
    if (point.size() != ctx_->size()) throw context_error("eval: wrong point arity");
    Rational acc(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] > 0) t *= gspr::pow(point[i], m[i]);
      acc += t;
    }
    return acc;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    // Print highest terms first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      Rational a = c;
      if (first) {
        if (a < 0) {
          out += "-";
          a = -a;
        }
      } else {
        out += (a < 0) ? " - " : " + ";
        if (a < 0) a = -a;
      }
      first = false;
      std::string vars;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!vars.empty()) vars += "*";
        vars += ctx_->name(i);
        if (m[i] > 1) vars += "^" + std::to_string(m[i]);
      }
      if (vars.empty()) {
        out += to_string(a);
      } else if (a == 1) {
        out += vars;
      } else {
        out += to_string(a) + "*" + vars;
      }
    }
    return out;
  }

 private:
  ContextPtr ctx_;
  TermMap terms_;
};

}  // namespace gspr
