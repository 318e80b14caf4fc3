#pragma once

#include "gspr/dgla.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gspr {

using Vec = std::vector<double>;

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double eval_double(const Polynomial& p, const Vec& pt) {
  double acc = 0;
  for (const auto& [m, c] : p.terms()) {
    double t = to_double(c);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned e = 0; e < m[i]; ++e) t *= pt[i];
    acc += t;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Group realizations: elements are flat double vectors (matrices row-major).

struct GroupRealization {
  std::size_t element_size = 0;
  Vec identity;
  std::function<Vec(const Vec&, const Vec&)> mul;
  std::function<Vec(const Vec&)> inv;
  std::function<Vec(const Vec&)> exp_map;  // Lie algebra -> group

  static GroupRealization vector_group(std::size_t k) {
    GroupRealization g;
    g.element_size = k;
    g.identity = Vec(k, 0.0);
    g.mul = [](const Vec& a, const Vec& b) {
      Vec r(a);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
      return r;
    };
    g.inv = [](const Vec& a) {
      Vec r(a);
      for (auto& x : r) x = -x;
      return r;
    };
    g.exp_map = [](const Vec& w) { return w; };
    return g;
  }

  static GroupRealization matrix_group(std::size_t n,
                                       std::function<Vec(const Vec&)> exp_fn = nullptr);
};

namespace numdetail {

inline Vec mat_mul(const Vec& a, const Vec& b, std::size_t n) {
  Vec r(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) r[i * n + j] += aik * b[k * n + j];
    }
  return r;
}

inline Vec mat_identity(std::size_t n) {
  Vec r(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) r[i * n + i] = 1.0;
  return r;
}

inline Vec mat_inverse(Vec a, std::size_t n) {
  Vec inv = mat_identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    if (std::fabs(a[piv * n + c]) < 1e-14) throw std::domain_error("singular matrix");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a[piv * n + j], a[c * n + j]);
      std::swap(inv[piv * n + j], inv[c * n + j]);
    }
    double d = a[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c * n + j] /= d;
      inv[c * n + j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        inv[r * n + j] -= f * inv[c * n + j];
      }
    }
  }
  return inv;
}

// scaling-and-squaring Taylor exponential
inline Vec mat_exp(const Vec& a, std::size_t n) {
  double norm = 0;
  for (double x : a) norm = std::max(norm, std::fabs(x));
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale /= 2;
    ++squarings;
  }
  Vec as(a);
  for (auto& x : as) x *= scale;
  Vec r = mat_identity(n);
  Vec term = mat_identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = mat_mul(term, as, n);
    for (auto& x : term) x /= k;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) r = mat_mul(r, r, n);
  return r;
}

}  // namespace numdetail

inline GroupRealization GroupRealization::matrix_group(std::size_t n,
                                                       std::function<Vec(const Vec&)> exp_fn) {
  GroupRealization g;
  g.element_size = n * n;
  g.identity = numdetail::mat_identity(n);
  g.mul = [n](const Vec& a, const Vec& b) { return numdetail::mat_mul(a, b, n); };
  g.inv = [n](const Vec& a) { return numdetail::mat_inverse(a, n); };
  g.exp_map = exp_fn ? std::move(exp_fn) : [n](const Vec& w) { return numdetail::mat_exp(w, n); };
  return g;
}

// Group axioms on sampled elements; returns the max deviation found.
inline double audit_group(const GroupRealization& g, const std::vector<Vec>& samples) {
  double dev = max_abs_diff(g.exp_map(Vec(g.identity.size(), 0.0)), g.identity);
  for (const auto& a : samples) {
    dev = std::max(dev, max_abs_diff(g.mul(a, g.identity), a));
    dev = std::max(dev, max_abs_diff(g.mul(g.identity, a), a));
    dev = std::max(dev, max_abs_diff(g.mul(a, g.inv(a)), g.identity));
    for (const auto& b : samples)
      for (const auto& c : samples)
        dev = std::max(dev, max_abs_diff(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c))));
  }
  return dev;
}

struct CrossedModuleGroups {
  GroupRealization H;
  GroupRealization G;
  std::function<Vec(const Vec&)> partial;          // H -> G
  std::function<Vec(const Vec&, const Vec&)> phi;  // (g,h) -> h

  static CrossedModuleGroups vector_identity(std::size_t k) {
    CrossedModuleGroups cm;
    cm.H = GroupRealization::vector_group(k);
    cm.G = GroupRealization::vector_group(k);
    cm.partial = [](const Vec& h) { return h; };
    cm.phi = [](const Vec&, const Vec& h) { return h; };
    return cm;
  }

  // (G, G, id, conjugation) for a matrix group.
  static CrossedModuleGroups conjugation(const GroupRealization& g) {
    CrossedModuleGroups cm;
    cm.H = g;
    cm.G = g;
    cm.partial = [](const Vec& h) { return h; };
    cm.phi = [g](const Vec& a, const Vec& h) { return g.mul(g.mul(a, h), g.inv(a)); };
    return cm;
  }
};

// Crossed-module-of-groups axioms on sampled elements.
inline double audit_crossed_module_groups(const CrossedModuleGroups& cm,
                                          const std::vector<Vec>& hs, const std::vector<Vec>& gs) {
  double dev = 0;
  for (const auto& h1 : hs)
    for (const auto& h2 : hs) {
      Vec lhs = cm.phi(cm.partial(h1), h2);
      Vec rhs = cm.H.mul(cm.H.mul(h1, h2), cm.H.inv(h1));
      dev = std::max(dev, max_abs_diff(lhs, rhs));
    }
  for (const auto& g : gs)
    for (const auto& h : hs) {
      Vec lhs = cm.partial(cm.phi(g, h));
      Vec rhs = cm.G.mul(cm.G.mul(g, cm.partial(h)), cm.G.inv(g));
      dev = std::max(dev, max_abs_diff(lhs, rhs));
      for (const auto& h2 : hs) {
        Vec l2 = cm.phi(g, cm.H.mul(h, h2));
        Vec r2 = cm.H.mul(cm.phi(g, h), cm.phi(g, h2));
        dev = std::max(dev, max_abs_diff(l2, r2));
      }
    }
  return dev;
}

// ---------------------------------------------------------------------------
// The Lie 2-group H x G over G: source g, target (partial h) g, composition
// (h1,g1) o (h2,g2) = (h1 h2, g2) when g1 = partial(h2) g2, and the
// semidirect group structure on arrows.

struct TwoGroupElement {
  Vec h;
  Vec g;
};

inline Vec two_group_source(const TwoGroupElement& k, const CrossedModuleGroups&) { return k.g; }
inline Vec two_group_target(const TwoGroupElement& k, const CrossedModuleGroups& cm) {
  return cm.G.mul(cm.partial(k.h), k.g);
}

inline std::optional<TwoGroupElement> two_group_compose(const TwoGroupElement& k1,
                                                        const TwoGroupElement& k2,
                                                        const CrossedModuleGroups& cm,
                                                        double tol = 1e-9) {
  if (max_abs_diff(k1.g, two_group_target(k2, cm)) > tol) return std::nullopt;
  return TwoGroupElement{cm.H.mul(k1.h, k2.h), k2.g};
}

inline TwoGroupElement semidirect_mul(const TwoGroupElement& k1, const TwoGroupElement& k2,
                                      const CrossedModuleGroups& cm) {
  return {cm.H.mul(k1.h, cm.phi(k1.g, k2.h)), cm.G.mul(k1.g, k2.g)};
}

inline TwoGroupElement semidirect_inv(const TwoGroupElement& k, const CrossedModuleGroups& cm) {
  Vec gi = cm.G.inv(k.g);
  return {cm.phi(gi, cm.H.inv(k.h)), gi};
}

// ---------------------------------------------------------------------------
// Numeric flows of weighted sums of polynomial fields.

struct NumericField {
  // sum over parts of weight * (polynomial component vector)
  std::vector<std::pair<double, std::vector<Polynomial>>> parts;
  std::size_t dim = 0;

  Vec operator()(const Vec& z) const {
    Vec v(dim, 0.0);
    for (const auto& [w, comps] : parts) {
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < dim; ++i) v[i] += w * eval_double(comps[i], z);
    }
    return v;
  }

  bool is_affine() const {
    for (const auto& [w, comps] : parts)
      for (const auto& p : comps)
        if (p.total_degree() > 1) return false;
    return true;
  }
};

// Closed-form time-t flow of an affine field via the augmented exponential;
// A and b are extracted by evaluation, which is exact for affine fields.
inline Vec affine_flow(const NumericField& f, const Vec& z0, double t) {
  std::size_t n = f.dim;
  Vec b = f(Vec(n, 0.0));
  Vec aug((n + 1) * (n + 1), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Vec ej(n, 0.0);
    ej[j] = 1.0;
    Vec col = f(ej);
    for (std::size_t i = 0; i < n; ++i) aug[i * (n + 1) + j] = (col[i] - b[i]) * t;
  }
  for (std::size_t i = 0; i < n; ++i) aug[i * (n + 1) + n] = b[i] * t;
  Vec e = numdetail::mat_exp(aug, n + 1);
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i] += e[i * (n + 1) + j] * z0[j];
    out[i] += e[i * (n + 1) + n];
  }
  return out;
}

// Adaptive RK4 with step doubling.
inline Vec rk4_flow(const NumericField& f, Vec z, double t_end, double local_tol = 1e-12) {
  auto step = [&](const Vec& y, double h) {
    Vec k1 = f(y);
    Vec y2(y);
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k1[i];
    Vec k2 = f(y2);
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k2[i];
    Vec k3 = f(y2);
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + h * k3[i];
    Vec k4 = f(y2);
    Vec out(y);
    for (std::size_t i = 0; i < y.size(); ++i)
      out[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
  };
  double t = 0, h = t_end / 16.0;
  if (h == 0) return z;
  int guard = 0;
  while (t < t_end && ++guard < 100000) {
    if (t + h > t_end) h = t_end - t;
    Vec full = step(z, h);
    Vec half = step(step(z, h / 2), h / 2);
    double err = max_abs_diff(full, half) / 15.0;
    double scale = 1.0;
    for (double x : z) scale = std::max(scale, std::fabs(x));
    if (err <= local_tol * scale || h < 1e-12) {
      z = half;
      t += h;
      if (err < local_tol * scale / 32) h *= 2;
    } else {
      h /= 2;
    }
  }
  if (guard >= 100000) throw std::runtime_error("rk4: step failure");
  return z;
}

inline Vec flow(const NumericField& f, const Vec& z, double t, double local_tol = 1e-12) {
  return f.is_affine() ? affine_flow(f, z, t) : rk4_flow(f, z, t, local_tol);
}

// ---------------------------------------------------------------------------
// Pair groupoid of a symplectic vector space, with the lifted 2-group action.

struct PairGroupoidPoint {
  Vec target;
  Vec source;
};

inline std::optional<PairGroupoidPoint> pair_compose(const PairGroupoidPoint& x,
                                                     const PairGroupoidPoint& y,
                                                     double tol = 1e-9) {
  if (max_abs_diff(x.source, y.target) > tol) return std::nullopt;
  return PairGroupoidPoint{x.target, y.source};
}

// The lifted action of H x G (vector-group realizations, so group elements
// are Lie algebra elements) on Gamma = M x M.  Conventions fixed by the
// flow-identity calibration: the pair groupoid carries (-pi) + pi (target
// anti-Poisson, source Poisson); g acts diagonally by the time-1 flow of
// J1(g); h acts on the target factor only, by the flow of the hamiltonian
// field of J0.h.  With these choices the action has moment map
// (-J0 o t, s*f - t*f), which the tests verify by differentiation.
struct LiftedAction {
  ActionData data;
  double local_tol = 1e-12;

  // basis fields, combined with double weights at call time
  NumericField g_field(const Vec& g) const {
    NumericField f;
    f.dim = data.pi.context()->size();
    for (std::size_t k = 0; k < data.J1.size(); ++k)
      f.parts.emplace_back(g[k], field_components(data.J1[k]));
    return f;
  }

  NumericField h_field(const Vec& h) const {
    NumericField f;
    f.dim = data.pi.context()->size();
    GradedFunction s = data.pi.to_graded();
    for (std::size_t k = 0; k < data.J0.size(); ++k)
      f.parts.emplace_back(h[k], field_components(hamiltonian_field(s, data.J0[k])));
    return f;
  }

  // Phi(k) for k = (h,g) = (h,e)(e,g): the diagonal g-flow first, then the
  // target-only h-flow.
  PairGroupoidPoint act(const TwoGroupElement& k, const PairGroupoidPoint& x) const {
    PairGroupoidPoint out = x;
    NumericField gf = g_field(k.g);
    out.target = flow(gf, out.target, 1.0, local_tol);
    out.source = flow(gf, out.source, 1.0, local_tol);
    NumericField hf = h_field(k.h);
    out.target = flow(hf, out.target, 1.0, local_tol);
    return out;
  }
};

// Statistics of the compatibility law k1 x o k2 y = (h1 h2, g2)(x o y).
struct KxkyReport {
  unsigned seed = 0;
  std::size_t samples = 0;
  double max_deviation = 0;
  double flow_calibration_deviation = 0;
  double moment_deviation = 0;
  std::size_t misclassified = 0;
};

inline KxkyReport verify_kxky(const LiftedAction& act, const CrossedModuleGroups& cm,
                              std::size_t samples, unsigned seed, double compose_tol = 1e-8) {
  KxkyReport rep;
  rep.seed = seed;
  rep.samples = samples;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = act.data.pi.context()->size();
  auto rnd_vec = [&](std::size_t k) {
    Vec v(k);
    for (auto& x : v) x = u(rng);
    return v;
  };

  for (std::size_t it = 0; it < samples; ++it) {
    Vec a = rnd_vec(n), b = rnd_vec(n), c = rnd_vec(n);
    PairGroupoidPoint x{a, b}, y{b, c};
    TwoGroupElement k2{rnd_vec(cm.H.element_size), rnd_vec(cm.G.element_size)};
    TwoGroupElement k1{rnd_vec(cm.H.element_size), cm.G.mul(cm.partial(k2.h), k2.g)};

    PairGroupoidPoint kx = act.act(k1, x);
    PairGroupoidPoint ky = act.act(k2, y);
    auto lhs = pair_compose(kx, ky, compose_tol);
    if (!lhs) {
      ++rep.misclassified;
      continue;
    }
    auto xy = pair_compose(x, y, compose_tol);
    TwoGroupElement prod{cm.H.mul(k1.h, k2.h), k2.g};
    PairGroupoidPoint rhs = act.act(prod, *xy);
    rep.max_deviation = std::max(rep.max_deviation, max_abs_diff(lhs->target, rhs.target));
    rep.max_deviation = std::max(rep.max_deviation, max_abs_diff(lhs->source, rhs.source));

    // a violating k1 must be classified non-composable
    TwoGroupElement bad = k1;
    bad.g[0] += 0.25;
    PairGroupoidPoint bx = act.act(bad, x);
    if (pair_compose(bx, ky, compose_tol)) ++rep.misclassified;
  }

  // the multiplicative-lift flow identity: (X_f)^Gamma = X_{s*f} - X_{t*f}; on the pair groupoid both
  // sides have components (X_f, X_f), so the calibration quantity is the
  // agreement of the exact affine flow with RK4 on those components.
  {
    const ContextPtr& ctx = act.data.pi.context();
    std::mt19937 rng2(seed + 1);
    std::uniform_int_distribution<int> ci(-3, 3);
    Polynomial f(ctx);
    for (std::size_t i = 0; i < n; ++i) {
      f += Polynomial::variable(ctx, i) * Rational(ci(rng2));
      for (std::size_t j = i; j < n; ++j)
        f += Polynomial::variable(ctx, i) * Polynomial::variable(ctx, j) * Rational(ci(rng2), 2);
    }
    NumericField xf;
    xf.dim = n;
    xf.parts.emplace_back(1.0, field_components(hamiltonian_field(act.data.pi.to_graded(), f)));
    for (int it = 0; it < 10; ++it) {
      Vec a = rnd_vec(n);
      Vec ea = affine_flow(xf, a, 1.0);
      Vec ra = rk4_flow(xf, a, 1.0, act.local_tol);
      rep.flow_calibration_deviation = std::max(rep.flow_calibration_deviation, max_abs_diff(ea, ra));
    }
  }

  // moment map check: differentiate the action along the generators and
  // compare with the hamiltonian fields of (-J0 o t, s*f_v - t*f_v) w.r.t.
  // the pair-groupoid structure (-pi) + pi
  {
    GradedFunction s = act.data.pi.to_graded();
    const double eps = 1e-6;
    for (std::size_t w = 0; w < act.data.J0.size(); ++w) {
      Vec hw(act.data.J0.size(), 0.0);
      hw[w] = eps;
      TwoGroupElement k{hw, Vec(act.data.J1.size(), 0.0)};
      Vec a = rnd_vec(n), b = rnd_vec(n);
      PairGroupoidPoint moved = act.act(k, {a, b});
      NumericField xw;
      xw.dim = n;
      xw.parts.emplace_back(1.0, field_components(hamiltonian_field(s, act.data.J0[w])));
      Vec expect = xw(a);
      for (std::size_t i = 0; i < n; ++i) {
        double got = (moved.target[i] - a[i]) / eps;
        rep.moment_deviation = std::max(rep.moment_deviation, std::fabs(got - expect[i]));
      }
      rep.moment_deviation = std::max(rep.moment_deviation, max_abs_diff(moved.source, b));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Quotients of the pair groupoid through the reduction engine.

// Pair-groupoid context x1..xn (target), y1..yn (source) and (-pi) + pi.
inline std::pair<ContextPtr, PoissonBivector> pair_groupoid_of(const PoissonBivector& pi) {
  const ContextPtr& mctx = pi.context();
  std::size_t n = mctx->size();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i) names.push_back("y" + std::to_string(i + 1));
  auto gctx = make_context(names);
  auto remap = [&](const Polynomial& q, std::size_t offset) {
    Polynomial out(gctx);
    for (const auto& [m, c] : q.terms()) {
      Monomial gm(2 * n, 0);
      for (std::size_t v = 0; v < n; ++v) gm[offset + v] = m[v];
      out.add_term(gm, c);
    }
    return out;
  };
  PoissonBivector gpi(gctx);
  for (const auto& [k, p] : pi.upper()) {
    auto [i, j] = k;
    gpi.set(i, j, -remap(p, 0));
    gpi.set(n + i, n + j, remap(p, n));
  }
  return {gctx, gpi};
}

// Remap a degree-1 function on M to a one-factor field on the pair groupoid.
inline GradedFunction remap_field(const GradedFunction& x, const ContextPtr& gctx, std::size_t n,
                                  std::size_t offset) {
  GradedFunction out(gctx);
  for (const auto& [s, p] : x.terms()) {
    Polynomial q(gctx);
    for (const auto& [m, c] : p.terms()) {
      Monomial gm(2 * n, 0);
      for (std::size_t v = 0; v < n; ++v) gm[offset + v] = m[v];
      q.add_term(gm, c);
    }
    OddSet gs = 0;
    for (std::size_t b = 0; b < n; ++b)
      if (s & (OddSet(1) << b)) gs |= OddSet(1) << (offset + b);
    out.add_term(gs, q);
  }
  return out;
}

// Hamiltonian potential f with X_f = given field, solved as a linear ansatz
// over monomials of bounded degree.
inline std::optional<Polynomial> hamiltonian_potential(const PoissonBivector& pi,
                                                       const GradedFunction& x, unsigned deg) {
  const ContextPtr& ctx = pi.context();
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < ctx->size(); ++i) all.push_back(i);
  std::vector<Monomial> basis = detail::monomials_up_to(ctx, all, deg);
  auto comps = field_components(x);

  RatMatrix m;
  std::vector<Rational> rhs;
  std::map<std::pair<std::size_t, Monomial>, std::size_t> row_of;
  auto row_for = [&](std::size_t comp, const Monomial& mono) {
    auto key = std::make_pair(comp, mono);
    auto it = row_of.find(key);
    if (it != row_of.end()) return it->second;
    std::size_t r = m.size();
    row_of.emplace(key, r);
    m.emplace_back(basis.size(), Rational(0));
    rhs.emplace_back(0);
    return r;
  };
  // component a of X_f: sum_b pi^{ab} d f / dx_b
  for (std::size_t a = 0; a < ctx->size(); ++a) {
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t b = 0; b < ctx->size(); ++b) {
        if (basis[k][b] == 0) continue;
        Polynomial piab = pi.component(a, b);
        if (piab.is_zero()) continue;
        Monomial dmono = basis[k];
        dmono[b] -= 1;
        Rational factor(basis[k][b]);
        for (const auto& [pm, pc] : piab.terms()) {
          Monomial prod = dmono;
          for (std::size_t v = 0; v < prod.size(); ++v) prod[v] += pm[v];
          m[row_for(a, prod)][k] += pc * factor;
        }
      }
    for (const auto& [pm, pc] : comps[a].terms()) rhs[row_for(a, pm)] += pc;
  }
  if (m.empty()) {
    for (const auto& c : comps)
      if (!c.is_zero()) return std::nullopt;
    return Polynomial::zero(ctx);
  }
  auto sol = solve_rational(std::move(m), std::move(rhs));
  if (!sol) return std::nullopt;
  Polynomial f(ctx);
  for (std::size_t k = 0; k < basis.size(); ++k) f.add_term(basis[k], (*sol)[k]);
  return f;
}

// Linear change of chart u = T z applied to the whole graded problem, with
// fresh coordinate names.  Used to flatten constant orbit directions into
// coordinate fields; T must be invertible.
struct Chart {
  ContextPtr new_ctx;
  ConstMat T;     // u = T z
  ConstMat Tinv;  // z = Tinv u

  Polynomial transform(const Polynomial& p) const {
    Polynomial out(new_ctx);
    std::size_t n = new_ctx->size();
    // z_i = sum_j Tinv[i][j] u_j
    std::vector<Polynomial> z_of_u;
    for (std::size_t i = 0; i < n; ++i) {
      Polynomial zi(new_ctx);
      for (std::size_t j = 0; j < n; ++j)
        zi += Polynomial::variable(new_ctx, j) * Tinv[i][j];
      z_of_u.push_back(zi);
    }
    for (const auto& [m, c] : p.terms()) {
      Polynomial term = Polynomial::constant(new_ctx, c);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (unsigned e = 0; e < m[i]; ++e) term = term * z_of_u[i];
      out += term;
    }
    return out;
  }

  // theta^z_i = sum_j T[j][i] theta^u_j, matching the pushforward of d/dz_i
  GradedFunction transform(const GradedFunction& f) const {
    std::size_t n = new_ctx->size();
    GradedFunction out(new_ctx);
    for (const auto& [s, p] : f.terms()) {
      GradedFunction term = GradedFunction::from_polynomial(transform(p));
      for (std::size_t i = 0; i < n && !term.is_zero(); ++i) {
        if (!(s & (OddSet(1) << i))) continue;
        GradedFunction image(new_ctx);
        for (std::size_t j = 0; j < n; ++j)
          if (!is_zero(T[j][i]))
            image.add_term(OddSet(1) << j, Polynomial::constant(new_ctx, T[j][i]));
        term = graded_mul(term, image);
      }
      out += term;
    }
    return out;
  }

  PoissonBivector transform(const PoissonBivector& pi) const {
    return PoissonBivector::from_graded(transform(pi.to_graded()));
  }
};

inline Chart make_chart(const ContextPtr& old_ctx, const ConstMat& t,
                        const std::string& prefix = "u") {
  Chart ch;
  std::size_t n = old_ctx->size();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i + 1));
  ch.new_ctx = make_context(names);
  ch.T = t;
  // invert T over the rationals
  RatMatrix a(n, std::vector<Rational>(n));
  ch.Tinv.assign(n, zero_vec(n));
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = t[i][j];
    std::vector<Rational> e(n, Rational(0));
    e[col] = Rational(1);
    auto x = solve_rational(a, e);
    if (!x) throw std::invalid_argument("chart matrix is singular");
    for (std::size_t i = 0; i < n; ++i) ch.Tinv[i][col] = (*x)[i];
  }
  return ch;
}

// Complete constant directions to a basis and return T with T f_m = e_{m+k},
// so that the directions become the trailing coordinate fields.
inline ConstMat flattening_chart(const std::vector<ConstVec>& dirs, std::size_t n) {
  // columns of B: a complement first, then the directions; T = B^{-1}
  std::vector<ConstVec> complement;
  for (std::size_t i = 0; i < n && complement.size() + dirs.size() < n; ++i) {
    ConstVec e = zero_vec(n);
    e[i] = Rational(1);
    RatMatrix m;
    for (const auto& c : complement) m.push_back(c);
    for (const auto& d : dirs) m.push_back(d);
    m.push_back(e);
    if (rank(m) == m.size()) complement.push_back(e);
  }
  std::vector<ConstVec> cols = complement;
  cols.insert(cols.end(), dirs.begin(), dirs.end());
  if (cols.size() != n) throw std::invalid_argument("flattening: directions are dependent");
  // T = B^{-1}: row r of T solves B^T t_r = e_r
  ConstMat tmat(n, zero_vec(n));
  for (std::size_t row = 0; row < n; ++row) {
    RatMatrix a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = cols[i][j];  // B^T
    std::vector<Rational> e(n, Rational(0));
    e[row] = Rational(1);
    auto x = solve_rational(a, e);
    if (!x) throw std::invalid_argument("flattening: singular basis");
    tmat[row] = *x;
  }
  return tmat;
}

struct PairQuotientReport {
  ReductionReport reduction;
  ContextPtr gamma_ctx;
  PoissonBivector gamma_pi;
  std::vector<std::string> target_coords;
  std::vector<std::string> source_coords;
  bool charted = false;  // a flattening chart was applied
  Verdict multiplicative = Verdict::UNKNOWN;
  std::string witness;
};

// The global quotient Gamma/(H x G) (level_set = false) or the
// Marsden-Weinstein quotient at zero of J^Gamma = (-J0 o t, s*f - t*f)
// (level_set = true), through the coisotropic reduction engine.
inline PairQuotientReport mw_quotient_pair(const ActionData& data, bool level_set,
                                           const ProbeOptions& opt = {}) {
  PairQuotientReport out;
  std::size_t n = data.pi.context()->size();
  auto [gctx, gpi] = pair_groupoid_of(data.pi);
  out.gamma_ctx = gctx;
  out.gamma_pi = gpi;

  // orbit generators: h acts on the target factor by X_{J0 w}, g diagonally
  GradedFunction s_m = data.pi.to_graded();
  std::vector<GradedFunction> orbit;
  for (std::size_t w = 0; w < data.J0.size(); ++w)
    orbit.push_back(remap_field(hamiltonian_field(s_m, data.J0[w]), gctx, n, 0));
  for (const auto& j1 : data.J1)
    orbit.push_back(remap_field(j1, gctx, n, 0) + remap_field(j1, gctx, n, n));

  std::vector<Polynomial> constraints;
  if (level_set) {
    for (const auto& j0 : data.J0) {
      Polynomial t_part(gctx);
      for (const auto& [m, coeff] : j0.terms()) {
        Monomial gm(2 * n, 0);
        for (std::size_t v = 0; v < n; ++v) gm[v] = m[v];
        t_part.add_term(gm, coeff);
      }
      constraints.push_back(-t_part);
    }
    unsigned bound = opt.degree_bound >= 0 ? static_cast<unsigned>(opt.degree_bound) : 3u;
    for (const auto& j1 : data.J1) {
      auto f = hamiltonian_potential(data.pi, j1, bound);
      if (!f) {
        out.reduction.error = "no polynomial hamiltonian potential for a J1 generator";
        return out;
      }
      Polynomial diff_part(gctx);
      for (const auto& [m, coeff] : f->terms()) {
        Monomial gs(2 * n, 0), gt(2 * n, 0);
        for (std::size_t v = 0; v < n; ++v) {
          gs[n + v] = m[v];
          gt[v] = m[v];
        }
        diff_part.add_term(gs, coeff);
        diff_part.add_term(gt, -coeff);
      }
      constraints.push_back(diff_part);
    }
  }

  // Triangularize the orbit first; the chart is flat exactly when every
  // solved theta image vanishes (orbit directions are coordinate fields).
  // Constant non-coordinate directions are flattened by a linear chart.
  SubmanifoldSpec c(gctx);
  if (level_set) solve_zero_set(c, constraints);
  attach_distribution(c, orbit);

  bool flat = c.extra_generators().empty();
  bool constant_dirs = c.extra_generators().empty();
  for (const auto& [idx, img] : c.theta_solved()) {
    if (!img.is_zero()) flat = false;
    for (const auto& [s, p] : img.terms())
      if (!p.is_constant()) constant_dirs = false;
  }

  if (!flat && constant_dirs) {
    // rebuild the orbit directions as constant vectors and flatten
    std::vector<ConstVec> basis;
    for (const auto& [idx, img] : c.theta_solved()) {
      ConstVec dir = zero_vec(2 * n);
      dir[idx] = Rational(1);
      for (const auto& [s, p] : img.terms())
        for (std::size_t b = 0; b < 2 * n; ++b)
          if (s & (OddSet(1) << b)) dir[b] -= p.constant_value();
      basis.push_back(dir);
    }
    Chart ch = make_chart(gctx, flattening_chart(basis, 2 * n));
    out.charted = true;
    PoissonBivector gpi_u = ch.transform(gpi);
    std::vector<GradedFunction> orbit_u;
    for (const auto& g : orbit) orbit_u.push_back(ch.transform(g));
    SubmanifoldSpec cu(ch.new_ctx);
    if (level_set) {
      std::vector<Polynomial> cons_u;
      for (const auto& p : constraints) cons_u.push_back(ch.transform(p));
      solve_zero_set(cu, cons_u);
    }
    attach_distribution(cu, orbit_u);
    out.reduction = check_coisotropic(cu, gpi_u, opt);
    out.multiplicative = Verdict::UNKNOWN;
    out.witness = "multiplicativity check skipped in a flattened chart";
    return out;
  }

  out.reduction = check_coisotropic(c, gpi, opt);
  if (!out.reduction.reduced) return out;

  // multiplicativity of the quotient structure w.r.t. the induced pair
  // composition: no cross-factor components, and the target block is the
  // negative of the source block under x_k <-> y_k
  const auto& qctx = out.reduction.reduced->context();
  std::map<std::string, std::size_t> qindex;
  for (std::size_t i = 0; i < qctx->size(); ++i) qindex[qctx->name(i)] = i;
  std::vector<std::size_t> tq, sq;
  for (std::size_t i = 0; i < qctx->size(); ++i) {
    if (qctx->name(i)[0] == 'x') {
      tq.push_back(i);
      out.target_coords.push_back(qctx->name(i));
    } else {
      sq.push_back(i);
      out.source_coords.push_back(qctx->name(i));
    }
  }
  out.multiplicative = Verdict::PASS;
  if (tq.size() != sq.size()) {
    out.multiplicative = Verdict::FAIL;
    out.witness = "quotient factors have different dimensions";
    return out;
  }
  const auto& red = *out.reduction.reduced;
  for (std::size_t i = 0; i < tq.size() && out.multiplicative == Verdict::PASS; ++i)
    for (std::size_t j = 0; j < sq.size(); ++j)
      if (!red.component(tq[i], sq[j]).is_zero()) {
        out.multiplicative = Verdict::FAIL;
        out.witness = "cross-factor component " + qctx->name(tq[i]) + "," + qctx->name(sq[j]);
        break;
      }
  for (std::size_t i = 0; i < tq.size() && out.multiplicative == Verdict::PASS; ++i)
    for (std::size_t j = 0; j < tq.size(); ++j) {
      Polynomial a = red.component(tq[i], tq[j]);
      std::string yi = "y" + out.target_coords[i].substr(1);
      std::string yj = "y" + out.target_coords[j].substr(1);
      if (!qindex.count(yi) || !qindex.count(yj)) {
        out.multiplicative = Verdict::FAIL;
        out.witness = "factors are not matching coordinate blocks";
        break;
      }
      // rename the source-block entry y -> x and compare exactly
      Polynomial b = red.component(qindex[yi], qindex[yj]);
      Polynomial renamed(qctx);
      for (const auto& [m, coeff] : b.terms()) {
        Monomial rm(qctx->size(), 0);
        bool ok = true;
        for (std::size_t v = 0; v < qctx->size(); ++v) {
          if (m[v] == 0) continue;
          std::string xv = "x" + qctx->name(v).substr(1);
          if (!qindex.count(xv)) {
            ok = false;
            break;
          }
          rm[qindex[xv]] = m[v];
        }
        if (!ok) {
          out.multiplicative = Verdict::FAIL;
          out.witness = "source-block entry depends on unmatched coordinates";
          break;
        }
        renamed.add_term(rm, coeff);
      }
      if (out.multiplicative != Verdict::PASS) break;
      if (a != -renamed) {
        out.multiplicative = Verdict::FAIL;
        out.witness = "target block is not the negative of the source block at (" +
                      qctx->name(tq[i]) + "," + qctx->name(tq[j]) + ")";
        break;
      }
    }
  return out;
}

}  // namespace gspr
