#pragma once

#include "gspr/reduction.hpp"

#include <string>
#include <vector>

namespace gspr {

// Structure constants are small dense arrays over exact rationals; every
// axiom audit is a symbolic identity on them.

using ConstVec = std::vector<Rational>;
using ConstMat = std::vector<ConstVec>;
// bracket tables: table[i][j] is the coefficient vector of the bracket of the
// i-th and j-th basis elements
using BracketTable = std::vector<std::vector<ConstVec>>;

inline ConstVec zero_vec(std::size_t n) { return ConstVec(n, Rational(0)); }

inline BracketTable zero_table(std::size_t rows, std::size_t cols, std::size_t out) {
  return BracketTable(rows, std::vector<ConstVec>(cols, zero_vec(out)));
}

inline ConstVec add(const ConstVec& a, const ConstVec& b) {
  ConstVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}
inline ConstVec sub(const ConstVec& a, const ConstVec& b) {
  ConstVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}
inline ConstVec scale(const Rational& c, const ConstVec& a) {
  ConstVec r(a);
  for (auto& x : r) x *= c;
  return r;
}
inline bool vec_zero(const ConstVec& a) {
  for (const auto& x : a)
    if (!is_zero(x)) return false;
  return true;
}

// Bracket of coefficient vectors through a table.
inline ConstVec apply_table(const BracketTable& t, const ConstVec& a, const ConstVec& b,
                            std::size_t out) {
  ConstVec r = zero_vec(out);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (is_zero(b[j])) continue;
      r = add(r, scale(a[i] * b[j], t[i][j]));
    }
  }
  return r;
}

struct AuditResult {
  std::string id;
  Verdict verdict;
  std::string witness;
};

// The graded Lie algebra h[1] + g with differential: g in degree 0, h in
// degree -1, bracket tables for [g,g] in g and the g-action [g,h] in h
// ([h,h] vanishes by degree but is stored for the audit), and delta: h -> g.
struct DGLASpec {
  std::size_t dim_h = 0;
  std::size_t dim_g = 0;
  BracketTable bracket_gg;  // [v_i, v_j] in g
  BracketTable bracket_gh;  // [v_i, w_j] in h (the action)
  BracketTable bracket_hh;  // must vanish; kept for the audit
  ConstMat delta;           // delta[j] = image of w_j in g

  static DGLASpec make(std::size_t dh, std::size_t dg) {
    DGLASpec s;
    s.dim_h = dh;
    s.dim_g = dg;
    s.bracket_gg = zero_table(dg, dg, dg);
    s.bracket_gh = zero_table(dg, dh, dh);
    s.bracket_hh = zero_table(dh, dh, dh);
    s.delta.assign(dh, zero_vec(dg));
    return s;
  }

  ConstVec delta_of(const ConstVec& w) const {
    ConstVec r = zero_vec(dim_g);
    for (std::size_t j = 0; j < dim_h; ++j) r = add(r, scale(w[j], delta[j]));
    return r;
  }
};

// Crossed module of Lie algebras: (h, g, delta, lambda) with the induced h
// bracket [w1,w2] = lambda(delta w1) w2.
struct CrossedModuleSpec {
  std::size_t dim_h = 0;
  std::size_t dim_g = 0;
  BracketTable lie_h;
  BracketTable lie_g;
  BracketTable lambda;  // lambda[v][w] in h
  ConstMat delta_map;
};

namespace detail {

inline ConstVec basis_vec(std::size_t n, std::size_t i) {
  ConstVec v = zero_vec(n);
  v[i] = Rational(1);
  return v;
}

inline void check_antisym(const BracketTable& t, std::size_t n, const std::string& name,
                          std::vector<AuditResult>& out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!vec_zero(add(t[i][j], t[j][i]))) {
        out.push_back({name + "_antisymmetric", Verdict::FAIL,
                       "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"});
        return;
      }
  out.push_back({name + "_antisymmetric", Verdict::PASS, ""});
}

inline void check_jacobi(const BracketTable& t, std::size_t n, const std::string& name,
                         std::vector<AuditResult>& out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        ConstVec s = apply_table(t, t[i][j], detail::basis_vec(n, k), n);
        s = add(s, apply_table(t, t[j][k], detail::basis_vec(n, i), n));
        s = add(s, apply_table(t, t[k][i], detail::basis_vec(n, j), n));
        if (!vec_zero(s)) {
          out.push_back({name + "_jacobi", Verdict::FAIL,
                         "triple (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                             std::to_string(k + 1) + ")"});
          return;
        }
      }
  out.push_back({name + "_jacobi", Verdict::PASS, ""});
}

}  // namespace detail

// Graded Lie algebra and differential axioms for the degree -1,0 case.
inline std::vector<AuditResult> audit_dgla(const DGLASpec& s) {
  std::vector<AuditResult> out;
  detail::check_antisym(s.bracket_gg, s.dim_g, "gg", out);
  detail::check_jacobi(s.bracket_gg, s.dim_g, "gg", out);

  // [h,h] lands in degree -2, hence must be stored as zero
  bool hh_zero = true;
  for (std::size_t i = 0; i < s.dim_h && hh_zero; ++i)
    for (std::size_t j = 0; j < s.dim_h; ++j)
      if (!vec_zero(s.bracket_hh[i][j])) {
        hh_zero = false;
        break;
      }
  out.push_back({"hh_vanishes", hh_zero ? Verdict::PASS : Verdict::FAIL, ""});

  // graded Jacobi in the (g,g,h) slot: the action property
  {
    Verdict v = Verdict::PASS;
    std::string w;
    for (std::size_t i = 0; i < s.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < s.dim_g && v == Verdict::PASS; ++j)
        for (std::size_t k = 0; k < s.dim_h; ++k) {
          ConstVec lhs = apply_table(s.bracket_gh, detail::basis_vec(s.dim_g, i),
                                     s.bracket_gh[j][k], s.dim_h);
          lhs = sub(lhs, apply_table(s.bracket_gh, detail::basis_vec(s.dim_g, j),
                                     s.bracket_gh[i][k], s.dim_h));
          ConstVec rhs = apply_table(s.bracket_gh, s.bracket_gg[i][j],
                                     detail::basis_vec(s.dim_h, k), s.dim_h);
          if (!vec_zero(sub(lhs, rhs))) {
            v = Verdict::FAIL;
            w = "(v" + std::to_string(i + 1) + ",v" + std::to_string(j + 1) + ",w" +
                std::to_string(k + 1) + ")";
            break;
          }
        }
    out.push_back({"gh_action_jacobi", v, w});
  }

  // delta is a degree 1 derivation: delta([v,w]) = [v, delta w]
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < s.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < s.dim_h; ++j) {
        ConstVec lhs = s.delta_of(s.bracket_gh[i][j]);
        ConstVec rhs = apply_table(s.bracket_gg, detail::basis_vec(s.dim_g, i), s.delta[j],
                                   s.dim_g);
        if (!vec_zero(sub(lhs, rhs))) {
          v = Verdict::FAIL;
          wit = "(v" + std::to_string(i + 1) + ",w" + std::to_string(j + 1) + ")";
          break;
        }
      }
    out.push_back({"delta_derivation", v, wit});
  }

  // derivation in the (h,h) slot: (delta w) . w~ = -(delta w~) . w
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < s.dim_h && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < s.dim_h; ++j) {
        ConstVec lhs = apply_table(s.bracket_gh, s.delta[i], detail::basis_vec(s.dim_h, j),
                                   s.dim_h);
        ConstVec rhs = apply_table(s.bracket_gh, s.delta[j], detail::basis_vec(s.dim_h, i),
                                   s.dim_h);
        if (!vec_zero(add(lhs, rhs))) {
          v = Verdict::FAIL;
          wit = "(w" + std::to_string(i + 1) + ",w" + std::to_string(j + 1) + ")";
          break;
        }
      }
    out.push_back({"delta_peiffer_antisymmetry", v, wit});
  }

  // delta^2 = 0 holds for degree reasons (delta of g lands in degree +1 = 0)
  out.push_back({"delta_squared_zero", Verdict::PASS, "automatic by degree"});
  return out;
}

inline bool all_pass(const std::vector<AuditResult>& rs) {
  for (const auto& r : rs)
    if (r.verdict != Verdict::PASS) return false;
  return true;
}

inline std::vector<AuditResult> audit_crossed_module(const CrossedModuleSpec& cm) {
  std::vector<AuditResult> out;
  detail::check_antisym(cm.lie_h, cm.dim_h, "h", out);
  detail::check_jacobi(cm.lie_h, cm.dim_h, "h", out);
  detail::check_antisym(cm.lie_g, cm.dim_g, "g", out);
  detail::check_jacobi(cm.lie_g, cm.dim_g, "g", out);

  // delta is a Lie algebra morphism
  {
    Verdict v = Verdict::PASS;
    for (std::size_t i = 0; i < cm.dim_h && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < cm.dim_h; ++j) {
        ConstVec lhs = zero_vec(cm.dim_g);
        for (std::size_t k = 0; k < cm.dim_h; ++k)
          lhs = add(lhs, scale(cm.lie_h[i][j][k], cm.delta_map[k]));
        ConstVec rhs = apply_table(cm.lie_g, cm.delta_map[i], cm.delta_map[j], cm.dim_g);
        if (!vec_zero(sub(lhs, rhs))) {
          v = Verdict::FAIL;
          break;
        }
      }
    out.push_back({"delta_morphism", v, ""});
  }

  // lambda is a Lie algebra action: lambda([v1,v2]) = [lambda(v1), lambda(v2)]
  {
    Verdict v = Verdict::PASS;
    for (std::size_t i = 0; i < cm.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < cm.dim_g && v == Verdict::PASS; ++j)
        for (std::size_t k = 0; k < cm.dim_h; ++k) {
          ConstVec lhs = apply_table(cm.lambda, cm.lie_g[i][j], detail::basis_vec(cm.dim_h, k),
                                     cm.dim_h);
          ConstVec rhs = apply_table(cm.lambda, detail::basis_vec(cm.dim_g, i),
                                     cm.lambda[j][k], cm.dim_h);
          rhs = sub(rhs, apply_table(cm.lambda, detail::basis_vec(cm.dim_g, j),
                                     cm.lambda[i][k], cm.dim_h));
          if (!vec_zero(sub(lhs, rhs))) {
            v = Verdict::FAIL;
            break;
          }
        }
    out.push_back({"lambda_action", v, ""});
  }

  // lambda acts by derivations of the h bracket
  {
    Verdict v = Verdict::PASS;
    for (std::size_t i = 0; i < cm.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < cm.dim_h && v == Verdict::PASS; ++j)
        for (std::size_t k = 0; k < cm.dim_h; ++k) {
          ConstVec lhs = apply_table(cm.lambda, detail::basis_vec(cm.dim_g, i),
                                     cm.lie_h[j][k], cm.dim_h);
          ConstVec rhs =
              apply_table(cm.lie_h, cm.lambda[i][j], detail::basis_vec(cm.dim_h, k), cm.dim_h);
          rhs = add(rhs, apply_table(cm.lie_h, detail::basis_vec(cm.dim_h, j), cm.lambda[i][k],
                                     cm.dim_h));
          if (!vec_zero(sub(lhs, rhs))) {
            v = Verdict::FAIL;
            break;
          }
        }
    out.push_back({"lambda_derivation", v, ""});
  }

  // lambda(delta w) = [w, .]_h
  {
    Verdict v = Verdict::PASS;
    for (std::size_t i = 0; i < cm.dim_h && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < cm.dim_h; ++j) {
        ConstVec lhs =
            apply_table(cm.lambda, cm.delta_map[i], detail::basis_vec(cm.dim_h, j), cm.dim_h);
        if (!vec_zero(sub(lhs, cm.lie_h[i][j]))) {
          v = Verdict::FAIL;
          break;
        }
      }
    out.push_back({"lambda_of_delta", v, ""});
  }

  // delta(lambda(v) w) = [v, delta w]_g
  {
    Verdict v = Verdict::PASS;
    for (std::size_t i = 0; i < cm.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < cm.dim_h; ++j) {
        ConstVec lhs = zero_vec(cm.dim_g);
        for (std::size_t k = 0; k < cm.dim_h; ++k)
          lhs = add(lhs, scale(cm.lambda[i][j][k], cm.delta_map[k]));
        ConstVec dwj = cm.delta_map[j];
        ConstVec rhs = apply_table(cm.lie_g, detail::basis_vec(cm.dim_g, i), dwj, cm.dim_g);
        if (!vec_zero(sub(lhs, rhs))) {
          v = Verdict::FAIL;
          break;
        }
      }
    out.push_back({"delta_equivariance", v, ""});
  }
  return out;
}

// The crossed-module correspondence, constructive direction: [w1,w2]_delta = [delta w1, w2].
inline CrossedModuleSpec dgla_to_crossed_module(const DGLASpec& s) {
  if (!all_pass(audit_dgla(s)))
    throw std::invalid_argument("dgla_to_crossed_module: input fails the DGLA audit");
  CrossedModuleSpec cm;
  cm.dim_h = s.dim_h;
  cm.dim_g = s.dim_g;
  cm.lie_g = s.bracket_gg;
  cm.lambda = s.bracket_gh;
  cm.delta_map = s.delta;
  cm.lie_h = zero_table(s.dim_h, s.dim_h, s.dim_h);
  for (std::size_t i = 0; i < s.dim_h; ++i)
    for (std::size_t j = 0; j < s.dim_h; ++j)
      cm.lie_h[i][j] =
          apply_table(s.bracket_gh, s.delta[i], detail::basis_vec(s.dim_h, j), s.dim_h);
  return cm;
}

// The inverse direction forgets the h bracket.
inline DGLASpec crossed_module_to_dgla(const CrossedModuleSpec& cm) {
  DGLASpec s = DGLASpec::make(cm.dim_h, cm.dim_g);
  s.bracket_gg = cm.lie_g;
  s.bracket_gh = cm.lambda;
  s.delta = cm.delta_map;
  return s;
}

// The semidirect product bracket on h x g:
// [(w1,v1),(w2,v2)] = ([delta w1, w2] + [v1,w2] - [v2,w1], [v1,v2]).
inline BracketTable semidirect_bracket(const CrossedModuleSpec& cm) {
  std::size_t n = cm.dim_h + cm.dim_g;
  BracketTable t = zero_table(n, n, n);
  auto embed_h = [&](const ConstVec& w) {
    ConstVec r = zero_vec(n);
    for (std::size_t i = 0; i < cm.dim_h; ++i) r[i] = w[i];
    return r;
  };
  auto embed_g = [&](const ConstVec& v) {
    ConstVec r = zero_vec(n);
    for (std::size_t i = 0; i < cm.dim_g; ++i) r[cm.dim_h + i] = v[i];
    return r;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ConstVec w1 = zero_vec(cm.dim_h), v1 = zero_vec(cm.dim_g);
      ConstVec w2 = zero_vec(cm.dim_h), v2 = zero_vec(cm.dim_g);
      if (i < cm.dim_h)
        w1[i] = Rational(1);
      else
        v1[i - cm.dim_h] = Rational(1);
      if (j < cm.dim_h)
        w2[j] = Rational(1);
      else
        v2[j - cm.dim_h] = Rational(1);
      ConstVec wh = apply_table(cm.lie_h, w1, w2, cm.dim_h);
      wh = add(wh, apply_table(cm.lambda, v1, w2, cm.dim_h));
      wh = sub(wh, apply_table(cm.lambda, v2, w1, cm.dim_h));
      ConstVec vg = apply_table(cm.lie_g, v1, v2, cm.dim_g);
      t[i][j] = add(embed_h(wh), embed_g(vg));
    }
  return t;
}

// Lie-Poisson bivector of structure constants on the dual: pi^{ij} = sum_k
// c_{ij}^k x_k.
inline PoissonBivector lie_poisson_bivector(const BracketTable& gg, const ContextPtr& ctx) {
  PoissonBivector pi(ctx);
  std::size_t n = gg.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Polynomial p(ctx);
      for (std::size_t k = 0; k < n; ++k)
        p += Polynomial::variable(ctx, k) * gg[i][j][k];
      pi.set(i, j, p);
    }
  return pi;
}

// ---------------------------------------------------------------------------
// Moment data on a Poisson manifold.

struct ActionData {
  std::vector<Polynomial> J0;      // components of J0: M -> h*
  std::vector<GradedFunction> J1;  // images of the g basis, degree-1 functions
  PoissonBivector pi;
};

inline std::vector<AuditResult> audit_action(const ActionData& data, const DGLASpec& spec) {
  std::vector<AuditResult> out;
  GradedFunction s = data.pi.to_graded();
  const ContextPtr& ctx = data.pi.context();

  auto j1_of = [&](const ConstVec& v) {
    GradedFunction r(ctx);
    for (std::size_t k = 0; k < spec.dim_g; ++k)
      if (!is_zero(v[k])) r += v[k] * data.J1[k];
    return r;
  };
  auto j0_of = [&](const ConstVec& w) {
    Polynomial r(ctx);
    for (std::size_t k = 0; k < spec.dim_h; ++k)
      if (!is_zero(w[k])) r += data.J0[k] * w[k];
    return r;
  };

  // J1 is a Lie algebra action: {J1 v, J1 v~} = J1[v,v~]
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < spec.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < spec.dim_g; ++j) {
        GradedFunction lhs = schouten_bracket(data.J1[i], data.J1[j]);
        if (lhs != j1_of(spec.bracket_gg[i][j])) {
          v = Verdict::FAIL;
          wit = "(v" + std::to_string(i + 1) + ",v" + std::to_string(j + 1) + ")";
          break;
        }
      }
    out.push_back({"J1_lie_action", v, wit});
  }

  // g-equivariance of J0: (J1 v)(J0 w) = J0([v,w])
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < spec.dim_g && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < spec.dim_h; ++j) {
        Polynomial lhs = apply_field(data.J1[i], data.J0[j]);
        if (lhs != j0_of(spec.bracket_gh[i][j])) {
          v = Verdict::FAIL;
          wit = "(v" + std::to_string(i + 1) + ",w" + std::to_string(j + 1) + ")";
          break;
        }
      }
    out.push_back({"J0_equivariance", v, wit});
  }

  // moment condition: J1(delta w) = X_{J0 w}
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t j = 0; j < spec.dim_h; ++j) {
      GradedFunction lhs = j1_of(spec.delta[j]);
      GradedFunction rhs = hamiltonian_field(s, data.J0[j]);
      if (lhs != rhs) {
        v = Verdict::FAIL;
        wit = "w" + std::to_string(j + 1);
        break;
      }
    }
    out.push_back({"moment_condition", v, wit});
  }

  // the action is by Poisson vector fields: L_{J1 v} pi = 0
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < spec.dim_g; ++i)
      if (!lie_derivative_bivector(data.J1[i], data.pi).is_zero()) {
        v = Verdict::FAIL;
        wit = "v" + std::to_string(i + 1);
        break;
      }
    out.push_back({"poisson_vector_fields", v, wit});
  }

  // delta(h)-equivariance, equivalently J0 is a Poisson map into h* with the
  // bracket [w,w~]_delta; audited on the delta-images of the h basis
  {
    Verdict v = Verdict::PASS;
    std::string wit;
    for (std::size_t i = 0; i < spec.dim_h && v == Verdict::PASS; ++i)
      for (std::size_t j = 0; j < spec.dim_h; ++j) {
        Polynomial lhs = derived_bracket(s, data.J0[i], data.J0[j]);
        ConstVec wd = apply_table(spec.bracket_gh, spec.delta[i],
                                  detail::basis_vec(spec.dim_h, j), spec.dim_h);
        if (lhs != j0_of(wd)) {
          v = Verdict::FAIL;
          wit = "(w" + std::to_string(i + 1) + ",w" + std::to_string(j + 1) + ")";
          break;
        }
      }
    out.push_back({"J0_poisson_map", v, wit});
  }
  return out;
}

// D = ker (J0)_* with infinitesimal invariance of D under the g action.
struct DistributionReport {
  PolyMatrix D;
  Verdict submersion = Verdict::UNKNOWN;
  Verdict invariance = Verdict::UNKNOWN;
  std::string witness;
};

inline DistributionReport compute_D_and_invariance(const ActionData& data,
                                                   const ProbeOptions& opt = {}) {
  DistributionReport rep;
  const ContextPtr& ctx = data.pi.context();
  PolyMatrix jac;
  for (const auto& j0 : data.J0) {
    std::vector<Polynomial> row;
    for (std::size_t i = 0; i < ctx->size(); ++i) row.push_back(j0.diff(i));
    jac.push_back(std::move(row));
  }
  // submersion at sampled points
  rep.submersion = Verdict::PASS;
  for (const auto& pt : gspr::sample_points(ctx->size(), opt.samples, opt.seed)) {
    if (rank(eval_matrix(jac, pt)) != data.J0.size()) {
      rep.submersion = Verdict::FAIL;
      rep.witness = "J0 is not a submersion at a sampled point";
      break;
    }
  }
  if (rep.submersion != Verdict::PASS) return rep;

  rep.D = generic_nullspace(jac);
  // infinitesimal invariance: < d(J0 w), [J1 v, X] > = 0 for D-basis X
  rep.invariance = Verdict::PASS;
  for (const auto& j1 : data.J1) {
    auto j1c = field_components(j1);
    for (const auto& x : rep.D) {
      auto comm = field_commutator(j1c, x, ctx);
      for (std::size_t w = 0; w < data.J0.size(); ++w) {
        Polynomial pairing(ctx);
        for (std::size_t i = 0; i < ctx->size(); ++i)
          pairing += data.J0[w].diff(i) * comm[i];
        if (!pairing.is_zero()) {
          rep.invariance = Verdict::FAIL;
          rep.witness = "pairing d(J0_" + std::to_string(w + 1) + ") with [J1, D] = " +
                        pairing.str();
          return rep;
        }
      }
    }
  }
  return rep;
}

// Graph-form solver for the zero set of polynomial constraints: each
// constraint must have some variable occurring linearly with a constant
// coefficient and nowhere else in that constraint.
inline void solve_zero_set(SubmanifoldSpec& spec, std::vector<Polynomial> constraints) {
  for (auto& p : constraints) p = spec.restrict_even(p);
  const ContextPtr& ctx = spec.context();
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = constraints.begin(); it != constraints.end(); ++it) {
      if (it->is_zero()) {
        constraints.erase(it);
        progress = true;
        break;
      }
      for (std::size_t v = 0; v < ctx->size(); ++v) {
        if (!spec.is_retained(v) || !it->depends_on(v)) continue;
        Polynomial dv = it->diff(v);
        if (!dv.is_constant() || dv.is_zero()) continue;
        Rational c = dv.constant_value();
        Polynomial rest = *it - Polynomial::variable(ctx, v) * c;
        if (rest.depends_on(v)) continue;
        spec.solve_even(v, rest * (Rational(-1) / c));
        constraints.erase(it);
        for (auto& q : constraints) q = spec.restrict_even(q);
        progress = true;
        break;
      }
      if (progress) break;
    }
  }
  if (!constraints.empty())
    throw std::invalid_argument(
        "zero set is not in solvable graph form: leftover constraint " +
        constraints.front().str());
}

// Marsden-Weinstein quotient at zero, routed through the coisotropic engine: C = J0^{-1}(0)
// in graph form, E = span{J1 v}|_C.
inline ReductionReport mw_quotient(const ActionData& data, const ProbeOptions& opt = {}) {
  SubmanifoldSpec c(data.pi.context());
  solve_zero_set(c, data.J0);
  attach_distribution(c, data.J1);
  return check_coisotropic(c, data.pi, opt);
}

}  // namespace gspr
