#pragma once

#include "gspr/bivector.hpp"
#include "gspr/submanifold.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gspr {

enum class Theorem { COISO, MARSDEN_RATIU, A1, A2, DESCENT };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::COISO: return "coisotropic";
    case Theorem::MARSDEN_RATIU: return "marsden_ratiu";
    case Theorem::A1: return "A1";
    case Theorem::A2: return "A2";
    default: return "descent";
  }
}

struct ConditionResult {
  std::string id;
  Verdict verdict = Verdict::UNKNOWN;
  std::string witness;  // failure expression / explanation
  std::string frame;    // generator frame the check ran on, when relevant
};

struct ReductionReport {
  Theorem theorem = Theorem::DESCENT;
  std::vector<ConditionResult> conditions;
  std::optional<PoissonBivector> reduced;
  std::optional<GradedFunction> defect;
  std::map<std::string, Polynomial> lift_table;
  std::string error;

  void add(std::string id, Verdict v, std::string witness = "", std::string frame = "") {
    conditions.push_back({std::move(id), v, std::move(witness), std::move(frame)});
  }
  void add(std::string id, const SpanResult& r, std::string frame = "") {
    conditions.push_back({std::move(id), r.verdict, r.witness, std::move(frame)});
  }

  Verdict overall() const {
    Verdict v = Verdict::PASS;
    for (const auto& c : conditions) {
      if (c.verdict == Verdict::FAIL) return Verdict::FAIL;
      if (c.verdict == Verdict::UNKNOWN) v = Verdict::UNKNOWN;
    }
    return v;
  }
  bool all_pass() const { return overall() == Verdict::PASS && error.empty(); }
};

// ---------------------------------------------------------------------------
// Small exact linear solver for polynomial-unknown ansatz problems: each
// unknown is a polynomial supported on monomials of bounded degree in the
// retained coordinates, and equations are polynomial identities linear in the
// unknowns.  Solutions are canonical (free coefficients zero), which makes
// lifts and frames deterministic.

namespace detail {

inline void enumerate_monomials(const std::vector<std::size_t>& vars, std::size_t pos,
                                unsigned budget, Monomial& current, std::size_t arity,
                                std::vector<Monomial>& out) {
  if (pos == vars.size()) {
    out.push_back(current);
    return;
  }
  for (unsigned e = 0; e <= budget; ++e) {
    current[vars[pos]] = e;
    enumerate_monomials(vars, pos + 1, budget - e, current, arity, out);
  }
  current[vars[pos]] = 0;
}

inline std::vector<Monomial> monomials_up_to(const ContextPtr& ctx,
                                             const std::vector<std::size_t>& vars, unsigned deg) {
  std::vector<Monomial> out;
  Monomial current(ctx->size(), 0);
  enumerate_monomials(vars, 0, deg, current, ctx->size(), out);
  return out;
}

}  // namespace detail

class LinearPolySystem {
 public:
  LinearPolySystem(ContextPtr ctx, std::vector<std::size_t> vars, unsigned deg)
      : ctx_(std::move(ctx)), basis_(detail::monomials_up_to(ctx_, vars, deg)) {}

  std::size_t add_unknown() { return nslots_++; }

  // sum_k mult_k * U_{slot_k} == rhs, as a polynomial identity.
  void add_equation(const std::vector<std::pair<std::size_t, Polynomial>>& lhs,
                    const Polynomial& rhs) {
    equations_.push_back({lhs, rhs});
  }

  std::size_t basis_size() const { return basis_.size(); }

  std::optional<std::vector<Polynomial>> solve() const {
    const std::size_t ncols = nslots_ * basis_.size();
    if (equations_.empty() || ncols == 0)
      return std::vector<Polynomial>(nslots_, Polynomial::zero(ctx_));
    RatMatrix a;
    std::vector<Rational> b;
    for (const auto& [lhs, rhs] : equations_) {
      std::map<Monomial, std::size_t, detail::GrlexLess> row_of;
      auto row_for = [&](const Monomial& m) {
        auto it = row_of.find(m);
        if (it != row_of.end()) return it->second;
        std::size_t r = a.size();
        row_of.emplace(m, r);
        a.emplace_back(ncols, Rational(0));
        b.emplace_back(0);
        return r;
      };
      for (const auto& [slot, mult] : lhs)
        for (const auto& [mm, mc] : mult.terms())
          for (std::size_t k = 0; k < basis_.size(); ++k) {
            Monomial prod = mm;
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += basis_[k][i];
            a[row_for(prod)][slot * basis_.size() + k] += mc;
          }
      for (const auto& [mm, mc] : rhs.terms()) b[row_for(mm)] += mc;
    }
    if (a.empty()) return std::vector<Polynomial>(nslots_, Polynomial::zero(ctx_));
    auto x = solve_rational(std::move(a), std::move(b));
    if (!x) return std::nullopt;
    std::vector<Polynomial> out;
    out.reserve(nslots_);
    for (std::size_t s = 0; s < nslots_; ++s) {
      Polynomial p(ctx_);
      for (std::size_t k = 0; k < basis_.size(); ++k) p.add_term(basis_[k], (*x)[s * basis_.size() + k]);
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  ContextPtr ctx_;
  std::vector<Monomial> basis_;
  std::size_t nslots_ = 0;
  std::vector<std::pair<std::vector<std::pair<std::size_t, Polynomial>>, Polynomial>> equations_;
};

// ---------------------------------------------------------------------------
// Shared geometry of a reduction problem.

struct Geometry {
  PolyMatrix TC;
  PolyMatrix E;        // along C
  PolyMatrix F;        // TC /\ E
  PolyMatrix E_circ;   // annihilator of E along C
  PolyMatrix NstarC;   // conormal of C
  std::vector<GradedFunction> E_ambient;  // generator fields before restriction
};

inline Geometry compute_geometry(const SubmanifoldSpec& c) {
  Geometry g;
  const auto& ctx = c.context();
  g.TC = TC_matrix(c);
  g.E = E_matrix(c);
  g.F = c.solved_even().empty() ? g.E : intersect_spans(g.TC, g.E, ctx);
  g.E_circ = annihilator(g.E, ctx);
  g.NstarC = NstarC_matrix(c);
  g.E_ambient = c.degree1_constraints();
  return g;
}

inline PolyMatrix stack(const PolyMatrix& a, const PolyMatrix& b) {
  PolyMatrix m = a;
  m.insert(m.end(), b.begin(), b.end());
  return m;
}

// Is the degree-2 function L, already even-restricted to C, a section of
// E /\ TM|_C?  Exact test: pairings with all pairs of E-annihilator covectors
// must vanish identically.
inline SpanResult in_E_wedge_TM(const GradedFunction& l, const Geometry& g,
                                const SubmanifoldSpec& c) {
  PoissonBivector lb = PoissonBivector::from_graded(l);
  for (std::size_t i = 0; i < g.E_circ.size(); ++i)
    for (std::size_t j = i + 1; j < g.E_circ.size(); ++j) {
      Polynomial p = c.restrict_even(lb.pair_covectors(g.E_circ[i], g.E_circ[j]));
      if (!p.is_zero())
        return {Verdict::FAIL, "pairing with E-annihilator covectors " + std::to_string(i + 1) +
                                   "," + std::to_string(j + 1) + " = " + p.str()};
    }
  return {Verdict::PASS, ""};
}

inline std::vector<Polynomial> restrict_row(const std::vector<Polynomial>& row,
                                            const SubmanifoldSpec& c) {
  std::vector<Polynomial> out;
  out.reserve(row.size());
  for (const auto& p : row) out.push_back(c.restrict_even(p));
  return out;
}

inline int default_degree_bound(const PoissonBivector& pi, const SubmanifoldSpec& c) {
  unsigned dpi = 0, dcon = 0;
  for (const auto& [k, p] : pi.upper()) dpi = std::max(dpi, p.total_degree());
  for (const auto& [idx, phi] : c.solved_even()) dcon = std::max(dcon, phi.total_degree());
  for (const auto& [idx, img] : c.theta_solved())
    for (const auto& [s, p] : img.terms()) dcon = std::max(dcon, p.total_degree());
  for (const auto& g : c.extra_generators())
    for (const auto& [s, p] : g.terms()) dcon = std::max(dcon, p.total_degree());
  return static_cast<int>(dpi + dcon) + 2;
}

// ---------------------------------------------------------------------------
// Frame solvers.

// Extend a tangent field f (a row along C) to an ambient field normalizing
// Gamma~(E): X = f + sum_a g_a V_a with the V_a supported on C.  Returns the
// correction fields' restrictions (full ambient components, coefficients in
// retained variables), or nullopt.
inline std::optional<std::vector<Polynomial>> normalizing_extension(
    const SubmanifoldSpec& c, const Geometry& g, const std::vector<Polynomial>& f, unsigned deg) {
  const auto& ctx = c.context();
  auto evens = c.even_constraints();

  // Direct check first: does f itself normalize?
  bool direct = true;
  for (const auto& e : g.E_ambient) {
    auto ec = field_components(e);
    auto comm = field_commutator(f, ec, ctx);
    for (std::size_t k = 0; k < g.E_circ.size() && direct; ++k) {
      Polynomial p(ctx);
      for (std::size_t i = 0; i < ctx->size(); ++i) p += g.E_circ[k][i] * comm[i];
      if (!c.restrict_even(p).is_zero()) direct = false;
    }
    if (!direct) break;
  }
  if (direct) return std::vector<Polynomial>{};  // no correction needed

  if (evens.empty()) return std::nullopt;

  LinearPolySystem sys(ctx, c.retained(), deg);
  // unknowns: V_a components, a over even constraints, i over coordinates
  std::vector<std::vector<std::size_t>> slot(evens.size(),
                                             std::vector<std::size_t>(ctx->size()));
  for (std::size_t a = 0; a < evens.size(); ++a)
    for (std::size_t i = 0; i < ctx->size(); ++i) slot[a][i] = sys.add_unknown();

  for (const auto& e : g.E_ambient) {
    auto ec = field_components(e);
    auto comm = field_commutator(f, ec, ctx);
    // [X,E] = [f,E] - sum_a E(g_a) V_a along C; require E_circ pairings vanish
    std::vector<Polynomial> e_of_g;
    for (const auto& ga : evens) {
      Polynomial v(ctx);
      for (std::size_t i = 0; i < ctx->size(); ++i) v += ec[i] * ga.diff(i);
      e_of_g.push_back(c.restrict_even(v));
    }
    for (std::size_t k = 0; k < g.E_circ.size(); ++k) {
      Polynomial rhs(ctx);
      for (std::size_t i = 0; i < ctx->size(); ++i) rhs += g.E_circ[k][i] * comm[i];
      rhs = c.restrict_even(rhs);
      std::vector<std::pair<std::size_t, Polynomial>> lhs;
      for (std::size_t a = 0; a < evens.size(); ++a)
        for (std::size_t i = 0; i < ctx->size(); ++i) {
          Polynomial mult = c.restrict_even(g.E_circ[k][i]) * e_of_g[a];
          if (!mult.is_zero()) lhs.emplace_back(slot[a][i], mult);
        }
      sys.add_equation(lhs, rhs);
    }
  }
  auto sol = sys.solve();
  if (!sol) return std::nullopt;
  // assemble the corrected field restricted to C: f - is not needed; caller
  // only needs the corrected commutator structure, so return full corrections
  std::vector<Polynomial> correction(ctx->size(), Polynomial::zero(ctx));
  // X = f + sum_a g_a V_a; along C the correction vanishes, but the
  // commutator picks up -E(g_a) V_a, which the solver has already matched.
  // Return V concatenated per constraint for reporting.
  std::vector<Polynomial> flat;
  for (std::size_t a = 0; a < evens.size(); ++a)
    for (std::size_t i = 0; i < ctx->size(); ++i) flat.push_back((*sol)[a * ctx->size() + i]);
  return flat;
}

// The frame of (N(I) /\ I)_1 used by the closure conditions: a family of
// normalizing extensions spanning F along C.  Returns ambient fields
// X = f + sum_a g_a V_a.
struct NormalizerFrame {
  std::vector<std::vector<Polynomial>> fields;  // ambient components
  std::string description;
  bool complete = true;
};

inline NormalizerFrame normalizer_frame_of_F(const SubmanifoldSpec& c, const Geometry& g,
                                             unsigned deg) {
  NormalizerFrame out;
  const auto& ctx = c.context();
  auto evens = c.even_constraints();
  if (g.F.empty()) {
    out.description = "empty frame (F = 0)";
    return out;
  }
  std::size_t idx = 0;
  for (const auto& f : g.F) {
    ++idx;
    auto corr = normalizing_extension(c, g, f, deg);
    if (!corr) {
      out.complete = false;
      out.description = "no normalizing extension of F-frame field " + std::to_string(idx) +
                        " at degree bound " + std::to_string(deg);
      return out;
    }
    std::vector<Polynomial> x = f;
    if (!corr->empty()) {
      for (std::size_t a = 0; a < evens.size(); ++a)
        for (std::size_t i = 0; i < ctx->size(); ++i)
          x[i] += evens[a] * (*corr)[a * ctx->size() + i];
    }
    out.fields.push_back(std::move(x));
  }
  out.description = "normalizing extensions of the " + std::to_string(g.F.size()) +
                    " F-frame fields (degree bound " + std::to_string(deg) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// Lift solver: q_hat = x_q + sum_a lambda_a g_a with d(q_hat) annihilating E
// along C.  Multipliers live on C with total degree <= deg; the canonical
// echelon solution at the smallest feasible degree is returned.

inline std::optional<Polynomial> solve_lift(const SubmanifoldSpec& c, const Geometry& g,
                                            std::size_t q, unsigned max_deg) {
  const auto& ctx = c.context();
  auto evens = c.even_constraints();
  for (unsigned deg = 0; deg <= max_deg; ++deg) {
    LinearPolySystem sys(ctx, c.retained(), deg);
    std::vector<std::size_t> slot;
    for (std::size_t a = 0; a < evens.size(); ++a) slot.push_back(sys.add_unknown());
    for (const auto& erow : g.E) {
      // <dx_q, e> + sum_a lambda_a <dg_a, e> = 0 along C
      Polynomial rhs = -c.restrict_even(erow[q]);
      std::vector<std::pair<std::size_t, Polynomial>> lhs;
      for (std::size_t a = 0; a < evens.size(); ++a) {
        Polynomial m(ctx);
        for (std::size_t i = 0; i < ctx->size(); ++i) m += erow[i] * evens[a].diff(i);
        m = c.restrict_even(m);
        if (!m.is_zero()) lhs.emplace_back(slot[a], m);
      }
      sys.add_equation(lhs, rhs);
    }
    auto sol = sys.solve();
    if (!sol) continue;
    Polynomial lift = Polynomial::variable(ctx, q);
    for (std::size_t a = 0; a < evens.size(); ++a) lift += (*sol)[a] * evens[a];
    return lift;
  }
  return std::nullopt;
}

// Quotient coordinates: declared, or all retained when F = 0, or the retained
// coordinates whose coordinate fields do not span F directions.
inline std::optional<std::vector<std::size_t>> effective_quotient_coords(
    const SubmanifoldSpec& c, const Geometry& g, const ProbeOptions& opt, std::string* why) {
  const auto& ctx = c.context();
  auto ret = c.retained();
  std::vector<std::size_t> q;
  if (c.quotient_coords()) {
    q = *c.quotient_coords();
  } else if (g.F.empty()) {
    q = ret;
  } else {
    for (std::size_t r : ret) {
      std::vector<Polynomial> coord(ctx->size(), Polynomial::zero(ctx));
      coord[r] = Polynomial::constant(ctx, Rational(1));
      if (in_span(coord, g.F, c, opt).verdict != Verdict::PASS) q.push_back(r);
    }
  }
  // flat-chart requirement: the complementary retained coordinate fields span
  // exactly F along C
  PolyMatrix complement;
  for (std::size_t r : ret) {
    if (std::find(q.begin(), q.end(), r) != q.end()) continue;
    std::vector<Polynomial> coord(ctx->size(), Polynomial::zero(ctx));
    coord[r] = Polynomial::constant(ctx, Rational(1));
    complement.push_back(std::move(coord));
  }
  if (complement.size() != g.F.size() ||
      (g.F.size() && (all_in_span(complement, g.F, c, opt).verdict != Verdict::PASS ||
                      all_in_span(g.F, complement, c, opt).verdict != Verdict::PASS))) {
    if (why)
      *why = "quotient chart is not flat: F is not spanned by the complementary retained "
             "coordinate fields";
    return std::nullopt;
  }
  return q;
}

// pi_bar^{ij} = restrict(derived_bracket(S, lift_i, lift_j)), expressed in the
// quotient coordinates.
inline ReductionReport reduce_bivector(const SubmanifoldSpec& c, const PoissonBivector& pi,
                                       const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::DESCENT;
  const auto& ctx = c.context();
  Geometry g = compute_geometry(c);

  std::string why;
  auto qopt = effective_quotient_coords(c, g, opt, &why);
  if (!qopt) {
    rep.error = why;
    return rep;
  }
  const auto& q = *qopt;

  unsigned bound = opt.degree_bound >= 0 ? static_cast<unsigned>(opt.degree_bound)
                                         : static_cast<unsigned>(default_degree_bound(pi, c));

  GradedFunction s = pi.to_graded();
  std::vector<Polynomial> lifts;
  for (std::size_t qi : q) {
    auto lift = solve_lift(c, g, qi, bound);
    if (!lift) {
      rep.error = "lift of " + ctx->name(qi) + " infeasible at degree bound " +
                  std::to_string(bound);
      return rep;
    }
    rep.lift_table[ctx->name(qi)] = *lift;
    lifts.push_back(std::move(*lift));
  }

  // quotient context keeps the original names
  std::vector<std::string> qnames;
  for (std::size_t qi : q) qnames.push_back(ctx->name(qi));
  auto qctx = make_context(qnames);

  PoissonBivector reduced(qctx);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      Polynomial entry = c.restrict(derived_bracket(s, lifts[i], lifts[j]));
      // F-basicness: the entry must not involve non-quotient coordinates
      for (std::size_t v = 0; v < ctx->size(); ++v) {
        if (std::find(q.begin(), q.end(), v) != q.end()) continue;
        if (entry.depends_on(v)) {
          rep.error = "bracket {" + ctx->name(q[i]) + "," + ctx->name(q[j]) +
                      "} is not basic: depends on " + ctx->name(v) +
                      " (hypothesis violation)";
          return rep;
        }
      }
      // remap to the quotient context
      Polynomial mapped(qctx);
      for (const auto& [m, coeff] : entry.terms()) {
        Monomial qm(q.size(), 0);
        for (std::size_t k = 0; k < q.size(); ++k) qm[k] = m[q[k]];
        mapped.add_term(qm, coeff);
      }
      reduced.set(i, j, mapped);
    }
  rep.reduced = reduced;
  rep.defect = jacobi_defect(reduced);
  return rep;
}

// Read-off route: read the reduced bivector directly off restrict(S,C) when
// the restriction only involves quotient-coordinate thetas.
inline ReductionReport reduce_bivector_onC(const GradedFunction& s, const SubmanifoldSpec& c,
                                           const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::DESCENT;
  const auto& ctx = c.context();
  Geometry g = compute_geometry(c);
  std::string why;
  auto qopt = effective_quotient_coords(c, g, opt, &why);
  if (!qopt) {
    rep.error = why;
    return rep;
  }
  const auto& q = *qopt;

  GradedFunction srest = c.restrict(s);
  if (!srest.is_homogeneous(2) && !srest.is_zero()) {
    rep.error = "restriction of S is not homogeneous of degree 2";
    return rep;
  }
  OddSet allowed = 0;
  for (std::size_t qi : q) allowed |= OddSet(1) << qi;
  for (const auto& [set, p] : srest.terms()) {
    if (set & ~allowed) {
      rep.error =
          "restriction of S involves non-quotient odd coordinates; use the lift route";
      return rep;
    }
    for (std::size_t v = 0; v < ctx->size(); ++v)
      if (std::find(q.begin(), q.end(), v) == q.end() && p.depends_on(v)) {
        rep.error = "restriction of S depends on non-quotient coordinate " + ctx->name(v);
        return rep;
      }
  }

  std::vector<std::string> qnames;
  for (std::size_t qi : q) qnames.push_back(ctx->name(qi));
  auto qctx = make_context(qnames);
  PoissonBivector reduced(qctx);
  PoissonBivector amb = srest.is_zero() ? PoissonBivector(ctx) : PoissonBivector::from_graded(srest);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      Polynomial entry = amb.component(q[i], q[j]);
      Polynomial mapped(qctx);
      for (const auto& [m, coeff] : entry.terms()) {
        Monomial qm(q.size(), 0);
        for (std::size_t k = 0; k < q.size(); ++k) qm[k] = m[q[k]];
        mapped.add_term(qm, coeff);
      }
      reduced.set(i, j, mapped);
    }
  rep.reduced = reduced;
  rep.defect = jacobi_defect(reduced);
  return rep;
}

// ---------------------------------------------------------------------------
// Condition audits.

// Coisotropic reduction audit: E inside TC, E involutive, sharp N*C inside E, and the
// closure condition via (L_X pi)|_C in E /\ TM|_C on the E-generator frame.
inline ReductionReport check_coisotropic(const SubmanifoldSpec& c, const PoissonBivector& pi,
                                         const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::COISO;
  Geometry g = compute_geometry(c);

  rep.add("E_subset_TC", all_in_span(g.E, g.TC, c, opt));
  rep.add("E_involutive", involutive(g.E, c, opt));

  SpanResult sharp_ok{Verdict::PASS, ""};
  for (const auto& xi : g.NstarC) {
    auto v = restrict_row(pi.sharp(xi), c);
    auto r = in_span(v, g.E, c, opt);
    if (r.verdict != Verdict::PASS) {
      sharp_ok = r;
      break;
    }
  }
  if (g.NstarC.empty()) sharp_ok = {Verdict::PASS, ""};
  rep.add("sharpNC_in_E", sharp_ok);

  SpanResult closure{Verdict::PASS, ""};
  for (const auto& e : g.E_ambient) {
    GradedFunction l = c.restrict_even(lie_derivative_bivector(e, pi));
    auto r = in_E_wedge_TM(l, g, c);
    if (r.verdict != Verdict::PASS) {
      closure = r;
      break;
    }
  }
  rep.add("closure_LXpi_in_EwedgeTM", closure, "E generator frame");

  if (rep.overall() == Verdict::PASS) {
    auto red = reduce_bivector(c, pi, opt);
    rep.reduced = red.reduced;
    rep.defect = red.defect;
    rep.lift_table = red.lift_table;
    if (!red.error.empty()) rep.error = red.error;
  }
  return rep;
}

// Descent audit: condi1 and condi2, plus the halfnorm sufficient condition.
// This is the descent audit used by the reduce command; it emits the bivector
// whenever the two descent conditions hold.
inline ReductionReport check_descent(const SubmanifoldSpec& c, const PoissonBivector& pi,
                                     const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::DESCENT;
  Geometry g = compute_geometry(c);
  const auto& ctx = c.context();

  rep.add("F_constant_rank", rank_along_C(g.F, c, opt).constant);
  rep.add("F_involutive", involutive(g.F, c, opt));

  // condi1: sharp E_circ inside TC + E
  PolyMatrix tce = stack(g.TC, g.E);
  SpanResult condi1{Verdict::PASS, ""};
  for (const auto& xi : g.E_circ) {
    auto r = in_span(restrict_row(pi.sharp(xi), c), tce, c, opt);
    if (r.verdict != Verdict::PASS) {
      condi1 = r;
      break;
    }
  }
  rep.add("condi1", condi1);

  // condi2 via the tensorial surrogate on the normalizer frame of F
  unsigned bound = opt.degree_bound >= 0 ? static_cast<unsigned>(opt.degree_bound)
                                         : static_cast<unsigned>(default_degree_bound(pi, c));
  auto frame = normalizer_frame_of_F(c, g, bound);
  if (!frame.complete) {
    rep.add("condi2", Verdict::UNKNOWN, frame.description, frame.description);
  } else {
    SpanResult condi2{Verdict::PASS, ""};
    for (const auto& x : frame.fields) {
      GradedFunction l =
          c.restrict_even(lie_derivative_bivector(vector_field(ctx, x), pi));
      auto r = in_E_wedge_TM(l, g, c);
      if (r.verdict != Verdict::PASS) {
        condi2 = r;
        break;
      }
    }
    rep.add("condi2", condi2, frame.description);
  }

  // halfnorm: sharp TC_circ (= N*C span) inside E -- sufficient for Jacobi
  SpanResult halfnorm{Verdict::PASS, ""};
  for (const auto& xi : g.NstarC) {
    auto r = in_span(restrict_row(pi.sharp(xi), c), g.E, c, opt);
    if (r.verdict != Verdict::PASS) {
      halfnorm = r;
      break;
    }
  }
  rep.add("halfnorm_sharpTCcirc_in_E", halfnorm);

  // emit whenever S descends (condi1 + condi2), even if Jacobi may fail;
  // the defect is recorded either way
  bool descends = true;
  for (const auto& cond : rep.conditions)
    if ((cond.id == "condi1" || cond.id == "condi2") && cond.verdict != Verdict::PASS)
      descends = false;
  if (descends) {
    auto red = reduce_bivector(c, pi, opt);
    rep.reduced = red.reduced;
    rep.defect = red.defect;
    rep.lift_table = red.lift_table;
    if (!red.error.empty()) rep.error = red.error;
  }
  return rep;
}

// The Marsden-Ratiu audit: F constant rank and
// involutive, sharp E_circ inside TC, and the closure condition condi2.
inline ReductionReport check_marsden_ratiu(const SubmanifoldSpec& c, const PoissonBivector& pi,
                                           const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::MARSDEN_RATIU;
  Geometry g = compute_geometry(c);
  const auto& ctx = c.context();

  rep.add("F_constant_rank", rank_along_C(g.F, c, opt).constant);
  rep.add("F_involutive", involutive(g.F, c, opt));

  SpanResult sharp_ok{Verdict::PASS, ""};
  for (const auto& xi : g.E_circ) {
    auto r = in_span(restrict_row(pi.sharp(xi), c), g.TC, c, opt);
    if (r.verdict != Verdict::PASS) {
      sharp_ok = r;
      break;
    }
  }
  rep.add("sharpEcirc_in_TC", sharp_ok);

  unsigned bound = opt.degree_bound >= 0 ? static_cast<unsigned>(opt.degree_bound)
                                         : static_cast<unsigned>(default_degree_bound(pi, c));
  auto frame = normalizer_frame_of_F(c, g, bound);
  if (!frame.complete) {
    rep.add("closure_condi2", Verdict::UNKNOWN, frame.description, frame.description);
  } else {
    SpanResult condi2{Verdict::PASS, ""};
    for (const auto& x : frame.fields) {
      GradedFunction l = c.restrict_even(lie_derivative_bivector(vector_field(ctx, x), pi));
      auto r = in_E_wedge_TM(l, g, c);
      if (r.verdict != Verdict::PASS) {
        condi2 = r;
        break;
      }
    }
    rep.add("closure_condi2", condi2, frame.description);
  }

  if (rep.overall() == Verdict::PASS) {
    auto red = reduce_bivector(c, pi, opt);
    rep.reduced = red.reduced;
    rep.defect = red.defect;
    rep.lift_table = red.lift_table;
    if (!red.error.empty()) rep.error = red.error;
  }
  return rep;
}

// Stage data: the enclosing coisotropic A = D°[1] with its distribution D.
struct StageSpec {
  SubmanifoldSpec A;
  std::vector<GradedFunction> D_gens;  // ambient degree-1 generator fields
};

// Reduction in stages, general form (A1).
inline ReductionReport check_stages_A1(const SubmanifoldSpec& c, const StageSpec& stage,
                                       const PoissonBivector& pi, const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::A1;
  const auto& ctx = c.context();
  Geometry g = compute_geometry(c);

  // preconditions: C inside A, D|_C inside E
  SpanResult c_in_a{Verdict::PASS, ""};
  for (const auto& ga : stage.A.even_constraints())
    if (!c.restrict(ga).is_zero())
      c_in_a = {Verdict::FAIL, "A-constraint " + ga.str() + " does not vanish on C"};
  rep.add("C_subset_A", c_in_a);

  PolyMatrix d_at_c = distribution_matrix(c, stage.D_gens);
  rep.add("D_at_C_in_E", all_in_span(d_at_c, g.E, c, opt));

  // ctcrk: D|_C /\ TC constant rank
  PolyMatrix d_cap_tc = intersect_spans(d_at_c, g.TC, ctx);
  rep.add("ctcrk", rank_along_C(d_cap_tc, c, opt).constant);

  // etark: E /\ TA|_C constant rank
  PolyMatrix ta_at_c;
  for (const auto& row : TC_matrix(stage.A)) ta_at_c.push_back(restrict_row(row, c));
  PolyMatrix e_cap_ta = intersect_spans(g.E, ta_at_c, ctx);
  rep.add("etark", rank_along_C(e_cap_ta, c, opt).constant);

  // prcond via the bracket surrogate on D-frame fields tangent to C.  The
  // frame fields must be genuine sections of D, so they are rebuilt as
  // coefficient combinations of the ambient D generators (tangency along C
  // holds by the intersection construction, and the surrogate value is
  // extension-independent within Gamma(D)).
  {
    SpanResult prcond{Verdict::PASS, ""};
    auto coeffs = intersection_coefficients(d_at_c, g.TC, ctx);
    std::vector<std::vector<Polynomial>> d_ambient;
    for (const auto& gen : stage.D_gens) d_ambient.push_back(field_components(gen));
    for (const auto& cvec : coeffs) {
      std::vector<Polynomial> y(ctx->size(), Polynomial::zero(ctx));
      for (std::size_t k = 0; k < d_ambient.size(); ++k)
        for (std::size_t i = 0; i < ctx->size(); ++i) y[i] += cvec[k] * d_ambient[k][i];
      for (const auto& v : e_cap_ta) {
        auto comm = field_commutator(v, y, ctx);
        auto r = in_span(restrict_row(comm, c), e_cap_ta, c, opt);
        if (r.verdict != Verdict::PASS) {
          prcond = r;
          prcond.witness = "[E/\\TA frame, D-frame]: " + r.witness;
          break;
        }
      }
      if (prcond.verdict != Verdict::PASS) break;
    }
    rep.add("prcond", prcond, "D-section frame of D /\\ TC");
  }

  // EEF via the condi2 surrogate on the F-normalizer frame
  unsigned bound = opt.degree_bound >= 0 ? static_cast<unsigned>(opt.degree_bound)
                                         : static_cast<unsigned>(default_degree_bound(pi, c));
  auto frame = normalizer_frame_of_F(c, g, bound);
  if (!frame.complete) {
    rep.add("EEF", Verdict::UNKNOWN, frame.description, frame.description);
  } else {
    SpanResult eef{Verdict::PASS, ""};
    for (const auto& x : frame.fields) {
      GradedFunction l = c.restrict_even(lie_derivative_bivector(vector_field(ctx, x), pi));
      auto r = in_E_wedge_TM(l, g, c);
      if (r.verdict != Verdict::PASS) {
        eef = r;
        break;
      }
    }
    rep.add("EEF", eef, frame.description);
  }

  // frameD: (L_X pi)|_C in E /\ TM|_C for the D-generator frame
  {
    SpanResult fd{Verdict::PASS, ""};
    for (const auto& d : stage.D_gens) {
      GradedFunction l = c.restrict_even(lie_derivative_bivector(d, pi));
      auto r = in_E_wedge_TM(l, g, c);
      if (r.verdict != Verdict::PASS) {
        fd = r;
        break;
      }
    }
    rep.add("frameD", fd, "D generator frame");
  }

  // ETCD: sharp E_circ inside TC + D|_C
  {
    PolyMatrix tcd = stack(g.TC, d_at_c);
    SpanResult etcd{Verdict::PASS, ""};
    for (const auto& xi : g.E_circ) {
      auto r = in_span(restrict_row(pi.sharp(xi), c), tcd, c, opt);
      if (r.verdict != Verdict::PASS) {
        etcd = r;
        break;
      }
    }
    rep.add("ETCD", etcd);
  }

  if (rep.overall() == Verdict::PASS) {
    auto red = reduce_bivector(c, pi, opt);
    rep.reduced = red.reduced;
    rep.defect = red.defect;
    rep.lift_table = red.lift_table;
    if (!red.error.empty()) rep.error = red.error;
  }
  return rep;
}

// Reduction in stages, minimal form (A2): F inside D|_C inside E, minimality TA|_C = TC + D|_C, ETCDdois and
// Liedercon; on PASS the reduced bivector is computed and its defect must be
// zero.
inline ReductionReport check_stages_A2(const SubmanifoldSpec& c, const StageSpec& stage,
                                       const PoissonBivector& pi, const ProbeOptions& opt = {}) {
  ReductionReport rep;
  rep.theorem = Theorem::A2;
  const auto& ctx = c.context();
  Geometry g = compute_geometry(c);

  SpanResult c_in_a{Verdict::PASS, ""};
  for (const auto& ga : stage.A.even_constraints())
    if (!c.restrict(ga).is_zero())
      c_in_a = {Verdict::FAIL, "A-constraint " + ga.str() + " does not vanish on C"};
  rep.add("C_subset_A", c_in_a);

  PolyMatrix d_at_c = distribution_matrix(c, stage.D_gens);
  rep.add("F_in_D", g.F.empty() ? SpanResult{Verdict::PASS, ""}
                                : all_in_span(g.F, d_at_c, c, opt));
  rep.add("D_in_E", all_in_span(d_at_c, g.E, c, opt));

  // minimality: TA|_C = TC + D|_C
  {
    PolyMatrix ta_at_c;
    for (const auto& row : TC_matrix(stage.A)) ta_at_c.push_back(restrict_row(row, c));
    PolyMatrix tcd = stack(g.TC, d_at_c);
    std::size_t r_ta = generic_rank(ta_at_c), r_tcd = generic_rank(tcd);
    if (r_ta != r_tcd) {
      rep.add("minimality_TA_eq_TC_plus_D", Verdict::FAIL,
              "rank TA|_C = " + std::to_string(r_ta) + " but rank (TC+D|_C) = " +
                  std::to_string(r_tcd));
    } else {
      auto inc1 = all_in_span(tcd, ta_at_c, c, opt);
      auto inc2 = all_in_span(ta_at_c, tcd, c, opt);
      Verdict v = inc1.verdict == Verdict::PASS && inc2.verdict == Verdict::PASS
                      ? Verdict::PASS
                      : (inc1.verdict == Verdict::FAIL || inc2.verdict == Verdict::FAIL
                             ? Verdict::FAIL
                             : Verdict::UNKNOWN);
      rep.add("minimality_TA_eq_TC_plus_D", v,
              v == Verdict::PASS ? "" : inc1.witness + inc2.witness);
    }
  }

  // D integrable on A
  {
    SpanResult inv{Verdict::PASS, ""};
    PolyMatrix d_on_a;
    for (const auto& d : stage.D_gens)
      d_on_a.push_back(restrict_row(field_components(d), stage.A));
    for (std::size_t i = 0; i < stage.D_gens.size() && inv.verdict == Verdict::PASS; ++i)
      for (std::size_t j = i + 1; j < stage.D_gens.size(); ++j) {
        auto comm = field_commutator(field_components(stage.D_gens[i]),
                                     field_components(stage.D_gens[j]), ctx);
        auto r = in_span(restrict_row(comm, stage.A), d_on_a, stage.A, opt);
        if (r.verdict != Verdict::PASS) {
          inv = r;
          break;
        }
      }
    rep.add("D_involutive_on_A", inv);
  }

  // ETCDdois
  {
    PolyMatrix tcd = stack(g.TC, d_at_c);
    SpanResult etcd{Verdict::PASS, ""};
    for (const auto& xi : g.E_circ) {
      auto r = in_span(restrict_row(pi.sharp(xi), c), tcd, c, opt);
      if (r.verdict != Verdict::PASS) {
        etcd = r;
        break;
      }
    }
    rep.add("ETCDdois", etcd);
  }

  // Liedercon on the D-generator frame
  {
    SpanResult ld{Verdict::PASS, ""};
    for (const auto& d : stage.D_gens) {
      GradedFunction l = c.restrict_even(lie_derivative_bivector(d, pi));
      auto r = in_E_wedge_TM(l, g, c);
      if (r.verdict != Verdict::PASS) {
        ld = r;
        break;
      }
    }
    rep.add("Liedercon", ld, "D generator frame");
  }

  if (rep.overall() == Verdict::PASS) {
    auto red = reduce_bivector(c, pi, opt);
    rep.reduced = red.reduced;
    rep.defect = red.defect;
    rep.lift_table = red.lift_table;
    if (!red.error.empty()) rep.error = red.error;
  }
  return rep;
}

}  // namespace gspr
