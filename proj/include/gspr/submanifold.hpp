#pragma once

#include "gspr/bivector.hpp"
#include "gspr/graded.hpp"
#include "gspr/linalg.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gspr {

enum class Verdict { PASS, FAIL, UNKNOWN };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    default: return "UNKNOWN";
  }
}

struct ProbeOptions {
  std::size_t samples = 32;
  unsigned seed = 20240817;
  // Degree bound for multiplier/lift ansatz solvers; <0 means use the
  // per-problem default deg(pi) + max constraint degree + 2.
  int degree_bound = -1;
};

// Membership-style answers carry a witness for FAIL and an explanation for
// UNKNOWN.
struct SpanResult {
  Verdict verdict = Verdict::UNKNOWN;
  std::string witness;
};

// A distribution presented by degree-1 generators (vector fields).
struct Distribution {
  std::vector<GradedFunction> generators;
};

// Adapted graph presentation of a graded submanifold C = E°[1] of T*[1]R^n:
// solved even constraints x_a = phi_a(x_R) and solved odd relations
// th_a = (expression in the remaining thetas), plus optional extra degree-1
// ideal generators for distributions that do not triangularize.
class SubmanifoldSpec {
 public:
  explicit SubmanifoldSpec(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  const ContextPtr& context() const { return ctx_; }

  void solve_even(std::size_t idx, const Polynomial& image) {
    require_same_context(ctx_, image.context());
    if (idx >= ctx_->size()) throw context_error("solve_even: index out of range");
    solved_even_[idx] = image;
    validate();
  }

  void solve_theta(std::size_t idx, const GradedFunction& image) {
    require_same_context(ctx_, image.context());
    if (!image.is_zero() && !image.is_homogeneous(1))
      throw degree_error("solve_theta: image must be degree 1");
    theta_solved_[idx] = image;
    validate();
  }

  void add_extra_generator(const GradedFunction& gen) {
    require_same_context(ctx_, gen.context());
    if (!gen.is_homogeneous(1)) throw degree_error("extra generator must be degree 1");
    extra_gens_.push_back(gen);
  }

  void set_quotient_coords(std::vector<std::size_t> q) { quotient_ = std::move(q); }

  const std::map<std::size_t, Polynomial>& solved_even() const { return solved_even_; }
  const std::map<std::size_t, GradedFunction>& theta_solved() const { return theta_solved_; }
  const std::vector<GradedFunction>& extra_generators() const { return extra_gens_; }
  const std::optional<std::vector<std::size_t>>& quotient_coords() const { return quotient_; }

  std::vector<std::size_t> retained() const {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < ctx_->size(); ++i)
      if (!solved_even_.count(i)) r.push_back(i);
    return r;
  }

  bool is_retained(std::size_t i) const { return !solved_even_.count(i); }

  // Degree-0 ideal generators x_a - phi_a.
  std::vector<Polynomial> even_constraints() const {
    std::vector<Polynomial> out;
    for (const auto& [idx, phi] : solved_even_)
      out.push_back(Polynomial::variable(ctx_, idx) - phi);
    return out;
  }

  // Degree-1 ideal generators th_a - image(th_a), then the extras.
  std::vector<GradedFunction> degree1_constraints() const {
    std::vector<GradedFunction> out;
    for (const auto& [idx, img] : theta_solved_)
      out.push_back(GradedFunction::theta(ctx_, idx) - img);
    for (const auto& g : extra_gens_) out.push_back(g);
    return out;
  }

  // Substitute the solved even coordinates into every coefficient.
  Polynomial restrict_even(const Polynomial& p) const {
    if (solved_even_.empty()) return p;
    return p.subst(solved_even_);
  }

  GradedFunction restrict_even(const GradedFunction& f) const {
    GradedFunction r(ctx_);
    for (const auto& [s, p] : f.terms()) r.add_term(s, restrict_even(p));
    return r;
  }

  // Normal form of F mod the ideal: solved evens into coefficients, then the
  // solved theta relations.  Extra generators are part of the geometry, not of
  // the triangular rewriting system, so membership via this normal form is
  // complete only for fully solved presentations.
  GradedFunction restrict(const GradedFunction& f) const {
    GradedFunction even_done = restrict_even(f);
    if (theta_solved_.empty()) return even_done;
    GradedFunction r(ctx_);
    for (const auto& [s, p] : even_done.terms()) {
      GradedFunction term = GradedFunction::from_polynomial(p);
      for (std::size_t i = 0; i < 31 && !term.is_zero(); ++i) {
        if (!(s & (OddSet(1) << i))) continue;
        auto it = theta_solved_.find(i);
        GradedFunction factor =
            it == theta_solved_.end() ? GradedFunction::theta(ctx_, i) : restrict_even(it->second);
        term = graded_mul(term, factor);
      }
      r += term;
    }
    return r;
  }

  Polynomial restrict(const Polynomial& p) const { return restrict_even(p); }

  bool in_ideal(const GradedFunction& f) const { return restrict(f).is_zero(); }

  // Full-arity rational sample points lying on C.
  std::vector<std::vector<Rational>> sample_points_on_C(const ProbeOptions& opt) const {
    auto ret = retained();
    auto raw = gspr::sample_points(ret.size(), opt.samples, opt.seed);
    std::vector<std::vector<Rational>> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
      std::vector<Rational> full(ctx_->size(), Rational(0));
      for (std::size_t k = 0; k < ret.size(); ++k) full[ret[k]] = r[k];
      for (const auto& [idx, phi] : solved_even_) full[idx] = phi.eval(full);
      out.push_back(std::move(full));
    }
    return out;
  }

 private:
  void validate() const {
    for (const auto& [idx, phi] : solved_even_) {
      for (const auto& [jdx, q] : solved_even_)
        if (phi.depends_on(jdx))
          throw std::invalid_argument("submanifold: solved even image depends on solved " +
                                      ctx_->name(jdx));
    }
    for (const auto& [idx, img] : theta_solved_) {
      for (const auto& [s, p] : img.terms())
        for (const auto& [jdx, q] : theta_solved_)
          if (s & (OddSet(1) << jdx))
            throw std::invalid_argument("submanifold: theta image depends on solved th" +
                                        std::to_string(jdx + 1));
    }
  }

  ContextPtr ctx_;
  std::map<std::size_t, Polynomial> solved_even_;
  std::map<std::size_t, GradedFunction> theta_solved_;
  std::vector<GradedFunction> extra_gens_;
  std::optional<std::vector<std::size_t>> quotient_;
};

// ---------------------------------------------------------------------------
// Generator families along C.  Vector fields and covectors are stored as
// rows of polynomial matrices, one column per ambient coordinate, all
// coefficients already pushed to the retained chart.

// E from the odd data of the spec.
inline PolyMatrix distribution_matrix(const SubmanifoldSpec& c,
                                      const std::vector<GradedFunction>& gens) {
  PolyMatrix m;
  for (const auto& g : gens) {
    auto comps = field_components(c.restrict_even(g));
    m.push_back(std::move(comps));
  }
  return m;
}

inline PolyMatrix E_matrix(const SubmanifoldSpec& c) {
  return distribution_matrix(c, c.degree1_constraints());
}

// TC: coordinate fields of retained coordinates pushed through the graph map.
inline PolyMatrix TC_matrix(const SubmanifoldSpec& c) {
  PolyMatrix m;
  const auto& ctx = c.context();
  for (std::size_t r : c.retained()) {
    std::vector<Polynomial> row(ctx->size(), Polynomial::zero(ctx));
    row[r] = Polynomial::constant(ctx, Rational(1));
    for (const auto& [idx, phi] : c.solved_even()) row[idx] = c.restrict_even(phi.diff(r));
    m.push_back(std::move(row));
  }
  return m;
}

// N*C: differentials of the even constraints along C.
inline PolyMatrix NstarC_matrix(const SubmanifoldSpec& c) {
  PolyMatrix m;
  const auto& ctx = c.context();
  for (const auto& [idx, phi] : c.solved_even()) {
    std::vector<Polynomial> row(ctx->size(), Polynomial::zero(ctx));
    row[idx] = Polynomial::constant(ctx, Rational(1));
    for (std::size_t r : c.retained()) row[r] = c.restrict_even(-phi.diff(r));
    m.push_back(std::move(row));
  }
  return m;
}

// Annihilator of a family of vector fields: covector basis over Q(x) cleared
// to polynomials.
inline PolyMatrix annihilator(const PolyMatrix& fields, const ContextPtr& ctx) {
  if (fields.empty()) {
    // annihilator of 0 is everything
    PolyMatrix id;
    for (std::size_t i = 0; i < ctx->size(); ++i) {
      std::vector<Polynomial> row(ctx->size(), Polynomial::zero(ctx));
      row[i] = Polynomial::constant(ctx, Rational(1));
      id.push_back(std::move(row));
    }
    return id;
  }
  auto basis = generic_nullspace(fields);
  return PolyMatrix(basis.begin(), basis.end());
}

// Coefficient vectors (on the a-side) of a basis of span(a) /\ span(b) over
// Q(x): solutions c with c^T a = d^T b for some d.
inline PolyMatrix intersection_coefficients(const PolyMatrix& a, const PolyMatrix& b,
                                            const ContextPtr& ctx) {
  if (a.empty() || b.empty()) return {};
  std::size_t n = ctx->size();
  PolyMatrix stacked(n, std::vector<Polynomial>(a.size() + b.size(), Polynomial::zero(ctx)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < n; ++k) stacked[k][i] = a[i][k];
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t k = 0; k < n; ++k) stacked[k][a.size() + j] = -b[j][k];
  auto null = generic_nullspace(stacked);
  PolyMatrix coeffs;
  for (const auto& cd : null) {
    std::vector<Polynomial> c(cd.begin(), cd.begin() + a.size());
    bool nonzero = false;
    for (const auto& p : c)
      if (!p.is_zero()) nonzero = true;
    if (nonzero) coeffs.push_back(std::move(c));
  }
  return coeffs;
}

// Intersection of two row-span families over Q(x).
inline PolyMatrix intersect_spans(const PolyMatrix& a, const PolyMatrix& b,
                                  const ContextPtr& ctx) {
  if (a.empty() || b.empty()) return {};
  std::size_t n = ctx->size();
  // columns of the stacked matrix: coefficients (c,d) with c^T A = d^T B
  PolyMatrix stacked(n, std::vector<Polynomial>(a.size() + b.size(), Polynomial::zero(ctx)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < n; ++k) stacked[k][i] = a[i][k];
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t k = 0; k < n; ++k) stacked[k][a.size() + j] = -b[j][k];
  auto null = generic_nullspace(stacked);
  PolyMatrix out;
  for (const auto& cd : null) {
    std::vector<Polynomial> v(n, Polynomial::zero(ctx));
    bool nonzero = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t k = 0; k < n; ++k) {
        v[k] += cd[i] * a[i][k];
        if (!v[k].is_zero()) nonzero = true;
      }
    if (nonzero) out.push_back(std::move(v));
  }
  // prune dependent rows
  PolyMatrix pruned;
  for (const auto& row : out) {
    PolyMatrix test = pruned;
    test.push_back(row);
    if (generic_rank(test) > generic_rank(pruned)) pruned.push_back(row);
  }
  return pruned;
}

// Is v (a polynomial vector along C) in the pointwise span of the rows of
// gens at every sampled point of C, and generically?
inline SpanResult in_span(const std::vector<Polynomial>& v, const PolyMatrix& gens,
                          const SubmanifoldSpec& c, const ProbeOptions& opt) {
  bool vzero = true;
  for (const auto& p : v)
    if (!p.is_zero()) vzero = false;
  if (vzero) return {Verdict::PASS, ""};
  if (gens.empty()) return {Verdict::FAIL, "span is empty"};

  PolyMatrix aug = gens;
  aug.push_back(v);
  std::size_t rg = generic_rank(gens);
  std::size_t ra = generic_rank(aug);
  bool genery = (ra == rg);

  for (const auto& pt : c.sample_points_on_C(opt)) {
    std::size_t rgp = rank(eval_matrix(gens, pt));
    std::size_t rap = rank(eval_matrix(aug, pt));
    if (rap > rgp) {
      std::string w = "not in span at point (";
      for (std::size_t i = 0; i < pt.size(); ++i)
        w += (i ? "," : "") + to_string(pt[i]);
      w += ")";
      return {Verdict::FAIL, w};
    }
  }
  if (!genery) return {Verdict::UNKNOWN, "generic rank disagrees with all sampled points"};
  return {Verdict::PASS, ""};
}

inline SpanResult all_in_span(const PolyMatrix& vs, const PolyMatrix& gens,
                              const SubmanifoldSpec& c, const ProbeOptions& opt) {
  for (const auto& v : vs) {
    auto r = in_span(v, gens, c, opt);
    if (r.verdict != Verdict::PASS) return r;
  }
  return {Verdict::PASS, ""};
}

// Rank constancy of a polynomial matrix along C.
struct RankReport {
  std::size_t generic = 0;
  std::size_t min_sampled = 0;
  std::size_t max_sampled = 0;
  Verdict constant = Verdict::UNKNOWN;
};

inline RankReport rank_along_C(const PolyMatrix& m, const SubmanifoldSpec& c,
                               const ProbeOptions& opt) {
  RankReport rep;
  if (m.empty()) {
    rep.constant = Verdict::PASS;
    return rep;
  }
  rep.generic = generic_rank(m);
  bool first = true;
  for (const auto& pt : c.sample_points_on_C(opt)) {
    std::size_t r = rank(eval_matrix(m, pt));
    if (first) {
      rep.min_sampled = rep.max_sampled = r;
      first = false;
    } else {
      rep.min_sampled = std::min(rep.min_sampled, r);
      rep.max_sampled = std::max(rep.max_sampled, r);
    }
  }
  if (rep.min_sampled != rep.max_sampled)
    rep.constant = Verdict::FAIL;
  else if (rep.min_sampled == rep.generic)
    rep.constant = Verdict::PASS;
  else
    rep.constant = Verdict::UNKNOWN;
  return rep;
}

// Commutator of two polynomial vector fields.
inline std::vector<Polynomial> field_commutator(const std::vector<Polynomial>& x,
                                                const std::vector<Polynomial>& y,
                                                const ContextPtr& ctx) {
  std::vector<Polynomial> out;
  out.reserve(ctx->size());
  for (std::size_t k = 0; k < ctx->size(); ++k) {
    Polynomial ck(ctx);
    for (std::size_t i = 0; i < ctx->size(); ++i)
      ck += x[i] * y[k].diff(i) - y[i] * x[k].diff(i);
    out.push_back(ck);
  }
  return out;
}

// Involutivity of a generator family: all pairwise commutators stay in the
// pointwise span along C.
inline SpanResult involutive(const PolyMatrix& gens, const SubmanifoldSpec& c,
                             const ProbeOptions& opt) {
  const auto& ctx = c.context();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      auto comm = field_commutator(gens[i], gens[j], ctx);
      for (auto& p : comm) p = c.restrict_even(p);
      auto r = in_span(comm, gens, c, opt);
      if (r.verdict != Verdict::PASS) {
        if (r.witness.empty()) r.witness = "commutator escapes the span";
        r.witness = "[gen" + std::to_string(i + 1) + ",gen" + std::to_string(j + 1) + "]: " +
                    r.witness;
        return r;
      }
    }
  return {Verdict::PASS, ""};
}

// ---------------------------------------------------------------------------
// The constraint-bracket-matrix probe of the presymplectic definition.

struct BracketMatrixReport {
  std::vector<std::vector<GradedFunction>> matrix;  // {phi_I, phi_J} mod I
  RankReport degree0;                               // rank of the body part
  Verdict gamma_in_ideal = Verdict::UNKNOWN;        // involutivity surrogate
  std::string gamma_witness;
  Verdict presymplectic = Verdict::UNKNOWN;
};

inline BracketMatrixReport bracket_matrix_rank_probe(const SubmanifoldSpec& c,
                                                     const ProbeOptions& opt = {}) {
  BracketMatrixReport rep;
  const auto& ctx = c.context();

  std::vector<GradedFunction> gens;
  for (const auto& p : c.even_constraints()) gens.push_back(GradedFunction::from_polynomial(p));
  for (const auto& g : c.degree1_constraints()) gens.push_back(g);

  const std::size_t n = gens.size();
  rep.matrix.assign(n, std::vector<GradedFunction>(n, GradedFunction::zero(ctx)));
  PolyMatrix deg0(n, std::vector<Polynomial>(n, Polynomial::zero(ctx)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      GradedFunction b = c.restrict(schouten_bracket(gens[i], gens[j]));
      rep.matrix[i][j] = b;
      deg0[i][j] = b.coefficient(0);
    }
  rep.degree0 = rank_along_C(deg0, c, opt);

  // gamma block: brackets of an F = TC /\ E frame must stay in Gamma~(E).
  PolyMatrix e = E_matrix(c);
  PolyMatrix tc = TC_matrix(c);
  PolyMatrix f = c.solved_even().empty() ? e : intersect_spans(tc, e, ctx);
  rep.gamma_in_ideal = Verdict::PASS;
  for (std::size_t i = 0; i < f.size() && rep.gamma_in_ideal == Verdict::PASS; ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      auto comm = field_commutator(f[i], f[j], ctx);
      for (auto& p : comm) p = c.restrict_even(p);
      auto r = in_span(comm, e, c, opt);
      if (r.verdict != Verdict::PASS) {
        rep.gamma_in_ideal = r.verdict;
        rep.gamma_witness = r.witness;
        break;
      }
    }

  if (rep.degree0.constant == Verdict::PASS && rep.gamma_in_ideal == Verdict::PASS)
    rep.presymplectic = Verdict::PASS;
  else if (rep.degree0.constant == Verdict::UNKNOWN || rep.gamma_in_ideal == Verdict::UNKNOWN)
    rep.presymplectic = Verdict::UNKNOWN;
  else
    rep.presymplectic = Verdict::FAIL;
  return rep;
}

// ---------------------------------------------------------------------------
// Geometric objects report.

struct GeometricObjects {
  PolyMatrix TC;
  PolyMatrix E;
  PolyMatrix F;       // TC /\ E
  PolyMatrix E_circ;  // annihilator of E
  PolyMatrix NstarC;
  RankReport E_rank;
  RankReport F_rank;
  SpanResult E_involutive;
  SpanResult F_involutive;
};

inline GeometricObjects geometric_objects(const SubmanifoldSpec& c, const ProbeOptions& opt = {}) {
  GeometricObjects g;
  const auto& ctx = c.context();
  g.TC = TC_matrix(c);
  g.E = E_matrix(c);
  g.F = c.solved_even().empty() ? g.E : intersect_spans(g.TC, g.E, ctx);
  g.E_circ = annihilator(g.E, ctx);
  g.NstarC = NstarC_matrix(c);
  g.E_rank = rank_along_C(g.E, c, opt);
  g.F_rank = rank_along_C(g.F, c, opt);
  g.E_involutive = involutive(g.E, c, opt);
  g.F_involutive = involutive(g.F, c, opt);
  return g;
}

// ---------------------------------------------------------------------------
// Triangularization of a generator-presented distribution into solved form.
// Pivots are taken only where the theta coefficient is a nonzero constant;
// rows that never produce such a pivot become extra generators.

inline void attach_distribution(SubmanifoldSpec& c, const std::vector<GradedFunction>& gens) {
  const auto& ctx = c.context();
  std::vector<std::vector<Polynomial>> rows;
  for (const auto& g : gens) {
    if (!g.is_homogeneous(1)) throw degree_error("distribution generator must be degree 1");
    rows.push_back(field_components(c.restrict_even(g)));
  }
  std::set<std::size_t> pivot_cols;
  std::vector<std::size_t> pivot_of(rows.size(), ctx->size());
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (pivot_of[r] != ctx->size()) continue;
      // find a constant-coefficient pivot column not yet used
      std::size_t pc = ctx->size();
      for (std::size_t j = 0; j < ctx->size(); ++j) {
        if (pivot_cols.count(j)) continue;
        if (!rows[r][j].is_zero() && rows[r][j].is_constant()) {
          pc = j;
          break;
        }
      }
      if (pc == ctx->size()) continue;
      Rational inv = Rational(1) / rows[r][pc].constant_value();
      for (auto& p : rows[r]) p *= inv;
      for (std::size_t r2 = 0; r2 < rows.size(); ++r2) {
        if (r2 == r || rows[r2][pc].is_zero()) continue;
        Polynomial f = rows[r2][pc];
        for (std::size_t j = 0; j < ctx->size(); ++j) rows[r2][j] -= f * rows[r][j];
      }
      pivot_cols.insert(pc);
      pivot_of[r] = pc;
      progress = true;
    }
  }
  // emit solved relations only after full elimination so images avoid pivots
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (pivot_of[r] == ctx->size()) continue;
    GradedFunction img(ctx);
    for (std::size_t j = 0; j < ctx->size(); ++j) {
      if (j == pivot_of[r] || rows[r][j].is_zero()) continue;
      img.add_term(OddSet(1) << j, -rows[r][j]);
    }
    c.solve_theta(pivot_of[r], img);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (pivot_of[r] != ctx->size()) continue;
    bool zero = true;
    for (const auto& p : rows[r])
      if (!p.is_zero()) zero = false;
    if (!zero) c.add_extra_generator(vector_field(ctx, rows[r]));
  }
}

}  // namespace gspr
