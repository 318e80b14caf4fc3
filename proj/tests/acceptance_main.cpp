// Acceptance suite: one criterion per section, one pass/fail line each.
// Every tolerance is pinned here; exact means canonical-form equality.

#include "gspr/dgla.hpp"
#include "gspr/engine.hpp"
#include "gspr/groupoid.hpp"
#include "gspr/reduction.hpp"

#include "testutil.hpp"

#include <chrono>
#include <functional>
#include <iostream>

using namespace gspr;

namespace {

int failures = 0;

void criterion(const std::string& name, const std::function<bool()>& body,
               double time_limit_s = 0.0) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string error;
  try {
    ok = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && secs > time_limit_s) {
    ok = false;
    error += (error.empty() ? "" : "; ") + std::string("exceeded time limit of ") +
             std::to_string(time_limit_s) + " s";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", secs);
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << buf << ")";
  if (!error.empty()) std::cout << "  " << error;
  std::cout << "\n";
  if (!ok) ++failures;
}

Polynomial var(const ContextPtr& c, const std::string& v) { return Polynomial::variable(c, v); }
Polynomial con(const ContextPtr& c, long long n, long long d = 1) {
  return Polynomial::constant(c, Rational(n, d));
}
GradedFunction th(const ContextPtr& c, int i) {
  return GradedFunction::theta(c, static_cast<std::size_t>(i - 1));
}

SubmanifoldSpec counterex_C(const ContextPtr& c, const Polynomial& alpha) {
  SubmanifoldSpec spec(c);
  spec.solve_even(3, Polynomial::zero(c));
  GradedFunction img(c);
  img.add_term(OddSet(1) << 0, -alpha);
  spec.solve_theta(3, img);
  spec.set_quotient_coords({0, 1, 2});
  return spec;
}

PoissonBivector counterex_pi(const ContextPtr& c) {
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));
  pi.set(2, 3, con(c, 1));
  return pi;
}

// random audited DGLA specs for criterion 7 (base families + basis change)
BracketTable so3_table() {
  BracketTable t = zero_table(3, 3, 3);
  auto set = [&](std::size_t i, std::size_t j, std::size_t k) {
    t[i][j][k] = Rational(1);
    t[j][i][k] = Rational(-1);
  };
  set(0, 1, 2);
  set(1, 2, 0);
  set(2, 0, 1);
  return t;
}

ConstMat random_invertible(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-2, 2);
  ConstMat l(n, zero_vec(n)), u(n, zero_vec(n));
  for (std::size_t i = 0; i < n; ++i) {
    l[i][i] = Rational(1);
    u[i][i] = Rational(1);
    for (std::size_t j = 0; j < i; ++j) l[i][j] = Rational(d(rng));
    for (std::size_t j = i + 1; j < n; ++j) u[i][j] = Rational(d(rng));
  }
  ConstMat m(n, zero_vec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m[i][j] += l[i][k] * u[k][j];
  return m;
}

ConstVec to_coords(const ConstMat& basis, const ConstVec& v) {
  std::size_t n = basis.size();
  RatMatrix a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = basis[j][i];
  auto x = solve_rational(a, v);
  if (!x) throw std::logic_error("basis change failed");
  return *x;
}

DGLASpec change_basis(const DGLASpec& s, const ConstMat& p, const ConstMat& q) {
  DGLASpec out = DGLASpec::make(s.dim_h, s.dim_g);
  for (std::size_t i = 0; i < s.dim_g; ++i)
    for (std::size_t j = 0; j < s.dim_g; ++j)
      out.bracket_gg[i][j] = to_coords(q, apply_table(s.bracket_gg, q[i], q[j], s.dim_g));
  for (std::size_t i = 0; i < s.dim_g; ++i)
    for (std::size_t j = 0; j < s.dim_h; ++j)
      out.bracket_gh[i][j] = to_coords(p, apply_table(s.bracket_gh, q[i], p[j], s.dim_h));
  for (std::size_t j = 0; j < s.dim_h; ++j) out.delta[j] = to_coords(q, s.delta_of(p[j]));
  return out;
}

DGLASpec random_audited_spec(std::mt19937& rng, int family) {
  DGLASpec base = DGLASpec::make(0, 0);
  switch (family % 4) {
    case 0: {
      base = DGLASpec::make(3, 3);
      base.bracket_gg = so3_table();
      base.bracket_gh = so3_table();
      for (std::size_t i = 0; i < 3; ++i) base.delta[i][i] = Rational(1);
      break;
    }
    case 1: {  // aff(1) adjoint with delta = id
      base = DGLASpec::make(2, 2);
      base.bracket_gg[0][1][1] = Rational(1);
      base.bracket_gg[1][0][1] = Rational(-1);
      base.bracket_gh = base.bracket_gg;
      for (std::size_t i = 0; i < 2; ++i) base.delta[i][i] = Rational(1);
      break;
    }
    case 2: {  // so(3) with its standard module, delta = 0
      base = DGLASpec::make(3, 3);
      base.bracket_gg = so3_table();
      base.bracket_gh = so3_table();
      break;
    }
    default: {  // aff(1) on a 1-dim module, delta = 0
      base = DGLASpec::make(1, 2);
      base.bracket_gg[0][1][1] = Rational(1);
      base.bracket_gg[1][0][1] = Rational(-1);
      base.bracket_gh[0][0][0] = Rational(1);
      break;
    }
  }
  ConstMat p = random_invertible(rng, std::max<std::size_t>(base.dim_h, 1));
  ConstMat q = random_invertible(rng, std::max<std::size_t>(base.dim_g, 1));
  return change_basis(base, p, q);
}

ActionData moment_data(const ContextPtr& ctx) {
  ActionData data{{}, {}, PoissonBivector(ctx)};
  data.pi.set(0, 1, con(ctx, 1));
  data.pi.set(2, 3, con(ctx, 1));
  data.J0 = {Polynomial::variable(ctx, std::size_t(3))};
  data.J1 = {hamiltonian_field(data.pi.to_graded(), data.J0[0])};
  return data;
}

}  // namespace

int main() {
  // 1. Presymplectic verdicts of the three constraint examples.
  criterion(
      "criterion-1a: th1, th2 - x1 th3 is not presymplectic",
      [] {
        auto c = make_context({"x1", "x2", "x3"});
        SubmanifoldSpec spec(c);
        spec.solve_theta(0, GradedFunction::zero(c));
        GradedFunction img(c);
        img.add_term(OddSet(1) << 2, var(c, "x1"));
        spec.solve_theta(1, img);
        auto rep = bracket_matrix_rank_probe(spec);
        return rep.presymplectic == Verdict::FAIL && rep.degree0.generic == 0;
      },
      1.0);
  criterion(
      "criterion-1b: adding x2 makes it presymplectic",
      [] {
        auto c = make_context({"x1", "x2", "x3"});
        SubmanifoldSpec spec(c);
        spec.solve_even(1, Polynomial::zero(c));
        spec.solve_theta(0, GradedFunction::zero(c));
        GradedFunction img(c);
        img.add_term(OddSet(1) << 2, var(c, "x1"));
        spec.solve_theta(1, img);
        return bracket_matrix_rank_probe(spec).presymplectic == Verdict::PASS;
      },
      1.0);
  criterion(
      "criterion-1c: the contact kernel fails by non-involutivity",
      [] {
        auto c = make_context({"x1", "x2", "x3"});
        SubmanifoldSpec spec(c);
        spec.solve_theta(0, GradedFunction::zero(c));
        GradedFunction img(c);
        img.add_term(OddSet(1) << 2, var(c, "x1"));
        spec.solve_theta(1, img);
        auto rep = bracket_matrix_rank_probe(spec);
        auto geo = geometric_objects(spec);
        return rep.gamma_in_ideal == Verdict::FAIL &&
               geo.E_involutive.verdict == Verdict::FAIL &&
               geo.F_involutive.verdict == Verdict::FAIL;
      },
      1.0);

  // 2. Counterexample reproduction.
  criterion("criterion-2a: alpha = x2 reduces to d1^(d2 + x2 d3) with zero defect", [] {
    auto c = make_context({"x1", "x2", "x3", "x4"});
    auto rep = check_descent(counterex_C(c, var(c, "x2")), counterex_pi(c));
    if (!rep.reduced) return false;
    auto qc = rep.reduced->context();
    PoissonBivector expect(qc);
    expect.set(0, 1, con(qc, 1));
    expect.set(0, 2, var(qc, "x2"));
    return *rep.reduced == expect && rep.defect->is_zero();
  });
  criterion("criterion-2b: alpha = x1 has Jacobi defect exactly -2 th1 th2 th3", [] {
    auto c = make_context({"x1", "x2", "x3", "x4"});
    auto rep = check_descent(counterex_C(c, var(c, "x1")), counterex_pi(c));
    if (!rep.reduced || !rep.defect) return false;
    auto qc = rep.reduced->context();
    GradedFunction expect(qc);
    expect.add_term(0b111, con(qc, -2));
    return *rep.defect == expect;
  });

  // 3. Cotangent reconstruction with explicit lifts and route agreement.
  criterion("criterion-3: cotangent lifts x~_j = x_j + (1/2) alpha_ij y_i recover alpha", [] {
    auto c = make_context({"x1", "x2", "y1", "y2"});
    SubmanifoldSpec C(c);
    C.solve_even(2, Polynomial::zero(c));
    C.solve_even(3, Polynomial::zero(c));
    GradedFunction img1(c), img2(c);
    img1.add_term(OddSet(1) << 1, var(c, "x1") * Rational(1, 2));
    img2.add_term(OddSet(1) << 0, -(var(c, "x1") * Rational(1, 2)));
    C.solve_theta(2, img1);
    C.solve_theta(3, img2);
    C.set_quotient_coords({0, 1});
    PoissonBivector pi(c);
    pi.set(0, 2, con(c, 1));
    pi.set(1, 3, con(c, 1));

    auto rep = reduce_bivector(C, pi);
    if (!rep.reduced) return false;
    Polynomial lift1 = var(c, "x1") - var(c, "x1") * var(c, "y2") * Rational(1, 2);
    Polynomial lift2 = var(c, "x2") + var(c, "x1") * var(c, "y1") * Rational(1, 2);
    if (rep.lift_table.at("x1") != lift1 || rep.lift_table.at("x2") != lift2) return false;
    auto qc = rep.reduced->context();
    PoissonBivector expect(qc);
    expect.set(0, 1, var(qc, "x1"));
    if (*rep.reduced != expect) return false;

    // read-off route: restrict(S) = (1/2) alpha^{ij} Q_i Q_j, same bivector
    auto onc = reduce_bivector_onC(pi.to_graded(), C);
    GradedFunction srest = C.restrict(pi.to_graded());
    GradedFunction shalf(c);
    shalf.add_term(0b0011, var(c, "x1"));  // x1 Q1 Q2
    return onc.reduced && *onc.reduced == *rep.reduced && srest == shalf;
  });

  // 4. Drinfeld double of a 2-dimensional Lie bialgebra.
  criterion("criterion-4: Drinfeld double reduces to the Lie-Poisson structure of g*", [] {
    auto c = make_context({"x1", "x2", "y1", "y2"});
    // aff(1) bialgebra constants, validated by the dgla audit first
    DGLASpec g = DGLASpec::make(0, 2);
    g.bracket_gg[0][1][1] = Rational(1);
    g.bracket_gg[1][0][1] = Rational(-1);
    if (!all_pass(audit_dgla(g))) return false;

    PoissonBivector pi(c);
    pi.set(0, 1, var(c, "x2"));
    pi.set(2, 3, var(c, "y2"));
    pi.set(0, 3, -var(c, "y2"));
    pi.set(1, 2, var(c, "x2"));
    pi.set(1, 3, var(c, "y1") - var(c, "x1"));
    if (!jacobi_defect(pi).is_zero()) return false;  // the double is Poisson

    SubmanifoldSpec C(c);
    C.solve_even(2, Polynomial::zero(c));
    C.solve_even(3, Polynomial::zero(c));
    C.solve_theta(2, GradedFunction::zero(c));
    C.solve_theta(3, GradedFunction::zero(c));
    C.set_quotient_coords({0, 1});

    auto mr = check_marsden_ratiu(C, pi);
    bool sharp_fails = false;
    for (const auto& cond : mr.conditions)
      if (cond.id == "sharpEcirc_in_TC" && cond.verdict == Verdict::FAIL) sharp_fails = true;
    if (!sharp_fails) return false;

    StageSpec st{SubmanifoldSpec(c), {th(c, 3), th(c, 4)}};
    auto a2 = check_stages_A2(C, st, pi);
    if (a2.overall() != Verdict::PASS || !a2.reduced) return false;

    auto qc = a2.reduced->context();
    auto lp = lie_poisson_bivector(g.bracket_gg, qc);
    return *a2.reduced == lp && a2.defect->is_zero();
  });

  // 5. The Lie derivative pairing identity, 200 random symbolic instances.
  criterion(
      "criterion-5: identity X{f,g} = (L_X pi)(df,dg) + pi(d(Xf),dg) + pi(df,d(Xg))",
      [] {
        std::mt19937 rng(2024);
        auto c = make_context({"x1", "x2", "x3", "x4"});
        for (int it = 0; it < 200; ++it) {
          auto Xc = testutil::random_field(rng, c, 2);
          auto X = vector_field(c, Xc);
          auto f = testutil::random_poly(rng, c, 2);
          auto g = testutil::random_poly(rng, c, 2);
          auto pi = testutil::random_bivector(rng, c, 2);
          Polynomial lhs = apply_field(X, pi.pair(f, g));
          auto lpi = PoissonBivector::from_graded(lie_derivative_bivector(X, pi));
          Polynomial rhs =
              lpi.pair(f, g) + pi.pair(apply_field(X, f), g) + pi.pair(f, apply_field(X, g));
          if (lhs != rhs) return false;
        }
        return true;
      },
      30.0);

  // 6. Bracket property suite.
  criterion("criterion-6: graded commutativity, Leibniz, Jacobi and the derived-bracket oracle",
            [] {
              std::mt19937 rng(2025);
              auto c = make_context({"x1", "x2", "x3", "x4"});
              for (int it = 0; it < 500; ++it) {
                int da = it % 3, db = (it / 3) % 3, dc = (it / 9) % 3;
                auto a = testutil::random_graded(rng, c, da, 2);
                auto b = testutil::random_graded(rng, c, db, 2);
                auto d = testutil::random_graded(rng, c, dc, 2);

                auto prod_ab = graded_mul(a, b);
                auto prod_ba = graded_mul(b, a);
                if ((da * db) % 2 == 1) prod_ba = -prod_ba;
                if (prod_ab != prod_ba) return false;

                auto sk1 = schouten_bracket(a, b);
                auto sk2 = schouten_bracket(b, a);
                if (((da - 1) * (db - 1)) % 2 == 0) sk2 = -sk2;
                if (sk1 != sk2) return false;

                auto l = schouten_bracket(a, graded_mul(b, d));
                auto r = graded_mul(schouten_bracket(a, b), d);
                auto tail = graded_mul(b, schouten_bracket(a, d));
                if (((da - 1) * db) % 2 != 0) tail = -tail;
                if (l != r + tail) return false;

                auto j1 = schouten_bracket(a, schouten_bracket(b, d));
                auto j2 = schouten_bracket(schouten_bracket(a, b), d);
                auto j3 = schouten_bracket(b, schouten_bracket(a, d));
                if (((da - 1) * (db - 1)) % 2 != 0) j3 = -j3;
                if (j1 != j2 + j3) return false;

                auto pi = testutil::random_bivector(rng, c, 2);
                auto f = testutil::random_poly(rng, c, 2);
                auto g = testutil::random_poly(rng, c, 2);
                if (derived_bracket(pi.to_graded(), f, g) != pi.pair(f, g)) return false;
              }
              return true;
            });

  // 7. DGLA / crossed-module round trip on 50 random audited specs.
  criterion("criterion-7: crossed-module round trip is the identity on 50 audited specs", [] {
    std::mt19937 rng(2026);
    for (int it = 0; it < 50; ++it) {
      DGLASpec s = random_audited_spec(rng, it);
      if (!all_pass(audit_dgla(s))) return false;
      auto cm = dgla_to_crossed_module(s);
      if (!all_pass(audit_crossed_module(cm))) return false;
      DGLASpec back = crossed_module_to_dgla(cm);
      if (back.bracket_gg != s.bracket_gg || back.bracket_gh != s.bracket_gh ||
          back.delta != s.delta)
        return false;
    }
    return true;
  });

  // 8. Action audit.
  criterion("criterion-8: HamiltonianMoment action data passes; a perturbed J0 fails with a witness", [] {
    auto ctx = make_context({"y1", "y2", "y3", "y4"});
    DGLASpec spec = DGLASpec::make(1, 1);
    spec.delta[0][0] = Rational(1);
    ActionData data = moment_data(ctx);
    if (!all_pass(audit_action(data, spec))) return false;

    ActionData bad = data;
    bad.J0 = {var(ctx, "y4") + var(ctx, "y3") * var(ctx, "y3")};
    bool failed_with_witness = false;
    for (const auto& r : audit_action(bad, spec))
      if (r.verdict == Verdict::FAIL && !r.witness.empty()) failed_with_witness = true;
    return failed_with_witness;
  });

  // 9. The Lie 2-group law on the pair groupoid.
  criterion(
      "criterion-9: kxky law over 100 seeded samples; flow-identity calibration to 1e-9",
      [] {
        auto ctx = make_context({"m1", "m2", "m3", "m4"});
        LiftedAction act{moment_data(ctx)};
        auto cm = CrossedModuleGroups::vector_identity(1);
        auto rep = verify_kxky(act, cm, 100, 20240817);
        return rep.misclassified == 0 && rep.max_deviation <= 1e-8 &&
               rep.flow_calibration_deviation <= 1e-9;
      },
      10.0);

  // 10. Quotients.
  criterion("criterion-10a: global quotient is -dx1^dx2 + dy1^dy2 on R^3 x R^3", [] {
    auto ctx = make_context({"m1", "m2", "m3", "m4"});
    auto rep = mw_quotient_pair(moment_data(ctx), false);
    if (!rep.reduction.reduced || rep.charted) return false;
    const auto& red = *rep.reduction.reduced;
    const auto& qc = red.context();
    if (qc->size() != 6) return false;
    PoissonBivector expect(qc);
    expect.set(0, 1, con(qc, -1));
    expect.set(3, 4, con(qc, 1));
    return red == expect && rep.multiplicative == Verdict::PASS;
  });
  criterion("criterion-10b: the stages example passes every Thm A1 verdict", [] {
    auto c = make_context({"x1", "y1", "x2", "y2"});
    PoissonBivector pi(c);
    pi.set(0, 1, con(c, 1));
    pi.set(2, 3, con(c, 1));
    SubmanifoldSpec C(c);
    C.solve_even(2, Polynomial::zero(c));
    C.solve_even(3, Polynomial::zero(c));
    C.solve_theta(0, GradedFunction::zero(c));
    C.solve_theta(2, GradedFunction::zero(c));
    GradedFunction img(c);
    img.add_term(OddSet(1) << 1, -var(c, "x1"));
    C.solve_theta(3, img);
    StageSpec st{SubmanifoldSpec(c), {th(c, 1), th(c, 3)}};
    st.A.solve_even(3, Polynomial::zero(c));
    auto a1 = check_stages_A1(C, st, pi);
    for (const auto& cond : a1.conditions)
      if (cond.verdict != Verdict::PASS) return false;
    return true;
  });

  std::cout << (failures == 0 ? "acceptance: all criteria PASS\n"
                              : "acceptance: " + std::to_string(failures) + " criteria FAILED\n");
  return failures == 0 ? 0 : 1;
}
