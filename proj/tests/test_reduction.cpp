#include "gspr/reduction.hpp"

#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gspr;

namespace {

Polynomial var(const ContextPtr& c, const std::string& v) { return Polynomial::variable(c, v); }
Polynomial con(const ContextPtr& c, long long n, long long d = 1) {
  return Polynomial::constant(c, Rational(n, d));
}
GradedFunction th(const ContextPtr& c, int i) {
  return GradedFunction::theta(c, static_cast<std::size_t>(i - 1));
}

Verdict verdict_of(const ReductionReport& r, const std::string& id) {
  for (const auto& c : r.conditions)
    if (c.id == id) return c.verdict;
  throw std::logic_error("no condition " + id);
}

// Ex. counterex: M = R^4, pi = d1^d2 + d3^d4, C = {x4=0},
// E = span(d4 + alpha d1).
struct Counterex {
  ContextPtr ctx;
  SubmanifoldSpec C;
  PoissonBivector pi;
  Counterex(const Polynomial& alpha, const ContextPtr& c)
      : ctx(c), C(c), pi(c) {
    C.solve_even(3, Polynomial::zero(c));
    GradedFunction img(c);
    img.add_term(OddSet(1) << 0, -alpha);
    C.solve_theta(3, img);
    pi.set(0, 1, con(c, 1));
    pi.set(2, 3, con(c, 1));
  }
};

StageSpec counterex_stage(const ContextPtr& c, const Polynomial& alpha) {
  // A = M, D = the x4-translation-invariant extension of E
  StageSpec st{SubmanifoldSpec(c), {}};
  GradedFunction d = th(c, 4) + GradedFunction::monomial(alpha, OddSet(1) << 0);
  st.D_gens.push_back(d);
  return st;
}

}  // namespace

TEST_CASE("counterexample: A2 passes for alpha independent of x1") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  Polynomial alpha = var(c, "x2");
  Counterex ex(alpha, c);
  auto rep = check_stages_A2(ex.C, counterex_stage(c, alpha), ex.pi);
  for (const auto& cond : rep.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
  REQUIRE(rep.reduced.has_value());

  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, con(qc, 1));
  expect.set(0, 2, var(qc, "x2"));
  CHECK(*rep.reduced == expect);
  CHECK(rep.defect->is_zero());
}

TEST_CASE("whenever all A2 verdicts pass the reduced structure is Poisson") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  std::vector<Polynomial> alphas = {
      var(c, "x2"),
      var(c, "x3") * var(c, "x3"),
      var(c, "x2") * var(c, "x3") + con(c, 5, 2),
      var(c, "x2") * var(c, "x2") * var(c, "x3")};
  for (const auto& alpha : alphas) {
    Counterex ex(alpha, c);
    auto rep = check_stages_A2(ex.C, counterex_stage(c, alpha), ex.pi);
    INFO(alpha.str());
    CHECK(rep.overall() == Verdict::PASS);
    REQUIRE(rep.defect.has_value());
    CHECK(rep.defect->is_zero());
  }
  // and x1-dependence breaks Liedercon with a nonzero recorded defect
  for (const auto& alpha : {var(c, "x1"), var(c, "x1") * var(c, "x3")}) {
    Counterex ex(alpha, c);
    auto a2 = check_stages_A2(ex.C, counterex_stage(c, alpha), ex.pi);
    CHECK(verdict_of(a2, "Liedercon") == Verdict::FAIL);
    auto de = check_descent(ex.C, ex.pi);
    REQUIRE(de.defect.has_value());
    CHECK(!de.defect->is_zero());
  }
}

TEST_CASE("counterexample: alpha = x1 gives nonzero defect -2 th1 th2 th3") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  Polynomial alpha = var(c, "x1");
  Counterex ex(alpha, c);

  // A2's Liedercon fails, as the paper requires
  auto a2 = check_stages_A2(ex.C, counterex_stage(c, alpha), ex.pi);
  CHECK(verdict_of(a2, "Liedercon") == Verdict::FAIL);

  // descent still holds, and the emitted bivector carries the defect
  auto rep = check_descent(ex.C, ex.pi);
  CHECK(verdict_of(rep, "condi1") == Verdict::PASS);
  CHECK(verdict_of(rep, "condi2") == Verdict::PASS);
  CHECK(verdict_of(rep, "halfnorm_sharpTCcirc_in_E") == Verdict::FAIL);
  REQUIRE(rep.reduced.has_value());

  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, con(qc, 1));
  expect.set(0, 2, var(qc, "x1"));
  CHECK(*rep.reduced == expect);

  GradedFunction expect_defect(qc);
  expect_defect.add_term(0b111, con(qc, -2));
  CHECK(*rep.defect == expect_defect);
}

TEST_CASE("counterexample: onC route agrees with the lift route") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  for (const Polynomial& alpha : {var(c, "x2"), var(c, "x1"), var(c, "x2") * var(c, "x3")}) {
    Counterex ex(alpha, c);
    auto lift_route = reduce_bivector(ex.C, ex.pi);
    auto onc_route = reduce_bivector_onC(ex.pi.to_graded(), ex.C);
    REQUIRE(lift_route.reduced.has_value());
    REQUIRE(onc_route.reduced.has_value());
    CHECK(*lift_route.reduced == *onc_route.reduced);
  }
}

// Cotangent reconstruction: M = T*C for C = R^2, alpha = x1 d1 ^ d2.
// Coordinates (x1, x2, y1, y2); E spanned by d/dy_i - (1/2) alpha_ij d/dx_j.
namespace {
struct Cotangent {
  ContextPtr ctx;
  SubmanifoldSpec C;
  PoissonBivector pi;
  Cotangent()
      : ctx(make_context({"x1", "x2", "y1", "y2"})), C(ctx), pi(ctx) {
    C.solve_even(2, Polynomial::zero(ctx));
    C.solve_even(3, Polynomial::zero(ctx));
    // alpha_12 = x1 = -alpha_21
    // e1 = d/dy1 - (1/2) x1 d/dx2  ->  th3 = (1/2) x1 th2
    // e2 = d/dy2 + (1/2) x1 d/dx1  ->  th4 = -(1/2) x1 th1
    GradedFunction img1(ctx), img2(ctx);
    img1.add_term(OddSet(1) << 1, var(ctx, "x1") * Rational(1, 2));
    img2.add_term(OddSet(1) << 0, -(var(ctx, "x1") * Rational(1, 2)));
    C.solve_theta(2, img1);
    C.solve_theta(3, img2);
    C.set_quotient_coords({0, 1});
    // canonical pi on T*R^2: {x_i, y_i} = 1
    pi.set(0, 2, con(ctx, 1));
    pi.set(1, 3, con(ctx, 1));
  }
};
}  // namespace

TEST_CASE("cotangent example: Marsden-Ratiu style lift route") {
  Cotangent ex;
  // E is transversal to C, so the strict Marsden-Ratiu hypothesis sharp(E°) in TC
  // fails (as it does for the Drinfeld example); the descent conditions hold
  // and the lift computation goes through.
  auto mr = check_marsden_ratiu(ex.C, ex.pi);
  CHECK(verdict_of(mr, "sharpEcirc_in_TC") == Verdict::FAIL);

  auto rep = check_descent(ex.C, ex.pi);
  CHECK(verdict_of(rep, "condi1") == Verdict::PASS);
  CHECK(verdict_of(rep, "condi2") == Verdict::PASS);
  REQUIRE(rep.reduced.has_value());

  // lifts x~_j = x_j + (1/2) sum_i alpha_ij y_i
  auto c = ex.ctx;
  Polynomial lift1 = var(c, "x1") - var(c, "x1") * var(c, "y2") * Rational(1, 2);
  Polynomial lift2 = var(c, "x2") + var(c, "x1") * var(c, "y1") * Rational(1, 2);
  CHECK(rep.lift_table.at("x1") == lift1);
  CHECK(rep.lift_table.at("x2") == lift2);

  // reduced bivector = alpha
  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x1"));
  CHECK(*rep.reduced == expect);
  // any bivector on R^2 is Poisson
  CHECK(rep.defect->is_zero());
}

TEST_CASE("cotangent example: onC route recovers alpha and agrees") {
  Cotangent ex;
  auto onc = reduce_bivector_onC(ex.pi.to_graded(), ex.C);
  REQUIRE(onc.reduced.has_value());
  auto qc = onc.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x1"));
  CHECK(*onc.reduced == expect);

  auto lift = reduce_bivector(ex.C, ex.pi);
  REQUIRE(lift.reduced.has_value());
  CHECK(*lift.reduced == *onc.reduced);
}

TEST_CASE("lift independence under condi1") {
  Cotangent ex;
  auto c = ex.ctx;
  Geometry g = compute_geometry(ex.C);
  auto s = ex.pi.to_graded();

  // canonical lifts
  auto l1 = solve_lift(ex.C, g, 0, 3);
  auto l2 = solve_lift(ex.C, g, 1, 3);
  REQUIRE(l1);
  REQUIRE(l2);

  // alternative feasible lifts differ by terms vanishing to second order
  Polynomial y1 = var(c, "y1"), y2 = var(c, "y2");
  std::mt19937 rng(53);
  for (int it = 0; it < 20; ++it) {
    Polynomial noise1 = y1 * y2 * testutil::random_poly(rng, c, 1);
    Polynomial noise2 = y1 * y1 * testutil::random_poly(rng, c, 1);
    Polynomial alt1 = *l1 + noise1;
    Polynomial alt2 = *l2 + noise2;
    // both are still lifts: d(noise) vanishes on E along C
    CHECK(ex.C.restrict(derived_bracket(s, alt1, alt2)) ==
          ex.C.restrict(derived_bracket(s, *l1, *l2)));
  }
}

// Drinfeld double of the 2-dim bialgebra aff(1): [e1,e2] = e2 on g,
// [f1,f2]* = f2 on g*.  M = g* + g with coordinates (x1,x2,y1,y2).
namespace {
struct Drinfeld {
  ContextPtr ctx;
  SubmanifoldSpec C;
  PoissonBivector pi;
  Drinfeld() : ctx(make_context({"x1", "x2", "y1", "y2"})), C(ctx), pi(ctx) {
    // {x1,x2} = x2; {y1,y2} = y2; {x1,y2} = -y2; {x2,y1} = x2; {x2,y2} = y1 - x1
    pi.set(0, 1, var(ctx, "x2"));
    pi.set(2, 3, var(ctx, "y2"));
    pi.set(0, 3, -var(ctx, "y2"));
    pi.set(1, 2, var(ctx, "x2"));
    pi.set(1, 3, var(ctx, "y1") - var(ctx, "x1"));
    // C = g* = {y=0}, E = span(d/dy1, d/dy2)
    C.solve_even(2, Polynomial::zero(ctx));
    C.solve_even(3, Polynomial::zero(ctx));
    C.solve_theta(2, GradedFunction::zero(ctx));
    C.solve_theta(3, GradedFunction::zero(ctx));
    C.set_quotient_coords({0, 1});
  }
};
}  // namespace

TEST_CASE("Drinfeld double: the double bracket is Poisson") {
  Drinfeld ex;
  CHECK(jacobi_defect(ex.pi).is_zero());
}

TEST_CASE("Drinfeld double: Marsden-Ratiu fails, A2 applies") {
  Drinfeld ex;
  // the restriction of S to C keeps only the g* summand: x2 th1 th2
  GradedFunction srest = ex.C.restrict(ex.pi.to_graded());
  GradedFunction expect_rest(ex.ctx);
  expect_rest.add_term(0b0011, var(ex.ctx, "x2"));
  CHECK(srest == expect_rest);

  auto mr = check_marsden_ratiu(ex.C, ex.pi);
  CHECK(verdict_of(mr, "sharpEcirc_in_TC") == Verdict::FAIL);

  // A = M, D = translation extension of E
  StageSpec st{SubmanifoldSpec(ex.ctx), {th(ex.ctx, 3), th(ex.ctx, 4)}};
  auto a2 = check_stages_A2(ex.C, st, ex.pi);
  for (const auto& cond : a2.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
  REQUIRE(a2.reduced.has_value());

  // reduced = the Lie-Poisson bivector of g*: {x1,x2} = x2
  auto qc = a2.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x2"));
  CHECK(*a2.reduced == expect);
  CHECK(a2.defect->is_zero());
}

TEST_CASE("six-dimensional double with trivial cobracket: Marsden-Ratiu route") {
  // so(3) with the zero cobracket: M = g* + g, brackets
  // {x_i,x_j} = eps_ijk x_k, {y_i,y_j} = 0, {x_i,y_j} = -c_{ik}^j y_k.
  auto c = make_context({"x1", "x2", "x3", "y1", "y2", "y3"});
  PoissonBivector pi(c);
  pi.set(0, 1, var(c, "x3"));
  pi.set(1, 2, var(c, "x1"));
  pi.set(2, 0, var(c, "x2"));
  // {x_i, y_j} = -sum_k eps_{ikj} y_k
  pi.set(0, 4, var(c, "y3"));   // {x1,y2} = -eps_{132} y3 = y3
  pi.set(0, 5, -var(c, "y2"));  // {x1,y3} = -eps_{123} y2 = -y2
  pi.set(1, 3, -var(c, "y3"));  // {x2,y1} = -eps_{231} y3 = -y3
  pi.set(1, 5, var(c, "y1"));   // {x2,y3} = -eps_{213} y1 = y1
  pi.set(2, 3, var(c, "y2"));   // {x3,y1} = -eps_{321} y2 = y2
  pi.set(2, 4, -var(c, "y1"));  // {x3,y2} = -eps_{312} y1 = -y1
  REQUIRE(jacobi_defect(pi).is_zero());

  SubmanifoldSpec C(c);
  for (std::size_t i = 3; i < 6; ++i) {
    C.solve_even(i, Polynomial::zero(c));
    C.solve_theta(i, GradedFunction::zero(c));
  }
  C.set_quotient_coords({0, 1, 2});

  // with no cross cobracket terms, sharp E-circ stays tangent and the strict
  // Marsden-Ratiu hypotheses hold
  auto mr = check_marsden_ratiu(C, pi);
  for (const auto& cond : mr.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
  REQUIRE(mr.reduced.has_value());
  auto qc = mr.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x3"));
  expect.set(1, 2, var(qc, "x1"));
  expect.set(2, 0, var(qc, "x2"));
  CHECK(*mr.reduced == expect);
  CHECK(mr.defect->is_zero());
}

// The stages example: M = R^4 with standard pi, C the (x1,y1) plane,
// E = span(dx1, dx2, dy2 + x1 dy1), D|_C = span(dx1, dx2), A = {y2 = 0}.
TEST_CASE("stages example: all A1 verdicts pass") {
  auto c = make_context({"x1", "y1", "x2", "y2"});
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));  // dx1 ^ dy1
  pi.set(2, 3, con(c, 1));  // dx2 ^ dy2

  SubmanifoldSpec C(c);
  C.solve_even(2, Polynomial::zero(c));
  C.solve_even(3, Polynomial::zero(c));
  // E = span(d/dx1, d/dx2, d/dy2 + x1 d/dy1):
  // th1 = 0 (d/dx1), th3 = 0 (d/dx2), th4 = -x1 th2 (d/dy2 + x1 d/dy1)
  C.solve_theta(0, GradedFunction::zero(c));
  C.solve_theta(2, GradedFunction::zero(c));
  GradedFunction img(c);
  img.add_term(OddSet(1) << 1, -var(c, "x1"));
  C.solve_theta(3, img);

  StageSpec st{SubmanifoldSpec(c), {th(c, 1), th(c, 3)}};
  st.A.solve_even(3, Polynomial::zero(c));  // A = {y2 = 0}

  auto a1 = check_stages_A1(C, st, pi);
  for (const auto& cond : a1.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
}

TEST_CASE("prcond frame fields are honest D-sections") {
  // D = span(d1 + x4 d2) on A = M restricts to span(d1) along C = {x4=0};
  // the flow of the D-section d1 + x4 d2 preserves E (below), while the bare
  // restricted direction d1 would not, so the audit must extend within D.
  auto c = make_context({"x1", "x2", "x3", "x4"});
  PoissonBivector pi(c);  // the prcond verdict does not involve pi
  SubmanifoldSpec C(c);
  C.solve_even(3, Polynomial::zero(c));
  // E = span(d4 + x1 d3, d2 - d3, d1)
  GradedFunction e1 = th(c, 4) + GradedFunction::monomial(var(c, "x1"), OddSet(1) << 2);
  GradedFunction e2 = th(c, 2) - th(c, 3);
  GradedFunction e3 = th(c, 1);
  attach_distribution(C, {e1, e2, e3});

  StageSpec st{SubmanifoldSpec(c),
               {th(c, 1) + GradedFunction::monomial(var(c, "x4"), OddSet(1) << 1)}};
  auto a1 = check_stages_A1(C, st, pi);
  CHECK(verdict_of(a1, "prcond") == Verdict::PASS);
}

TEST_CASE("coisotropic check: Poisson submanifold with zero distribution") {
  auto c = make_context({"x1", "x2", "x3"});
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));  // d1^d2; C = {x3=0} is a Poisson submanifold
  SubmanifoldSpec C(c);
  C.solve_even(2, Polynomial::zero(c));
  auto rep = check_coisotropic(C, pi);
  for (const auto& cond : rep.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
  REQUIRE(rep.reduced.has_value());
  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, con(qc, 1));
  CHECK(*rep.reduced == expect);
}

TEST_CASE("coisotropic check: sharp N*C escaping E fails") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));
  pi.set(2, 3, con(c, 1));
  SubmanifoldSpec C(c);
  C.solve_even(3, Polynomial::zero(c));  // C = {x4=0}; sharp N*C = span(d3)
  // E = 0: sharp(dx4) = -d3 not in E
  auto rep = check_coisotropic(C, pi);
  CHECK(verdict_of(rep, "sharpNC_in_E") == Verdict::FAIL);

  // with E = span(d3) it passes
  SubmanifoldSpec C2(c);
  C2.solve_even(3, Polynomial::zero(c));
  C2.solve_theta(2, GradedFunction::zero(c));
  auto rep2 = check_coisotropic(C2, pi);
  for (const auto& cond : rep2.conditions) {
    INFO(cond.id << " " << cond.witness);
    CHECK(cond.verdict == Verdict::PASS);
  }
}

TEST_CASE("A1 with D = F and A = C specializes to the Marsden-Ratiu verdicts") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));
  pi.set(1, 2, var(c, "x3"));
  // E = span(d1) inside TC = span(d1,d2,d3): F = E, sharp E-circ lands in TC
  SubmanifoldSpec C(c);
  C.solve_even(3, Polynomial::zero(c));
  C.solve_theta(0, GradedFunction::zero(c));
  StageSpec st{SubmanifoldSpec(c), {th(c, 1)}};
  st.A.solve_even(3, Polynomial::zero(c));  // A = C

  auto a1 = check_stages_A1(C, st, pi);
  auto mr = check_marsden_ratiu(C, pi);
  CHECK(a1.overall() == mr.overall());
  REQUIRE(a1.reduced.has_value());
  REQUIRE(mr.reduced.has_value());
  CHECK(*a1.reduced == *mr.reduced);
}

TEST_CASE("consistency: E inside TC makes the Marsden-Ratiu and coisotropic audits agree") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  std::mt19937 rng(59);
  for (int it = 0; it < 10; ++it) {
    PoissonBivector pi = testutil::random_bivector(rng, c, 1);
    SubmanifoldSpec C(c);
    C.solve_even(3, Polynomial::zero(c));
    C.solve_theta(0, GradedFunction::zero(c));  // E = span(d1) inside TC
    auto co = check_coisotropic(C, pi);
    auto mr = check_marsden_ratiu(C, pi);
    CHECK(co.overall() == mr.overall());
  }
}

TEST_CASE("Marsden-Ratiu with E = 0 on C = M returns pi") {
  auto c = make_context({"x1", "x2", "x3"});
  PoissonBivector pi(c);
  pi.set(0, 1, var(c, "x3"));
  pi.set(1, 2, var(c, "x1"));
  SubmanifoldSpec C(c);
  auto rep = check_marsden_ratiu(C, pi);
  CHECK(rep.overall() == Verdict::PASS);
  REQUIRE(rep.reduced.has_value());
  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x3"));
  expect.set(1, 2, var(qc, "x1"));
  CHECK(*rep.reduced == expect);
}

TEST_CASE("reduce_bivector with E = 0 returns the restriction") {
  auto c = make_context({"x1", "x2", "x3"});
  PoissonBivector pi(c);
  pi.set(0, 1, var(c, "x3"));
  pi.set(1, 2, var(c, "x1"));
  SubmanifoldSpec C(c);  // C = M, E = 0
  auto rep = reduce_bivector(C, pi);
  REQUIRE(rep.reduced.has_value());
  // identical (context renamed only)
  auto qc = rep.reduced->context();
  PoissonBivector expect(qc);
  expect.set(0, 1, var(qc, "x3"));
  expect.set(1, 2, var(qc, "x1"));
  CHECK(*rep.reduced == expect);
}

TEST_CASE("reduce_bivector_onC rejects non-tangent restrictions") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  PoissonBivector pi(c);
  pi.set(0, 1, con(c, 1));
  pi.set(2, 3, con(c, 1));
  SubmanifoldSpec C(c);
  C.solve_even(3, Polynomial::zero(c));  // E = 0; restrict(S) keeps th3 th4
  auto rep = reduce_bivector_onC(pi.to_graded(), C);
  CHECK(!rep.reduced.has_value());
  CHECK(rep.error.find("non-quotient odd") != std::string::npos);
}

TEST_CASE("zero restriction gives the zero bivector") {
  auto c = make_context({"x1", "x2", "x3", "x4"});
  PoissonBivector pi(c);
  pi.set(2, 3, var(c, "x4"));  // S = x4 th3 th4
  SubmanifoldSpec C(c);
  C.solve_even(3, Polynomial::zero(c));
  C.solve_theta(2, GradedFunction::zero(c));
  C.solve_theta(3, GradedFunction::zero(c));
  auto rep = reduce_bivector_onC(pi.to_graded(), C);
  REQUIRE(rep.reduced.has_value());
  CHECK(rep.reduced->is_zero());
}
