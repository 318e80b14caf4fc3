#pragma once

#include <string>
#include <vector>

namespace gspr {

// Bundled problem files: the worked examples of the engine, runnable
// end-to-end through the CLI `examples` command.
struct Fixture {
  const char* name;
  const char* command;  // CLI command to run
  bool level_set;       // mw-quotient flag
  int expected_status;  // expected process status
  const char* text;
};

inline const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> fs = {
      {"counterexample-x2", "reduce", false, 0, R"(# R^4 with pi = d1^d2 + d3^d4,
# C = {x4 = 0}, E spanned by d4 + x2 d1.  The reduced structure is Poisson.
[variables]
even = x1 x2 x3 x4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[submanifold]
solve x4 = 0
quotient = x1 x2 x3

[distribution.E]
gen = th4 + x2*th1
)"},
      {"counterexample-x1", "reduce", false, 1, R"(# Same data with alpha = x1: the
# descended bivector fails Jacobi with defect -2 th1 th2 th3.
[variables]
even = x1 x2 x3 x4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[submanifold]
solve x4 = 0
quotient = x1 x2 x3

[distribution.E]
gen = th4 + x1*th1
)"},
      {"counterexample-x1-stages", "check", false, 1, R"(# The stages audit for
# alpha = x1: Liedercon fails, so Thm A2 does not apply.
[variables]
even = x1 x2 x3 x4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[submanifold]
solve x4 = 0
quotient = x1 x2 x3

[distribution.E]
gen = th4 + x1*th1

[stage.A]
# A = M: no constraints

[distribution.D]
gen = th4 + x1*th1
)"},
      {"cotangent", "reduce", false, 0, R"(# T*R^2 with the canonical structure;
# C the zero section, E the graph of -(1/2) alpha-sharp for alpha = x1 d1^d2.
# Reduction reconstructs alpha.
[variables]
even = x1 x2 y1 y2

[bivector]
pi[1][3] = 1
pi[2][4] = 1

[submanifold]
solve y1 = 0
solve y2 = 0
quotient = x1 x2

[distribution.E]
gen = th3 - 1/2*x1*th2
gen = th4 + 1/2*x1*th1
)"},
      {"drinfeld", "check", false, 0, R"(# Dual of the Drinfeld double of the
# 2-dimensional bialgebra aff(1): C = g*, E transversal.  The strict
# Marsden-Ratiu hypothesis fails but reduction in stages applies.
[variables]
even = x1 x2 y1 y2

[bivector]
pi[1][2] = x2
pi[3][4] = y2
pi[1][4] = 0 - y2
pi[2][3] = x2
pi[2][4] = y1 - x1

[submanifold]
solve y1 = 0
solve y2 = 0
quotient = x1 x2

[distribution.E]
gen = th3
gen = th4

[stage.A]
# A = M

[distribution.D]
gen = th3
gen = th4
)"},
      {"stages-plane", "check", false, 0, R"(# The reduction-in-stages example:
# standard pi on R^4, C the (x1,y1) plane, E = span(dx1, dx2, dy2 + x1 dy1),
# D = span(dx1, dx2) on A = {y2 = 0}.  All Thm A1 conditions hold.
[variables]
even = x1 y1 x2 y2

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[submanifold]
solve x2 = 0
solve y2 = 0
quotient = y1

[distribution.E]
gen = th1
gen = th3
gen = th4 + x1*th2

[stage.A]
solve y2 = 0

[distribution.D]
gen = th1
gen = th3
)"},
      {"presymplectic-no", "check", false, 1, R"(# Constraints th1 and th2 - x1 th3
# on R^3: the degree-0 bracket matrix vanishes on the body and the
# characteristic directions are not involutive, so not presymplectic.
[variables]
even = x1 x2 x3

[distribution.E]
gen = th1
gen = th2 - x1*th3
)"},
      {"presymplectic-yes", "check", false, 0, R"(# Adding the even constraint x2
# makes the constraint set presymplectic.
[variables]
even = x1 x2 x3

[submanifold]
solve x2 = 0

[distribution.E]
gen = th1
gen = th2 - x1*th3
)"},
      {"contact", "check", false, 1, R"(# E = ker(x1 dx2 + dx3) on R^3 is the
# contact distribution: not involutive, hence not presymplectic.
[variables]
even = x1 x2 x3

[distribution.E]
gen = th1
gen = th2 - x1*th3
)"},
      {"moment-dgla", "dgla-check", false, 0, R"(# The identity crossed module of
# g = R acting on (R^4, d1^d2 + d3^d4) with moment map J0 = m4.
[variables]
even = m1 m2 m3 m4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[dgla]
dim_h = 1
dim_g = 1
delta[1][1] = 1

[action]
J0[1] = m4
J1[1] = th3
)"},
      {"moment-act", "act-verify", false, 0, R"(# Numeric verification of the Lie
# 2-group law on the pair groupoid of (R^4, d1^d2 + d3^d4).
[variables]
even = m1 m2 m3 m4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[dgla]
dim_h = 1
dim_g = 1
delta[1][1] = 1

[action]
J0[1] = m4
J1[1] = th3

[groups]
H = vector 1
G = vector 1
partial = identity
phi = trivial

[pairgroupoid]
samples = 100
seed = 20240817
tolerance = 1e-8
)"},
      {"moment-global-quotient", "mw-quotient", false, 0, R"(# The global quotient
# of the pair groupoid: R^3 x R^3 with -dx1^dx2 + dy1^dy2.
[variables]
even = m1 m2 m3 m4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[dgla]
dim_h = 1
dim_g = 1
delta[1][1] = 1

[action]
J0[1] = m4
J1[1] = th3
)"},
      {"moment-mw-quotient", "mw-quotient", true, 0, R"(# The Marsden-Weinstein
# quotient at zero of the lifted action: the symplectic pair groupoid of the
# reduced plane.
[variables]
even = m1 m2 m3 m4

[bivector]
pi[1][2] = 1
pi[3][4] = 1

[dgla]
dim_h = 1
dim_g = 1
delta[1][1] = 1

[action]
J0[1] = m4
J1[1] = th3
)"},
      {"trivial-check", "check", false, 0, R"(# Empty constraint set: everything is
# trivially presymplectic.
[variables]
even = x1 x2

[bivector]
pi[1][2] = 1

[submanifold]
quotient = x1 x2
)"},
  };
  return fs;
}

}  // namespace gspr
