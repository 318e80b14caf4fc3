#pragma once

#include "gspr/bivector.hpp"
#include "gspr/graded.hpp"
#include "gspr/polynomial.hpp"

#include <random>
#include <vector>

// Shared random generators for the property suites.  Everything is seeded so
// failures reproduce.
namespace testutil {

using namespace gspr;

inline Rational random_rational(std::mt19937& rng, int num_bound = 5, int den_bound = 3) {
  std::uniform_int_distribution<int> num(-num_bound, num_bound);
  std::uniform_int_distribution<int> den(1, den_bound);
  return Rational(num(rng), den(rng));
}

inline Polynomial random_poly(std::mt19937& rng, const ContextPtr& ctx, unsigned max_deg,
                              int max_terms = 3) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<unsigned> expo(0, max_deg);
  Polynomial p(ctx);
  int t = nterms(rng);
  for (int k = 0; k < t; ++k) {
    Monomial m(ctx->size(), 0);
    unsigned budget = max_deg;
    for (std::size_t i = 0; i < ctx->size(); ++i) {
      unsigned e = expo(rng) % (budget + 1);
      m[i] = e;
      budget -= e;
    }
    p.add_term(m, random_rational(rng));
  }
  return p;
}

// Homogeneous graded function of the given odd degree.
inline GradedFunction random_graded(std::mt19937& rng, const ContextPtr& ctx, int degree,
                                    unsigned max_poly_deg = 3, int max_terms = 2) {
  GradedFunction f(ctx);
  const int n = static_cast<int>(ctx->size());
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  int t = nterms(rng);
  for (int k = 0; k < t; ++k) {
    OddSet s = 0;
    while (gspr::detail::popcount(s) < degree) s |= OddSet(1) << pick(rng);
    f.add_term(s, random_poly(rng, ctx, max_poly_deg));
  }
  return f;
}

inline PoissonBivector random_bivector(std::mt19937& rng, const ContextPtr& ctx,
                                       unsigned max_deg = 2) {
  PoissonBivector pi(ctx);
  for (std::size_t i = 0; i < ctx->size(); ++i)
    for (std::size_t j = i + 1; j < ctx->size(); ++j) pi.set(i, j, random_poly(rng, ctx, max_deg));
  return pi;
}

inline std::vector<Polynomial> random_field(std::mt19937& rng, const ContextPtr& ctx,
                                            unsigned max_deg = 2) {
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < ctx->size(); ++i) comps.push_back(random_poly(rng, ctx, max_deg));
  return comps;
}

}  // namespace testutil
