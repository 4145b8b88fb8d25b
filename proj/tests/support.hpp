#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "cluster/laurent.hpp"

namespace cluster::test {

/// Seed for randomized tests; set by --seed=N or CLUSTER_TEST_SEED.
std::uint64_t seed();

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(seed() ^ (salt * 0x9e3779b97f4a7c15ULL)); }

/// x_i with 1-based i, matching printed expressions.
inline LaurentPoly x(std::size_t n, std::size_t i) { return LaurentPoly::variable(n, i - 1); }

inline LaurentPoly c(std::size_t n, long v) { return LaurentPoly::constant(n, v); }

inline LaurentPoly random_poly(std::mt19937_64& g, std::size_t n, std::size_t terms, int lo, int hi,
                               long coeff = 9, bool nonneg = false) {
  std::uniform_int_distribution<int> e(lo, hi);
  std::uniform_int_distribution<long> k(nonneg ? 1 : -coeff, coeff);
  std::vector<Term> ts;
  for (std::size_t t = 0; t < terms; ++t) {
    ExponentVector v(n);
    for (auto& ei : v) ei = e(g);
    ts.push_back({v, Coefficient(k(g))});
  }
  return LaurentPoly::from_terms(n, std::move(ts));
}

/// Random nonzero rationals, one per variable.
inline std::vector<mpq_class> random_point(std::mt19937_64& g, std::size_t n) {
  std::uniform_int_distribution<long> num(1, 23), den(1, 7), sign(0, 1);
  std::vector<mpq_class> p;
  for (std::size_t i = 0; i < n; ++i) {
    mpq_class q(num(g) * (sign(g) ? 1 : -1), den(g));
    q.canonicalize();
    p.push_back(q);
  }
  return p;
}

}  // namespace cluster::test
