#pragma once

// Seeds (cluster, exchange matrix) in coordinates of a fixed base cluster,
// seed mutation through the exchange relation, and canonical keys that
// identify seeds up to simultaneous permutation of positions.

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluster/hash.hpp"
#include "cluster/laurent.hpp"
#include "cluster/quiver.hpp"

namespace cluster {

class DivisionNotExact : public std::runtime_error {
 public:
  explicit DivisionNotExact(std::size_t k)
      : std::runtime_error("exchange relation not exactly divisible in direction " +
                           std::to_string(k + 1)) {}
};

struct Seed {
  std::vector<LaurentPoly> vars;
  BMatrix matrix;

  Seed() = default;
  Seed(std::vector<LaurentPoly> v, BMatrix m) : vars(std::move(v)), matrix(std::move(m)) {
    if (vars.size() != matrix.size())
      throw std::invalid_argument("seed has " + std::to_string(vars.size()) +
                                  " variables for a rank " + std::to_string(matrix.size()) + " matrix");
    for (const auto& x : vars)
      if (x.rank() != vars.size()) throw RankMismatch(x.rank(), vars.size());
  }

  std::size_t rank() const { return vars.size(); }
  bool operator==(const Seed&) const = default;
};

inline Seed initial_seed(const BMatrix& b) {
  std::vector<LaurentPoly> vars;
  for (std::size_t i = 0; i < b.size(); ++i) vars.push_back(LaurentPoly::variable(b.size(), i));
  return Seed(std::move(vars), b);
}

/// prod_{b(i,k)>0} vars[i]^{b(i,k)} + prod_{b(k,j)>0} vars[j]^{b(k,j)}.
/// Works for any variable list whose entries share one ambient rank.
inline LaurentPoly exchange_binomial(std::span<const LaurentPoly> vars, const BMatrix& b, std::size_t k) {
  const std::size_t rank = vars.front().rank();
  LaurentPoly in = LaurentPoly::one(rank), out = LaurentPoly::one(rank);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int e = b(i, k);
    if (e > 0) in *= vars[i].pow(static_cast<unsigned>(e));
    if (e < 0) out *= vars[i].pow(static_cast<unsigned>(-e));
  }
  return in + out;
}

/// The variable that replaces vars[k] under mutation in direction k.
inline LaurentPoly exchanged_variable(std::span<const LaurentPoly> vars, const BMatrix& b, std::size_t k) {
  auto q = div_exact(exchange_binomial(vars, b, k), vars[k]);
  if (!q) throw DivisionNotExact(k);
  return std::move(*q);
}

inline Seed mutate_seed(const Seed& s, std::size_t k) {
  if (k >= s.rank()) throw std::out_of_range("mutation direction out of range");
  Seed out = s;
  out.vars[k] = exchanged_variable(s.vars, s.matrix, k);
  out.matrix = mutate_matrix(s.matrix, k);
  return out;
}

/// Sorted variables plus the matrix conjugated by the sorting permutation.
struct CanonicalSeedKey {
  std::vector<LaurentPoly> vars;
  BMatrix matrix;

  bool operator==(const CanonicalSeedKey&) const = default;

  /// Stable across platforms: hashes exponents and decimal coefficients.
  std::uint64_t stable_hash() const {
    Fnv1a h;
    h.add_int(static_cast<std::int64_t>(matrix.size()));
    for (const auto& v : vars) {
      h.add_int(static_cast<std::int64_t>(v.size()));
      for (const auto& t : v.terms()) {
        for (int e : t.exp) h.add_int(e);
        h.add(t.coeff.get_str());
        h.add(";");
      }
    }
    for (int e : matrix.entries()) h.add_int(e);
    return h.value();
  }
};

struct CanonicalSeedKeyHash {
  std::size_t operator()(const CanonicalSeedKey& k) const { return static_cast<std::size_t>(k.stable_hash()); }
};

/// Permutation sorting s.vars ascending under compare(); perm[i] is the
/// position in s that lands at sorted position i.
inline std::vector<std::size_t> canonical_order(const Seed& s) {
  std::vector<std::size_t> perm(s.rank());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return compare(s.vars[a], s.vars[b]) < 0; });
  for (std::size_t i = 1; i < perm.size(); ++i)
    if (s.vars[perm[i - 1]] == s.vars[perm[i]])
      throw std::invalid_argument("seed contains a repeated variable");
  return perm;
}

inline CanonicalSeedKey canonical_key(const Seed& s) {
  const auto perm = canonical_order(s);
  CanonicalSeedKey key;
  key.vars.reserve(s.rank());
  for (std::size_t p : perm) key.vars.push_back(s.vars[p]);
  key.matrix = s.matrix.permuted(perm);
  return key;
}

inline nlohmann::json to_json(const Seed& s) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : s.vars) vars.push_back(to_json(v));
  return {{"matrix", to_json(s.matrix)}, {"vars", std::move(vars)}};
}

inline Seed seed_from_json(const nlohmann::json& j) {
  std::vector<LaurentPoly> vars;
  for (const auto& v : j.at("vars")) vars.push_back(laurent_from_json(v));
  return Seed(std::move(vars), BMatrix::from_rows(j.at("matrix").get<std::vector<std::vector<int>>>()));
}

}  // namespace cluster
