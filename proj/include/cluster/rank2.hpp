#pragma once

// Rank-2 cluster algebras through the recurrence x_{m+1} x_{m-1} = x_m^r + 1.
// Every seed of the quiver 1 =r=> 2 is a consecutive pair (x_m, x_{m+1}), so
// the chain replaces a full seed search.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cluster/laurent.hpp"
#include "cluster/parallel.hpp"
#include "cluster/seed.hpp"

namespace cluster {

struct Rank2Chain {
  unsigned r = 0;
  std::size_t depth = 0;
  long first_index = 0;             // window holds x_first .. x_{first + size - 1}
  std::vector<LaurentPoly> window;  // 2 * depth consecutive variables
  std::optional<std::size_t> period;

  long last_index() const { return first_index + static_cast<long>(window.size()) - 1; }

  const LaurentPoly& at(long m) const {
    if (m < first_index || m > last_index()) throw std::out_of_range("chain index outside window");
    return window[static_cast<std::size_t>(m - first_index)];
  }

  std::vector<LaurentPoly> distinct_variables() const {
    std::vector<LaurentPoly> v = window;
    std::sort(v.begin(), v.end(), LaurentLess{});
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
};

namespace detail {

inline LaurentPoly rank2_step(const LaurentPoly& mid, const LaurentPoly& other, unsigned r) {
  auto q = div_exact(mid.pow(r) + LaurentPoly::one(2), other);
  if (!q) throw DivisionNotExact(0);
  return std::move(*q);
}

}  // namespace detail

/// x_1, x_2 extended both ways to the window x_{2-depth} .. x_{1+depth}.
/// `period` is the least p with (x_{1+p}, x_{2+p}) = (x_1, x_2); searched up
/// to p = 16 for r <= 1 and inside the window otherwise.
inline Rank2Chain enumerate_chain(unsigned r, std::size_t depth, const Schedule& schedule = {}) {
  if (depth < 1) throw std::invalid_argument("chain depth must be at least 1");
  const LaurentPoly x1 = LaurentPoly::variable(2, 0), x2 = LaurentPoly::variable(2, 1);

  std::vector<LaurentPoly> forward{x1, x2};  // x_1, x_2, x_3, ...
  std::vector<LaurentPoly> backward;         // x_0, x_{-1}, ...
  parallel_for(2, schedule, [&](std::size_t direction) {
    if (direction == 0) {
      while (forward.size() < depth + 1)
        forward.push_back(detail::rank2_step(forward.back(), forward[forward.size() - 2], r));
      return;
    }
    LaurentPoly hi = x2, lo = x1;
    while (backward.size() + 1 < depth) {
      LaurentPoly prev = detail::rank2_step(lo, hi, r);
      hi = std::move(lo);
      lo = prev;
      backward.push_back(std::move(prev));
    }
  });

  Rank2Chain chain;
  chain.r = r;
  chain.depth = depth;
  chain.first_index = 1 - static_cast<long>(backward.size());
  chain.window.assign(backward.rbegin(), backward.rend());
  chain.window.insert(chain.window.end(), forward.begin(), forward.end());

  if (r <= 1) {
    LaurentPoly a = x1, b = x2;
    for (std::size_t p = 1; p <= 16 && !chain.period; ++p) {
      LaurentPoly c = detail::rank2_step(b, a, r);
      a = std::move(b);
      b = std::move(c);
      if (a == x1 && b == x2) chain.period = p;
    }
  } else {
    // Variables grow too fast to step past the window; look inside it only.
    for (long m = 2; m < chain.last_index() && !chain.period; ++m)
      if (chain.at(m) == x1 && chain.at(m + 1) == x2) chain.period = static_cast<std::size_t>(m - 1);
  }
  return chain;
}

/// Distinct window variables whose denominator vector does not have both
/// entries positive, sorted by compare().
inline std::vector<LaurentPoly> special_variables(const Rank2Chain& chain) {
  std::vector<LaurentPoly> out;
  for (const auto& v : chain.distinct_variables()) {
    const DenVector d = den_vector(v);
    if (!(d[0] > 0 && d[1] > 0)) out.push_back(v);
  }
  return out;
}

/// Distinct clusters {x_m, x_{m+1}} of the window.
inline std::vector<std::pair<LaurentPoly, LaurentPoly>> chain_clusters(const Rank2Chain& chain) {
  std::vector<std::pair<LaurentPoly, LaurentPoly>> out;
  for (std::size_t i = 0; i + 1 < chain.window.size(); ++i) {
    auto a = chain.window[i], b = chain.window[i + 1];
    if (compare(b, a) < 0) std::swap(a, b);
    if (std::find(out.begin(), out.end(), std::make_pair(a, b)) == out.end()) out.emplace_back(a, b);
  }
  return out;
}

inline std::size_t clusters_containing_x1(const Rank2Chain& chain) {
  if (chain.depth < 2) throw std::invalid_argument("clusters_containing_x1 needs depth >= 2");
  const LaurentPoly x1 = LaurentPoly::variable(2, 0);
  std::size_t count = 0;
  for (const auto& [a, b] : chain_clusters(chain))
    if (a == x1 || b == x1) ++count;
  return count;
}

inline nlohmann::json to_json(const Rank2Chain& chain) {
  using nlohmann::json;
  json vars = json::array();
  for (long m = chain.first_index; m <= chain.last_index(); ++m) {
    const auto& v = chain.at(m);
    vars.push_back({{"index", m}, {"expr", v.to_string()}, {"den", den_vector(v).entries}, {"poly", to_json(v)}});
  }
  json special = json::array();
  for (const auto& v : special_variables(chain)) special.push_back(v.to_string());
  return {{"r", chain.r},
          {"depth", chain.depth},
          {"first_index", chain.first_index},
          {"period", chain.period ? json(*chain.period) : json(nullptr)},
          {"distinct_variables", chain.distinct_variables().size()},
          {"variables", std::move(vars)},
          {"special_variables", std::move(special)},
          {"clusters_containing_x1", chain.depth >= 2 ? json(clusters_containing_x1(chain)) : json(nullptr)}};
}

}  // namespace cluster
