#pragma once

/**
 * @file atlas.hpp
 * @brief Exchange-graph enumeration with canonical deduplication.
 *
 * enumerate() runs a breadth-first closure from the initial seed of a
 * matrix under all n mutations.  Seeds are identified by CanonicalSeedKey,
 * i.e. up to simultaneous permutation of (variables, matrix rows/columns).
 * Each BFS layer is mutated in parallel and merged sequentially in
 * (frontier position, direction) order, so the resulting atlas is the same
 * for every worker count and schedule.
 *
 * The finished atlas owns the variable set X (sorted by compare()), the list
 * of clusters as sorted index sets into X, and the exchange graph.
 *
 * Re-expansion (expand_in_base) walks the exchange graph from a chosen seed
 * S and mutates a second copy of every seed in which S's cluster has been
 * renamed to fresh coordinates (y_1, ..., y_n).  Both copies see the same
 * matrices, so the fresh copy of a variable is its Laurent expansion in S.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cluster/laurent.hpp"
#include "cluster/parallel.hpp"
#include "cluster/quiver.hpp"
#include "cluster/seed.hpp"

namespace cluster {

enum class AtlasStatus { Complete, Truncated };

inline const char* to_string(AtlasStatus s) { return s == AtlasStatus::Complete ? "complete" : "truncated"; }

struct EnumerationLimits {
  std::size_t max_seeds = 100000;
  std::size_t max_depth = 64;

  void validate() const {
    if (max_seeds == 0 || max_depth == 0) throw std::invalid_argument("enumeration limits must be positive");
  }
  bool operator==(const EnumerationLimits&) const = default;
};

struct AtlasNode {
  Seed seed;  // positional, as first discovered
  std::size_t depth = 0;
  std::vector<std::optional<std::size_t>> neighbors;  // per direction; empty when unexplored
  std::vector<std::size_t> var_ids;                   // positional, into variables()
  std::size_t cluster = 0;                            // into clusters()
};

struct AtlasEdge {
  std::size_t from;
  std::size_t direction;
  std::size_t to;
  bool operator==(const AtlasEdge&) const = default;
};

class ExchangeAtlas {
 public:
  std::size_t rank() const { return base_.rank(); }
  const Seed& base() const { return base_; }
  const std::vector<AtlasNode>& seeds() const { return nodes_; }
  const std::vector<AtlasEdge>& edges() const { return edges_; }
  const std::vector<LaurentPoly>& variables() const { return variables_; }
  const std::vector<std::vector<std::size_t>>& clusters() const { return clusters_; }
  /// Seeds realizing each cluster.
  const std::vector<std::vector<std::size_t>>& cluster_seeds() const { return cluster_seeds_; }
  /// Clusters containing each variable.
  const std::vector<std::vector<std::size_t>>& variable_clusters() const { return variable_clusters_; }
  AtlasStatus status() const { return status_; }
  bool complete() const { return status_ == AtlasStatus::Complete; }
  const EnumerationLimits& limits() const { return limits_; }

  std::optional<std::size_t> find_variable(const LaurentPoly& v) const {
    if (v.rank() != rank()) return std::nullopt;
    auto it = std::lower_bound(variables_.begin(), variables_.end(), v, LaurentLess{});
    if (it == variables_.end() || !(*it == v)) return std::nullopt;
    return static_cast<std::size_t>(it - variables_.begin());
  }

  std::size_t variable_index(const LaurentPoly& v) const {
    auto i = find_variable(v);
    if (!i) throw std::invalid_argument("not a variable of this atlas: " + v.to_string());
    return *i;
  }

  std::optional<std::size_t> find_seed(const CanonicalSeedKey& key) const {
    auto it = key_index_.find(key);
    if (it == key_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> find_seed_by_hash(std::uint64_t h) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (seed_hashes_[i] == h) return i;
    return std::nullopt;
  }

  std::uint64_t seed_hash(std::size_t s) const { return seed_hashes_.at(s); }

  /// Cluster index of a sorted variable-id set.
  std::optional<std::size_t> find_cluster(const std::vector<std::size_t>& sorted_ids) const {
    auto it = std::lower_bound(clusters_.begin(), clusters_.end(), sorted_ids);
    if (it == clusters_.end() || *it != sorted_ids) return std::nullopt;
    return static_cast<std::size_t>(it - clusters_.begin());
  }

  /// Undirected cluster-level exchange graph: sorted pairs (c1 < c2).
  std::vector<std::pair<std::size_t, std::size_t>> cluster_graph() const {
    std::vector<std::pair<std::size_t, std::size_t>> g;
    for (const auto& e : edges_) {
      const std::size_t a = nodes_[e.from].cluster, b = nodes_[e.to].cluster;
      if (a != b) g.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }

  bool operator==(const ExchangeAtlas& o) const {
    if (!(base_ == o.base_) || status_ != o.status_ || !(limits_ == o.limits_)) return false;
    if (nodes_.size() != o.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!(nodes_[i].seed == o.nodes_[i].seed) || nodes_[i].depth != o.nodes_[i].depth ||
          nodes_[i].neighbors != o.nodes_[i].neighbors)
        return false;
    return true;
  }

 private:
  friend ExchangeAtlas enumerate(const BMatrix&, const EnumerationLimits&, const Schedule&);
  friend ExchangeAtlas atlas_from_json(const nlohmann::json&);

  // Derives variables, clusters, edges and lookup tables from nodes_.
  void finalize() {
    const std::size_t n = rank();
    variables_.clear();
    for (const auto& node : nodes_)
      for (const auto& v : node.seed.vars) variables_.push_back(v);
    std::sort(variables_.begin(), variables_.end(), LaurentLess{});
    variables_.erase(std::unique(variables_.begin(), variables_.end()), variables_.end());

    std::vector<std::vector<std::size_t>> sets;
    for (auto& node : nodes_) {
      node.var_ids.clear();
      for (const auto& v : node.seed.vars) node.var_ids.push_back(*find_variable(v));
      auto s = node.var_ids;
      std::sort(s.begin(), s.end());
      sets.push_back(std::move(s));
    }
    clusters_ = sets;
    std::sort(clusters_.begin(), clusters_.end());
    clusters_.erase(std::unique(clusters_.begin(), clusters_.end()), clusters_.end());

    cluster_seeds_.assign(clusters_.size(), {});
    variable_clusters_.assign(variables_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      nodes_[i].cluster = *find_cluster(sets[i]);
      cluster_seeds_[nodes_[i].cluster].push_back(i);
    }
    for (std::size_t c = 0; c < clusters_.size(); ++c)
      for (std::size_t v : clusters_[c]) variable_clusters_[v].push_back(c);

    edges_.clear();
    key_index_.clear();
    seed_hashes_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (std::size_t k = 0; k < nodes_[i].neighbors.size() && k < n; ++k)
        if (nodes_[i].neighbors[k]) edges_.push_back({i, k, *nodes_[i].neighbors[k]});
      auto key = canonical_key(nodes_[i].seed);
      seed_hashes_.push_back(key.stable_hash());
      key_index_.emplace(std::move(key), i);
    }
  }

  Seed base_;
  std::vector<AtlasNode> nodes_;
  std::vector<AtlasEdge> edges_;
  std::vector<LaurentPoly> variables_;
  std::vector<std::vector<std::size_t>> clusters_;
  std::vector<std::vector<std::size_t>> cluster_seeds_;
  std::vector<std::vector<std::size_t>> variable_clusters_;
  std::unordered_map<CanonicalSeedKey, std::size_t, CanonicalSeedKeyHash> key_index_;
  std::vector<std::uint64_t> seed_hashes_;
  AtlasStatus status_ = AtlasStatus::Complete;
  EnumerationLimits limits_;
};

/// Breadth-first closure from initial_seed(b).  Seeds at depth max_depth are
/// still mutated to find edges among known seeds but are not expanded; the
/// atlas is Truncated iff some mutation led to a seed that was not admitted.
/// Throws DivisionNotExact only on an engine fault (Laurent phenomenon).
inline ExchangeAtlas enumerate(const BMatrix& b, const EnumerationLimits& limits = {},
                               const Schedule& schedule = {}) {
  limits.validate();
  const std::size_t n = b.size();
  ExchangeAtlas atlas;
  atlas.base_ = initial_seed(b);
  atlas.limits_ = limits;

  std::unordered_map<CanonicalSeedKey, std::size_t, CanonicalSeedKeyHash> index;
  atlas.nodes_.push_back({atlas.base_, 0, {}, {}, 0});
  index.emplace(canonical_key(atlas.base_), 0);

  bool truncated = false;
  std::vector<std::size_t> frontier{0};
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    struct Step {
      Seed seed;
      CanonicalSeedKey key;
    };
    std::vector<Step> steps(frontier.size() * n);
    parallel_for(steps.size(), schedule, [&](std::size_t i) {
      const Seed& from = atlas.nodes_[frontier[i / n]].seed;
      steps[i].seed = mutate_seed(from, i % n);
      steps[i].key = canonical_key(steps[i].seed);
    });

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::size_t f = frontier[i / n], k = i % n;
      if (atlas.nodes_[f].neighbors.empty()) atlas.nodes_[f].neighbors.resize(n);
      if (auto it = index.find(steps[i].key); it != index.end()) {
        atlas.nodes_[f].neighbors[k] = it->second;
      } else if (depth < limits.max_depth && atlas.nodes_.size() < limits.max_seeds) {
        const std::size_t id = atlas.nodes_.size();
        index.emplace(std::move(steps[i].key), id);
        atlas.nodes_.push_back({std::move(steps[i].seed), depth + 1, {}, {}, 0});
        atlas.nodes_[f].neighbors[k] = id;
        next.push_back(id);
      } else {
        truncated = true;
      }
    }
    frontier = std::move(next);
  }
  for (auto& node : atlas.nodes_)
    if (node.neighbors.empty()) node.neighbors.resize(n);

  atlas.status_ = truncated ? AtlasStatus::Truncated : AtlasStatus::Complete;
  atlas.finalize();
  return atlas;
}

/// Clusters (indices into atlas.clusters()) containing v.
inline std::vector<std::size_t> clusters_containing(const ExchangeAtlas& atlas, const LaurentPoly& v) {
  return atlas.variable_clusters()[atlas.variable_index(v)];
}

/// Laurent expansion of every atlas variable in the cluster of seed s, as a
/// table indexed like atlas.variables().  Entry i is the polynomial L with
/// L(u_1, ..., u_n) = variables()[i], where u are s's variables in position
/// order.  Entries are empty only for variables unreachable from s.
inline std::vector<std::optional<LaurentPoly>> expansions_in_seed(const ExchangeAtlas& atlas, std::size_t s) {
  const auto& nodes = atlas.seeds();
  if (s >= nodes.size()) throw std::out_of_range("seed index out of range");
  const std::size_t n = atlas.rank();

  std::vector<std::optional<LaurentPoly>> out(atlas.variables().size());
  std::vector<std::vector<LaurentPoly>> fresh(nodes.size());
  fresh[s] = initial_seed(nodes[s].seed.matrix).vars;
  for (std::size_t p = 0; p < n; ++p) out[nodes[s].var_ids[p]] = fresh[s][p];

  std::vector<std::size_t> queue{s};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t a = queue[head];
    const AtlasNode& from = nodes[a];
    for (std::size_t k = 0; k < n; ++k) {
      if (!from.neighbors[k]) continue;
      const std::size_t b = *from.neighbors[k];
      if (!fresh[b].empty()) continue;
      const AtlasNode& to = nodes[b];

      std::vector<std::size_t> ids = from.var_ids;
      std::vector<LaurentPoly> coords = fresh[a];
      for (std::size_t id : to.var_ids)
        if (std::find(from.var_ids.begin(), from.var_ids.end(), id) == from.var_ids.end()) ids[k] = id;
      coords[k] = exchanged_variable(fresh[a], from.seed.matrix, k);

      fresh[b].resize(n);
      for (std::size_t p = 0; p < n; ++p) {
        auto q = std::find(ids.begin(), ids.end(), to.var_ids[p]) - ids.begin();
        fresh[b][p] = coords[static_cast<std::size_t>(q)];
      }
      if (!out[ids[k]]) out[ids[k]] = coords[k];
      queue.push_back(b);
    }
  }
  return out;
}

/// The expansion of v in the cluster of seed s (see expansions_in_seed).
inline LaurentPoly expand_in_base(const ExchangeAtlas& atlas, const LaurentPoly& v, std::size_t s) {
  const std::size_t id = atlas.variable_index(v);
  auto table = expansions_in_seed(atlas, s);
  if (!table[id]) throw std::invalid_argument("variable not reachable from seed " + std::to_string(s));
  return std::move(*table[id]);
}

/// Expansions of all variables in all seeds, computed seed-parallel.
class ExpansionTable {
 public:
  ExpansionTable(const ExchangeAtlas& atlas, const Schedule& schedule = {}) : table_(atlas.seeds().size()) {
    parallel_for(table_.size(), schedule, [&](std::size_t s) { table_[s] = expansions_in_seed(atlas, s); });
  }

  const std::optional<LaurentPoly>& at(std::size_t seed, std::size_t variable) const {
    return table_.at(seed).at(variable);
  }

 private:
  std::vector<std::vector<std::optional<LaurentPoly>>> table_;
};

inline std::string to_dot(const ExchangeAtlas& atlas) {
  std::ostringstream out;
  out << "graph exchange_graph {\n";
  for (std::size_t i = 0; i < atlas.seeds().size(); ++i)
    out << "  n" << i << " [label=\"" << hex64(atlas.seed_hash(i)) << "\"];\n";
  for (const auto& e : atlas.edges())
    if (e.from < e.to) out << "  n" << e.from << " -- n" << e.to << ";\n";
  out << "}\n";
  return out.str();
}

// Seed, variable and cluster references are 0-based array indices;
// mutation directions are 1-based vertex numbers.
inline nlohmann::json to_json(const ExchangeAtlas& atlas) {
  using nlohmann::json;
  json vars = json::array();
  for (const auto& v : atlas.variables()) vars.push_back(to_json(v));
  json seeds = json::array();
  for (std::size_t i = 0; i < atlas.seeds().size(); ++i) {
    const auto& node = atlas.seeds()[i];
    json nb = json::array();
    for (const auto& x : node.neighbors) nb.push_back(x ? json(*x) : json(nullptr));
    json s = to_json(node.seed);
    s["key"] = hex64(atlas.seed_hash(i));
    s["depth"] = node.depth;
    s["var_ids"] = node.var_ids;
    s["cluster"] = node.cluster;
    s["neighbors"] = std::move(nb);
    seeds.push_back(std::move(s));
  }
  json edges = json::array();
  for (const auto& e : atlas.edges()) edges.push_back({e.from, e.direction + 1, e.to});
  return {{"format", "cluster-atlas"},
          {"version", 1},
          {"rank", atlas.rank()},
          {"status", to_string(atlas.status())},
          {"limits", {{"max_seeds", atlas.limits().max_seeds}, {"max_depth", atlas.limits().max_depth}}},
          {"base", to_json(atlas.base())},
          {"variables", std::move(vars)},
          {"clusters", atlas.clusters()},
          {"seeds", std::move(seeds)},
          {"edges", std::move(edges)}};
}

/// Rebuilds an atlas from to_json output; derived data is recomputed and
/// checked against the stored variables and clusters.
inline ExchangeAtlas atlas_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "cluster-atlas") throw std::invalid_argument("not a cluster-atlas document");
  ExchangeAtlas atlas;
  atlas.base_ = seed_from_json(j.at("base"));
  const std::string status = j.at("status").get<std::string>();
  if (status != "complete" && status != "truncated") throw std::invalid_argument("bad atlas status: " + status);
  atlas.status_ = status == "complete" ? AtlasStatus::Complete : AtlasStatus::Truncated;
  atlas.limits_.max_seeds = j.at("limits").at("max_seeds").get<std::size_t>();
  atlas.limits_.max_depth = j.at("limits").at("max_depth").get<std::size_t>();
  const std::size_t n = atlas.base_.rank();
  for (const auto& s : j.at("seeds")) {
    AtlasNode node{seed_from_json(s), s.at("depth").get<std::size_t>(), {}, {}, 0};
    if (node.seed.rank() != n) throw RankMismatch(node.seed.rank(), n);
    for (const auto& x : s.at("neighbors"))
      node.neighbors.push_back(x.is_null() ? std::nullopt : std::optional<std::size_t>(x.get<std::size_t>()));
    if (node.neighbors.size() != n) throw std::invalid_argument("seed neighbor list has wrong length");
    atlas.nodes_.push_back(std::move(node));
  }
  if (atlas.nodes_.empty()) throw std::invalid_argument("atlas has no seeds");
  for (const auto& node : atlas.nodes_)
    for (const auto& x : node.neighbors)
      if (x && *x >= atlas.nodes_.size()) throw std::invalid_argument("neighbor index out of range");
  atlas.finalize();

  std::vector<LaurentPoly> stored;
  for (const auto& v : j.at("variables")) stored.push_back(laurent_from_json(v));
  if (stored != atlas.variables_ ||
      j.at("clusters").get<std::vector<std::vector<std::size_t>>>() != atlas.clusters_)
    throw std::invalid_argument("atlas variables/clusters inconsistent with its seeds");
  return atlas;
}

}  // namespace cluster
