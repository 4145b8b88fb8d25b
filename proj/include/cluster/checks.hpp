#pragma once

/**
 * @file checks.hpp
 * @brief Verification harness over an enumerated exchange atlas.
 *
 * All variables are referenced by their index into atlas.variables().
 *
 *  - compatibility: some cluster contains both variables
 *  - denominator criterion: w is "clean" for v when, in every seed whose
 *    cluster contains v, the Laurent expansion of w does not have v in its
 *    denominator
 *  - verify_conjecture3: compatible(v, w) <=> clean(v, w)  (Complete atlases)
 *  - verify_conjecture4: clean(v, w)  => clean(w, v)       (Complete atlases)
 *  - verify_lemma21:     compatible(v, w) => clean(v, w)   (any atlas; only
 *    witnessed compatibility is used, incompatibility is never asserted)
 *  - unistructural_search: every (n-subset of X, bounded matrix) whose
 *    mutation closure stays inside X and covers X must reproduce the
 *    atlas's clusters
 *  - verify_theorem1: every assignment of the base cluster into X whose
 *    induced field map permutes X must send clusters to clusters
 *
 * Independent work items run through parallel_for and are stored by index,
 * so every report is identical for any worker count.
 */

#include <algorithm>
#include <chrono>
#include <iterator>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluster/atlas.hpp"
#include "cluster/laurent.hpp"
#include "cluster/parallel.hpp"
#include "cluster/quiver.hpp"

namespace cluster {

class IncompleteAtlas : public std::invalid_argument {
 public:
  explicit IncompleteAtlas(const std::string& what)
      : std::invalid_argument(what + " requires a complete atlas") {}
};

// ---------------------------------------------------------------------------
// Compatibility

/// A cluster containing both v and w, if the atlas has one.
inline std::optional<std::size_t> compatibility_witness(const ExchangeAtlas& atlas, std::size_t v, std::size_t w) {
  const auto& a = atlas.variable_clusters().at(v);
  const auto& b = atlas.variable_clusters().at(w);
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (common.empty()) return std::nullopt;
  return common.front();
}

inline bool compatible(const ExchangeAtlas& atlas, std::size_t v, std::size_t w) {
  if (!atlas.complete()) throw IncompleteAtlas("compatible");
  return compatibility_witness(atlas, v, w).has_value();
}

inline bool compatible(const ExchangeAtlas& atlas, const LaurentPoly& v, const LaurentPoly& w) {
  return compatible(atlas, atlas.variable_index(v), atlas.variable_index(w));
}

/// Semi-decision for truncated atlases: a witnessing cluster, or nullopt
/// for "unknown".  Never reports incompatibility.
inline std::optional<std::size_t> compatible_bounded(const ExchangeAtlas& atlas, std::size_t v, std::size_t w) {
  return compatibility_witness(atlas, v, w);
}

// ---------------------------------------------------------------------------
// Denominator criterion

inline bool denominator_clean(const ExchangeAtlas& atlas, const ExpansionTable& table, std::size_t v, std::size_t w) {
  for (std::size_t c : atlas.variable_clusters().at(v))
    for (std::size_t s : atlas.cluster_seeds()[c]) {
      const auto& ids = atlas.seeds()[s].var_ids;
      const auto pos = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), v) - ids.begin());
      const auto& expansion = table.at(s, w);
      if (!expansion) throw std::logic_error("variable unreachable inside its own atlas");
      if (has_var_in_denominator(*expansion, pos)) return false;
    }
  return true;
}

/// Convenience form that expands only in the seeds it needs.
inline bool denominator_clean(const ExchangeAtlas& atlas, std::size_t v, std::size_t w) {
  for (std::size_t c : atlas.variable_clusters().at(v))
    for (std::size_t s : atlas.cluster_seeds()[c]) {
      const auto& ids = atlas.seeds()[s].var_ids;
      const auto pos = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), v) - ids.begin());
      if (has_var_in_denominator(expand_in_base(atlas, atlas.variables()[w], s), pos)) return false;
    }
  return true;
}

inline bool denominator_clean(const ExchangeAtlas& atlas, const LaurentPoly& v, const LaurentPoly& w) {
  return denominator_clean(atlas, atlas.variable_index(v), atlas.variable_index(w));
}

struct PairReport {
  std::size_t v = 0;
  std::size_t w = 0;
  std::optional<bool> compatible;      // nullopt: unknown (truncated atlas)
  std::optional<std::size_t> witness;  // cluster index when compatible
  bool denominator_clean = false;      // clean(v, w)
  std::optional<bool> reverse_clean;   // clean(w, v), conjecture 4 only
  bool violation = false;
};

struct PairCheckReport {
  std::string check;
  std::size_t pairs_checked = 0;
  std::vector<PairReport> pairs;  // sorted by (v, w)

  std::vector<PairReport> violations() const {
    std::vector<PairReport> out;
    for (const auto& p : pairs)
      if (p.violation) out.push_back(p);
    return out;
  }
};

/// clean[v][w] for every ordered pair, computed v-parallel.
inline std::vector<std::vector<bool>> clean_matrix(const ExchangeAtlas& atlas, const ExpansionTable& table,
                                                   const Schedule& schedule = {}) {
  const std::size_t m = atlas.variables().size();
  std::vector<std::vector<bool>> clean(m, std::vector<bool>(m));
  parallel_for(m, schedule, [&](std::size_t v) {
    for (std::size_t w = 0; w < m; ++w) clean[v][w] = denominator_clean(atlas, table, v, w);
  });
  return clean;
}

inline PairCheckReport verify_conjecture3(const ExchangeAtlas& atlas, const ExpansionTable& table,
                                          const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("verify_conjecture3");
  const auto clean = clean_matrix(atlas, table, schedule);
  PairCheckReport report{"conjecture3", 0, {}};
  const std::size_t m = atlas.variables().size();
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w) {
      PairReport p;
      p.v = v;
      p.w = w;
      p.witness = compatibility_witness(atlas, v, w);
      p.compatible = p.witness.has_value();
      p.denominator_clean = clean[v][w];
      p.violation = *p.compatible != p.denominator_clean;
      report.pairs.push_back(p);
    }
  report.pairs_checked = report.pairs.size();
  return report;
}

inline PairCheckReport verify_conjecture3(const ExchangeAtlas& atlas, const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("verify_conjecture3");
  return verify_conjecture3(atlas, ExpansionTable(atlas, schedule), schedule);
}

inline PairCheckReport verify_conjecture4(const ExchangeAtlas& atlas, const ExpansionTable& table,
                                          const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("verify_conjecture4");
  const auto clean = clean_matrix(atlas, table, schedule);
  PairCheckReport report{"conjecture4", 0, {}};
  const std::size_t m = atlas.variables().size();
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w) {
      PairReport p;
      p.v = v;
      p.w = w;
      p.denominator_clean = clean[v][w];
      p.reverse_clean = clean[w][v];
      p.violation = p.denominator_clean && !*p.reverse_clean;
      report.pairs.push_back(p);
    }
  report.pairs_checked = report.pairs.size();
  return report;
}

inline PairCheckReport verify_conjecture4(const ExchangeAtlas& atlas, const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("verify_conjecture4");
  return verify_conjecture4(atlas, ExpansionTable(atlas, schedule), schedule);
}

/// Over a truncated atlas "clean" quantifies over enumerated clusters only.
inline PairCheckReport verify_lemma21(const ExchangeAtlas& atlas, const ExpansionTable& table,
                                      const Schedule& schedule = {}) {
  const std::size_t m = atlas.variables().size();
  std::vector<std::vector<PairReport>> rows(m);
  parallel_for(m, schedule, [&](std::size_t v) {
    for (std::size_t w = 0; w < m; ++w) {
      auto witness = compatible_bounded(atlas, v, w);
      if (!witness) continue;
      PairReport p;
      p.v = v;
      p.w = w;
      p.compatible = true;
      p.witness = witness;
      p.denominator_clean = denominator_clean(atlas, table, v, w);
      p.violation = !p.denominator_clean;
      rows[v].push_back(p);
    }
  });
  PairCheckReport report{"lemma21", 0, {}};
  for (auto& row : rows) report.pairs.insert(report.pairs.end(), row.begin(), row.end());
  report.pairs_checked = report.pairs.size();
  return report;
}

inline PairCheckReport verify_lemma21(const ExchangeAtlas& atlas, const Schedule& schedule = {}) {
  return verify_lemma21(atlas, ExpansionTable(atlas, schedule), schedule);
}

// ---------------------------------------------------------------------------
// Unistructurality

struct SearchBudget {
  std::size_t max_seeds_per_candidate = 0;  // 0: 4 * |atlas seeds| + 16
  std::size_t max_candidates = 10'000'000;
};

struct StructureCandidate {
  enum class Outcome { Accepted, Rejected };

  std::vector<std::size_t> subset;
  BMatrix matrix;
  Outcome outcome = Outcome::Rejected;
  std::string reason;  // why rejected; empty when accepted
  std::vector<std::vector<std::size_t>> clusters;               // accepted: sorted id sets
  std::vector<std::pair<std::size_t, std::size_t>> graph;       // accepted: edges between clusters
  bool same_clusters = false;
  bool same_graph = false;

  bool accepted() const { return outcome == Outcome::Accepted; }
};

struct UnistructuralReport {
  int bound = 0;
  std::size_t candidates_checked = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejected;  // by reason
  bool budget_exhausted = false;                // candidate cap reached
  std::vector<StructureCandidate> candidates;
  std::vector<std::size_t> alternatives;  // accepted with a different cluster set or graph

  bool unique() const { return alternatives.empty(); }
};

/// Smallest bound exceeding every exchange-matrix entry seen in the atlas.
inline int default_candidate_bound(const ExchangeAtlas& atlas) {
  int m = 0;
  for (const auto& node : atlas.seeds()) m = std::max(m, node.seed.matrix.max_abs_entry());
  return m + 1;
}

namespace detail {

inline StructureCandidate run_structure_candidate(const ExchangeAtlas& atlas,
                                                  const std::vector<LaurentFraction>& members,
                                                  std::vector<std::size_t> subset, BMatrix matrix,
                                                  std::size_t max_seeds) {
  const auto& X = atlas.variables();
  const std::size_t n = atlas.rank();
  StructureCandidate cand;
  cand.subset = subset;
  cand.matrix = matrix;

  struct Node {
    std::vector<std::size_t> ids;
    BMatrix m;
  };
  using Key = std::pair<std::vector<std::size_t>, BMatrix>;
  auto key_of = [n](const Node& s) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return s.ids[a] < s.ids[b]; });
    std::vector<std::size_t> ids;
    for (std::size_t p : perm) ids.push_back(s.ids[p]);
    return Key{std::move(ids), s.m.permuted(perm)};
  };

  std::vector<Node> nodes{{std::move(subset), std::move(matrix)}};
  std::map<Key, std::size_t> index{{key_of(nodes[0]), 0}};
  std::vector<std::pair<std::size_t, std::size_t>> seed_edges;

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    std::vector<LaurentPoly> vars;
    for (std::size_t id : nodes[head].ids) vars.push_back(X[id]);
    for (std::size_t k = 0; k < n; ++k) {
      const LaurentFraction t(exchange_binomial(vars, nodes[head].m, k), vars[k]);
      std::optional<std::size_t> hit;
      for (std::size_t j = 0; j < members.size() && !hit; ++j)
        if (fraction_equal(t, members[j])) hit = j;
      if (!hit) {
        cand.reason = "escapes X";
        return cand;
      }
      if (std::find(nodes[head].ids.begin(), nodes[head].ids.end(), *hit) != nodes[head].ids.end()) {
        cand.reason = "repeated variable";
        return cand;
      }
      Node next{nodes[head].ids, mutate_matrix(nodes[head].m, k)};
      next.ids[k] = *hit;
      auto key = key_of(next);
      auto it = index.find(key);
      if (it == index.end()) {
        if (nodes.size() >= max_seeds) {
          cand.reason = "budget";
          return cand;
        }
        it = index.emplace(std::move(key), nodes.size()).first;
        nodes.push_back(std::move(next));
      }
      seed_edges.emplace_back(head, it->second);
    }
  }

  std::vector<bool> covered(X.size(), false);
  std::vector<std::vector<std::size_t>> seed_clusters;
  for (const auto& node : nodes) {
    for (std::size_t id : node.ids) covered[id] = true;
    auto s = node.ids;
    std::sort(s.begin(), s.end());
    seed_clusters.push_back(std::move(s));
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    cand.reason = "does not cover X";
    return cand;
  }

  cand.outcome = StructureCandidate::Outcome::Accepted;
  cand.clusters = seed_clusters;
  std::sort(cand.clusters.begin(), cand.clusters.end());
  cand.clusters.erase(std::unique(cand.clusters.begin(), cand.clusters.end()), cand.clusters.end());
  auto cluster_id = [&](const std::vector<std::size_t>& s) {
    return static_cast<std::size_t>(std::lower_bound(cand.clusters.begin(), cand.clusters.end(), s) -
                                    cand.clusters.begin());
  };
  for (auto [a, b] : seed_edges) {
    const std::size_t ca = cluster_id(seed_clusters[a]), cb = cluster_id(seed_clusters[b]);
    if (ca != cb) cand.graph.emplace_back(std::min(ca, cb), std::max(ca, cb));
  }
  std::sort(cand.graph.begin(), cand.graph.end());
  cand.graph.erase(std::unique(cand.graph.begin(), cand.graph.end()), cand.graph.end());
  cand.same_clusters = cand.clusters == atlas.clusters();
  cand.same_graph = cand.same_clusters && cand.graph == atlas.cluster_graph();
  return cand;
}

// All k-subsets of {0..m-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > m) return out;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == m - k + i - 1) --i;
    if (i == 0) return out;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace detail

/// Tries every n-subset of X with every exchange matrix of entries bounded
/// by `bound`.  Exchange steps are computed as fractions and matched against
/// X by cross-multiplication, so candidates that leave the Laurent ring are
/// handled like any other escape.
inline UnistructuralReport unistructural_search(const ExchangeAtlas& atlas, int bound, const SearchBudget& budget = {},
                                                const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("unistructural_search");
  const std::size_t n = atlas.rank();
  const std::size_t max_seeds =
      budget.max_seeds_per_candidate ? budget.max_seeds_per_candidate : 4 * atlas.seeds().size() + 16;

  std::vector<LaurentFraction> members;
  for (const auto& x : atlas.variables()) members.emplace_back(x);

  const auto subsets = detail::combinations(atlas.variables().size(), n);
  const auto matrices = enumerate_matrices(n, bound);

  UnistructuralReport report;
  report.bound = bound;
  std::size_t total = subsets.size() * matrices.size();
  if (total > budget.max_candidates) {
    total = budget.max_candidates;
    report.budget_exhausted = true;
  }
  report.candidates.resize(total);
  parallel_for(total, schedule, [&](std::size_t i) {
    report.candidates[i] = detail::run_structure_candidate(atlas, members, subsets[i / matrices.size()],
                                                           matrices[i % matrices.size()], max_seeds);
  });

  report.candidates_checked = total;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& c = report.candidates[i];
    if (c.accepted()) {
      ++report.accepted;
      if (!c.same_clusters || !c.same_graph) report.alternatives.push_back(i);
    } else {
      ++report.rejected[c.reason];
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Automorphisms

struct AutomorphismCandidate {
  std::vector<std::size_t> assignment;   // images of the base cluster, by variable index
  bool permutes_X = false;
  bool maps_clusters_to_clusters = false;
  std::vector<std::size_t> permutation;  // induced map on X when permutes_X
};

struct Theorem1Report {
  std::size_t candidates_checked = 0;
  std::size_t automorphisms = 0;
  bool budget_exhausted = false;
  bool closed_under_composition = true;
  bool closed_under_inverse = true;
  std::vector<AutomorphismCandidate> candidates;
  std::vector<std::size_t> counterexamples;  // permutes X but breaks a cluster
};

inline AutomorphismCandidate check_assignment(const ExchangeAtlas& atlas, const std::vector<LaurentFraction>& members,
                                              std::vector<std::size_t> assignment) {
  const auto& X = atlas.variables();
  AutomorphismCandidate cand;
  cand.assignment = std::move(assignment);
  std::vector<LaurentFraction> images;
  for (std::size_t a : cand.assignment) images.push_back(members[a]);

  std::vector<std::size_t> perm;
  std::vector<bool> hit(X.size(), false);
  for (const auto& v : X) {
    const LaurentFraction image = substitute(v, std::span<const LaurentFraction>(images));
    std::optional<std::size_t> j;
    for (std::size_t t = 0; t < members.size() && !j; ++t)
      if (fraction_equal(image, members[t])) j = t;
    if (!j || hit[*j]) return cand;
    hit[*j] = true;
    perm.push_back(*j);
  }
  cand.permutes_X = true;
  cand.permutation = perm;
  cand.maps_clusters_to_clusters = true;
  for (const auto& c : atlas.clusters()) {
    std::vector<std::size_t> img;
    for (std::size_t v : c) img.push_back(perm[v]);
    std::sort(img.begin(), img.end());
    if (!atlas.find_cluster(img)) {
      cand.maps_clusters_to_clusters = false;
      break;
    }
  }
  return cand;
}

/// Exhausts injective assignments of the base cluster into X, in
/// lexicographic order of the assignment tuple.
inline Theorem1Report verify_theorem1(const ExchangeAtlas& atlas, std::size_t max_candidates = 10'000'000,
                                      const Schedule& schedule = {}) {
  if (!atlas.complete()) throw IncompleteAtlas("verify_theorem1");
  const std::size_t n = atlas.rank(), m = atlas.variables().size();

  std::vector<std::vector<std::size_t>> assignments;
  Theorem1Report report;
  {
    std::vector<std::size_t> cur;
    std::vector<bool> used(m, false);
    auto rec = [&](auto&& self) -> void {
      if (assignments.size() >= max_candidates) {
        report.budget_exhausted = true;
        return;
      }
      if (cur.size() == n) {
        assignments.push_back(cur);
        return;
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (used[j]) continue;
        used[j] = true;
        cur.push_back(j);
        self(self);
        cur.pop_back();
        used[j] = false;
      }
    };
    rec(rec);
  }

  std::vector<LaurentFraction> members;
  for (const auto& x : atlas.variables()) members.emplace_back(x);
  report.candidates.resize(assignments.size());
  parallel_for(assignments.size(), schedule,
               [&](std::size_t i) { report.candidates[i] = check_assignment(atlas, members, assignments[i]); });
  report.candidates_checked = assignments.size();

  std::set<std::vector<std::size_t>> accepted;
  std::vector<std::size_t> base_ids;
  for (const auto& x : atlas.base().vars) base_ids.push_back(atlas.variable_index(x));
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& c = report.candidates[i];
    if (!c.permutes_X) continue;
    ++report.automorphisms;
    accepted.insert(c.assignment);
    if (!c.maps_clusters_to_clusters) report.counterexamples.push_back(i);
  }

  // Group structure of the accepted maps, on assignment tuples:
  // (f o g)(x_i) = f(g(x_i)) and f^{-1}(x_i) = perm_f^{-1}(x_i).
  if (!report.budget_exhausted) {
    for (const auto& f : report.candidates) {
      if (!f.permutes_X) continue;
      std::vector<std::size_t> inverse_perm(m);
      for (std::size_t v = 0; v < m; ++v) inverse_perm[f.permutation[v]] = v;
      std::vector<std::size_t> inv;
      for (std::size_t b : base_ids) inv.push_back(inverse_perm[b]);
      if (!accepted.count(inv)) report.closed_under_inverse = false;
      for (const auto& g : report.candidates) {
        if (!g.permutes_X) continue;
        std::vector<std::size_t> comp;
        for (std::size_t a : g.assignment) comp.push_back(f.permutation[a]);
        if (!accepted.count(comp)) report.closed_under_composition = false;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

/// {check, type, parameters, <count_key>, violations, elapsed}
inline nlohmann::json make_report(const std::string& check, const std::string& type, nlohmann::json parameters,
                                  const std::string& count_key, std::size_t count, nlohmann::json violations,
                                  double elapsed_seconds) {
  return {{"check", check},
          {"type", type},
          {"parameters", std::move(parameters)},
          {count_key, count},
          {"violations", std::move(violations)},
          {"elapsed", elapsed_seconds}};
}

inline nlohmann::json violations_json(const ExchangeAtlas& atlas, const PairCheckReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : r.violations()) {
    nlohmann::json j{{"v", p.v},
                     {"w", p.w},
                     {"v_expr", atlas.variables()[p.v].to_string()},
                     {"w_expr", atlas.variables()[p.w].to_string()},
                     {"denominator_clean", p.denominator_clean}};
    if (p.compatible) j["compatible"] = *p.compatible;
    if (p.reverse_clean) j["reverse_clean"] = *p.reverse_clean;
    out.push_back(std::move(j));
  }
  return out;
}

inline nlohmann::json violations_json(const UnistructuralReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i : r.alternatives) {
    const auto& c = r.candidates[i];
    out.push_back({{"subset", c.subset},
                   {"matrix", to_json(c.matrix)},
                   {"clusters", c.clusters},
                   {"same_clusters", c.same_clusters},
                   {"same_graph", c.same_graph}});
  }
  return out;
}

inline nlohmann::json violations_json(const Theorem1Report& r) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i : r.counterexamples) out.push_back({{"assignment", r.candidates[i].assignment}});
  if (!r.closed_under_composition) out.push_back({{"group", "not closed under composition"}});
  if (!r.closed_under_inverse) out.push_back({{"group", "not closed under inverse"}});
  return out;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace cluster
