#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "cluster/atlas.hpp"
#include "cluster/presets.hpp"
#include "support.hpp"

using namespace cluster;
using cluster::test::c;
using cluster::test::x;

namespace {

const ExchangeAtlas& atlas_of(const std::string& name) {
  static std::map<std::string, ExchangeAtlas> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, enumerate(*preset(name))).first;
  return it->second;
}

LaurentPoly quo(const LaurentPoly& a, const LaurentPoly& b) { return *div_exact(a, b); }

std::set<std::string> cluster_vars(const ExchangeAtlas& a, std::size_t c) {
  std::set<std::string> s;
  for (std::size_t v : a.clusters()[c]) s.insert(a.variables()[v].to_string());
  return s;
}

}  // namespace

TEST(Atlas, A2Pentagon) {
  const auto& a = atlas_of("a2");
  EXPECT_TRUE(a.complete());
  EXPECT_EQ(a.variables().size(), 5u);
  EXPECT_EQ(a.clusters().size(), 5u);
  EXPECT_EQ(a.seeds().size(), 5u);
  const auto g = a.cluster_graph();
  ASSERT_EQ(g.size(), 5u);
  std::vector<int> degree(5, 0);
  for (auto [p, q] : g) ++degree[p], ++degree[q];
  for (int d : degree) EXPECT_EQ(d, 2);
  // Walking the cycle from cluster 0 visits all five clusters.
  std::size_t prev = 5, cur = 0, steps = 0;
  do {
    std::size_t nxt = 5;
    for (auto [p, q] : g) {
      if (p == cur && q != prev) nxt = q;
      else if (q == cur && p != prev) nxt = p;
      if (nxt != 5) break;
    }
    prev = cur;
    cur = nxt;
    ++steps;
  } while (cur != 0 && steps < 10);
  EXPECT_EQ(steps, 5u);
}

TEST(Atlas, DynkinCounts) {
  const std::vector<std::pair<const char*, std::size_t>> want{{"a3", 9}, {"a4", 14}, {"d4", 16}, {"a5", 20}, {"d5", 25}};
  for (auto [name, count] : want) {
    const auto& a = atlas_of(name);
    EXPECT_TRUE(a.complete()) << name;
    EXPECT_EQ(a.variables().size(), count) << name;
  }
  EXPECT_EQ(atlas_of("a3").clusters().size(), 14u);
  EXPECT_EQ(atlas_of("d4").clusters().size(), 50u);
}

TEST(Atlas, StructuralInvariants) {
  for (const char* name : {"a2", "a3", "a4", "d4"}) {
    const auto& a = atlas_of(name);
    const std::size_t n = a.rank();
    std::set<std::size_t> covered;
    for (const auto& cl : a.clusters()) {
      EXPECT_EQ(std::set<std::size_t>(cl.begin(), cl.end()).size(), n) << name;
      covered.insert(cl.begin(), cl.end());
    }
    EXPECT_EQ(covered.size(), a.variables().size()) << name;
    for (std::size_t s = 0; s < a.seeds().size(); ++s) {
      const auto& node = a.seeds()[s];
      ASSERT_EQ(node.neighbors.size(), n);
      for (std::size_t k = 0; k < n; ++k) {
        ASSERT_TRUE(node.neighbors[k]) << name;
        const std::size_t t = *node.neighbors[k];
        const auto& back = a.seeds()[t].neighbors;
        EXPECT_NE(std::find(back.begin(), back.end(), std::optional<std::size_t>(s)), back.end());
        EXPECT_EQ(canonical_key(mutate_seed(node.seed, k)), canonical_key(a.seeds()[t].seed));
      }
    }
    EXPECT_EQ(a.edges().size(), n * a.seeds().size());
    for (std::size_t v = 0; v < a.variables().size(); ++v) EXPECT_FALSE(a.variable_clusters()[v].empty());
  }
}

TEST(Atlas, ScheduleIndependence) {
  const BMatrix b = *preset("d4");
  const ExchangeAtlas ref = enumerate(b);
  for (std::size_t workers : {1u, 4u})
    for (std::uint64_t shuffle : {0ull, 7ull, 99ull}) {
      const ExchangeAtlas a = enumerate(b, {}, {workers, shuffle});
      EXPECT_TRUE(a == ref) << workers << " " << shuffle;
      EXPECT_EQ(a.variables(), ref.variables());
      EXPECT_EQ(a.clusters(), ref.clusters());
      EXPECT_EQ(a.edges(), ref.edges());
      EXPECT_EQ(to_json(a).dump(), to_json(ref).dump());
    }
}

TEST(Atlas, KroneckerIsTruncated) {
  std::size_t last = 0;
  for (std::size_t depth = 1; depth <= 10; ++depth) {
    const ExchangeAtlas a = enumerate(*preset("kronecker"), {100000, depth});
    EXPECT_EQ(a.status(), AtlasStatus::Truncated);
    EXPECT_GT(a.variables().size(), last) << depth;
    EXPECT_EQ(a.variables().size(), 2 + 2 * depth) << "the exchange graph is a line";
    last = a.variables().size();
  }
  const ExchangeAtlas capped = enumerate(*preset("kronecker"), {3, 64});
  EXPECT_EQ(capped.status(), AtlasStatus::Truncated);
  EXPECT_EQ(capped.seeds().size(), 3u);
  EXPECT_THROW(enumerate(*preset("a2"), {0, 5}), std::invalid_argument);
  EXPECT_THROW(enumerate(*preset("a2"), {5, 0}), std::invalid_argument);
}

TEST(Atlas, ClustersContaining) {
  const auto& a = atlas_of("a2");
  const LaurentPoly x1 = x(2, 1), x2 = x(2, 2);
  const auto cs = clusters_containing(a, x1);
  ASSERT_EQ(cs.size(), 2u);
  std::set<std::set<std::string>> got;
  for (std::size_t cl : cs) got.insert(cluster_vars(a, cl));
  const std::set<std::set<std::string>> want{{"x1", "x2"}, {"x1", "(x1 + 1)/x2"}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(clusters_containing(a, quo(x1 + x2 + c(2, 1), x1 * x2)).size(), 2u);
  EXPECT_THROW(clusters_containing(a, x1 * x2), std::invalid_argument);
}

TEST(Atlas, ExpandInBase) {
  const auto& a = atlas_of("a2");
  for (const auto& v : a.variables()) EXPECT_EQ(expand_in_base(a, v, 0), v);

  // x2 in the cluster {(x2+1)/x1, (x1+x2+1)/(x1x2)}: one exchange away.
  const LaurentPoly y1 = quo(x(2, 2) + c(2, 1), x(2, 1));
  const LaurentPoly y2 = quo(x(2, 1) + x(2, 2) + c(2, 1), x(2, 1) * x(2, 2));
  const auto cl = a.find_cluster([&] {
    std::vector<std::size_t> ids{a.variable_index(y1), a.variable_index(y2)};
    std::sort(ids.begin(), ids.end());
    return ids;
  }());
  ASSERT_TRUE(cl);
  const std::size_t s = a.cluster_seeds()[*cl].front();
  const LaurentPoly e = expand_in_base(a, x(2, 2), s);
  int positive = 0;
  for (int d : den_vector(e).entries) positive += d > 0;
  EXPECT_EQ(positive, 1);
  EXPECT_TRUE(fraction_equal(substitute(e, std::span<const LaurentPoly>(a.seeds()[s].seed.vars)),
                             LaurentFraction(x(2, 2))));
}

TEST(Atlas, ExpandInBaseRoundTrip) {
  for (const char* name : {"a2", "a3", "a4", "d4"}) {
    const auto& a = atlas_of(name);
    const ExpansionTable table(a);
    for (std::size_t s = 0; s < a.seeds().size(); ++s) {
      const auto& vars = a.seeds()[s].seed.vars;
      for (std::size_t v = 0; v < a.variables().size(); ++v) {
        const auto& e = table.at(s, v);
        ASSERT_TRUE(e);
        const LaurentFraction back = substitute(*e, std::span<const LaurentPoly>(vars));
        ASSERT_TRUE(fraction_equal(back, LaurentFraction(a.variables()[v]))) << name << " seed " << s << " var " << v;
      }
    }
  }
}

TEST(Atlas, DenominatorsAndPositivity) {
  for (const char* name : {"a2", "a3", "a4", "d4", "d5", "e6"}) {
    const auto& a = atlas_of(name);
    const std::size_t n = a.rank();
    for (const auto& v : a.variables()) {
      for (const auto& t : v.terms()) EXPECT_GT(t.coeff, 0) << name;
      bool initial = false;
      for (std::size_t i = 0; i < n; ++i) initial = initial || v == LaurentPoly::variable(n, i);
      if (initial) continue;
      for (int d : den_vector(v).entries) EXPECT_GE(d, 0) << name << " " << v.to_string();
    }
  }
}

TEST(Atlas, Atilde12Example) {
  const ExchangeAtlas a = enumerate(*preset("atilde12"), {100000, 6});
  EXPECT_EQ(a.status(), AtlasStatus::Truncated);
  const LaurentPoly want = quo(x(3, 1).pow(2) + x(3, 2) + c(3, 2) * x(3, 1) * x(3, 3) + x(3, 3).pow(2),
                               x(3, 1) * x(3, 2) * x(3, 3));
  ASSERT_TRUE(a.find_variable(want));
  EXPECT_EQ(den_vector(want).entries, (std::vector<int>{1, 1, 1}));
  for (const auto& v : a.variables())
    for (const auto& t : v.terms()) EXPECT_GT(t.coeff, 0);
}

TEST(Atlas, Dot) {
  const std::string dot = to_dot(atlas_of("a2"));
  std::size_t nodes = 0, edges = 0;
  for (std::size_t p = dot.find("[label="); p != std::string::npos; p = dot.find("[label=", p + 1)) ++nodes;
  for (std::size_t p = dot.find(" -- "); p != std::string::npos; p = dot.find(" -- ", p + 1)) ++edges;
  EXPECT_EQ(nodes, 5u);
  EXPECT_EQ(edges, 5u);
  EXPECT_EQ(dot.rfind("graph exchange_graph {", 0), 0u);
}

TEST(Atlas, JsonRoundTrip) {
  for (const ExchangeAtlas& a : {atlas_of("a3"), enumerate(*preset("kronecker"), {100000, 4})}) {
    const auto j = nlohmann::json::parse(to_json(a).dump());
    const ExchangeAtlas b = atlas_from_json(j);
    EXPECT_TRUE(b == a);
    EXPECT_EQ(b.variables(), a.variables());
    EXPECT_EQ(b.edges(), a.edges());
    EXPECT_EQ(to_json(b), j);
  }
  EXPECT_EQ(to_json(enumerate(*preset("kronecker"), {100000, 4})).at("status"), "truncated");
  EXPECT_EQ(to_json(atlas_of("a2")).at("status"), "complete");

  auto tampered = to_json(atlas_of("a2"));
  tampered["variables"][0] = to_json(x(2, 1) * c(2, 7));
  EXPECT_THROW(atlas_from_json(tampered), std::invalid_argument);
  auto dangling = to_json(atlas_of("a2"));
  dangling["seeds"][0]["neighbors"][0] = 99;
  EXPECT_THROW(atlas_from_json(dangling), std::invalid_argument);
  EXPECT_THROW(atlas_from_json(nlohmann::json::object()), std::invalid_argument);
}
