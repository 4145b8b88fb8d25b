#include <algorithm>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "cluster/presets.hpp"
#include "cluster/quiver.hpp"
#include "support.hpp"

using namespace cluster;

namespace {

BMatrix random_matrix(std::mt19937_64& g, std::size_t n, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  BMatrix b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) b.set(i, j, d(g));
  return b;
}

// Mutation on the arrow multiset: add i->j for every path i->k->j, reverse
// the arrows at k, then cancel 2-cycles.
BMatrix mutate_arrows(const BMatrix& b, std::size_t k) {
  const std::size_t n = b.size();
  std::map<std::pair<std::size_t, std::size_t>, int> arrows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (b(i, j) > 0) arrows[{i, j}] = b(i, j);
  auto next = arrows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == k || j == k) continue;
      const int in = arrows.count({i, k}) ? arrows.at({i, k}) : 0;
      const int out = arrows.count({k, j}) ? arrows.at({k, j}) : 0;
      if (in > 0 && out > 0) next[{i, j}] += in * out;
    }
  std::map<std::pair<std::size_t, std::size_t>, int> flipped;
  for (auto [e, m] : next) {
    if (e.first == k || e.second == k) flipped[{e.second, e.first}] += m;
    else flipped[e] += m;
  }
  BMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int f = flipped.count({i, j}) ? flipped.at({i, j}) : 0;
      const int r = flipped.count({j, i}) ? flipped.at({j, i}) : 0;
      out.set(i, j, f - r);
    }
  return out;
}

TypeLabel label(TypeFamily f, int n) { return TypeLabel{f, n}; }

}  // namespace

TEST(Quiver, MutateA2) {
  const BMatrix b = BMatrix::from_rows({{0, 1}, {-1, 0}});
  EXPECT_EQ(mutate_matrix(b, 0), BMatrix::from_rows({{0, -1}, {1, 0}}));
}

TEST(Quiver, MutatePathGivesOrientedCycle) {
  const BMatrix path = BMatrix::from_rows({{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}});
  const BMatrix m = mutate_matrix(path, 1);
  EXPECT_EQ(m(0, 2), 1);
  EXPECT_EQ(m(0, 1), -1);
  EXPECT_EQ(m(1, 2), -1);
  EXPECT_EQ(m, mutate_arrows(path, 1));
  EXPECT_FALSE(is_acyclic(m));
}

TEST(Quiver, MatrixRuleMatchesArrowOperations) {
  auto g = test::rng(11);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + t % 4;
    const BMatrix b = random_matrix(g, n, 2);
    for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(mutate_matrix(b, k), mutate_arrows(b, k));
  }
}

TEST(Quiver, MutationIsSkewSymmetricInvolution) {
  auto g = test::rng(12);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + t % 5;
    const BMatrix b = random_matrix(g, n, 3);
    const std::size_t k = static_cast<std::size_t>(t) % n;
    const BMatrix m = mutate_matrix(b, k);
    EXPECT_NO_THROW(BMatrix::from_rows(m.rows()));
    EXPECT_EQ(mutate_matrix(m, k), b);
  }
}

TEST(Quiver, RejectsMalformedMatrices) {
  EXPECT_THROW(BMatrix::from_rows({{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(BMatrix::from_rows({{1, 0}, {0, -1}}), std::invalid_argument);
  EXPECT_THROW(BMatrix::from_rows({{0, 1}, {-1}}), std::invalid_argument);
  BMatrix b(2);
  EXPECT_THROW(b.set(0, 0, 1), std::invalid_argument);
  EXPECT_THROW(mutate_matrix(b, 2), std::out_of_range);
}

TEST(Quiver, Acyclicity) {
  EXPECT_TRUE(is_acyclic(BMatrix::from_rows({{0, 1}, {-1, 0}})));
  EXPECT_FALSE(is_acyclic(BMatrix::from_rows({{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}})));
  EXPECT_FALSE(is_acyclic(*preset("atilde12")));
  for (const auto& name : preset_names()) {
    if (name != "atilde12") {
      EXPECT_TRUE(is_acyclic(*preset(name))) << name;
    }
  }
}

TEST(Quiver, Classify) {
  const TypeLabel a2 = classify(BMatrix::from_rows({{0, 1}, {-1, 0}}));
  EXPECT_EQ(a2.family, TypeFamily::Rank2);
  EXPECT_EQ(a2.r, 1);
  EXPECT_EQ(a2.dynkin_equivalent(), label(TypeFamily::A, 2));
  EXPECT_EQ(classify(*preset("kronecker")).to_string(), "rank2(r=2)");
  EXPECT_FALSE(classify(*preset("kronecker")).dynkin_equivalent());
  EXPECT_EQ(classify(*preset("atilde12")).family, TypeFamily::Unknown);

  BMatrix star(4);
  star.set(0, 1, 1);
  star.set(2, 1, 1);
  star.set(1, 3, 1);
  EXPECT_EQ(classify(star), label(TypeFamily::D, 4));
  EXPECT_EQ(classify(*preset("a5")), label(TypeFamily::A, 5));
  EXPECT_EQ(classify(*preset("d5")), label(TypeFamily::D, 5));
  EXPECT_EQ(classify(*preset("e6")), label(TypeFamily::E, 6));
  EXPECT_EQ(classify(*preset("e8")), label(TypeFamily::E, 8));

  BMatrix square(4);  // acyclic 4-cycle: 1->2->3->4 and 1->4
  square.set(0, 1, 1);
  square.set(1, 2, 1);
  square.set(2, 3, 1);
  square.set(0, 3, 1);
  EXPECT_EQ(classify(square).to_string(), "A~(1,3)");
  BMatrix d4t(5);  // star with four arms
  for (std::size_t leaf = 1; leaf < 5; ++leaf) d4t.set(0, leaf, 1);
  EXPECT_EQ(classify(d4t), label(TypeFamily::DTilde, 4));
  BMatrix e6t(7);  // three arms of length 2
  for (std::size_t arm = 0; arm < 3; ++arm) {
    e6t.set(0, 1 + 2 * arm, 1);
    e6t.set(1 + 2 * arm, 2 + 2 * arm, 1);
  }
  EXPECT_EQ(classify(e6t), label(TypeFamily::ETilde, 6));
  EXPECT_EQ(classify(BMatrix::from_rows({{0, 2, 0}, {-2, 0, 1}, {0, -1, 0}})).family, TypeFamily::Unknown);
  BMatrix disconnected(3);
  disconnected.set(0, 1, 1);
  EXPECT_EQ(classify(disconnected).family, TypeFamily::Unknown);
}

TEST(Quiver, ClassifyIsInvariantUnderRelabelingAndReversal) {
  auto g = test::rng(13);
  for (const auto& name : preset_names()) {
    const BMatrix b = *preset(name);
    const TypeLabel want = classify(b);
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (int t = 0; t < 10; ++t) {
      std::shuffle(perm.begin(), perm.end(), g);
      EXPECT_EQ(classify(b.permuted(perm)), want) << name;
      EXPECT_EQ(classify(b.permuted(perm).opposite()), want) << name;
    }
  }
}

TEST(Quiver, EnumerateMatrices) {
  EXPECT_EQ(enumerate_matrices(2, 1).size(), 3u);
  EXPECT_EQ(enumerate_matrices(2, 2).size(), 5u);
  EXPECT_EQ(enumerate_matrices(3, 1).size(), 27u);
  EXPECT_EQ(enumerate_matrices(4, 1).size(), 729u);
  const auto all = enumerate_matrices(3, 2);
  EXPECT_EQ(all.size(), 125u);
  EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
  for (const auto& m : all) EXPECT_LE(m.max_abs_entry(), 2);
}

TEST(Quiver, JsonLoader) {
  using nlohmann::json;
  const BMatrix b = quiver_from_json(json::parse(R"({"rank":3,"arrows":[[2,1,1],[1,3,2],[3,2,1]]})"));
  EXPECT_EQ(b, *preset("atilde12"));
  EXPECT_EQ(quiver_from_json(json::parse(R"({"rank":2,"arrows":[[1,2,1],[1,2,1]]})")), *preset("kronecker"));
  EXPECT_EQ(quiver_from_json(json{{"matrix", to_json(b)}}), b);
  EXPECT_EQ(quiver_from_json(json::parse(R"({"rank":2,"arrows":[]})")), BMatrix(2));
  for (const char* bad : {R"({"rank":2,"arrows":[[1,1,1]]})", R"({"rank":2,"arrows":[[1,2,1],[2,1,1]]})",
                          R"({"rank":2,"arrows":[[1,2,0]]})", R"({"rank":2,"arrows":[[1,2,-1]]})",
                          R"({"rank":2,"arrows":[[1,3,1]]})", R"({"rank":0,"arrows":[]})",
                          R"({"rank":2,"arrows":[[1,2]]})", R"({"matrix":[[0,1],[1,0]]})",
                          R"({"matrix":[[0,1],[-1,0]],"arrows":[]})"})
    EXPECT_THROW(quiver_from_json(json::parse(bad)), std::invalid_argument) << bad;
  EXPECT_ANY_THROW(quiver_from_json(json::parse(R"({"arrows":[]})")));
}

TEST(Quiver, PresetsPassInvariants) {
  for (const auto& name : preset_names()) {
    const auto b = preset(name);
    ASSERT_TRUE(b) << name;
    EXPECT_NO_THROW(BMatrix::from_rows(b->rows())) << name;
    EXPECT_TRUE(is_connected(*b)) << name;
  }
  EXPECT_FALSE(preset("a9"));
}
