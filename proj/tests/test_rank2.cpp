#include <set>

#include <gtest/gtest.h>

#include "cluster/atlas.hpp"
#include "cluster/presets.hpp"
#include "cluster/rank2.hpp"
#include "support.hpp"

using namespace cluster;
using cluster::test::c;
using cluster::test::x;

namespace {

LaurentPoly quo(const LaurentPoly& a, const LaurentPoly& b) { return *div_exact(a, b); }

std::vector<LaurentPoly> expected_special(unsigned r) {
  std::vector<LaurentPoly> v{x(2, 1), x(2, 2), quo(x(2, 1).pow(r) + c(2, 1), x(2, 2)),
                             quo(x(2, 2).pow(r) + c(2, 1), x(2, 1))};
  std::sort(v.begin(), v.end(), LaurentLess{});
  return v;
}

int den_sum(const LaurentPoly& p) {
  const auto d = den_vector(p);
  return d[0] + d[1];
}

}  // namespace

TEST(Rank2, FiniteTypes) {
  const Rank2Chain r0 = enumerate_chain(0, 6);
  EXPECT_EQ(r0.period, 4u);
  const std::vector<LaurentPoly> closed{x(2, 1), x(2, 2), quo(c(2, 2), x(2, 1)), quo(c(2, 2), x(2, 2))};
  std::vector<LaurentPoly> want = closed;
  std::sort(want.begin(), want.end(), LaurentLess{});
  EXPECT_EQ(r0.distinct_variables(), want);

  for (std::size_t depth : {3u, 5u, 8u}) {
    const Rank2Chain r1 = enumerate_chain(1, depth);
    EXPECT_EQ(r1.period, 5u);
    EXPECT_EQ(r1.distinct_variables().size(), std::min<std::size_t>(5, 2 * depth));
  }
  const Rank2Chain r1 = enumerate_chain(1, 8);
  const auto special = special_variables(r1);
  EXPECT_EQ(special.size(), 4u);
  const LaurentPoly middle = quo(x(2, 1) + x(2, 2) + c(2, 1), x(2, 1) * x(2, 2));
  EXPECT_EQ(std::count(special.begin(), special.end(), middle), 0);
  EXPECT_EQ(clusters_containing_x1(r1), 2u);
}

TEST(Rank2, SpecialVariables) {
  for (auto [r, depth] : std::vector<std::pair<unsigned, std::size_t>>{{2, 8}, {3, 6}, {4, 5}}) {
    const Rank2Chain ch = enumerate_chain(r, depth);
    EXPECT_EQ(special_variables(ch), expected_special(r)) << r;
    EXPECT_EQ(clusters_containing_x1(ch), 2u) << r;
    EXPECT_FALSE(ch.period);
  }
}

TEST(Rank2, KroneckerWindow) {
  const Rank2Chain ch = enumerate_chain(2, 8);
  EXPECT_EQ(ch.window.size(), 16u);
  EXPECT_EQ(ch.first_index, -6);
  EXPECT_EQ(ch.distinct_variables().size(), 16u);
  for (long m = 3; m < ch.last_index(); ++m) EXPECT_LT(den_sum(ch.at(m)), den_sum(ch.at(m + 1))) << m;
  for (long m = 0; m > ch.first_index; --m) EXPECT_LT(den_sum(ch.at(m)), den_sum(ch.at(m - 1))) << m;
  EXPECT_EQ(ch.at(3), quo(x(2, 2).pow(2) + c(2, 1), x(2, 1)));
  EXPECT_EQ(ch.at(0), quo(x(2, 1).pow(2) + c(2, 1), x(2, 2)));
}

TEST(Rank2, RecurrenceInvariants) {
  for (unsigned r = 0; r <= 4; ++r) {
    const Rank2Chain ch = enumerate_chain(r, r >= 3 ? 5 : 7);
    for (long m = ch.first_index + 1; m < ch.last_index(); ++m)
      EXPECT_EQ(ch.at(m + 1) * ch.at(m - 1), ch.at(m).pow(r) + c(2, 1)) << r << " " << m;
    for (long m = ch.first_index; m <= ch.last_index(); ++m) {
      for (const auto& t : ch.at(m).terms()) EXPECT_GT(t.coeff, 0);
      if (r >= 2 && (m < 0 || m > 3)) {
        const auto d = den_vector(ch.at(m));
        EXPECT_TRUE(d[0] > 0 && d[1] > 0) << r << " " << m;
      }
    }
  }
}

TEST(Rank2, AgreesWithAtlas) {
  for (std::size_t depth = 2; depth <= 6; ++depth) {
    const Rank2Chain ch = enumerate_chain(2, depth);
    const ExchangeAtlas a = enumerate(*preset("kronecker"), {100000, depth - 1});
    EXPECT_EQ(ch.distinct_variables(), a.variables()) << depth;
  }
  const ExchangeAtlas a2 = enumerate(*preset("a2"));
  EXPECT_EQ(enumerate_chain(1, 6).distinct_variables(), a2.variables());
}

TEST(Rank2, ScheduleIndependence) {
  const Rank2Chain a = enumerate_chain(3, 5), b = enumerate_chain(3, 5, Schedule{2, 5});
  EXPECT_EQ(a.window, b.window);
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(Rank2, Errors) {
  EXPECT_THROW(enumerate_chain(2, 0), std::invalid_argument);
  EXPECT_THROW(clusters_containing_x1(enumerate_chain(2, 1)), std::invalid_argument);
  EXPECT_THROW(enumerate_chain(2, 4).at(9), std::out_of_range);
}

TEST(Rank2, Json) {
  const auto j = to_json(enumerate_chain(2, 3));
  EXPECT_EQ(j.at("r"), 2);
  EXPECT_EQ(j.at("variables").size(), 6u);
  EXPECT_TRUE(j.at("period").is_null());
  EXPECT_EQ(j.at("special_variables"),
            nlohmann::json::array({"(x1^2 + 1)/x2", "x1", "x2", "(x2^2 + 1)/x1"}));
  EXPECT_EQ(j.at("clusters_containing_x1"), 2);
}
