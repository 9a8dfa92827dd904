#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace lptree;
using namespace lptree::testing;

TEST(NaiveRank, HolidayExamples) {
  const LPTree tree = holiday_tree();
  const Schema& s = tree.schema();
  EXPECT_EQ(oracle::naive_rank(tree, alt(s, "W=w,C=c1,P=p")), 11);
  EXPECT_EQ(oracle::naive_rank(tree, alt(s, "W=wbar,C=c3,P=p")), 1);
  const auto table = oracle::rank_table(tree, oracle::all_alternatives(s));
  EXPECT_EQ(table.at(alt(s, "W=w,C=c1,P=p")), 11u);
  EXPECT_EQ(table.size(), 12u);
}

TEST(NaiveRank, AgreesWithDecomposition) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const Schema schema = random_schema(rng, 5, 3);
    const LPTree tree = random_any_tree(rng, schema);
    const Alternative o = random_alternative(rng, schema);
    ASSERT_EQ(oracle::naive_rank(tree, o), tree.rank(o));
  }
}

TEST(Enumeration, TreeCounts) {
  // Two binary attributes: 2 orders × 2 × 2 = 8 univariate trees.
  EXPECT_EQ(oracle::count_linear_trees(make_schema({2, 2}), 1), 8);
  EXPECT_EQ(oracle::count_linear_trees(make_schema({2}), 1), 2);
  // 3! · 2³ = 48
  EXPECT_EQ(oracle::count_linear_trees(make_schema({2, 2, 2}), 1), 48);
  // 8 univariate trees plus one 4-valued node with 4! tables.
  EXPECT_EQ(oracle::count_linear_trees(make_schema({2, 2}), 2), 32);

  for (const auto& [sizes, k] : std::vector<std::pair<std::vector<std::size_t>, std::size_t>>{
           {{2, 2}, 1}, {{2, 3}, 2}, {{2, 2, 2}, 1}, {{2, 2, 2}, 2}, {{3, 2, 2}, 1}}) {
    const Schema schema = make_schema(sizes);
    std::set<std::string> seen;
    std::set<std::vector<BigInt>> rankings;
    const auto domain = oracle::all_alternatives(schema);
    std::size_t visited = 0;
    oracle::for_each_linear_tree(schema, k, [&](const LPTree& tree) {
      ++visited;
      seen.insert(serialize_tree(tree));
      std::vector<BigInt> ranks;
      for (const auto& o : domain) ranks.push_back(tree.rank(o));
      rankings.insert(ranks);
    });
    EXPECT_EQ(visited, oracle::count_linear_trees(schema, k));
    EXPECT_EQ(seen.size(), visited);
    EXPECT_LE(rankings.size(), visited);
  }
}

TEST(Enumeration, Guards) {
  EXPECT_THROW(oracle::count_linear_trees(make_schema({3, 3, 3}), 3), GuardError);
  EXPECT_THROW(oracle::for_each_linear_tree(make_schema(std::vector<std::size_t>(7, 3)), 1, [](const LPTree&) {}),
               GuardError);
  EXPECT_THROW(oracle::count_linear_trees(make_schema({2, 2}), 3), InputError);
  EXPECT_THROW(oracle::exhaustive_erm(make_schema({2, 2}), Sample(), 1), InputError);
}

TEST(ExhaustiveErm, Examples) {
  const Schema schema = two_attr_schema();
  const Sample s = two_attr_sample(schema);
  const auto result = oracle::exhaustive_erm(schema, s, 1);
  EXPECT_EQ(result.erank, 2);
  EXPECT_EQ(empirical_mean_rank(result.tree, s), 2);
  // The joint node lists instantiations by count: 4,3,2,1 gives 20/10.
  EXPECT_EQ(oracle::exhaustive_erm(schema, s, 2).erank, 2);

  const Schema holiday = holiday_schema();
  const Sample point(holiday, {{alt(holiday, "W=w,C=c2,P=pbar"), 5}});
  const auto best = oracle::exhaustive_erm(holiday, point, 1);
  EXPECT_EQ(best.erank, 1);
  EXPECT_EQ(best.tree.optimal(), alt(holiday, "W=w,C=c2,P=pbar"));
}

TEST(ExhaustiveErm, AgreesWithLearnersAndIsUniqueWhenStrict) {
  std::mt19937_64 rng(52);
  std::size_t unique_checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Schema schema = random_schema(rng, 3, 3);
    const Sample s = random_sample(rng, schema, 12, 20);
    const auto reference = oracle::exhaustive_erm(schema, s, 1);
    const LPTree learned = learn_linear_univariate(schema, s);
    ASSERT_EQ(empirical_mean_rank(learned, s), reference.erank);

    // When exactly one tree attains the minimum it must be the learned one.
    std::size_t minimisers = 0;
    oracle::for_each_linear_tree(schema, 1, [&](const LPTree& tree) {
      minimisers += empirical_mean_rank(tree, s) == reference.erank;
    });
    if (minimisers == 1) {
      ++unique_checked;
      EXPECT_EQ(learned, reference.tree);
    }
  }
  EXPECT_GT(unique_checked, 5u);
}
