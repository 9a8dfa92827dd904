#include "support.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace lptree;
using namespace lptree::testing;

namespace {

LPTree parse_tree(const std::string& text) {
  std::istringstream in(text);
  return load_tree(in);
}

}  // namespace

TEST(Validate, HolidayTreeIsValid) {
  const LPTree tree = holiday_tree();
  EXPECT_TRUE(validate(tree.schema(), tree.root()).empty());
  EXPECT_EQ(tree.node_count(), 4u);
}

TEST(Validate, SingleRootNodeWithAllAttributes) {
  const Schema schema = holiday_schema();
  LPNode root{{0, 1, 2}, {}, Branching::leaf, {}};
  for (std::uint64_t i = 0; i < 12; ++i) root.order.push_back(11 - i);
  EXPECT_TRUE(validate(schema, root).empty());
  const LPTree tree(schema, root);
  EXPECT_EQ(tree.optimal(), alt(schema, "W=w,C=c3,P=pbar"));
}

TEST(Validate, ReportsBrokenBranches) {
  const Schema schema = holiday_schema();
  LPNode root = holiday_tree().root();
  // Right branch stops after P: C is missing there.
  root.children[1].branching = Branching::leaf;
  root.children[1].children.clear();
  auto violations = validate(schema, root);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_NE(violations[0].find("missing attribute 'C'"), std::string::npos) << violations[0];
  EXPECT_THROW(LPTree(schema, root), InputError);

  LPNode dup = holiday_tree().root();
  dup.children[1].children[0].vars = {0};
  dup.children[1].children[0].order = {0, 1};
  EXPECT_FALSE(validate(schema, dup).empty());

  LPNode short_table = holiday_tree().root();
  short_table.children[0].order.pop_back();
  EXPECT_FALSE(validate(schema, short_table).empty());

  LPNode repeated = holiday_tree().root();
  repeated.children[0].order[1] = repeated.children[0].order[0];
  EXPECT_FALSE(validate(schema, repeated).empty());

  LPNode split_count = holiday_tree().root();
  split_count.children.pop_back();
  EXPECT_FALSE(validate(schema, split_count).empty());

  LPNode empty_vars = holiday_tree().root();
  empty_vars.vars.clear();
  EXPECT_FALSE(validate(schema, empty_vars).empty());
}

TEST(Compare, HolidayExamples) {
  const LPTree tree = holiday_tree();
  const Schema& s = tree.schema();
  EXPECT_EQ(tree.compare(alt(s, "W=w,P=pbar,C=c2"), alt(s, "W=w,P=p,C=c3")), Preference::first);
  EXPECT_EQ(tree.compare(alt(s, "W=wbar,P=p,C=c1"), alt(s, "W=w,P=pbar,C=c3")), Preference::first);
  EXPECT_EQ(tree.compare(alt(s, "W=w,P=pbar,C=c3"), alt(s, "W=wbar,P=p,C=c1")), Preference::second);
  // Constraints on the CP table read off the picture.
  EXPECT_EQ(tree.compare(alt(s, "W=wbar,C=c1,P=p"), alt(s, "W=wbar,C=c3,P=pbar")), Preference::first);
  EXPECT_EQ(tree.compare(alt(s, "W=wbar,C=c2,P=pbar"), alt(s, "W=wbar,C=c1,P=p")), Preference::first);
  EXPECT_THROW(tree.compare(alt(s, "W=w,P=p,C=c3"), alt(s, "W=w,P=p,C=c3")), InputError);
}

TEST(Rank, HolidayExamples) {
  const LPTree tree = holiday_tree();
  const Schema& s = tree.schema();
  EXPECT_EQ(tree.rank(alt(s, "W=w,C=c1,P=p")), 11);
  EXPECT_EQ(tree.rank(alt(s, "W=wbar,C=c3,P=p")), 1);
  EXPECT_EQ(tree.optimal(), alt(s, "W=wbar,C=c3,P=p"));
}

TEST(Rank, IsAPermutationAndAgreesWithCompare) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const Schema schema = random_schema(rng, 4, 3);
    const LPTree tree = random_any_tree(rng, schema);
    const auto domain = oracle::all_alternatives(schema);
    std::vector<BigInt> ranks;
    for (const auto& o : domain) ranks.push_back(tree.rank(o));
    std::vector<BigInt> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) ASSERT_EQ(sorted[i], i + 1);

    for (std::size_t i = 0; i < domain.size(); ++i) {
      BigInt above = 0;
      for (std::size_t j = 0; j < domain.size(); ++j) {
        if (i == j) continue;
        const bool first = tree.compare(domain[j], domain[i]) == Preference::first;
        ASSERT_EQ(first, ranks[j] < ranks[i]);
        if (first) ++above;
      }
      ASSERT_EQ(ranks[i], above + 1);
    }
    EXPECT_EQ(tree.rank(tree.optimal()), 1);
  }
}

TEST(Compare, IsTransitiveOnRandomTriples) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const Schema schema = random_schema(rng, 5, 3);
    const LPTree tree = random_any_tree(rng, schema);
    const Alternative a = random_alternative(rng, schema);
    const Alternative b = random_alternative(rng, schema);
    const Alternative c = random_alternative(rng, schema);
    if (a == b || b == c || a == c) continue;
    if (tree.compare(a, b) == Preference::first && tree.compare(b, c) == Preference::first) {
      EXPECT_EQ(tree.compare(a, c), Preference::first);
    }
  }
}

TEST(Traversal, SplitEdgesBindInstantiatedAttributes) {
  const LPTree tree = holiday_tree();
  const Schema& s = tree.schema();
  const auto ctx = tree.branch(alt(s, "W=w,C=c1,P=p"));
  EXPECT_EQ(ctx.path.size(), 3u);
  EXPECT_EQ(ctx.inst.bindings, (std::map<std::size_t, ValueIndex>{{0, 1}}));

  std::vector<std::size_t> inst_sizes;
  tree.for_each_node([&](std::size_t, const TraversalContext& c) { inst_sizes.push_back(c.inst.bindings.size()); });
  EXPECT_EQ(inst_sizes, (std::vector<std::size_t>{0, 1, 1, 1}));
}

TEST(Serialization, RoundTripsHolidayTree) {
  const std::string text = read_text(data_path("holiday_tree.json"));
  const LPTree tree = parse_tree(text);
  EXPECT_EQ(serialize_tree(tree), text);
  EXPECT_EQ(parse_tree(serialize_tree(tree)), tree);
}

TEST(Serialization, RoundTripsRandomTrees) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Schema schema = random_schema(rng, 4, 3);
    const LPTree tree = random_any_tree(rng, schema);
    const std::string text = serialize_tree(tree);
    const LPTree back = parse_tree(text);
    EXPECT_EQ(back, tree);
    EXPECT_EQ(serialize_tree(back), text);
    std::istringstream in(text);
    EXPECT_EQ(load_tree(in, schema), tree);
  }
}

TEST(Serialization, RejectsMalformedTrees) {
  const std::string schema = R"("schema":{"attributes":[{"name":"C","values":["c1","c2","c3"]},{"name":"P","values":["p","q"]}]})";
  // Five entries over a six-instantiation node.
  EXPECT_THROW(parse_tree("{" + schema +
                          R"(,"root":{"vars":["C","P"],"cpt":[["c1","p"],["c1","q"],["c2","p"],["c2","q"],["c3","p"]],"children":null}})"),
               InputError);
  // Split with a missing edge.
  EXPECT_THROW(parse_tree("{" + schema +
                          R"(,"root":{"vars":["P"],"cpt":[["p"],["q"]],"children":{"split":{"p":{"vars":["C"],"cpt":[["c1"],["c2"],["c3"]],"children":null}}}}})"),
               InputError);
  EXPECT_THROW(parse_tree("{" + schema + R"(,"root":{"vars":["Z"],"cpt":[],"children":null}})"), InputError);
  EXPECT_THROW(parse_tree("{" + schema + R"(,"root":{"vars":["P"],"cpt":[["p"],["r"]],"children":null}})"),
               InputError);
  EXPECT_THROW(parse_tree("{" + schema + "}"), InputError);
  EXPECT_THROW(parse_tree("not json"), InputError);
  // Well-formed document, but C is missing on the only branch.
  EXPECT_THROW(parse_tree("{" + schema + R"(,"root":{"vars":["P"],"cpt":[["p"],["q"]],"children":null}})"),
               InputError);
  // Schema mismatch against the caller's schema.
  std::istringstream in(read_text(data_path("holiday_tree.json")));
  EXPECT_THROW(load_tree(in, two_attr_schema()), InputError);
}
