#pragma once

// Fixtures and random instance generators shared by the test binaries.

#include "lptree/lptree.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lptree::testing {

inline std::string data_path(const std::string& name) { return std::string(LPTREE_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Schema holiday_schema() {
  std::ifstream in(data_path("holiday_schema.json"));
  return load_schema(in);
}

/// The holiday-planning tree: W at the root, CP on the wbar branch, P then C on the w branch.
inline LPTree holiday_tree() {
  std::ifstream in(data_path("holiday_tree.json"));
  return load_tree(in);
}

inline Schema two_attr_schema() {
  std::ifstream in(data_path("two_attr_schema.json"));
  return load_schema(in);
}

/// a1b1×4, a1b2×3, a2b1×2, a2b2×1
inline Sample two_attr_sample(const Schema& schema) {
  std::ifstream in(data_path("two_attr_sample.csv"));
  return load_sample(in, schema);
}

inline Alternative alt(const Schema& schema, const std::string& text) { return parse_alternative(schema, text); }

inline Schema make_schema(const std::vector<std::size_t>& domain_sizes) {
  std::vector<Attribute> attrs;
  for (std::size_t i = 0; i < domain_sizes.size(); ++i) {
    Attribute a;
    a.name = "X" + std::to_string(i);
    for (std::size_t v = 0; v < domain_sizes[i]; ++v) a.values.push_back("v" + std::to_string(v));
    attrs.push_back(std::move(a));
  }
  return Schema(std::move(attrs));
}

/// n in [1, max_n], each domain size in [2, max_d].
inline Schema random_schema(std::mt19937_64& rng, std::size_t max_n, std::size_t max_d) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) s = std::uniform_int_distribution<std::size_t>(2, max_d)(rng);
  return make_schema(sizes);
}

inline Alternative random_alternative(std::mt19937_64& rng, const Schema& schema) {
  Alternative o;
  for (std::size_t i = 0; i < schema.size(); ++i)
    o.values.push_back(
        static_cast<ValueIndex>(std::uniform_int_distribution<std::size_t>(0, schema.domain_size(i) - 1)(rng)));
  return o;
}

/// Random multiset with up to `max_rows` rows of counts 1..max_count.
inline Sample random_sample(std::mt19937_64& rng, const Schema& schema, std::size_t max_rows,
                            std::uint64_t max_count = 9) {
  const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, max_rows)(rng);
  std::vector<SampleRow> out;
  for (std::size_t i = 0; i < rows; ++i)
    out.push_back({random_alternative(rng, schema), std::uniform_int_distribution<std::uint64_t>(1, max_count)(rng)});
  return Sample(schema, out);
}

inline std::vector<std::uint64_t> shuffled_table(std::mt19937_64& rng, std::uint64_t size) {
  std::vector<std::uint64_t> table(size);
  std::iota(table.begin(), table.end(), std::uint64_t{0});
  std::shuffle(table.begin(), table.end(), rng);
  return table;
}

/// Arbitrary LP-tree: random node labels of up to 2 attributes, random
/// single/split branching, random tables.
inline LPNode random_node(std::mt19937_64& rng, const Schema& schema, std::vector<std::size_t> remaining) {
  std::shuffle(remaining.begin(), remaining.end(), rng);
  const std::size_t take = std::min<std::size_t>(remaining.size(), std::uniform_int_distribution<int>(1, 2)(rng));
  LPNode node;
  node.vars.assign(remaining.begin(), remaining.begin() + take);
  remaining.erase(remaining.begin(), remaining.begin() + take);
  node.order = shuffled_table(rng, InstantiationIndexer(schema, node.vars).size());
  if (remaining.empty()) return node;
  if (std::bernoulli_distribution(0.5)(rng)) {
    node.branching = Branching::split;
    for (std::size_t i = 0; i < node.order.size(); ++i) node.children.push_back(random_node(rng, schema, remaining));
  } else {
    node.branching = Branching::single;
    node.children.push_back(random_node(rng, schema, remaining));
  }
  return node;
}

inline LPTree random_any_tree(std::mt19937_64& rng, const Schema& schema) {
  return LPTree(schema, random_node(rng, schema, all_attributes(schema)));
}

/// Σ_o p(o)·rank(o) with ranks from pairwise comparisons.
inline Rational naive_expected_rank(const LPTree& tree, const Distribution& p) {
  const auto ranks = oracle::rank_table(tree, oracle::all_alternatives(tree.schema()));
  BigInt sum = 0;
  for (const auto& row : p.weights().rows()) sum += row.count * ranks.at(row.alternative);
  return Rational(sum, p.weights().total());
}

}  // namespace lptree::testing
