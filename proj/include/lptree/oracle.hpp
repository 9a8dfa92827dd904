#pragma once

// Brute-force ground truth for small instances. Only the schema and tree
// model are shared with the main path: ranks come from pairwise
// comparisons, never from the node decomposition, and partitions are
// generated here independently of the learners.

#include "lptree/core.hpp"
#include "lptree/schema.hpp"
#include "lptree/tree.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace lptree::oracle {

inline constexpr std::uint64_t kDomainLimit = 1'000'000;
inline constexpr std::uint64_t kTreeLimit = 50'000'000;

inline std::vector<Alternative> all_alternatives(const Schema& schema) {
  std::vector<Alternative> out;
  for_each_alternative(schema, kDomainLimit, [&](const Alternative& o) { out.push_back(o); });
  return out;
}

/// 1 + |{o' : o' ≻ o}|, counted with pairwise comparisons.
inline BigInt naive_rank(const LPTree& tree, const Alternative& o) {
  check_alternative(tree.schema(), o);
  BigInt above = 0;
  for_each_alternative(tree.schema(), kDomainLimit, [&](const Alternative& other) {
    if (other != o && tree.compare(other, o) == Preference::first) ++above;
  });
  return above + 1;
}

/// Ranks of every alternative (lexicographic domain order), obtained by
/// sorting the domain with the tree's comparison.
inline std::map<Alternative, std::uint64_t> rank_table(const LPTree& tree, const std::vector<Alternative>& domain) {
  std::vector<std::size_t> idx(domain.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return a != b && tree.compare(domain[a], domain[b]) == Preference::first;
  });
  std::map<Alternative, std::uint64_t> ranks;
  for (std::size_t i = 0; i < idx.size(); ++i) ranks.emplace(domain[idx[i]], i + 1);
  return ranks;
}

/// All partitions of {0..n-1} with parts of size ≤ k, by recursive
/// placement of each element into an existing part or a new one.
inline std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::vector<std::size_t>> current;
  std::function<void(std::size_t)> place = [&](std::size_t element) {
    if (element == n) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (current[i].size() >= k) continue;
      current[i].push_back(element);
      place(element + 1);
      current[i].pop_back();
    }
    current.push_back({element});
    place(element + 1);
    current.pop_back();
  };
  place(0);
  return out;
}

inline BigInt factorial(std::uint64_t m) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= m; ++i) f *= i;
  return f;
}

/// |LPT^k_lin|: Σ over k-partitions of (#parts)! · Π_parts |dom part|!.
inline BigInt count_linear_trees(const Schema& schema, std::size_t k) {
  if (k < 1 || k > schema.size()) throw InputError("k must satisfy 1 <= k <= n");
  BigInt total = 0;
  for (const auto& partition : set_partitions(schema.size(), k)) {
    BigInt count = factorial(partition.size());
    for (const auto& part : partition) {
      const BigInt dom = schema.domain_size(part);
      if (dom > 20) throw GuardError("node domain too large for tree enumeration");
      count *= factorial(dom.convert_to<std::uint64_t>());
    }
    total += count;
  }
  return total;
}

/// Visits every linear tree with nodes of at most k attributes exactly
/// once: partition × node order × one table permutation per node.
inline void for_each_linear_tree(const Schema& schema, std::size_t k, const std::function<void(const LPTree&)>& fn,
                                 std::uint64_t limit = kTreeLimit) {
  const BigInt count = count_linear_trees(schema, k);
  if (count > limit)
    throw GuardError(count.str() + " linear trees exceed the enumeration limit " + std::to_string(limit));
  for (const auto& partition : set_partitions(schema.size(), k)) {
    std::vector<std::size_t> node_order(partition.size());
    std::iota(node_order.begin(), node_order.end(), std::size_t{0});
    do {
      std::vector<std::vector<std::size_t>> vars;
      std::vector<std::vector<std::uint64_t>> tables;
      for (std::size_t p : node_order) {
        vars.push_back(partition[p]);
        std::vector<std::uint64_t> table(schema.domain_size(partition[p]).convert_to<std::uint64_t>());
        std::iota(table.begin(), table.end(), std::uint64_t{0});
        tables.push_back(std::move(table));
      }
      while (true) {
        std::vector<std::pair<std::vector<std::size_t>, std::vector<std::uint64_t>>> levels;
        for (std::size_t i = 0; i < vars.size(); ++i) levels.emplace_back(vars[i], tables[i]);
        fn(LPTree(schema, make_linear_node(std::move(levels))));
        // Odometer over the per-node permutations, last node fastest.
        std::size_t i = tables.size();
        bool advanced = false;
        while (i > 0) {
          --i;
          if (std::next_permutation(tables[i].begin(), tables[i].end())) {
            advanced = true;
            break;
          }
        }
        if (!advanced) break;
      }
    } while (std::next_permutation(node_order.begin(), node_order.end()));
  }
}

struct ErmResult {
  LPTree tree;
  Rational erank;
};

/// Minimal empirical mean rank over LPT^k_lin by full enumeration; ties
/// keep the first tree in enumeration order.
inline ErmResult exhaustive_erm(const Schema& schema, const Sample& sample, std::size_t k,
                                std::uint64_t limit = kTreeLimit) {
  if (sample.empty()) throw InputError("exhaustive ERM on an empty sample");
  const auto domain = all_alternatives(schema);
  std::optional<LPTree> best;
  BigInt best_sum = 0;
  for_each_linear_tree(
      schema, k,
      [&](const LPTree& tree) {
        const auto ranks = rank_table(tree, domain);
        BigInt sum = 0;
        for (const auto& row : sample.rows()) sum += row.count * ranks.at(row.alternative);
        if (!best || sum < best_sum) {
          best = tree;
          best_sum = sum;
        }
      },
      limit);
  return {*best, make_rational(best_sum, sample.total())};
}

}  // namespace lptree::oracle
