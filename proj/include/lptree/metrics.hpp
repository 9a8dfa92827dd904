#pragma once

// Distribution-weighted rank quantities: empirical mean rank, expected rank
// by node decomposition, minimal local rank expectation, local optimality
// and ranking loss. All results are exact rationals.

#include "lptree/core.hpp"
#include "lptree/schema.hpp"
#include "lptree/tree.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace lptree {

/// Probability distribution over dom(X) with finite support, held as
/// integer weights over a common denominator: p(o) = weight(o) / total.
class Distribution {
 public:
  /// The empirical distribution p_S.
  explicit Distribution(Sample weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InputError("distribution needs positive total weight");
  }

  /// Rational point masses; must sum to 1.
  static Distribution from_probabilities(const Schema& schema,
                                         const std::vector<std::pair<Alternative, Rational>>& masses) {
    Rational sum = 0;
    BigInt common = 1;
    for (const auto& [o, p] : masses) {
      if (p < 0) throw InputError("negative probability");
      sum += p;
      common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(p));
    }
    if (sum != 1) throw InputError("probabilities sum to " + exact_string(sum) + ", not 1");
    std::vector<SampleRow> rows;
    for (const auto& [o, p] : masses) {
      const Rational scaled = p * common;
      rows.push_back({o, boost::multiprecision::numerator(scaled)});
    }
    return Distribution(Sample(schema, rows));
  }

  const Sample& weights() const { return weights_; }

  Rational probability(const Alternative& o) const { return weights_.frequency(o); }

 private:
  Sample weights_;
};

/// Σ_o p_S(o)·rank(tree, o), summing per-alternative ranks.
inline Rational empirical_mean_rank(const LPTree& tree, const Sample& sample) {
  if (sample.empty()) throw InputError("empirical mean rank of an empty sample");
  BigInt sum = 0;
  for (const auto& row : sample.rows()) sum += row.count * tree.rank(row.alternative);
  return make_rational(sum, sample.total());
}

/// E_p[rank] = 1 + Σ_N |dom Desc(N)| · Σ_v p(v ∧ inst(N)) · (r_N(v) − 1).
/// Rows are routed down the tree so each node only sees alternatives
/// compatible with inst(N); nodes with p(inst(N)) = 0 contribute nothing.
inline Rational expected_rank(const LPTree& tree, const Distribution& p) {
  const Sample& w = p.weights();
  BigInt acc = 0;
  std::function<void(std::size_t, const std::vector<const SampleRow*>&)> visit =
      [&](std::size_t id, const std::vector<const SampleRow*>& rows) {
        if (rows.empty()) return;
        const auto& node = tree.node(id);
        std::vector<BigInt> table(node.indexer.size());
        for (const SampleRow* row : rows) table[node.indexer.index_of(row->alternative)] += row->count;
        BigInt local = 0;
        for (std::uint64_t inst = 0; inst < table.size(); ++inst)
          if (node.position[inst] != 0 && table[inst] != 0) local += table[inst] * node.position[inst];
        acc += local * node.desc_size;
        if (node.branching == Branching::single) {
          visit(node.children[0], rows);
        } else if (node.branching == Branching::split) {
          std::vector<std::vector<const SampleRow*>> buckets(node.children.size());
          for (const SampleRow* row : rows) buckets[node.indexer.index_of(row->alternative)].push_back(row);
          for (std::size_t inst = 0; inst < buckets.size(); ++inst) visit(node.children[inst], buckets[inst]);
        }
      };
  std::vector<const SampleRow*> all;
  all.reserve(w.rows().size());
  for (const auto& row : w.rows()) all.push_back(&row);
  visit(0, all);
  return 1 + make_rational(acc, w.total());
}

struct EStarResult {
  Rational value;                      // E*_p(V)
  std::vector<std::uint64_t> order;    // achieving order, most preferred first
  BigInt weighted_rank_sum;            // Σ_v count(v)·r(v) under `order`
  BigInt total;
};

/// Minimal expected local rank over dom(V), from counts indexed by
/// instantiation (zeros included). Orders by non-increasing count; equal
/// counts keep canonical index order.
inline EStarResult e_star(const std::vector<BigInt>& counts) {
  if (counts.empty()) throw InputError("e_star over an empty domain");
  BigInt total = 0;
  for (const auto& c : counts) total += c;
  if (total <= 0) throw InputError("e_star needs a positive total count");
  std::vector<std::uint64_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return counts[a] > counts[b]; });
  BigInt sum = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (counts[order[i]] != 0) sum += counts[order[i]] * (i + 1);
  return {make_rational(sum, total), std::move(order), sum, total};
}

/// True iff each node orders dom(Var(N)) by non-increasing p(· | inst(N)).
/// Nodes unreachable under p are accepted.
inline bool is_locally_optimal(const LPTree& tree, const Distribution& p) {
  bool ok = true;
  tree.for_each_node([&](std::size_t id, const TraversalContext& ctx) {
    if (!ok) return;
    const auto& node = tree.node(id);
    std::vector<BigInt> table(node.indexer.size());
    bool reachable = false;
    for (const auto& row : p.weights().rows()) {
      if (!ctx.inst.compatible_with(row.alternative)) continue;
      table[node.indexer.index_of(row.alternative)] += row.count;
      reachable = true;
    }
    if (!reachable) return;
    std::vector<std::uint64_t> order(table.size());
    for (std::uint64_t inst = 0; inst < table.size(); ++inst) order[node.position[inst]] = inst;
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      if (table[order[i]] < table[order[i + 1]]) {
        ok = false;
        return;
      }
  });
  return ok;
}

/// (E_p[rank(learned)] − E_p[rank(target)]) / |dom X|
inline Rational ranking_loss(const LPTree& learned, const LPTree& target, const Distribution& p) {
  if (!(learned.schema() == target.schema())) throw InputError("ranking loss between trees over different schemas");
  return (expected_rank(learned, p) - expected_rank(target, p)) / Rational(learned.schema().total_domain_size());
}

}  // namespace lptree
