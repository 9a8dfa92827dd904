#pragma once

// Empirical mean rank minimisation over linear LP-trees.
//
// For a fixed partition into node labels, nodes go by non-decreasing
// (E* − 1)/(|dom V| − 1). Swapping adjacent nodes X above Y changes the
// expected rank by |dom Desc|·((|dom Y|−1)(E*(X)−1) − (|dom X|−1)(E*(Y)−1)).

#include "lptree/core.hpp"
#include "lptree/metrics.hpp"
#include "lptree/schema.hpp"
#include "lptree/tree.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace lptree {

enum class ScoreVariant {
  shifted,    // (E* − 1) / (|dom V| − 1)
  unshifted,  // E* / (|dom V| − 1)
};

inline ScoreVariant parse_score_variant(const std::string& name) {
  if (name == "shifted") return ScoreVariant::shifted;
  if (name == "unshifted" || name == "paper") return ScoreVariant::unshifted;
  throw InputError("unknown score variant '" + name + "' (expected shifted|unshifted)");
}

/// Score kept as an unreduced fraction numerator / (dom_minus_one · total).
struct ScoreValue {
  BigInt numerator;
  BigInt dom_minus_one;
  BigInt total;

  Rational value() const { return make_rational(numerator, dom_minus_one * total); }

  std::strong_ordering operator<=>(const ScoreValue& other) const {
    const BigInt lhs = numerator * other.dom_minus_one * other.total;
    const BigInt rhs = other.numerator * dom_minus_one * total;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const ScoreValue& other) const { return (*this <=> other) == 0; }
};

namespace detail {

struct PartStats {
  std::vector<std::size_t> vars;
  EStarResult estar;
  std::uint64_t dom_size = 0;
  ScoreValue score;
};

inline PartStats part_stats(const Schema& schema, const Sample& sample, std::vector<std::size_t> vars,
                            ScoreVariant variant) {
  InstantiationIndexer indexer(schema, vars);
  PartStats stats;
  stats.estar = e_star(marginal_table(sample, indexer));
  stats.dom_size = indexer.size();
  const BigInt shift = variant == ScoreVariant::shifted ? stats.estar.total : BigInt(0);
  stats.score = ScoreValue{stats.estar.weighted_rank_sum - shift, BigInt(stats.dom_size - 1), stats.estar.total};
  stats.vars = std::move(vars);
  return stats;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

/// Sorts parts by (score, position) and returns the chained tree levels
/// together with Σ_i |dom Desc_i|·(Σ_v count(v)·r(v) − total).
inline std::pair<std::vector<const PartStats*>, BigInt> order_parts(std::vector<const PartStats*> parts) {
  std::stable_sort(parts.begin(), parts.end(),
                   [](const PartStats* a, const PartStats* b) { return a->score < b->score; });
  BigInt numerator = 0;
  BigInt desc = 1;
  for (std::size_t i = parts.size(); i-- > 0;) {
    numerator += desc * (parts[i]->estar.weighted_rank_sum - parts[i]->estar.total);
    desc *= parts[i]->dom_size;
  }
  return {std::move(parts), std::move(numerator)};
}

inline LPTree build_linear_tree(const Schema& schema, const std::vector<const PartStats*>& parts) {
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::uint64_t>>> levels;
  for (const PartStats* p : parts) levels.emplace_back(p->vars, p->estar.order);
  return LPTree(schema, make_linear_node(std::move(levels)));
}

}  // namespace detail

/// Normalised minimal expected rank of attribute set `vars` under p_S.
inline ScoreValue score(const Schema& schema, const Sample& sample, const std::vector<std::size_t>& vars,
                        ScoreVariant variant = ScoreVariant::shifted) {
  if (vars.empty()) throw InputError("score of an empty attribute set");
  if (sample.empty()) throw InputError("score of an empty sample");
  return detail::part_stats(schema, sample, vars, variant).score;
}

struct LearnOptions {
  ScoreVariant variant = ScoreVariant::shifted;
  unsigned threads = 1;
};

/// Optimal single-branch tree with one attribute per node: attributes by
/// non-decreasing score (ties by index), each table by non-increasing count.
inline LPTree learn_linear_univariate(const Schema& schema, const Sample& sample, const LearnOptions& options = {}) {
  if (sample.empty()) throw InputError("cannot learn from an empty sample");
  std::vector<detail::PartStats> stats(schema.size());
  detail::parallel_for(schema.size(), options.threads, [&](std::size_t a) {
    stats[a] = detail::part_stats(schema, sample, {a}, options.variant);
  });
  std::vector<const detail::PartStats*> parts;
  for (const auto& s : stats) parts.push_back(&s);
  return detail::build_linear_tree(schema, detail::order_parts(std::move(parts)).first);
}

/// Partition of attribute indices; parts sorted, ordered by smallest element.
struct KPartition {
  std::vector<std::vector<std::size_t>> parts;

  bool operator==(const KPartition&) const = default;
  auto operator<=>(const KPartition&) const = default;
};

/// Streams the partitions of {0..n-1} whose parts have at most k elements,
/// in lexicographic order of their restricted growth strings.
class KPartitionEnumerator {
 public:
  KPartitionEnumerator(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (n < 1) throw InputError("partition enumeration needs n >= 1");
    if (k < 1 || k > n) throw InputError("partition enumeration needs 1 <= k <= n");
    labels_.assign(n_, 0);
    sizes_.assign(n_, 0);
    fill_from(0);
  }

  std::optional<KPartition> next() {
    if (done_) return std::nullopt;
    KPartition out = current();
    advance();
    return out;
  }

 private:
  // Smallest label with room at every position from `start` on.
  void fill_from(std::size_t start) {
    for (std::size_t i = start; i < n_; ++i) {
      std::size_t label = 0;
      while (sizes_[label] >= k_) ++label;
      labels_[i] = label;
      ++sizes_[label];
    }
  }

  void advance() {
    for (std::size_t i = n_; i-- > 1;) {
      --sizes_[labels_[i]];
      std::size_t limit = 0;
      for (std::size_t j = 0; j < i; ++j) limit = std::max(limit, labels_[j] + 1);
      for (std::size_t c = labels_[i] + 1; c <= limit; ++c) {
        if (sizes_[c] < k_) {
          labels_[i] = c;
          ++sizes_[c];
          fill_from(i + 1);
          return;
        }
      }
    }
    done_ = true;
  }

  KPartition current() const {
    KPartition p;
    for (std::size_t i = 0; i < n_; ++i) {
      if (labels_[i] >= p.parts.size()) p.parts.resize(labels_[i] + 1);
      p.parts[labels_[i]].push_back(i);
    }
    return p;
  }

  std::size_t n_;
  std::size_t k_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> sizes_;
  bool done_ = false;
};

/// Number of partitions of an n-set with parts of size at most k.
inline BigInt count_k_partitions(std::size_t n, std::size_t k) {
  // b[m] = Σ_{j<k} C(m−1, j)·b[m−1−j]: choose the companions of element m.
  std::vector<BigInt> b(n + 1);
  b[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    BigInt binom = 1;
    for (std::size_t j = 0; j < k && j <= m - 1; ++j) {
      b[m] += binom * b[m - 1 - j];
      binom = binom * (m - 1 - j) / (j + 1);
    }
  }
  return b[n];
}

/// Minimal empirical mean rank tree among linear trees whose nodes carry
/// at most k attributes. Every k-partition is scored with its parts in
/// score order; exact ties keep the earliest partition.
inline LPTree learn_linear_multivariate(const Schema& schema, const Sample& sample, std::size_t k,
                                        const LearnOptions& options = {}) {
  if (k < 1 || k > schema.size()) throw InputError("k must satisfy 1 <= k <= " + std::to_string(schema.size()));
  if (sample.empty()) throw InputError("cannot learn from an empty sample");

  constexpr std::size_t kBatch = 512;
  std::map<std::vector<std::size_t>, detail::PartStats> cache;
  KPartitionEnumerator partitions(schema.size(), k);

  struct Best {
    BigInt numerator;
    KPartition partition;
  };
  std::optional<Best> best;

  while (true) {
    std::vector<KPartition> batch;
    while (batch.size() < kBatch) {
      auto p = partitions.next();
      if (!p) break;
      batch.push_back(std::move(*p));
    }
    if (batch.empty()) break;

    std::vector<std::vector<std::size_t>> missing;
    for (const auto& p : batch)
      for (const auto& part : p.parts)
        if (!cache.count(part) && std::find(missing.begin(), missing.end(), part) == missing.end())
          missing.push_back(part);
    std::vector<detail::PartStats> fresh(missing.size());
    detail::parallel_for(missing.size(), options.threads, [&](std::size_t i) {
      fresh[i] = detail::part_stats(schema, sample, missing[i], options.variant);
    });
    for (auto& s : fresh) {
      auto key = s.vars;
      cache.emplace(std::move(key), std::move(s));
    }

    std::vector<BigInt> numerators(batch.size());
    detail::parallel_for(batch.size(), options.threads, [&](std::size_t i) {
      std::vector<const detail::PartStats*> parts;
      for (const auto& part : batch[i].parts) parts.push_back(&cache.at(part));
      numerators[i] = detail::order_parts(std::move(parts)).second;
    });
    for (std::size_t i = 0; i < batch.size(); ++i)
      if (!best || numerators[i] < best->numerator) best = Best{numerators[i], batch[i]};
  }

  std::vector<const detail::PartStats*> parts;
  for (const auto& part : best->partition.parts) parts.push_back(&cache.at(part));
  return detail::build_linear_tree(schema, detail::order_parts(std::move(parts)).first);
}

/// Hypothesis class: linear univariate, or linear with nodes of ≤ k attributes.
struct TreeClass {
  enum class Kind { lin1, link } kind = Kind::lin1;
  std::size_t k = 1;

  bool operator==(const TreeClass&) const = default;
};

inline TreeClass parse_tree_class(const std::string& name, std::size_t k) {
  if (name == "lin1") return {TreeClass::Kind::lin1, 1};
  if (name == "link") {
    if (k < 1) throw InputError("class link needs k >= 1");
    return {TreeClass::Kind::link, k};
  }
  throw InputError("unknown tree class '" + name + "' (expected lin1|link)");
}

inline LPTree learn(const Schema& schema, const Sample& sample, const TreeClass& cls,
                    const LearnOptions& options = {}) {
  if (cls.kind == TreeClass::Kind::lin1) return learn_linear_univariate(schema, sample, options);
  return learn_linear_multivariate(schema, sample, cls.k, options);
}

}  // namespace lptree
