#pragma once

// Synthetic targets, rank-decreasing sampling, the closed-form sample size
// bound and learning-curve experiments.

#include "lptree/core.hpp"
#include "lptree/learn.hpp"
#include "lptree/metrics.hpp"
#include "lptree/schema.hpp"
#include "lptree/tree.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lptree {

/// Name and version of the random stream; written into experiment output.
inline constexpr const char* kPrngName = "mt19937_64/splitmix64-seed/v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

/// mt19937_64 with portable bounded-integer and unit-interval draws (the
/// standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Random linear tree: a random attribute order, cut into nodes of random
/// size ≤ k (size 1 for lin1), each with a random preference table.
inline LPTree random_tree(const Schema& schema, const TreeClass& cls, std::uint64_t seed) {
  const std::size_t k = cls.kind == TreeClass::Kind::lin1 ? 1 : cls.k;
  if (k < 1 || k > schema.size()) throw InputError("k must satisfy 1 <= k <= n");
  Rng rng(seed);
  std::vector<std::size_t> attrs = all_attributes(schema);
  rng.shuffle(attrs);
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::uint64_t>>> levels;
  std::size_t next = 0;
  while (next < attrs.size()) {
    const std::size_t room = std::min(k, attrs.size() - next);
    const std::size_t size = 1 + rng.below(room);
    std::vector<std::size_t> vars(attrs.begin() + next, attrs.begin() + next + size);
    std::sort(vars.begin(), vars.end());
    next += size;
    std::vector<std::uint64_t> table(InstantiationIndexer(schema, vars).size());
    std::iota(table.begin(), table.end(), std::uint64_t{0});
    rng.shuffle(table);
    levels.emplace_back(std::move(vars), std::move(table));
  }
  return LPTree(schema, make_linear_node(std::move(levels)));
}

/// Distribution family over the ranks of a target order.
struct DecreasingDistributionSpec {
  enum class Kind { geometric, linear, uniform } kind = Kind::geometric;
  Rational theta = Rational(9, 10);  // geometric only
};

/// "geometric:0.9", "linear" or "uniform".
inline DecreasingDistributionSpec parse_distribution(const std::string& text) {
  DecreasingDistributionSpec spec;
  if (text == "linear") {
    spec.kind = DecreasingDistributionSpec::Kind::linear;
  } else if (text == "uniform") {
    spec.kind = DecreasingDistributionSpec::Kind::uniform;
  } else if (text == "geometric" || text.rfind("geometric:", 0) == 0) {
    spec.kind = DecreasingDistributionSpec::Kind::geometric;
    if (text.size() > 10) spec.theta = parse_decimal(text.substr(10));
    if (spec.theta <= 0 || spec.theta >= 1) throw InputError("geometric theta must lie in (0,1)");
  } else {
    throw InputError("unknown distribution '" + text + "' (expected geometric:THETA|linear|uniform)");
  }
  return spec;
}

inline constexpr std::uint64_t kSamplingDomainLimit = 1'000'000;
inline constexpr std::uint64_t kExactGeometricLimit = 4096;

namespace detail {

/// Alternatives listed by target rank (index r−1).
inline std::vector<Alternative> alternatives_by_rank(const LPTree& target) {
  const BigInt size = target.schema().total_domain_size();
  std::vector<Alternative> by_rank(size.convert_to<std::size_t>());
  for_each_alternative(target.schema(), kSamplingDomainLimit, [&](const Alternative& o) {
    by_rank[(target.rank(o) - 1).convert_to<std::size_t>()] = o;
  });
  return by_rank;
}

}  // namespace detail

/// The exact distribution p over dom(X), decreasing in target rank:
/// geometric p ∝ θ^(r−1), linear p ∝ N − r + 1, uniform p ∝ 1.
inline Distribution exact_distribution(const LPTree& target, const DecreasingDistributionSpec& spec) {
  const Schema& schema = target.schema();
  const BigInt size = schema.total_domain_size();
  if (spec.kind == DecreasingDistributionSpec::Kind::geometric) {
    if (spec.theta <= 0 || spec.theta >= 1) throw InputError("geometric theta must lie in (0,1)");
    if (size > kExactGeometricLimit)
      throw GuardError("exact geometric weights need |dom X| <= " + std::to_string(kExactGeometricLimit));
  }
  const auto by_rank = detail::alternatives_by_rank(target);
  const std::size_t n = by_rank.size();
  std::vector<SampleRow> rows(n);
  if (spec.kind == DecreasingDistributionSpec::Kind::geometric) {
    // θ = a/b: weight(r) = a^(r−1)·b^(N−r)
    const BigInt a = boost::multiprecision::numerator(spec.theta);
    const BigInt b = boost::multiprecision::denominator(spec.theta);
    BigInt weight = boost::multiprecision::pow(b, static_cast<unsigned>(n - 1));
    for (std::size_t r = 0; r < n; ++r) {
      rows[r] = {by_rank[r], weight};
      if (r + 1 < n) weight = weight / b * a;
    }
  } else {
    for (std::size_t r = 0; r < n; ++r)
      rows[r] = {by_rank[r], spec.kind == DecreasingDistributionSpec::Kind::linear ? BigInt(n - r) : BigInt(1)};
  }
  return Distribution(Sample(schema, rows));
}

/// `size` i.i.d. draws from the distribution over target ranks.
inline Sample sample_from(const LPTree& target, const DecreasingDistributionSpec& spec, std::uint64_t size,
                          std::uint64_t seed) {
  if (spec.kind == DecreasingDistributionSpec::Kind::geometric && (spec.theta <= 0 || spec.theta >= 1))
    throw InputError("geometric theta must lie in (0,1)");
  const auto by_rank = detail::alternatives_by_rank(target);
  const std::size_t n = by_rank.size();
  std::vector<double> cumulative(n);
  const double theta = spec.theta.convert_to<double>();
  double weight = 1.0;
  double running = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    switch (spec.kind) {
      case DecreasingDistributionSpec::Kind::geometric:
        running += weight;
        weight *= theta;
        break;
      case DecreasingDistributionSpec::Kind::linear:
        running += static_cast<double>(n - r);
        break;
      case DecreasingDistributionSpec::Kind::uniform:
        running += 1.0;
        break;
    }
    cumulative[r] = running;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> counts(n, 0);
  std::vector<std::size_t> first_seen;
  for (std::uint64_t i = 0; i < size; ++i) {
    const double u = rng.unit() * running;
    std::size_t r = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    if (r >= n) r = n - 1;
    if (counts[r]++ == 0) first_seen.push_back(r);
  }
  std::vector<SampleRow> rows;
  rows.reserve(first_seen.size());
  for (std::size_t r : first_seen) rows.push_back({by_rank[r], counts[r]});
  return Sample(target.schema(), rows);
}

/// Sample size sufficient for Pr(rloss ≤ ε) ≥ 1 − δ over LP-trees with at
/// most k attributes per node and l leaves:
/// ⌈(k(ln d + ln(n+1)) + ln(1/δ)) · (l·d^k(d^k+1))² / (2ε²)⌉.
inline BigInt sample_bound(std::uint64_t n, std::uint64_t d, std::uint64_t k, std::uint64_t l, double epsilon,
                           double delta) {
  if (n < 1 || d < 1 || k < 1 || l < 1) throw InputError("n, d, k, l must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) throw InputError("epsilon must lie in (0,1)");
  if (!(delta > 0 && delta < 1)) throw InputError("delta must lie in (0,1)");
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float dk = boost::multiprecision::pow(Float(d), static_cast<int>(k));
  const Float log_terms = Float(k) * (log(Float(d)) + log(Float(n + 1))) + log(1 / Float(delta));
  const Float spread = Float(l) * dk * (dk + 1);
  const Float eps = Float(epsilon);
  const Float value = log_terms * spread * spread / (2 * eps * eps);
  return ceil(value).convert_to<BigInt>();
}

struct ExperimentConfig {
  Schema schema;
  TreeClass target_class;
  std::uint64_t target_seed = 0;
  DecreasingDistributionSpec distribution;
  std::vector<std::uint64_t> sizes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  TreeClass learner_class;
  ScoreVariant variant = ScoreVariant::shifted;
  bool exact_input = false;  // learn from the exact weighted distribution
  unsigned threads = 1;
};

struct ExperimentRow {
  std::uint64_t size = 0;
  std::size_t trial = 0;
  Rational erank;
  Rational rloss;
  std::uint64_t seed = 0;
};

/// For each size and trial: draw, learn, and score the learned tree
/// against the target under the true distribution (exactly).
inline std::vector<ExperimentRow> learning_curve(const ExperimentConfig& config) {
  if (config.trials < 1) throw InputError("experiment needs at least one trial");
  if (config.sizes.empty()) throw InputError("experiment needs at least one sample size");
  for (std::size_t i = 1; i < config.sizes.size(); ++i)
    if (config.sizes[i] <= config.sizes[i - 1]) throw InputError("sample sizes must be strictly increasing");
  const LPTree target = random_tree(config.schema, config.target_class, config.target_seed);
  const Distribution truth = exact_distribution(target, config.distribution);
  const LearnOptions options{config.variant, 1};

  std::vector<ExperimentRow> rows(config.sizes.size() * config.trials);
  detail::parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    ExperimentRow& row = rows[i];
    row.size = config.sizes[i / config.trials];
    row.trial = i % config.trials;
    row.seed = derive_seed(config.seed, row.size, row.trial);
    const Sample sample =
        config.exact_input ? truth.weights() : sample_from(target, config.distribution, row.size, row.seed);
    const LPTree learned = learn(config.schema, sample, config.learner_class, options);
    row.erank = empirical_mean_rank(learned, sample);
    row.rloss = ranking_loss(learned, target, truth);
  });
  return rows;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = std::string("# prng=") + kPrngName + "\n";
  out += "size,trial,erank,rloss,seed,erank_exact,rloss_exact\n";
  for (const auto& row : rows) {
    out += std::to_string(row.size) + ',' + std::to_string(row.trial) + ',' + decimal_string(row.erank) + ',' +
           decimal_string(row.rloss) + ',' + std::to_string(row.seed) + ',' + exact_string(row.erank) + ',' +
           exact_string(row.rloss) + '\n';
  }
  return out;
}

}  // namespace lptree
