#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage or input error,
// 1 guard violation or internal failure.

#include "lptree/lptree.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lptree::cli {

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("failed writing '" + path + "'");
}

template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + msg);
  }
}

inline Schema read_schema(const std::string& path) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return load_schema(in);
  });
}

inline Sample read_sample(const std::string& path, const Schema& schema) {
  auto in = open_input(path);
  return load_sample(in, schema, path);
}

inline LPTree read_tree(const std::string& path) {
  return with_path(path, [&] {
    auto in = open_input(path);
    return load_tree(in);
  });
}

inline std::vector<std::uint64_t> parse_sizes(const std::string& text) {
  std::vector<std::uint64_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("malformed size '" + item + "' in --sizes");
    sizes.push_back(std::stoull(item));
  }
  if (sizes.empty()) throw InputError("--sizes is empty");
  return sizes;
}

inline TreeClass class_from_flags(const std::string& name, const CLI::Option* k_opt, int k) {
  if (name == "lin1") {
    if (k_opt->count() > 0) throw CLI::ValidationError("--k", "only valid with --class link");
    return parse_tree_class(name, 1);
  }
  if (name == "link") {
    if (k_opt->count() == 0) throw CLI::ValidationError("--k", "required with --class link");
    if (k < 1) throw CLI::ValidationError("--k", "must be >= 1");
    return parse_tree_class(name, static_cast<std::size_t>(k));
  }
  throw CLI::ValidationError("--class", "expected lin1 or link");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn and query lexicographic preference trees"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads (output does not depend on it)")->check(CLI::PositiveNumber);

  struct {
    std::string schema, sample, tree, target, out, alt, alt2, cls = "lin1", variant = "shifted",
        dist = "geometric:0.9", sizes, tree_out, sample_out;
    int k = 0;
    std::uint64_t seed = 0, size = 0, trials = 1;
    std::optional<std::uint64_t> target_seed;
    std::uint64_t n = 0, d = 0, bound_k = 0, l = 0;
    double eps = 0, delta = 0;
    bool exact_input = false;
  } f;

  auto* learn = app.add_subcommand("learn", "Learn an ERM linear LP-tree from a sample");
  learn->add_option("--schema", f.schema)->required();
  learn->add_option("--sample", f.sample)->required();
  learn->add_option("--class", f.cls, "lin1 | link");
  auto* learn_k = learn->add_option("--k", f.k, "Max attributes per node (link only)");
  learn->add_option("--score-variant", f.variant, "shifted | unshifted");
  learn->add_option("--out", f.out)->required();

  auto* rank = app.add_subcommand("rank", "Rank of an alternative");
  rank->add_option("--tree", f.tree)->required();
  rank->add_option("--alt", f.alt)->required();

  auto* compare = app.add_subcommand("compare", "Which of two alternatives is preferred");
  compare->add_option("--tree", f.tree)->required();
  compare->add_option("--alt", f.alt)->required();
  compare->add_option("--alt2", f.alt2)->required();

  auto* optimal = app.add_subcommand("optimal", "Most preferred alternative");
  optimal->add_option("--tree", f.tree)->required();

  auto* eval = app.add_subcommand("eval", "Empirical mean rank on a sample, or ranking loss against a target");
  eval->add_option("--tree", f.tree)->required();
  auto* eval_sample = eval->add_option("--sample", f.sample);
  auto* eval_target = eval->add_option("--target", f.target);
  eval->add_option("--dist", f.dist, "geometric:THETA | linear | uniform");

  auto* gen = app.add_subcommand("gen", "Generate a random target tree and a sample drawn from it");
  gen->add_option("--schema", f.schema)->required();
  gen->add_option("--class", f.cls);
  auto* gen_k = gen->add_option("--k", f.k);
  gen->add_option("--seed", f.seed);
  gen->add_option("--dist", f.dist);
  gen->add_option("--size", f.size)->required();
  gen->add_option("--tree-out", f.tree_out)->required();
  gen->add_option("--sample-out", f.sample_out)->required();

  auto* bound = app.add_subcommand("bound", "Sufficient sample size for Pr(rloss <= eps) >= 1 - delta");
  bound->add_option("--n", f.n)->required();
  bound->add_option("--d", f.d)->required();
  bound->add_option("--k", f.bound_k)->required();
  bound->add_option("--l", f.l)->required();
  bound->add_option("--eps", f.eps)->required();
  bound->add_option("--delta", f.delta)->required();

  auto* experiment = app.add_subcommand("experiment", "Learning-curve experiment, CSV output");
  experiment->add_option("--schema", f.schema)->required();
  experiment->add_option("--class", f.cls);
  auto* exp_k = experiment->add_option("--k", f.k);
  experiment->add_option("--target-seed", f.target_seed);
  experiment->add_option("--dist", f.dist);
  experiment->add_option("--sizes", f.sizes)->required();
  experiment->add_option("--trials", f.trials);
  experiment->add_option("--seed", f.seed);
  experiment->add_option("--score-variant", f.variant);
  experiment->add_flag("--exact-input", f.exact_input, "Learn from the exact distribution instead of draws");
  experiment->add_option("--out", f.out);

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive ERM over small linear tree classes");
  oracle_cmd->add_option("--schema", f.schema)->required();
  oracle_cmd->add_option("--sample", f.sample)->required();
  oracle_cmd->add_option("--k", f.k)->required();
  oracle_cmd->add_option("--out", f.out);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out, err);
        return 0;
      }
      err << "error: " << e.what() << "\n";
      return 2;
    }

    if (learn->parsed()) {
      const TreeClass cls = detail::class_from_flags(f.cls, learn_k, f.k);
      const LearnOptions options{parse_score_variant(f.variant), threads};
      const Schema schema = detail::read_schema(f.schema);
      const Sample sample = detail::read_sample(f.sample, schema);
      const LPTree tree = lptree::learn(schema, sample, cls, options);
      detail::write_file(f.out, serialize_tree(tree));
      out << "erank: " << format_rational(empirical_mean_rank(tree, sample)) << "\n";
    } else if (rank->parsed()) {
      const LPTree tree = detail::read_tree(f.tree);
      out << tree.rank(parse_alternative(tree.schema(), f.alt)) << "\n";
    } else if (compare->parsed()) {
      const LPTree tree = detail::read_tree(f.tree);
      const auto result =
          tree.compare(parse_alternative(tree.schema(), f.alt), parse_alternative(tree.schema(), f.alt2));
      out << (result == Preference::first ? "first" : "second") << "\n";
    } else if (optimal->parsed()) {
      const LPTree tree = detail::read_tree(f.tree);
      out << format_alternative(tree.schema(), tree.optimal()) << "\n";
    } else if (eval->parsed()) {
      const bool by_sample = eval_sample->count() > 0;
      const bool by_target = eval_target->count() > 0;
      if (by_sample == by_target) throw CLI::ValidationError("eval", "give exactly one of --sample or --target");
      const LPTree tree = detail::read_tree(f.tree);
      if (by_sample) {
        const Sample sample = detail::read_sample(f.sample, tree.schema());
        out << "erank: " << format_rational(empirical_mean_rank(tree, sample)) << "\n";
      } else {
        const LPTree target = detail::read_tree(f.target);
        const Distribution p = exact_distribution(target, parse_distribution(f.dist));
        out << "rloss: " << format_rational(ranking_loss(tree, target, p)) << "\n";
      }
    } else if (gen->parsed()) {
      const TreeClass cls = detail::class_from_flags(f.cls, gen_k, f.k);
      const Schema schema = detail::read_schema(f.schema);
      const LPTree target = random_tree(schema, cls, f.seed);
      const Sample sample = sample_from(target, parse_distribution(f.dist), f.size, derive_seed(f.seed, 0, f.size));
      if (sample.empty()) throw InputError("--size must be positive");
      detail::write_file(f.tree_out, serialize_tree(target));
      detail::write_file(f.sample_out, serialize_sample(schema, sample));
    } else if (bound->parsed()) {
      out << sample_bound(f.n, f.d, f.bound_k, f.l, f.eps, f.delta) << "\n";
    } else if (experiment->parsed()) {
      ExperimentConfig config;
      config.target_class = detail::class_from_flags(f.cls, exp_k, f.k);
      config.learner_class = config.target_class;
      config.schema = detail::read_schema(f.schema);
      config.target_seed = f.target_seed.value_or(f.seed);
      config.distribution = parse_distribution(f.dist);
      config.sizes = detail::parse_sizes(f.sizes);
      config.trials = f.trials;
      config.seed = f.seed;
      config.variant = parse_score_variant(f.variant);
      config.exact_input = f.exact_input;
      config.threads = threads;
      const std::string csv = experiment_csv(learning_curve(config));
      if (f.out.empty())
        out << csv;
      else
        detail::write_file(f.out, csv);
    } else if (oracle_cmd->parsed()) {
      if (f.k < 1) throw CLI::ValidationError("--k", "must be >= 1");
      const Schema schema = detail::read_schema(f.schema);
      const Sample sample = detail::read_sample(f.sample, schema);
      const auto result = oracle::exhaustive_erm(schema, sample, static_cast<std::size_t>(f.k));
      if (!f.out.empty()) detail::write_file(f.out, serialize_tree(result.tree));
      out << "erank: " << format_rational(result.erank) << "\n";
    }
    return 0;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lptree::cli
