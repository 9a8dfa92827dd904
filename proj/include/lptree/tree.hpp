#pragma once

// Lexicographic preference trees: structure, validation, the induced
// linear order and the JSON document format.

#include "lptree/core.hpp"
#include "lptree/schema.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace lptree {

enum class Branching { leaf, single, split };

/// One node of an LP-tree. `order` lists the instantiations of `vars`
/// (as InstantiationIndexer indices over `vars`), most preferred first.
/// A split node has one child per instantiation, indexed the same way.
struct LPNode {
  std::vector<std::size_t> vars;
  std::vector<std::uint64_t> order;
  Branching branching = Branching::leaf;
  std::vector<LPNode> children;

  bool operator==(const LPNode&) const = default;
};

/// Returns a human-readable list of structural violations; empty iff
/// `root` is a well-formed LP-tree over `schema`.
inline std::vector<std::string> validate(const Schema& schema, const LPNode& root) {
  std::vector<std::string> violations;
  std::vector<bool> used(schema.size(), false);

  std::function<void(const LPNode&, const std::string&)> visit = [&](const LPNode& node, const std::string& where) {
    auto report = [&](const std::string& msg) { violations.push_back(where + ": " + msg); };
    if (node.vars.empty()) {
      report("node has no attributes");
      return;
    }
    std::vector<std::size_t> added;
    bool vars_ok = true;
    for (std::size_t v : node.vars) {
      if (v >= schema.size()) {
        report("attribute index " + std::to_string(v) + " out of range");
        vars_ok = false;
        continue;
      }
      if (used[v]) {
        report("attribute '" + schema.attribute(v).name + "' appears twice on a branch");
        vars_ok = false;
        continue;
      }
      used[v] = true;
      added.push_back(v);
    }
    auto restore = [&]() {
      for (std::size_t v : added) used[v] = false;
    };
    if (!vars_ok) {
      restore();
      return;
    }
    const BigInt dom = schema.domain_size(node.vars);
    if (dom > InstantiationIndexer::kMaxSize) {
      report("node domain too large");
      restore();
      return;
    }
    const auto size = dom.convert_to<std::uint64_t>();
    if (node.order.size() != size)
      report("preference table has " + std::to_string(node.order.size()) + " entries, domain has " +
             std::to_string(size));
    std::vector<bool> seen(size, false);
    for (std::uint64_t inst : node.order) {
      if (inst >= size) {
        report("preference table entry out of range");
      } else if (seen[inst]) {
        report("preference table lists an instantiation twice");
      } else {
        seen[inst] = true;
      }
    }
    switch (node.branching) {
      case Branching::leaf: {
        if (!node.children.empty()) report("leaf node has children");
        for (std::size_t a = 0; a < schema.size(); ++a)
          if (!used[a]) report("branch is missing attribute '" + schema.attribute(a).name + "'");
        break;
      }
      case Branching::single:
        if (node.children.size() != 1) {
          report("single-child node has " + std::to_string(node.children.size()) + " children");
        } else {
          visit(node.children[0], where + "/single");
        }
        break;
      case Branching::split:
        if (node.children.size() != size) {
          report("split node has " + std::to_string(node.children.size()) + " children, domain has " +
                 std::to_string(size));
        } else {
          for (std::size_t i = 0; i < node.children.size(); ++i)
            visit(node.children[i], where + "/split[" + std::to_string(i) + "]");
        }
        break;
    }
    restore();
  };
  visit(root, "root");
  return violations;
}

/// Ancestor path and split-edge instantiation of a visited node.
struct TraversalContext {
  std::vector<std::size_t> path;  // node ids from the root, inclusive
  PartialInstantiation inst;      // binds exactly the split ancestors' attributes
};

enum class Preference { first, second };

/// Validated, immutable LP-tree. Queries run on a flattened copy of the
/// nodes with per-node rank tables.
class LPTree {
 public:
  struct NodeInfo {
    InstantiationIndexer indexer;
    std::vector<std::uint64_t> position;  // instantiation → 0-based place in the order
    std::uint64_t top = 0;                // most preferred instantiation
    BigInt desc_size;                     // |dom Desc(N)|
    Branching branching = Branching::leaf;
    std::vector<std::size_t> children;    // node ids
  };

  LPTree(Schema schema, LPNode root) : schema_(std::move(schema)), root_(std::move(root)) {
    auto violations = validate(schema_, root_);
    if (!violations.empty()) {
      std::string msg = "invalid LP-tree:";
      for (const auto& v : violations) msg += "\n  " + v;
      throw InputError(msg);
    }
    std::vector<bool> used(schema_.size(), false);
    compile(root_, used);
  }

  const Schema& schema() const { return schema_; }
  const LPNode& root() const { return root_; }

  std::size_t node_count() const { return nodes_.size(); }
  const NodeInfo& node(std::size_t id) const { return nodes_.at(id); }

  /// Rank of `o`: one root-to-leaf pass summing each node's contribution
  /// (places above o's instantiation) × |dom Desc(N)|.
  BigInt rank(const Alternative& o) const {
    check_alternative(schema_, o);
    BigInt above = 0;
    std::size_t id = 0;
    while (true) {
      const NodeInfo& n = nodes_[id];
      const std::uint64_t inst = n.indexer.index_of(o);
      const std::uint64_t place = n.position[inst];
      if (place != 0) above += n.desc_size * place;
      if (n.branching == Branching::leaf) break;
      id = n.branching == Branching::single ? n.children[0] : n.children[inst];
    }
    return above + 1;
  }

  /// Which of two distinct alternatives the tree prefers: decided at the
  /// first node on their common branch where they differ.
  Preference compare(const Alternative& a, const Alternative& b) const {
    check_alternative(schema_, a);
    check_alternative(schema_, b);
    if (a == b) throw InputError("cannot compare an alternative with itself");
    std::size_t id = 0;
    while (true) {
      const NodeInfo& n = nodes_[id];
      const std::uint64_t ia = n.indexer.index_of(a);
      const std::uint64_t ib = n.indexer.index_of(b);
      if (ia != ib) return n.position[ia] < n.position[ib] ? Preference::first : Preference::second;
      // Every branch covers every attribute, so distinct alternatives differ before the leaf.
      id = n.branching == Branching::single ? n.children[0] : n.children[ia];
    }
  }

  Alternative optimal() const {
    Alternative o;
    o.values.assign(schema_.size(), 0);
    std::size_t id = 0;
    while (true) {
      const NodeInfo& n = nodes_[id];
      const auto values = n.indexer.values_of(n.top);
      for (std::size_t i = 0; i < values.size(); ++i) o.values[n.indexer.vars()[i]] = values[i];
      if (n.branching == Branching::leaf) return o;
      id = n.branching == Branching::single ? n.children[0] : n.children[n.top];
    }
  }

  /// Node ids visited by `o`, with the split-edge instantiation.
  TraversalContext branch(const Alternative& o) const {
    check_alternative(schema_, o);
    TraversalContext ctx;
    std::size_t id = 0;
    while (true) {
      ctx.path.push_back(id);
      const NodeInfo& n = nodes_[id];
      if (n.branching == Branching::leaf) return ctx;
      if (n.branching == Branching::single) {
        id = n.children[0];
        continue;
      }
      for (std::size_t v : n.indexer.vars()) ctx.inst.bindings[v] = o.values[v];
      id = n.children[n.indexer.index_of(o)];
    }
  }

  /// Pre-order walk over all nodes.
  void for_each_node(const std::function<void(std::size_t, const TraversalContext&)>& fn) const {
    TraversalContext ctx;
    walk(0, ctx, fn);
  }

  bool operator==(const LPTree& other) const { return schema_ == other.schema_ && root_ == other.root_; }

 private:
  std::size_t compile(const LPNode& node, std::vector<bool>& used) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(NodeInfo{InstantiationIndexer(schema_, node.vars), {}, 0, 0, node.branching, {}});
    for (std::size_t v : node.vars) used[v] = true;
    {
      NodeInfo& n = nodes_[id];
      n.position.assign(n.indexer.size(), 0);
      for (std::size_t i = 0; i < node.order.size(); ++i) n.position[node.order[i]] = i;
      n.top = node.order.front();
      BigInt desc = 1;
      for (std::size_t a = 0; a < schema_.size(); ++a)
        if (!used[a]) desc *= schema_.domain_size(a);
      n.desc_size = desc;
    }
    std::vector<std::size_t> children;
    for (const LPNode& child : node.children) children.push_back(compile(child, used));
    nodes_[id].children = std::move(children);
    for (std::size_t v : node.vars) used[v] = false;
    return id;
  }

  void walk(std::size_t id, TraversalContext& ctx,
            const std::function<void(std::size_t, const TraversalContext&)>& fn) const {
    ctx.path.push_back(id);
    fn(id, ctx);
    const NodeInfo& n = nodes_[id];
    if (n.branching == Branching::single) {
      walk(n.children[0], ctx, fn);
    } else if (n.branching == Branching::split) {
      for (std::uint64_t inst = 0; inst < n.children.size(); ++inst) {
        const auto values = n.indexer.values_of(inst);
        for (std::size_t i = 0; i < values.size(); ++i) ctx.inst.bindings[n.indexer.vars()[i]] = values[i];
        walk(n.children[inst], ctx, fn);
      }
      for (std::size_t v : n.indexer.vars()) ctx.inst.bindings.erase(v);
    }
    ctx.path.pop_back();
  }

  Schema schema_;
  LPNode root_;
  std::vector<NodeInfo> nodes_;
};

/// Single-branch tree from (vars, order) pairs listed root first.
inline LPNode make_linear_node(std::vector<std::pair<std::vector<std::size_t>, std::vector<std::uint64_t>>> levels) {
  if (levels.empty()) throw InputError("linear tree needs at least one node");
  LPNode node{std::move(levels.back().first), std::move(levels.back().second), Branching::leaf, {}};
  for (std::size_t i = levels.size() - 1; i-- > 0;) {
    LPNode parent{std::move(levels[i].first), std::move(levels[i].second), Branching::single, {}};
    parent.children.push_back(std::move(node));
    node = std::move(parent);
  }
  return node;
}

// ---------------------------------------------------------------------------
// Documents

namespace detail {

inline std::string edge_key(const Schema& schema, const InstantiationIndexer& indexer, std::uint64_t inst) {
  const auto values = indexer.values_of(inst);
  std::string key;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) key += '|';
    key += schema.attribute(indexer.vars()[i]).values[values[i]];
  }
  return key;
}

inline nlohmann::ordered_json node_to_json(const Schema& schema, const LPNode& node) {
  InstantiationIndexer indexer(schema, node.vars);
  nlohmann::ordered_json out;
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (std::size_t v : node.vars) vars.push_back(schema.attribute(v).name);
  out["vars"] = std::move(vars);
  nlohmann::ordered_json cpt = nlohmann::ordered_json::array();
  for (std::uint64_t inst : node.order) {
    nlohmann::ordered_json entry = nlohmann::ordered_json::array();
    const auto values = indexer.values_of(inst);
    for (std::size_t i = 0; i < values.size(); ++i) entry.push_back(schema.attribute(node.vars[i]).values[values[i]]);
    cpt.push_back(std::move(entry));
  }
  out["cpt"] = std::move(cpt);
  switch (node.branching) {
    case Branching::leaf:
      out["children"] = nullptr;
      break;
    case Branching::single:
      out["children"]["single"] = node_to_json(schema, node.children.at(0));
      break;
    case Branching::split: {
      nlohmann::ordered_json split = nlohmann::ordered_json::object();
      for (std::uint64_t inst = 0; inst < node.children.size(); ++inst)
        split[edge_key(schema, indexer, inst)] = node_to_json(schema, node.children[inst]);
      out["children"]["split"] = std::move(split);
      break;
    }
  }
  return out;
}

inline LPNode node_from_json(const Schema& schema, const nlohmann::json& doc, const std::string& where) {
  auto fail = [&](const std::string& msg) -> InputError { return InputError(where + ": " + msg); };
  if (!doc.is_object()) throw fail("node must be an object");
  if (!doc.contains("vars") || !doc["vars"].is_array() || doc["vars"].empty())
    throw fail("node needs a non-empty 'vars' array");
  LPNode node;
  for (const auto& name : doc["vars"]) {
    if (!name.is_string()) throw fail("'vars' entries must be strings");
    auto attr = schema.find_attribute(name.get<std::string>());
    if (!attr) throw fail("unknown attribute '" + name.get<std::string>() + "'");
    if (std::find(node.vars.begin(), node.vars.end(), *attr) != node.vars.end())
      throw fail("attribute '" + name.get<std::string>() + "' listed twice");
    node.vars.push_back(*attr);
  }
  InstantiationIndexer indexer(schema, node.vars);
  if (!doc.contains("cpt") || !doc["cpt"].is_array()) throw fail("node needs a 'cpt' array");
  auto parse_inst = [&](const std::vector<std::string>& values) -> std::uint64_t {
    if (values.size() != node.vars.size())
      throw fail("instantiation has " + std::to_string(values.size()) + " values, node has " +
                 std::to_string(node.vars.size()) + " attributes");
    std::vector<ValueIndex> idx;
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto v = schema.find_value(node.vars[i], values[i]);
      if (!v)
        throw fail("unknown value '" + values[i] + "' for attribute '" + schema.attribute(node.vars[i]).name + "'");
      idx.push_back(*v);
    }
    return indexer.index_of_values(idx);
  };
  for (const auto& entry : doc["cpt"]) {
    if (!entry.is_array()) throw fail("'cpt' entries must be arrays of values");
    std::vector<std::string> values;
    for (const auto& v : entry) {
      if (!v.is_string()) throw fail("'cpt' values must be strings");
      values.push_back(v.get<std::string>());
    }
    node.order.push_back(parse_inst(values));
  }
  if (!doc.contains("children")) throw fail("node needs a 'children' member");
  const auto& children = doc["children"];
  if (children.is_null()) {
    node.branching = Branching::leaf;
  } else if (children.is_object() && children.size() == 1 && children.contains("single")) {
    node.branching = Branching::single;
    node.children.push_back(node_from_json(schema, children["single"], where + "/single"));
  } else if (children.is_object() && children.size() == 1 && children.contains("split")) {
    const auto& split = children["split"];
    if (!split.is_object()) throw fail("'split' must be an object");
    node.branching = Branching::split;
    std::vector<std::optional<LPNode>> slots(indexer.size());
    for (const auto& [key, child] : split.items()) {
      std::vector<std::string> values;
      std::size_t start = 0;
      while (true) {
        std::size_t end = key.find('|', start);
        values.push_back(key.substr(start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos) break;
        start = end + 1;
      }
      const std::uint64_t inst = parse_inst(values);
      if (slots[inst]) throw fail("duplicate split edge '" + key + "'");
      slots[inst] = node_from_json(schema, child, where + "/split[" + key + "]");
    }
    for (std::uint64_t inst = 0; inst < slots.size(); ++inst) {
      if (!slots[inst]) throw fail("split node missing edge '" + edge_key(schema, indexer, inst) + "'");
      node.children.push_back(std::move(*slots[inst]));
    }
  } else {
    throw fail("'children' must be null, {\"single\": node} or {\"split\": {...}}");
  }
  return node;
}

inline nlohmann::json parse_json(std::istream& in, const std::string& what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed " + what + " JSON: " + e.what());
  }
}

inline LPTree tree_from_json(const nlohmann::json& doc, const Schema* expected) {
  if (!doc.is_object() || !doc.contains("root")) throw InputError("tree document needs a 'root' node");
  Schema schema;
  if (doc.contains("schema")) {
    schema = schema_from_json(doc["schema"]);
    if (expected && !(schema == *expected)) throw InputError("tree schema does not match the given schema");
  } else if (expected) {
    schema = *expected;
  } else {
    throw InputError("tree document has no 'schema' and none was given");
  }
  LPNode root = node_from_json(schema, doc["root"], "root");
  return LPTree(std::move(schema), std::move(root));
}

}  // namespace detail

/// Tree document: {"schema": {...}, "root": node}.
inline std::string serialize_tree(const LPTree& tree) {
  nlohmann::ordered_json doc;
  doc["schema"] = schema_to_json(tree.schema());
  doc["root"] = detail::node_to_json(tree.schema(), tree.root());
  return doc.dump(2) + "\n";
}

inline LPTree load_tree(std::istream& in) { return detail::tree_from_json(detail::parse_json(in, "tree"), nullptr); }

/// As load_tree, but the tree must be over `schema` (the document's
/// embedded schema may be omitted).
inline LPTree load_tree(std::istream& in, const Schema& schema) {
  return detail::tree_from_json(detail::parse_json(in, "tree"), &schema);
}

}  // namespace lptree
