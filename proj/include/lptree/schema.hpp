#pragma once

// Combinatorial domains, alternatives, partial instantiations and
// multiset samples.

#include "lptree/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lptree {

struct Attribute {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const Attribute&) const = default;
};

/// Ordered list of finite-domain attributes. Positions are identities:
/// attribute i, value j of attribute i.
class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    if (attributes_.empty()) throw InputError("schema has no attributes");
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      const Attribute& a = attributes_[i];
      if (a.name.empty()) throw InputError("attribute " + std::to_string(i) + " has an empty name");
      if (a.values.size() < 2)
        throw InputError("attribute '" + a.name + "' needs at least 2 values");
      if (a.values.size() > std::numeric_limits<ValueIndex>::max())
        throw InputError("attribute '" + a.name + "' has too many values");
      if (!by_name_.emplace(a.name, i).second)
        throw InputError("duplicate attribute name '" + a.name + "'");
      std::unordered_map<std::string, ValueIndex> values;
      for (std::size_t v = 0; v < a.values.size(); ++v) {
        if (a.values[v].empty()) throw InputError("attribute '" + a.name + "' has an empty value name");
        if (!values.emplace(a.values[v], static_cast<ValueIndex>(v)).second)
          throw InputError("duplicate value '" + a.values[v] + "' in attribute '" + a.name + "'");
      }
      value_index_.push_back(std::move(values));
    }
  }

  /// Number of attributes (n).
  std::size_t size() const { return attributes_.size(); }

  /// Largest domain size (d).
  std::size_t max_domain_size() const {
    std::size_t d = 0;
    for (const auto& a : attributes_) d = std::max(d, a.values.size());
    return d;
  }

  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::span<const Attribute> attributes() const { return attributes_; }
  std::size_t domain_size(std::size_t attr) const { return attributes_.at(attr).values.size(); }

  BigInt domain_size(std::span<const std::size_t> vars) const {
    BigInt product = 1;
    for (std::size_t v : vars) product *= domain_size(v);
    return product;
  }

  BigInt total_domain_size() const {
    BigInt product = 1;
    for (const auto& a : attributes_) product *= a.values.size();
    return product;
  }

  std::optional<std::size_t> find_attribute(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<ValueIndex> find_value(std::size_t attr, std::string_view value) const {
    const auto& values = value_index_.at(attr);
    auto it = values.find(std::string(value));
    if (it == values.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Schema& other) const { return attributes_ == other.attributes_; }

 private:
  std::vector<Attribute> attributes_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<std::unordered_map<std::string, ValueIndex>> value_index_;
};

/// Full assignment: one value index per schema attribute, in schema order.
struct Alternative {
  std::vector<ValueIndex> values;

  auto operator<=>(const Alternative&) const = default;
  bool operator==(const Alternative&) const = default;
};

/// Assignment to a subset of the attributes.
struct PartialInstantiation {
  std::map<std::size_t, ValueIndex> bindings;

  std::vector<std::size_t> vars() const {
    std::vector<std::size_t> out;
    out.reserve(bindings.size());
    for (const auto& [attr, value] : bindings) out.push_back(attr);
    return out;
  }

  bool compatible_with(const Alternative& o) const {
    for (const auto& [attr, value] : bindings)
      if (o.values[attr] != value) return false;
    return true;
  }

  bool operator==(const PartialInstantiation&) const = default;
};

inline void check_alternative(const Schema& schema, const Alternative& o) {
  if (o.values.size() != schema.size())
    throw InputError("alternative has " + std::to_string(o.values.size()) + " values, schema has " +
                     std::to_string(schema.size()) + " attributes");
  for (std::size_t i = 0; i < o.values.size(); ++i)
    if (o.values[i] >= schema.domain_size(i))
      throw InputError("value index out of range for attribute '" + schema.attribute(i).name + "'");
}

/// Parses "Attr=value,Attr=value,..." (attribute order free, every attribute exactly once).
inline Alternative parse_alternative(const Schema& schema, std::string_view text) {
  Alternative o;
  o.values.assign(schema.size(), 0);
  std::vector<bool> seen(schema.size(), false);
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InputError("expected Attr=value, got '" + std::string(item) + "'");
    auto attr = schema.find_attribute(item.substr(0, eq));
    if (!attr) throw InputError("unknown attribute '" + std::string(item.substr(0, eq)) + "'");
    auto value = schema.find_value(*attr, item.substr(eq + 1));
    if (!value)
      throw InputError("unknown value '" + std::string(item.substr(eq + 1)) + "' for attribute '" +
                       schema.attribute(*attr).name + "'");
    if (seen[*attr]) throw InputError("attribute '" + schema.attribute(*attr).name + "' given twice");
    seen[*attr] = true;
    o.values[*attr] = *value;
    start = end + 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw InputError("alternative does not set attribute '" + schema.attribute(i).name + "'");
  return o;
}

inline std::string format_alternative(const Schema& schema, const Alternative& o) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) out += ',';
    out += schema.attribute(i).name;
    out += '=';
    out += schema.attribute(i).values.at(o.values.at(i));
  }
  return out;
}

/// Dense mixed-radix numbering of dom(vars). The first var is the most
/// significant digit, so index order is lexicographic over value indices
/// in the given var order.
class InstantiationIndexer {
 public:
  static constexpr std::uint64_t kMaxSize = std::uint64_t{1} << 32;

  InstantiationIndexer(const Schema& schema, std::vector<std::size_t> vars) : vars_(std::move(vars)) {
    size_ = 1;
    for (std::size_t v : vars_) {
      const std::uint64_t radix = schema.domain_size(v);
      radices_.push_back(radix);
      if (size_ > kMaxSize / radix) throw GuardError("instantiation domain too large to index");
      size_ *= radix;
    }
  }

  std::span<const std::size_t> vars() const { return vars_; }
  std::uint64_t size() const { return size_; }

  std::uint64_t index_of(const Alternative& o) const {
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) index = index * radices_[i] + o.values[vars_[i]];
    return index;
  }

  /// `values` is given in var order.
  std::uint64_t index_of_values(std::span<const ValueIndex> values) const {
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) index = index * radices_[i] + values[i];
    return index;
  }

  std::vector<ValueIndex> values_of(std::uint64_t index) const {
    std::vector<ValueIndex> values(vars_.size());
    for (std::size_t i = vars_.size(); i-- > 0;) {
      values[i] = static_cast<ValueIndex>(index % radices_[i]);
      index /= radices_[i];
    }
    return values;
  }

 private:
  std::vector<std::size_t> vars_;
  std::vector<std::uint64_t> radices_;
  std::uint64_t size_ = 1;
};

inline std::vector<std::size_t> all_attributes(const Schema& schema) {
  std::vector<std::size_t> vars(schema.size());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  return vars;
}

/// Calls `fn` on every alternative of dom(X) in lexicographic order.
inline void for_each_alternative(const Schema& schema, std::uint64_t limit,
                                 const std::function<void(const Alternative&)>& fn) {
  if (schema.total_domain_size() > limit)
    throw GuardError("domain of " + schema.total_domain_size().str() + " alternatives exceeds enumeration limit " +
                     std::to_string(limit));
  Alternative o;
  o.values.assign(schema.size(), 0);
  while (true) {
    fn(o);
    std::size_t i = schema.size();
    while (i > 0) {
      --i;
      if (++o.values[i] < schema.domain_size(i)) break;
      o.values[i] = 0;
      if (i == 0) return;
    }
  }
}

struct SampleRow {
  Alternative alternative;
  BigInt count;

  bool operator==(const SampleRow&) const = default;
};

/// Multiset of alternatives. Rows are distinct, have positive counts and
/// keep first-appearance order.
class Sample {
 public:
  Sample() = default;

  Sample(const Schema& schema, const std::vector<SampleRow>& rows) {
    std::map<Alternative, std::size_t> position;
    for (const SampleRow& row : rows) {
      check_alternative(schema, row.alternative);
      if (row.count < 0) throw InputError("negative count");
      if (row.count == 0) continue;
      auto [it, inserted] = position.emplace(row.alternative, rows_.size());
      if (inserted)
        rows_.push_back(row);
      else
        rows_[it->second].count += row.count;
      total_ += row.count;
    }
  }

  const std::vector<SampleRow>& rows() const { return rows_; }
  const BigInt& total() const { return total_; }
  bool empty() const { return total_ == 0; }

  BigInt multiplicity(const Alternative& o) const {
    for (const auto& row : rows_)
      if (row.alternative == o) return row.count;
    return 0;
  }

  /// p_S(o) = m(S,o) / |S|
  Rational frequency(const Alternative& o) const {
    if (empty()) throw InputError("empty sample");
    return make_rational(multiplicity(o), total_);
  }

  Sample scaled(const BigInt& factor) const {
    if (factor <= 0) throw InputError("scale factor must be positive");
    Sample out = *this;
    for (auto& row : out.rows_) row.count *= factor;
    out.total_ *= factor;
    return out;
  }

  bool operator==(const Sample&) const = default;

 private:
  std::vector<SampleRow> rows_;
  BigInt total_ = 0;
};

/// Instantiation of `vars` (values in var order) → summed multiplicity.
/// Zero-count instantiations are absent.
inline std::map<std::vector<ValueIndex>, BigInt> marginal_counts(const Sample& sample,
                                                                 std::span<const std::size_t> vars) {
  if (vars.empty()) throw InputError("marginal over an empty attribute set");
  std::map<std::vector<ValueIndex>, BigInt> counts;
  std::vector<ValueIndex> key(vars.size());
  for (const auto& row : sample.rows()) {
    for (std::size_t i = 0; i < vars.size(); ++i) key[i] = row.alternative.values.at(vars[i]);
    counts[key] += row.count;
  }
  return counts;
}

/// Dense marginal over all of dom(vars), indexed by InstantiationIndexer.
inline std::vector<BigInt> marginal_table(const Sample& sample, const InstantiationIndexer& indexer) {
  if (indexer.vars().empty()) throw InputError("marginal over an empty attribute set");
  std::vector<BigInt> table(indexer.size());
  if (sample.total() <= std::numeric_limits<std::uint64_t>::max()) {
    // Every partial sum fits in 64 bits.
    std::vector<std::uint64_t> narrow(indexer.size(), 0);
    for (const auto& row : sample.rows())
      narrow[indexer.index_of(row.alternative)] += row.count.convert_to<std::uint64_t>();
    for (std::size_t i = 0; i < narrow.size(); ++i) table[i] = narrow[i];
    return table;
  }
  for (const auto& row : sample.rows()) table[indexer.index_of(row.alternative)] += row.count;
  return table;
}

// ---------------------------------------------------------------------------
// Documents

inline Schema schema_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array())
    throw InputError("schema document must be an object with an 'attributes' array");
  std::vector<Attribute> attributes;
  for (const auto& item : doc["attributes"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() || !item.contains("values") ||
        !item["values"].is_array())
      throw InputError("each attribute needs a string 'name' and a 'values' array");
    Attribute a;
    a.name = item["name"].get<std::string>();
    for (const auto& v : item["values"]) {
      if (!v.is_string()) throw InputError("values of attribute '" + a.name + "' must be strings");
      a.values.push_back(v.get<std::string>());
    }
    if (a.name.find(',') != std::string::npos || a.name.find('=') != std::string::npos)
      throw InputError("attribute name '" + a.name + "' contains ',' or '='");
    for (const auto& v : a.values)
      if (v.find(',') != std::string::npos || v.find('|') != std::string::npos)
        throw InputError("value '" + v + "' contains ',' or '|'");
    attributes.push_back(std::move(a));
  }
  return Schema(std::move(attributes));
}

inline nlohmann::ordered_json schema_to_json(const Schema& schema) {
  nlohmann::ordered_json attrs = nlohmann::ordered_json::array();
  for (const auto& a : schema.attributes()) {
    nlohmann::ordered_json item;
    item["name"] = a.name;
    item["values"] = a.values;
    attrs.push_back(std::move(item));
  }
  nlohmann::ordered_json doc;
  doc["attributes"] = std::move(attrs);
  return doc;
}

inline Schema load_schema(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed schema JSON: ") + e.what());
  }
  return schema_from_json(doc);
}

inline std::string serialize_schema(const Schema& schema) { return schema_to_json(schema).dump(2) + "\n"; }

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

inline BigInt parse_count(const std::string& text, const std::string& where) {
  if (!text.empty() && text[0] == '-') throw InputError(where + ": negative count '" + text + "'");
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw InputError(where + ": malformed count '" + text + "'");
  return BigInt(text);
}

}  // namespace detail

inline constexpr std::string_view kCountColumn = "__count";

/// Reads the CSV sample format: header of attribute names (any order) with
/// an optional final `__count` column, one alternative per row.
inline Sample load_sample(std::istream& in, const Schema& schema, const std::string& source = "<sample>") {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto where = [&]() { return source + ":" + std::to_string(line_no); };

  if (!next_line()) throw InputError(source + ": missing header row");
  std::vector<std::string> header = detail::split_csv_line(line);
  bool has_count = !header.empty() && header.back() == kCountColumn;
  if (has_count) header.pop_back();
  if (header.size() != schema.size())
    throw InputError(where() + ": header has " + std::to_string(header.size()) + " attribute columns, schema has " +
                     std::to_string(schema.size()));
  std::vector<std::size_t> column_attr;
  std::vector<bool> seen(schema.size(), false);
  for (const auto& name : header) {
    auto attr = schema.find_attribute(name);
    if (!attr) throw InputError(where() + ": unknown attribute '" + name + "'");
    if (seen[*attr]) throw InputError(where() + ": duplicate column '" + name + "'");
    seen[*attr] = true;
    column_attr.push_back(*attr);
  }

  std::vector<SampleRow> rows;
  while (next_line()) {
    std::vector<std::string> fields = detail::split_csv_line(line);
    const std::size_t expected = header.size() + (has_count ? 1 : 0);
    if (fields.size() != expected)
      throw InputError(where() + ": expected " + std::to_string(expected) + " fields, got " +
                       std::to_string(fields.size()));
    SampleRow row;
    row.alternative.values.assign(schema.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
      auto value = schema.find_value(column_attr[c], fields[c]);
      if (!value)
        throw InputError(where() + ": unknown value '" + fields[c] + "' for attribute '" +
                         schema.attribute(column_attr[c]).name + "'");
      row.alternative.values[column_attr[c]] = *value;
    }
    row.count = has_count ? detail::parse_count(fields.back(), where()) : BigInt(1);
    rows.push_back(std::move(row));
  }
  Sample sample(schema, rows);
  if (sample.empty()) throw InputError(source + ": sample has zero total count");
  return sample;
}

inline std::string serialize_sample(const Schema& schema, const Sample& sample) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out += schema.attribute(i).name;
    out += ',';
  }
  out += kCountColumn;
  out += '\n';
  for (const auto& row : sample.rows()) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      out += schema.attribute(i).values.at(row.alternative.values[i]);
      out += ',';
    }
    out += row.count.str();
    out += '\n';
  }
  return out;
}

}  // namespace lptree
