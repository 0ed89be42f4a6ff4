#include "relmod/table.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "relmod/error.hpp"

namespace relmod {

namespace {

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

int compare_levels(const std::string& a, const std::string& b) {
  if (a == b) return 0;
  auto ia = parse_integer(a);
  auto ib = parse_integer(b);
  if (ia && ib) return *ia < *ib ? -1 : 1;
  return a < b ? -1 : 1;
}

}  // namespace

Cell Cell::tuple(std::vector<std::string> levels) {
  if (levels.empty()) throw InputError("tuple cell with no components");
  return Cell(std::move(levels), true);
}

Cell Cell::label(std::string name) {
  if (name.empty()) throw InputError("empty cell label");
  return Cell({std::move(name)}, false);
}

std::string Cell::to_string() const {
  if (!is_tuple_) return parts_.front();
  std::string s = "(";
  for (std::size_t k = 0; k < parts_.size(); ++k) s += (k ? "," : "") + parts_[k];
  return s + ")";
}

std::string Cell::key() const {
  std::string s;
  for (std::size_t k = 0; k < parts_.size(); ++k) s += (k ? "," : "") + parts_[k];
  return s;
}

std::optional<std::size_t> Table::index_of(const Cell& c) const {
  auto it = std::find(cells_.begin(), cells_.end(), c);
  if (it == cells_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cells_.begin());
}

std::optional<std::size_t> Table::index_of_key(const std::string& key) const {
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].key() == key) return i;
  return std::nullopt;
}

Table build_table(std::vector<Cell> cells, std::vector<std::vector<std::string>> level_orders) {
  if (cells.empty()) throw InputError("table has no cells");
  if (cells.size() < 2) throw InputError("a table needs at least two cells");
  const bool tuple = cells.front().is_tuple();
  const std::size_t arity = cells.front().parts().size();
  for (const auto& c : cells) {
    if (c.is_tuple() != tuple) throw InputError("table mixes tuple cells and labelled cells");
    if (tuple && c.parts().size() != arity)
      throw InputError("cell " + c.to_string() + " has " + std::to_string(c.parts().size()) +
                       " components, expected " + std::to_string(arity));
  }
  {
    std::set<std::vector<std::string>> seen;
    for (const auto& c : cells)
      if (!seen.insert(c.parts()).second) throw InputError("duplicate cell " + c.to_string());
  }

  Table t;
  t.tuple_ = tuple;
  if (tuple) {
    if (!level_orders.empty() && level_orders.size() != arity)
      throw InputError("level order given for " + std::to_string(level_orders.size()) +
                       " variables, cells have " + std::to_string(arity));
    std::vector<std::map<std::string, std::size_t>> rank(level_orders.size());
    for (std::size_t v = 0; v < level_orders.size(); ++v)
      for (std::size_t l = 0; l < level_orders[v].size(); ++l) {
        if (!rank[v].emplace(level_orders[v][l], l).second)
          throw InputError("variable " + std::to_string(v) + " lists level '" +
                           level_orders[v][l] + "' twice");
      }
    for (const auto& c : cells)
      for (std::size_t v = 0; v < rank.size(); ++v)
        if (!rank[v].contains(c.parts()[v]))
          throw InputError("cell " + c.to_string() + " uses undeclared level '" + c.parts()[v] +
                           "' of variable " + std::to_string(v));
    std::stable_sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) {
      for (std::size_t v = 0; v < arity; ++v) {
        int cmp = 0;
        if (v < rank.size()) {
          const auto ra = rank[v].at(a.parts()[v]);
          const auto rb = rank[v].at(b.parts()[v]);
          cmp = ra == rb ? 0 : (ra < rb ? -1 : 1);
        } else {
          cmp = compare_levels(a.parts()[v], b.parts()[v]);
        }
        if (cmp != 0) return cmp < 0;
      }
      return false;
    });
    t.levels_ = std::move(level_orders);
  }
  t.cells_ = std::move(cells);
  return t;
}

SubsetClass::SubsetClass(const Table& table, std::vector<Subset> subsets)
    : table_size_(table.size()) {
  for (auto& s : subsets) {
    if (s.members.empty()) throw InputError("subset '" + s.name + "' is empty");
    std::sort(s.members.begin(), s.members.end());
    s.members.erase(std::unique(s.members.begin(), s.members.end()), s.members.end());
    if (s.members.back() >= table.size())
      throw InputError("subset '" + s.name + "' refers to cell index " +
                       std::to_string(s.members.back()) + " outside the table");
  }
  subsets_ = std::move(subsets);
}

ModelMatrix::ModelMatrix(IntegerMatrix entries, std::vector<std::string> row_names)
    : entries_(std::move(entries)), row_names_(std::move(row_names)) {
  for (std::size_t r = 0; r < entries_.rows(); ++r)
    for (std::size_t c = 0; c < entries_.cols(); ++c)
      if (entries_(r, c) < 0)
        throw InputError("model matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") is negative");
  if (row_names_.empty()) {
    for (std::size_t r = 0; r < entries_.rows(); ++r) row_names_.push_back("S" + std::to_string(r + 1));
  } else if (row_names_.size() != entries_.rows()) {
    throw InputError("model matrix has " + std::to_string(entries_.rows()) + " rows but " +
                     std::to_string(row_names_.size()) + " row names");
  }
}

ModelMatrix build_model_matrix(const Table& table, const SubsetClass& subsets) {
  if (subsets.table_size() != table.size())
    throw InputError("subset class was built for a different table");
  IntegerMatrix a(subsets.size(), table.size());
  std::vector<std::string> names;
  names.reserve(subsets.size());
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    const auto& s = subsets.subsets()[j];
    for (auto i : s.members) a(j, i) = 1;
    names.push_back(s.name);
  }
  return ModelMatrix(std::move(a), std::move(names));
}

ModelMatrix reduce_to_full_row_rank(const ModelMatrix& a) {
  if (a.entries().is_zero()) throw InputError("model matrix is zero");
  const auto keep = independent_rows(a.entries());
  if (keep.size() == a.rows()) return a;
  IntegerMatrix out(keep.size(), a.cols());
  std::vector<std::string> names;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(k, c) = a.entries()(keep[k], c);
    names.push_back(a.row_names()[keep[k]]);
  }
  return ModelMatrix(std::move(out), std::move(names));
}

std::vector<std::size_t> find_zero_columns(const ModelMatrix& a) {
  std::vector<std::size_t> zero;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    bool all_zero = true;
    for (std::size_t r = 0; r < a.rows() && all_zero; ++r) all_zero = a.entries()(r, c) == 0;
    if (all_zero) zero.push_back(c);
  }
  return zero;
}

Subset cylinder_subset(const Table& table, std::string name,
                       const std::vector<std::pair<std::size_t, std::string>>& fixed) {
  if (!fixed.empty() && !table.is_tuple_structured())
    throw InputError("cylinder sets need tuple-structured cells");
  Subset s{std::move(name), {}};
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& parts = table.cell(i).parts();
    bool match = true;
    for (const auto& [var, level] : fixed) {
      if (var >= table.arity()) throw InputError("variable index out of range");
      if (parts[var] != level) {
        match = false;
        break;
      }
    }
    if (match) s.members.push_back(i);
  }
  return s;
}

std::vector<Subset> marginal_subsets(const Table& table, const std::vector<std::size_t>& vars) {
  std::vector<Subset> out;
  std::map<std::vector<std::string>, std::size_t> where;
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::vector<std::string> key;
    for (auto v : vars) {
      if (v >= table.arity()) throw InputError("variable index out of range");
      key.push_back(table.cell(i).parts()[v]);
    }
    auto [it, inserted] = where.emplace(key, out.size());
    if (inserted) {
      std::string name = "[";
      for (std::size_t k = 0; k < vars.size(); ++k)
        name += (k ? "," : "") + ("Y" + std::to_string(vars[k] + 1) + "=" + key[k]);
      out.push_back({name + "]", {}});
    }
    out[it->second].members.push_back(i);
  }
  return out;
}

}  // namespace relmod
