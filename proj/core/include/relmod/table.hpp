#pragma once

// Tables of cells, classes of cell subsets, and model matrices built from
// them. Column order of every matrix is the cell order of its Table.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relmod/int_linalg.hpp"

namespace relmod {

/// A cell is either a tuple of category identifiers (one per variable) or an
/// opaque label for unstructured tables.
class Cell {
 public:
  static Cell tuple(std::vector<std::string> levels);
  static Cell label(std::string name);

  bool is_tuple() const noexcept { return is_tuple_; }
  const std::vector<std::string>& parts() const noexcept { return parts_; }
  std::size_t arity() const noexcept { return is_tuple_ ? parts_.size() : 0; }

  /// "(0,1)" for tuples, the label itself otherwise.
  std::string to_string() const;
  /// Comma-joined parts; the identifier used in counts files.
  std::string key() const;

  friend bool operator==(const Cell&, const Cell&) = default;

 private:
  Cell(std::vector<std::string> parts, bool is_tuple)
      : parts_(std::move(parts)), is_tuple_(is_tuple) {}

  std::vector<std::string> parts_;
  bool is_tuple_ = false;
};

/// Ordered set of non-empty cells (at least two).
class Table {
 public:
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  std::size_t size() const noexcept { return cells_.size(); }
  bool is_tuple_structured() const noexcept { return tuple_; }
  /// Number of variables for tuple tables, 0 for labelled ones.
  std::size_t arity() const noexcept { return tuple_ ? cells_.front().arity() : 0; }
  /// Declared level order per variable (empty when levels compare naturally).
  const std::vector<std::vector<std::string>>& level_orders() const noexcept { return levels_; }

  std::optional<std::size_t> index_of(const Cell& c) const;
  std::optional<std::size_t> index_of_key(const std::string& key) const;

 private:
  friend Table build_table(std::vector<Cell>, std::vector<std::vector<std::string>>);
  std::vector<Cell> cells_;
  std::vector<std::vector<std::string>> levels_;
  bool tuple_ = false;
};

/// Tuple cells are sorted lexicographically, comparing each component by its
/// position in `level_orders[var]` when given, numerically when both levels
/// are integers, and as strings otherwise. Labelled cells keep input order.
/// Throws InputError on an empty or single-cell list, duplicates, mixed
/// tuple/label cells, ragged tuples, or levels missing from a declared order.
Table build_table(std::vector<Cell> cells,
                  std::vector<std::vector<std::string>> level_orders = {});

struct Subset {
  std::string name;
  std::vector<std::size_t> members;  // cell indices, sorted, unique
};

/// Non-empty subsets of a Table's cells.
class SubsetClass {
 public:
  SubsetClass(const Table& table, std::vector<Subset> subsets);

  const std::vector<Subset>& subsets() const noexcept { return subsets_; }
  std::size_t size() const noexcept { return subsets_.size(); }
  std::size_t table_size() const noexcept { return table_size_; }

 private:
  std::vector<Subset> subsets_;
  std::size_t table_size_;
};

/// J x |I| matrix of non-negative integers with one name per row.
class ModelMatrix {
 public:
  ModelMatrix(IntegerMatrix entries, std::vector<std::string> row_names = {});

  const IntegerMatrix& entries() const noexcept { return entries_; }
  const std::vector<std::string>& row_names() const noexcept { return row_names_; }
  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  /// Row-major doubles, for the floating-point solvers.
  std::vector<double> to_double() const { return entries_.to_double(); }

  friend bool operator==(const ModelMatrix&, const ModelMatrix&) = default;

 private:
  IntegerMatrix entries_;
  std::vector<std::string> row_names_;
};

/// Indicator matrix: a(j, i) = 1 iff cell i is in subset j.
ModelMatrix build_model_matrix(const Table& table, const SubsetClass& subsets);

/// Keeps rows greedily, top-down, whenever they raise the rank. Throws
/// InputError on a zero matrix.
ModelMatrix reduce_to_full_row_rank(const ModelMatrix& a);

std::vector<std::size_t> find_zero_columns(const ModelMatrix& a);

/// Cells whose component `var` equals `level` for every (var, level) pair;
/// an empty condition list selects the whole table.
Subset cylinder_subset(const Table& table, std::string name,
                       const std::vector<std::pair<std::size_t, std::string>>& fixed);

/// One cylinder set per observed level combination of `vars`, in table order
/// of first appearance. An empty `vars` gives the single all-cells subset.
std::vector<Subset> marginal_subsets(const Table& table, const std::vector<std::size_t>& vars);

}  // namespace relmod
