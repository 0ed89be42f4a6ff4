#pragma once

// Model-spec documents (YAML) and counts files.
//
// A spec looks like
//
//   name: crab-charybdis
//   variant: intensities          # or probabilities
//   variables:                    # optional; fixes the level order
//     - {name: sugarcane, levels: [0, 1]}
//     - {name: fish, levels: [0, 1]}
//   cells: [[0,0], [0,1], [1,0]]  # tuples, or plain labels
//   subsets:                      # exactly one of subsets / matrix
//     - {name: S1, members: [[0,0], [0,1]]}
//     - {name: S2, members: [[0,0], [1,0]]}
//   offset: [0, 0, 0]             # optional log-scale offset, table order
//   kernel: [[1, -1, -1]]         # optional kernel basis, table order
//   data: crab_charybdis.csv      # counts file (relative to the spec), or a list
//
// Counts files hold one `cell,count` record per line; tuple components are
// comma-separated, the last field is the count, `#` starts a comment.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relmod/error.hpp"
#include "relmod/mle.hpp"
#include "relmod/model.hpp"
#include "relmod/table.hpp"

namespace relmod {

/// InputError carrying the 1-based line of the offending node (0 if unknown).
class SpecError : public InputError {
 public:
  SpecError(int line, const std::string& what)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct VariableSpec {
  std::string name;
  std::vector<std::string> levels;
  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

struct SubsetSpec {
  std::string name;
  std::vector<std::vector<std::string>> members;  // cells as parts
  friend bool operator==(const SubsetSpec&, const SubsetSpec&) = default;
};

struct ModelSpec {
  std::string name;
  Variant variant = Variant::Probabilities;
  std::vector<VariableSpec> variables;
  bool tuple_cells = true;
  std::vector<std::vector<std::string>> cells;
  std::vector<SubsetSpec> subsets;
  std::vector<std::vector<std::int64_t>> matrix;
  std::vector<std::string> row_names;
  std::vector<double> offset;
  std::vector<std::vector<std::int64_t>> kernel;
  std::optional<std::vector<double>> data_inline;
  std::optional<std::string> data_file;
  /// Directory that relative data paths resolve against; not serialised.
  std::filesystem::path base_dir;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.name == b.name && a.variant == b.variant && a.variables == b.variables &&
           a.tuple_cells == b.tuple_cells && a.cells == b.cells && a.subsets == b.subsets &&
           a.matrix == b.matrix && a.row_names == b.row_names && a.offset == b.offset &&
           a.kernel == b.kernel && a.data_inline == b.data_inline && a.data_file == b.data_file;
  }
};

/// Throws SpecError on unknown fields, dangling cell references, negative
/// matrix entries, both or neither of subsets/matrix, and malformed values.
ModelSpec parse_model_spec(std::string_view text);
ModelSpec load_model_spec(const std::filesystem::path& path);
std::string render_model_spec(const ModelSpec& spec);

Table spec_table(const ModelSpec& spec);
RelationalModel build_model(const ModelSpec& spec);

/// Counts aligned to table order. Throws InputError on missing, extra or
/// duplicate cells and non-numeric counts.
Observations parse_counts(std::string_view text, const Table& table);
Observations load_counts(const std::filesystem::path& path, const Table& table);

/// The spec's inline data or its data file. Throws InputError when neither.
Observations spec_observations(const ModelSpec& spec, const Table& table);

/// Positive cell values in counts-file format (zeros rejected).
std::vector<double> load_positive_vector(const std::filesystem::path& path, const Table& table);

}  // namespace relmod
