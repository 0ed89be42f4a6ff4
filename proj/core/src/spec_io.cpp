#include "relmod/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace relmod {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw SpecError(line_of(n), what); }

std::string scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  return n.Scalar();
}

std::int64_t integer(const YAML::Node& n, const std::string& what) {
  const std::string s = scalar(n, what);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(n, what + " '" + s + "' is not an integer");
  return v;
}

double real(const YAML::Node& n, const std::string& what) {
  const std::string s = scalar(n, what);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(n, what + " '" + s + "' is not a number");
  }
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(kv.first, "unknown field '" + key + "' in " + where);
  }
}

// A cell written as a sequence (tuple) or a scalar (label).
std::vector<std::string> cell_parts(const YAML::Node& n, bool& is_tuple) {
  if (n.IsSequence()) {
    is_tuple = true;
    std::vector<std::string> parts;
    for (const auto& p : n) parts.push_back(scalar(p, "cell component"));
    if (parts.empty()) fail(n, "empty cell tuple");
    return parts;
  }
  is_tuple = false;
  return {scalar(n, "cell label")};
}

std::string describe_cell(const std::vector<std::string>& parts, bool tuple) {
  return tuple ? Cell::tuple(parts).to_string() : parts.front();
}

std::vector<std::vector<std::int64_t>> int_rows(const YAML::Node& n, const std::string& what,
                                                bool non_negative) {
  if (!n.IsSequence()) fail(n, what + " must be a list of rows");
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& row : n) {
    if (!row.IsSequence()) fail(row, what + " row must be a list");
    std::vector<std::int64_t> r;
    for (const auto& e : row) {
      const auto v = integer(e, what + " entry");
      if (non_negative && v < 0) fail(e, "negative " + what + " entry " + std::to_string(v));
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> real_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(real(e, what + " entry"));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::pair<std::string, double>> parse_records(std::string_view text) {
  std::vector<std::pair<std::string, double>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() < 2)
      throw InputError("counts line " + std::to_string(lineno) + ": expected 'cell,count'");
    const std::string& count = fields.back();
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(count, &used);
      if (used != count.size() || !std::isfinite(v)) throw std::invalid_argument(count);
    } catch (const std::exception&) {
      throw InputError("counts line " + std::to_string(lineno) + ": count '" + count +
                       "' is not a number");
    }
    std::string key;
    for (std::size_t k = 0; k + 1 < fields.size(); ++k) key += (k ? "," : "") + fields[k];
    out.emplace_back(std::move(key), v);
  }
  return out;
}

std::vector<double> align_records(const std::vector<std::pair<std::string, double>>& records,
                                  const Table& table) {
  std::vector<double> y(table.size(), 0.0);
  std::vector<bool> seen(table.size(), false);
  for (const auto& [key, v] : records) {
    const auto idx = table.index_of_key(key);
    if (!idx) throw InputError("counts refer to unknown cell '" + key + "'");
    if (seen[*idx]) throw InputError("duplicate counts for cell '" + key + "'");
    seen[*idx] = true;
    y[*idx] = v;
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (!seen[i]) throw InputError("no count given for cell " + table.cell(i).to_string());
  return y;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit_cell(YAML::Emitter& out, const std::vector<std::string>& parts, bool tuple) {
  if (!tuple) {
    out << parts.front();
    return;
  }
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& p : parts) out << p;
  out << YAML::EndSeq;
}

void emit_int_rows(YAML::Emitter& out, const std::vector<std::vector<std::int64_t>>& rows) {
  out << YAML::BeginSeq;
  for (const auto& r : rows) {
    out << YAML::Flow << YAML::BeginSeq;
    for (auto v : r) out << v;
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_reals(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

ModelSpec parse_model_spec(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw SpecError(e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  if (!root.IsMap()) throw SpecError(0, "model spec must be a mapping");
  check_keys(root,
             {"name", "variant", "variables", "cells", "subsets", "matrix", "row_names", "offset",
              "kernel", "data"},
             "model spec");

  ModelSpec spec;
  if (root["name"]) spec.name = scalar(root["name"], "name");

  if (!root["variant"]) throw SpecError(0, "missing field 'variant'");
  {
    const auto v = parse_variant(scalar(root["variant"], "variant"));
    if (!v) fail(root["variant"], "variant must be 'probabilities' or 'intensities'");
    spec.variant = *v;
  }

  if (root["variables"]) {
    const auto vars = root["variables"];
    if (!vars.IsSequence()) fail(vars, "variables must be a list");
    for (const auto& v : vars) {
      check_keys(v, {"name", "levels"}, "variable");
      VariableSpec vs;
      if (v["name"]) vs.name = scalar(v["name"], "variable name");
      if (!v["levels"] || !v["levels"].IsSequence()) fail(v, "variable needs a 'levels' list");
      for (const auto& l : v["levels"]) vs.levels.push_back(scalar(l, "level"));
      spec.variables.push_back(std::move(vs));
    }
  }

  if (!root["cells"] || !root["cells"].IsSequence()) throw SpecError(0, "missing 'cells' list");
  std::set<std::vector<std::string>> known;
  {
    bool first = true;
    for (const auto& c : root["cells"]) {
      bool tuple = false;
      auto parts = cell_parts(c, tuple);
      if (first) spec.tuple_cells = tuple;
      else if (tuple != spec.tuple_cells) fail(c, "cells mix tuples and labels");
      first = false;
      if (!known.insert(parts).second) fail(c, "duplicate cell " + describe_cell(parts, tuple));
      spec.cells.push_back(std::move(parts));
    }
    if (spec.cells.empty()) fail(root["cells"], "'cells' is empty");
  }

  const bool has_subsets = static_cast<bool>(root["subsets"]);
  const bool has_matrix = static_cast<bool>(root["matrix"]);
  if (has_subsets && has_matrix) fail(root["matrix"], "give either 'subsets' or 'matrix', not both");
  if (!has_subsets && !has_matrix) throw SpecError(0, "missing 'subsets' or 'matrix'");

  if (has_subsets) {
    const auto subs = root["subsets"];
    if (!subs.IsSequence()) fail(subs, "subsets must be a list");
    for (const auto& s : subs) {
      check_keys(s, {"name", "members"}, "subset");
      SubsetSpec ss;
      ss.name = s["name"] ? scalar(s["name"], "subset name") : "S" + std::to_string(spec.subsets.size() + 1);
      if (!s["members"] || !s["members"].IsSequence()) fail(s, "subset '" + ss.name + "' needs a 'members' list");
      for (const auto& m : s["members"]) {
        bool tuple = false;
        auto parts = cell_parts(m, tuple);
        if (tuple != spec.tuple_cells || !known.contains(parts))
          fail(m, "subset '" + ss.name + "' names unknown cell " + describe_cell(parts, tuple));
        ss.members.push_back(std::move(parts));
      }
      if (ss.members.empty()) fail(s, "subset '" + ss.name + "' is empty");
      spec.subsets.push_back(std::move(ss));
    }
  } else {
    spec.matrix = int_rows(root["matrix"], "matrix", true);
    for (const auto& r : spec.matrix)
      if (r.size() != spec.cells.size())
        fail(root["matrix"], "matrix rows must have one entry per cell (" +
                                 std::to_string(spec.cells.size()) + ")");
    if (root["row_names"]) {
      if (!root["row_names"].IsSequence()) fail(root["row_names"], "row_names must be a list");
      for (const auto& n : root["row_names"]) spec.row_names.push_back(scalar(n, "row name"));
      if (spec.row_names.size() != spec.matrix.size())
        fail(root["row_names"], "row_names must have one entry per matrix row");
    }
  }
  if (root["row_names"] && has_subsets) fail(root["row_names"], "row_names only applies to 'matrix'");

  if (root["offset"]) {
    spec.offset = real_list(root["offset"], "offset");
    if (spec.offset.size() != spec.cells.size())
      fail(root["offset"], "offset must have one entry per cell");
  }
  if (root["kernel"]) {
    spec.kernel = int_rows(root["kernel"], "kernel", false);
    for (const auto& r : spec.kernel)
      if (r.size() != spec.cells.size()) fail(root["kernel"], "kernel rows must have one entry per cell");
  }
  if (root["data"]) {
    const auto d = root["data"];
    if (d.IsSequence()) {
      spec.data_inline = real_list(d, "data");
      if (spec.data_inline->size() != spec.cells.size()) fail(d, "inline data must have one entry per cell");
    } else {
      spec.data_file = scalar(d, "data");
    }
  }
  return spec;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  ModelSpec spec = parse_model_spec(read_file(path));
  spec.base_dir = path.parent_path();
  return spec;
}

std::string render_model_spec(const ModelSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (!spec.name.empty()) out << YAML::Key << "name" << YAML::Value << spec.name;
  out << YAML::Key << "variant" << YAML::Value << to_string(spec.variant);
  if (!spec.variables.empty()) {
    out << YAML::Key << "variables" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : spec.variables) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << v.name
          << YAML::Key << "levels" << YAML::Value << YAML::Flow << v.levels << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "cells" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : spec.cells) emit_cell(out, c, spec.tuple_cells);
  out << YAML::EndSeq;
  if (!spec.subsets.empty()) {
    out << YAML::Key << "subsets" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : spec.subsets) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name << YAML::Key << "members"
          << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& m : s.members) emit_cell(out, m, spec.tuple_cells);
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!spec.matrix.empty()) {
    out << YAML::Key << "matrix" << YAML::Value;
    emit_int_rows(out, spec.matrix);
    if (!spec.row_names.empty())
      out << YAML::Key << "row_names" << YAML::Value << YAML::Flow << spec.row_names;
  }
  if (!spec.offset.empty()) {
    out << YAML::Key << "offset" << YAML::Value;
    emit_reals(out, spec.offset);
  }
  if (!spec.kernel.empty()) {
    out << YAML::Key << "kernel" << YAML::Value;
    emit_int_rows(out, spec.kernel);
  }
  if (spec.data_inline) {
    out << YAML::Key << "data" << YAML::Value;
    emit_reals(out, *spec.data_inline);
  } else if (spec.data_file) {
    out << YAML::Key << "data" << YAML::Value << *spec.data_file;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Table spec_table(const ModelSpec& spec) {
  std::vector<Cell> cells;
  cells.reserve(spec.cells.size());
  for (const auto& c : spec.cells)
    cells.push_back(spec.tuple_cells ? Cell::tuple(c) : Cell::label(c.front()));
  std::vector<std::vector<std::string>> levels;
  for (const auto& v : spec.variables) levels.push_back(v.levels);
  return build_table(std::move(cells), std::move(levels));
}

namespace {

// Spec columns are in written order; tables may reorder tuple cells.
std::vector<std::size_t> written_to_table(const ModelSpec& spec, const Table& table) {
  std::vector<std::size_t> map(spec.cells.size());
  for (std::size_t k = 0; k < spec.cells.size(); ++k) {
    const Cell c = spec.tuple_cells ? Cell::tuple(spec.cells[k]) : Cell::label(spec.cells[k].front());
    map[k] = *table.index_of(c);
  }
  return map;
}

}  // namespace

RelationalModel build_model(const ModelSpec& spec) {
  Table table = spec_table(spec);
  const auto col = written_to_table(spec, table);
  const std::size_t n = table.size();

  ModelMatrix a = [&] {
    if (!spec.subsets.empty()) {
      std::vector<Subset> subsets;
      for (const auto& s : spec.subsets) {
        Subset sub{s.name, {}};
        for (const auto& m : s.members) {
          const Cell c = spec.tuple_cells ? Cell::tuple(m) : Cell::label(m.front());
          sub.members.push_back(*table.index_of(c));
        }
        subsets.push_back(std::move(sub));
      }
      return build_model_matrix(table, SubsetClass(table, std::move(subsets)));
    }
    IntegerMatrix m(spec.matrix.size(), n);
    for (std::size_t r = 0; r < spec.matrix.size(); ++r)
      for (std::size_t k = 0; k < n; ++k) m(r, col[k]) = spec.matrix[r][k];
    return ModelMatrix(std::move(m), spec.row_names);
  }();

  std::vector<double> offset;
  if (!spec.offset.empty()) {
    offset.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) offset[col[k]] = spec.offset[k];
  }
  std::optional<IntegerMatrix> kernel;
  if (!spec.kernel.empty()) {
    IntegerMatrix d(spec.kernel.size(), n);
    for (std::size_t r = 0; r < spec.kernel.size(); ++r)
      for (std::size_t k = 0; k < n; ++k) d(r, col[k]) = spec.kernel[r][k];
    kernel = std::move(d);
  }
  return build_model(std::move(table), std::move(a), spec.variant, std::move(offset), std::move(kernel));
}

Observations parse_counts(std::string_view text, const Table& table) {
  return Observations(align_records(parse_records(text), table));
}

Observations load_counts(const std::filesystem::path& path, const Table& table) {
  return parse_counts(read_file(path), table);
}

Observations spec_observations(const ModelSpec& spec, const Table& table) {
  if (spec.data_inline) {
    const auto col = written_to_table(spec, table);
    std::vector<double> y(table.size());
    for (std::size_t k = 0; k < col.size(); ++k) y[col[k]] = (*spec.data_inline)[k];
    return Observations(std::move(y));
  }
  if (spec.data_file) {
    std::filesystem::path p(*spec.data_file);
    if (p.is_relative()) p = spec.base_dir / p;
    return load_counts(p, table);
  }
  throw InputError("no data: give --data FILE or a 'data' field in the spec");
}

std::vector<double> load_positive_vector(const std::filesystem::path& path, const Table& table) {
  auto v = align_records(parse_records(read_file(path)), table);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0))
      throw InputError("value for cell " + table.cell(i).to_string() + " must be strictly positive");
  return v;
}

}  // namespace relmod
