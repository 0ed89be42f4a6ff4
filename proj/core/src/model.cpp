#include "relmod/model.hpp"

#include <cmath>
#include <sstream>

#include "relmod/error.hpp"

namespace relmod {

namespace {

std::string monomial(const RelationalModel& model, const std::vector<std::int64_t>& exps) {
  const std::string sym = model.variant() == Variant::Probabilities ? "p" : "lambda";
  std::string out;
  std::size_t factors = 0;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] == 0) continue;
    if (factors++) out += " ";
    const Cell& c = model.table().cell(i);
    out += sym + (c.is_tuple() ? c.to_string() : "(" + c.to_string() + ")");
    if (exps[i] != 1) out += "^" + std::to_string(exps[i]);
  }
  if (factors == 0) return "1";
  if (factors > 1) return "(" + out + ")";
  return out;
}

}  // namespace

RelationalModel build_model(Table table, ModelMatrix a, Variant variant,
                            std::vector<double> offset, std::optional<IntegerMatrix> kernel) {
  if (a.cols() != table.size())
    throw InputError("model matrix has " + std::to_string(a.cols()) + " columns but the table has " +
                     std::to_string(table.size()) + " cells");
  const bool has_offset = !offset.empty();
  if (!has_offset) offset.assign(table.size(), 0.0);
  if (offset.size() != table.size())
    throw InputError("offset has " + std::to_string(offset.size()) + " entries, expected " +
                     std::to_string(table.size()));
  for (double o : offset)
    if (!std::isfinite(o)) throw InputError("offset entries must be finite");

  if (variant == Variant::Probabilities) {
    const auto zero = find_zero_columns(a);
    if (!zero.empty())
      throw InputError("trivial probability constraint: cell " +
                       table.cell(zero.front()).to_string() + " belongs to no subset");
  }

  ModelMatrix reduced = reduce_to_full_row_rank(a);
  const std::size_t n = table.size();
  const std::size_t rank = reduced.rows();

  KernelBasis d{IntegerMatrix(0, n)};
  if (kernel) {
    if (kernel->cols() != n)
      throw InputError("kernel basis has " + std::to_string(kernel->cols()) + " columns, expected " +
                       std::to_string(n));
    if (kernel->rows() != n - rank || rational_rank(*kernel) != n - rank)
      throw InputError("kernel basis must have " + std::to_string(n - rank) +
                       " linearly independent rows");
    if (!(reduced.entries() * kernel->transpose()).is_zero())
      throw InputError("kernel basis is not orthogonal to the model matrix (A D' != 0)");
    d.D = std::move(*kernel);
  } else if (rank < n) {
    d.D = canonical_integer_basis(integer_kernel_basis(reduced.entries()).D);
  }

  const std::vector<std::int64_t> ones(n, 1);
  const bool overall = row_space_contains(reduced.entries(), std::span<const std::int64_t>(ones));
  return RelationalModel(std::move(table), std::move(reduced), variant, std::move(offset),
                         has_offset, std::move(d), overall);
}

std::size_t degrees_of_freedom(const RelationalModel& model) {
  return model.num_cells() - model.num_params();
}

ModelClass classify(const RelationalModel& model) {
  const std::size_t j = model.num_params();
  if (model.variant() == Variant::Intensities)
    return {FamilyKind::RegularOrderJ, model.overall_effect(), j};
  return {model.overall_effect() ? FamilyKind::RegularOrderJminus1 : FamilyKind::CurvedOrderJminus1,
          model.overall_effect(), j - 1};
}

std::vector<GeneralizedOddsRatio> generalized_odds_ratios(const RelationalModel& model) {
  const auto& d = model.kernel_basis().D;
  std::vector<GeneralizedOddsRatio> out;
  out.reserve(d.rows());
  for (std::size_t l = 0; l < d.rows(); ++l) {
    GeneralizedOddsRatio r{std::vector<std::int64_t>(d.cols(), 0),
                           std::vector<std::int64_t>(d.cols(), 0), 1.0};
    double log_target = 0.0;
    for (std::size_t i = 0; i < d.cols(); ++i) {
      const std::int64_t e = d.as_int64(l, i);
      if (e > 0) r.u[i] = e;
      if (e < 0) r.v[i] = -e;
      log_target += static_cast<double>(e) * model.offset()[i];
    }
    r.target = std::exp(log_target);
    out.push_back(std::move(r));
  }
  return out;
}

bool is_homogeneous(const GeneralizedOddsRatio& ratio) {
  std::int64_t su = 0;
  std::int64_t sv = 0;
  for (auto x : ratio.u) su += x;
  for (auto x : ratio.v) sv += x;
  return su == sv;
}

std::vector<double> dual_residuals(const RelationalModel& model, std::span<const double> delta) {
  const std::size_t n = model.num_cells();
  if (delta.size() != n)
    throw InputError("expected " + std::to_string(n) + " cell values, got " +
                     std::to_string(delta.size()));
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(delta[i] > 0.0) || !std::isfinite(delta[i]))
      throw InputError("cell value " + std::to_string(i) + " must be strictly positive");
    centered[i] = std::log(delta[i]) - model.offset()[i];
  }
  const auto& d = model.kernel_basis().D;
  std::vector<double> out(d.rows(), 0.0);
  for (std::size_t l = 0; l < d.rows(); ++l)
    for (std::size_t i = 0; i < n; ++i) out[l] += d(l, i).convert_to<double>() * centered[i];
  return out;
}

std::string format_odds_ratio(const RelationalModel& model, const GeneralizedOddsRatio& ratio,
                              int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << monomial(model, ratio.u) << " / " << monomial(model, ratio.v) << " = " << ratio.target;
  return os.str();
}

std::string to_string(Variant v) {
  return v == Variant::Probabilities ? "probabilities" : "intensities";
}

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::RegularOrderJ: return "regular";
    case FamilyKind::RegularOrderJminus1: return "regular";
    case FamilyKind::CurvedOrderJminus1: return "curved";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(const std::string& s) {
  if (s == "probabilities") return Variant::Probabilities;
  if (s == "intensities") return Variant::Intensities;
  return std::nullopt;
}

}  // namespace relmod
