#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relmod/int_linalg.hpp"
#include "relmod/table.hpp"

namespace relmod {

enum class Variant { Probabilities, Intensities };

enum class FamilyKind {
  RegularOrderJ,        // intensities
  RegularOrderJminus1,  // probabilities, overall effect present
  CurvedOrderJminus1,   // probabilities, no overall effect
};

struct ModelClass {
  FamilyKind kind;
  bool overall_effect;  // 1 is in the row space of A
  std::size_t order;    // J for intensities, J - 1 for probabilities
};

/// delta^u / delta^v = target, with u and v of disjoint support.
struct GeneralizedOddsRatio {
  std::vector<std::int64_t> u;
  std::vector<std::int64_t> v;
  double target = 1.0;
};

/// log delta = A' beta + offset, with A of full row rank.
///
/// The kernel basis is computed when the model is built, so a model can be
/// shared across threads without synchronisation.
class RelationalModel {
 public:
  const Table& table() const noexcept { return table_; }
  const ModelMatrix& matrix() const noexcept { return a_; }
  Variant variant() const noexcept { return variant_; }
  const std::vector<double>& offset() const noexcept { return offset_; }
  bool has_offset() const noexcept { return has_offset_; }

  /// Rows span Ker(A); empty (0 x |I|) for a saturated model.
  const KernelBasis& kernel_basis() const noexcept { return d_; }
  bool is_saturated() const noexcept { return d_.size() == 0; }
  bool overall_effect() const noexcept { return overall_effect_; }

  std::size_t num_cells() const noexcept { return table_.size(); }
  std::size_t num_params() const noexcept { return a_.rows(); }

 private:
  friend RelationalModel build_model(Table, ModelMatrix, Variant, std::vector<double>,
                                     std::optional<IntegerMatrix>);
  RelationalModel(Table t, ModelMatrix a, Variant v, std::vector<double> off, bool has_off,
                  KernelBasis d, bool overall)
      : table_(std::move(t)),
        a_(std::move(a)),
        variant_(v),
        offset_(std::move(off)),
        has_offset_(has_off),
        d_(std::move(d)),
        overall_effect_(overall) {}

  Table table_;
  ModelMatrix a_;
  Variant variant_;
  std::vector<double> offset_;
  bool has_offset_;
  KernelBasis d_;
  bool overall_effect_;
};

/// Validates and assembles a model. A is reduced to full row rank when
/// needed. Without a user kernel, the kernel basis is the canonical integer
/// basis of Ker(A); a user kernel must satisfy A D' = 0 and have
/// |I| - rank(A) independent rows.
///
/// Throws InputError on a column mismatch, an offset of the wrong length,
/// an invalid user kernel, or (for probabilities) a zero column in A.
RelationalModel build_model(Table table, ModelMatrix a, Variant variant,
                            std::vector<double> offset = {},
                            std::optional<IntegerMatrix> kernel = std::nullopt);

/// |I| - rank(A).
std::size_t degrees_of_freedom(const RelationalModel& model);

ModelClass classify(const RelationalModel& model);

/// One ratio per kernel-basis row; target = exp(d . offset).
std::vector<GeneralizedOddsRatio> generalized_odds_ratios(const RelationalModel& model);

bool is_homogeneous(const GeneralizedOddsRatio& ratio);

/// D (log delta - offset). Throws InputError on a non-positive entry.
std::vector<double> dual_residuals(const RelationalModel& model, std::span<const double> delta);

/// e.g. "p(0,0,0) p(1,1,0) / (p(0,1,0) p(1,0,0)) = 1".
std::string format_odds_ratio(const RelationalModel& model, const GeneralizedOddsRatio& ratio,
                              int precision = 4);

std::string to_string(Variant v);
std::string to_string(FamilyKind k);
/// Parses "probabilities" / "intensities".
std::optional<Variant> parse_variant(const std::string& s);

}  // namespace relmod
