#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relmod/int_linalg.hpp"
#include "relmod/mle.hpp"
#include "relmod/model.hpp"

namespace relmod {

struct GofReport {
  double x2 = 0.0;  // Pearson
  double g2 = 0.0;  // likelihood ratio (Poisson deviance)
  std::size_t df = 0;
  double p_value_x2 = 1.0;
  double p_value_g2 = 1.0;
};

double pearson_x2(std::span<const double> y, std::span<const double> fitted);

/// 2 sum[y log(y / fitted) - (y - fitted)], with 0 log 0 = 0.
double deviance_g2(std::span<const double> y, std::span<const double> fitted);

/// P(chi^2_df > x) via the regularised upper incomplete gamma function.
double chi_square_sf(double x, std::size_t df);

/// X^2, G^2 and their chi-square tail probabilities. With df == 0 both
/// p-values are 1.
GofReport goodness_of_fit(std::span<const double> y, std::span<const double> fitted, std::size_t df);

struct MixedParams {
  std::vector<double> zeta1;        // A delta (mean-value part)
  std::vector<double> theta;        // (D D')^{-1} D log delta
  std::vector<double> zeta2_tilde;  // D log delta
};

/// Throws InputError on non-positive delta, dimension mismatch, or A D' != 0.
MixedParams mixed_parameters(std::span<const double> delta, const IntegerMatrix& a,
                             const IntegerMatrix& d);

/// Exact pieces of gamma = (M')^{-1} log delta: gamma_i = (b_i . log delta) / det
/// where b_i is row i of adj(M').
struct GammaExponents {
  BigInt det;
  IntegerMatrix adjugate;  // adj(M'), rows are log odds ratio exponents
};

GammaExponents gamma_exponents(const IntegerMatrix& m);

/// gamma = (M')^{-1} log delta for invertible square M (typically [A; D]).
/// Throws InputError on a singular M or non-positive delta.
std::vector<double> canonical_gamma(const IntegerMatrix& m, std::span<const double> delta);

struct Reconstruction {
  std::vector<double> delta;
  /// A delta = alpha A delta1.
  double alpha = 1.0;
  FitResult fit;
};

/// Finds delta with A delta = alpha A delta1 and D log delta = D log delta2.
///
/// For probabilities, delta1 and delta2 are taken as distributions (delta1 is
/// normalised first) and the result is a distribution; alpha is then 1 iff
/// 1 is in the row space of A. For intensities the fit preserves the subset
/// sums and alpha is 1.
Reconstruction reconstruct_from_mixed(const IntegerMatrix& a, std::span<const double> delta1,
                                      const IntegerMatrix& d, std::span<const double> delta2,
                                      Variant variant, const FitOptions& options = {});

}  // namespace relmod
