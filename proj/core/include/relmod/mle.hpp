#pragma once

// Maximum-likelihood fitting under Poisson and multinomial sampling.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relmod/model.hpp"

namespace relmod {

/// Non-negative cell observations; real values are allowed.
class Observations {
 public:
  explicit Observations(std::vector<double> y);

  const std::vector<double>& y() const noexcept { return y_; }
  double total() const noexcept { return total_; }
  std::size_t size() const noexcept { return y_.size(); }

 private:
  std::vector<double> y_;
  double total_ = 0.0;
};

struct FitOptions {
  double tol_abs = 1e-10;
  double tol_rel = 1e-10;
  int max_iter = 200;
  int max_halvings = 30;
  /// Poisson fits only: a cell observed as zero whose fitted value falls
  /// below boundary_floor * max(1, N) is treated as diverging to the
  /// boundary of the parameter space.
  double boundary_floor = 1e-8;
};

enum class FitMethod {
  PoissonNewton,          // intensities
  PoissonNewtonRescaled,  // probabilities with an overall effect
  CurvedLagrangeNewton,   // probabilities without an overall effect
};

struct FitResult {
  /// Fitted expected counts: lambda-hat, or N * p-hat for probabilities.
  std::vector<double> delta_hat;
  /// Fitted cell parameters: lambda-hat, or p-hat for probabilities.
  std::vector<double> params_hat;
  /// log(params_hat) = A' beta_hat + offset.
  std::vector<double> beta_hat;
  /// Lagrange multiplier of the normalisation; probabilities only.
  std::optional<double> alpha;
  std::vector<double> observed_sums;
  std::vector<double> fitted_sums;
  /// fitted_sums[j] / observed_sums[j].
  std::vector<double> sum_ratios;
  /// Common ratio of fitted to observed subset sums (N / alpha); 1 for
  /// regular fits.
  double proportionality = 1.0;
  bool converged = false;
  int iterations = 0;
  double max_residual = 0.0;
  FitMethod method = FitMethod::PoissonNewton;
};

/// T = A y.
std::vector<double> subset_sums(const RelationalModel& model, const Observations& obs);

/// T(y) > 0 componentwise. Exact for curved probability models; a necessary
/// screen for regular ones (non-interior data surface as BoundaryDivergence).
bool mle_exists(const RelationalModel& model, const Observations& obs);

/// Dispatches on the model class. Throws MleNonexistence when a subset sum
/// is zero, NoConvergence or BoundaryDivergence from the solvers.
FitResult fit(const RelationalModel& model, const Observations& obs, const FitOptions& options = {});

/// Newton iteration on A exp(A' beta + offset) = A y.
FitResult fit_poisson_newton(const ModelMatrix& a, std::span<const double> y,
                             std::span<const double> offset, const FitOptions& options = {});

/// Damped Newton on the Lagrangian system
///   A y - alpha A p(beta) = 0,  1' p(beta) - 1 = 0,
/// with p(beta) = exp(A' beta + offset).
FitResult fit_curved_multinomial(const ModelMatrix& a, std::span<const double> y,
                                 std::span<const double> offset, const FitOptions& options = {});

std::string to_string(FitMethod m);

}  // namespace relmod
