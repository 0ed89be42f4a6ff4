#include "relmod/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "relmod/error.hpp"

namespace relmod {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const ModelMatrix& a) {
  const auto flat = a.to_double();
  MatrixXd m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = flat[r * a.cols() + c];
  return m;
}

VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct Problem {
  MatrixXd a;
  VectorXd y;
  VectorXd offset;
  VectorXd t;
  double n = 0.0;
};

Problem make_problem(const ModelMatrix& a, std::span<const double> y, std::span<const double> offset) {
  if (y.size() != a.cols())
    throw InputError("expected " + std::to_string(a.cols()) + " observations, got " +
                     std::to_string(y.size()));
  Problem p;
  p.a = to_eigen(a);
  p.y = to_eigen(y);
  p.offset = offset.empty() ? VectorXd::Zero(p.a.cols()) : to_eigen(offset);
  if (p.offset.size() != p.a.cols()) throw InputError("offset length does not match the table");
  p.t = p.a * p.y;
  p.n = p.y.sum();
  for (Eigen::Index j = 0; j < p.t.size(); ++j)
    if (!(p.t(j) > 0.0))
      throw MleNonexistence("subset sum " + std::to_string(j) +
                            " is zero; the maximum-likelihood estimate does not exist");
  return p;
}

// max_j |g_j| scaled by the per-component tolerance; <= 1 means converged.
double scaled_residual(const VectorXd& g, const VectorXd& scale, const FitOptions& o) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j)
    worst = std::max(worst, std::abs(g(j)) / (o.tol_abs + o.tol_rel * (1.0 + std::abs(scale(j)))));
  return worst;
}

bool all_finite(const VectorXd& v) { return v.allFinite(); }

// With strictly positive data the likelihood always has an interior maximum,
// so only cells observed as zero can be driven to the boundary.
std::optional<Eigen::Index> boundary_cell(const VectorXd& mu, const Problem& p, const FitOptions& o) {
  const double floor = o.boundary_floor * std::max(1.0, p.n);
  std::optional<Eigen::Index> cell;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (p.y(i) == 0.0 && mu(i) < floor && (!cell || mu(i) < mu(*cell))) cell = i;
  return cell;
}

[[noreturn]] void fail(const VectorXd& mu, const Problem& p, int iterations, double max_residual,
                       const FitOptions& o) {
  if (const auto cell = boundary_cell(mu, p, o))
    throw BoundaryDivergence(static_cast<std::size_t>(*cell), iterations);
  throw NoConvergence(iterations, max_residual);
}

void fill_sums(FitResult& r, const Problem& p, const VectorXd& delta) {
  const VectorXd fitted = p.a * delta;
  r.observed_sums = to_std(p.t);
  r.fitted_sums = to_std(fitted);
  r.sum_ratios.resize(r.fitted_sums.size());
  for (std::size_t j = 0; j < r.fitted_sums.size(); ++j)
    r.sum_ratios[j] = r.fitted_sums[j] / r.observed_sums[j];
}

FitResult solve_poisson(const Problem& p, const FitOptions& o) {
  const Eigen::Index j = p.a.rows();
  VectorXd beta = VectorXd::Zero(j);
  VectorXd mu = (p.a.transpose() * beta + p.offset).array().exp();
  VectorXd g = p.a * mu - p.t;
  double res = scaled_residual(g, p.t, o);
  int it = 0;

  while (res > 1.0) {
    if (it >= o.max_iter) fail(mu, p, it, g.cwiseAbs().maxCoeff(), o);
    ++it;
    const MatrixXd hess = p.a * mu.asDiagonal() * p.a.transpose();
    const VectorXd step = hess.ldlt().solve(-g);
    double scale = 1.0;
    bool accepted = false;
    const double norm0 = g.norm();
    for (int h = 0; h <= o.max_halvings; ++h, scale *= 0.5) {
      const VectorXd cand = beta + scale * step;
      const VectorXd cand_mu = (p.a.transpose() * cand + p.offset).array().exp();
      if (!all_finite(cand_mu)) continue;
      const VectorXd cand_g = p.a * cand_mu - p.t;
      if (cand_g.norm() < norm0) {
        beta = cand;
        mu = cand_mu;
        g = cand_g;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (scaled_residual(g, p.t, o) <= 1.0) break;
      fail(mu, p, it, g.cwiseAbs().maxCoeff(), o);
    }
    res = scaled_residual(g, p.t, o);
  }
  if (boundary_cell(mu, p, o)) fail(mu, p, it, g.cwiseAbs().maxCoeff(), o);

  FitResult r;
  r.delta_hat = to_std(mu);
  r.params_hat = r.delta_hat;
  r.beta_hat = to_std(beta);
  r.converged = true;
  r.iterations = it;
  r.max_residual = g.cwiseAbs().maxCoeff();
  r.method = FitMethod::PoissonNewton;
  fill_sums(r, p, mu);
  return r;
}

FitResult solve_curved(const Problem& p, const FitOptions& o) {
  const Eigen::Index j = p.a.rows();
  VectorXd beta = VectorXd::Zero(j);
  double alpha = p.n;

  VectorXd scale(j + 1);
  scale << p.t, 1.0;

  auto residual = [&](const VectorXd& b, double al, VectorXd& prob) {
    prob = (p.a.transpose() * b + p.offset).array().exp();
    VectorXd f(j + 1);
    f.head(j) = p.t - al * (p.a * prob);
    f(j) = prob.sum() - 1.0;
    return f;
  };

  VectorXd prob;
  VectorXd f = residual(beta, alpha, prob);
  double res = scaled_residual(f, scale, o);
  int it = 0;

  while (res > 1.0) {
    if (it >= o.max_iter) throw NoConvergence(it, f.cwiseAbs().maxCoeff());
    ++it;
    const VectorXd ap = p.a * prob;
    MatrixXd jac = MatrixXd::Zero(j + 1, j + 1);
    jac.topLeftCorner(j, j) = -alpha * (p.a * prob.asDiagonal() * p.a.transpose());
    jac.topRightCorner(j, 1) = -ap;
    jac.bottomLeftCorner(1, j) = ap.transpose();
    const VectorXd step = jac.fullPivLu().solve(-f);

    double s = 1.0;
    bool accepted = false;
    const double norm0 = f.norm();
    for (int h = 0; h <= o.max_halvings; ++h, s *= 0.5) {
      const VectorXd cand_beta = beta + s * step.head(j);
      const double cand_alpha = alpha + s * step(j);
      VectorXd cand_prob;
      const VectorXd cand_f = residual(cand_beta, cand_alpha, cand_prob);
      if (!all_finite(cand_f)) continue;
      if (cand_f.norm() < norm0) {
        beta = cand_beta;
        alpha = cand_alpha;
        prob = cand_prob;
        f = cand_f;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (scaled_residual(f, scale, o) <= 1.0) break;
      throw NoConvergence(it, f.cwiseAbs().maxCoeff());
    }
    res = scaled_residual(f, scale, o);
  }
  const VectorXd delta = p.n * prob;

  FitResult r;
  r.delta_hat = to_std(delta);
  r.params_hat = to_std(prob);
  r.beta_hat = to_std(beta);
  r.alpha = alpha;
  r.proportionality = p.n / alpha;
  r.converged = true;
  r.iterations = it;
  r.max_residual = f.cwiseAbs().maxCoeff();
  r.method = FitMethod::CurvedLagrangeNewton;
  fill_sums(r, p, delta);
  return r;
}

}  // namespace

Observations::Observations(std::vector<double> y) : y_(std::move(y)) {
  if (y_.empty()) throw InputError("no observations");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i]) || y_[i] < 0.0)
      throw InputError("observation " + std::to_string(i) + " must be a non-negative number");
    total_ += y_[i];
  }
  if (!(total_ > 0.0)) throw InputError("observations sum to zero");
}

std::vector<double> subset_sums(const RelationalModel& model, const Observations& obs) {
  if (obs.size() != model.num_cells())
    throw InputError("expected " + std::to_string(model.num_cells()) + " observations, got " +
                     std::to_string(obs.size()));
  const VectorXd t = to_eigen(model.matrix()) * to_eigen(obs.y());
  return to_std(t);
}

bool mle_exists(const RelationalModel& model, const Observations& obs) {
  const auto t = subset_sums(model, obs);
  return std::all_of(t.begin(), t.end(), [](double x) { return x > 0.0; });
}

FitResult fit(const RelationalModel& model, const Observations& obs, const FitOptions& options) {
  if (obs.size() != model.num_cells())
    throw InputError("expected " + std::to_string(model.num_cells()) + " observations, got " +
                     std::to_string(obs.size()));
  const auto& a = model.matrix();
  const std::span<const double> y(obs.y());
  const std::span<const double> off(model.offset());

  if (model.variant() == Variant::Intensities) return fit_poisson_newton(a, y, off, options);
  if (!model.overall_effect()) return fit_curved_multinomial(a, y, off, options);

  // Regular multinomial: the Poisson and multinomial MLEs of the cell
  // frequencies coincide, with alpha = N.
  FitResult r = fit_poisson_newton(a, y, off, options);
  const double n = obs.total();
  const double total = std::accumulate(r.delta_hat.begin(), r.delta_hat.end(), 0.0);
  for (auto& d : r.delta_hat) d *= n / total;
  r.params_hat = r.delta_hat;
  for (auto& p : r.params_hat) p /= n;

  // Shift beta by log(N) along k with A' k = 1 so that it parameterises p.
  const MatrixXd am = to_eigen(a);
  const VectorXd k = (am * am.transpose()).ldlt().solve(am * VectorXd::Ones(am.cols()));
  for (std::size_t j = 0; j < r.beta_hat.size(); ++j)
    r.beta_hat[j] -= std::log(n) * k(static_cast<Eigen::Index>(j));

  r.alpha = n;
  r.proportionality = 1.0;
  r.method = FitMethod::PoissonNewtonRescaled;
  const VectorXd fitted = am * to_eigen(r.delta_hat);
  r.fitted_sums = to_std(fitted);
  for (std::size_t j = 0; j < r.fitted_sums.size(); ++j)
    r.sum_ratios[j] = r.fitted_sums[j] / r.observed_sums[j];
  return r;
}

FitResult fit_poisson_newton(const ModelMatrix& a, std::span<const double> y,
                             std::span<const double> offset, const FitOptions& options) {
  return solve_poisson(make_problem(a, y, offset), options);
}

FitResult fit_curved_multinomial(const ModelMatrix& a, std::span<const double> y,
                                 std::span<const double> offset, const FitOptions& options) {
  return solve_curved(make_problem(a, y, offset), options);
}

std::string to_string(FitMethod m) {
  switch (m) {
    case FitMethod::PoissonNewton: return "poisson-newton";
    case FitMethod::PoissonNewtonRescaled: return "poisson-newton-rescaled";
    case FitMethod::CurvedLagrangeNewton: return "curved-lagrange-newton";
  }
  return "unknown";
}

}  // namespace relmod
