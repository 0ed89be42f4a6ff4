#include "relmod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "relmod/error.hpp"

namespace relmod {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_pair(std::span<const double> y, std::span<const double> fitted) {
  if (y.size() != fitted.size())
    throw InputError("observed and fitted vectors differ in length");
  for (std::size_t i = 0; i < fitted.size(); ++i)
    if (!(fitted[i] > 0.0)) throw InputError("fitted value " + std::to_string(i) + " is not positive");
}

std::vector<double> positive_log(std::span<const double> delta) {
  std::vector<double> out(delta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (!(delta[i] > 0.0) || !std::isfinite(delta[i]))
      throw InputError("cell value " + std::to_string(i) + " must be strictly positive");
    out[i] = std::log(delta[i]);
  }
  return out;
}

MatrixXd to_eigen(const IntegerMatrix& m) {
  const auto flat = m.to_double();
  MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = flat[r * m.cols() + c];
  return out;
}

// Regularised lower incomplete gamma P(a, x) by its power series; x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularised upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction; x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double pearson_x2(std::span<const double> y, std::span<const double> fitted) {
  check_pair(y, fitted);
  double x2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - fitted[i];
    x2 += r * r / fitted[i];
  }
  return x2;
}

double deviance_g2(std::span<const double> y, std::span<const double> fitted) {
  check_pair(y, fitted);
  double g2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    // each term is >= 0; clamp the rounding noise near y == fitted
    double term = fitted[i] - y[i];
    if (y[i] > 0.0) term += y[i] * std::log(y[i] / fitted[i]);
    g2 += std::max(term, 0.0);
  }
  return 2.0 * g2;
}

double chi_square_sf(double x, std::size_t df) {
  if (df == 0) throw InputError("chi-square tail needs positive degrees of freedom");
  if (std::isnan(x) || x < 0.0) throw InputError("chi-square statistic must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double a = 0.5 * static_cast<double>(df);
  const double half = 0.5 * x;
  if (half < a + 1.0) return std::max(0.0, 1.0 - gamma_p_series(a, half));
  return gamma_q_fraction(a, half);
}

GofReport goodness_of_fit(std::span<const double> y, std::span<const double> fitted, std::size_t df) {
  GofReport r;
  r.x2 = pearson_x2(y, fitted);
  r.g2 = deviance_g2(y, fitted);
  r.df = df;
  if (df > 0) {
    r.p_value_x2 = chi_square_sf(std::max(0.0, r.x2), df);
    r.p_value_g2 = chi_square_sf(std::max(0.0, r.g2), df);
  }
  return r;
}

MixedParams mixed_parameters(std::span<const double> delta, const IntegerMatrix& a,
                             const IntegerMatrix& d) {
  if (a.cols() != delta.size() || d.cols() != delta.size())
    throw InputError("mixed_parameters: dimension mismatch");
  if (!(a * d.transpose()).is_zero())
    throw InputError("mixed_parameters: kernel basis is not orthogonal to A");
  const auto logd = positive_log(delta);
  const VectorXd ld = Eigen::Map<const VectorXd>(logd.data(), static_cast<Eigen::Index>(logd.size()));
  const VectorXd dv = Eigen::Map<const VectorXd>(delta.data(), static_cast<Eigen::Index>(delta.size()));
  const MatrixXd am = to_eigen(a);
  const MatrixXd dm = to_eigen(d);

  MixedParams out;
  const VectorXd zeta1 = am * dv;
  const VectorXd zeta2 = dm * ld;
  out.zeta1.assign(zeta1.data(), zeta1.data() + zeta1.size());
  out.zeta2_tilde.assign(zeta2.data(), zeta2.data() + zeta2.size());
  if (d.rows() > 0) {
    const VectorXd theta = (dm * dm.transpose()).llt().solve(zeta2);
    out.theta.assign(theta.data(), theta.data() + theta.size());
  }
  return out;
}

GammaExponents gamma_exponents(const IntegerMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("canonical_gamma: M must be square");
  BigInt det = determinant(m);
  if (det == 0) throw InputError("canonical_gamma: M is singular");
  return {std::move(det), adjugate(m.transpose())};
}

std::vector<double> canonical_gamma(const IntegerMatrix& m, std::span<const double> delta) {
  if (delta.size() != m.cols()) throw InputError("canonical_gamma: dimension mismatch");
  const auto logd = positive_log(delta);
  const GammaExponents ex = gamma_exponents(m);
  const double det = ex.det.convert_to<double>();
  std::vector<double> gamma(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) s += ex.adjugate(i, k).convert_to<double>() * logd[k];
    gamma[i] = s / det;
  }
  return gamma;
}

Reconstruction reconstruct_from_mixed(const IntegerMatrix& a, std::span<const double> delta1,
                                      const IntegerMatrix& d, std::span<const double> delta2,
                                      Variant variant, const FitOptions& options) {
  const std::size_t n = a.cols();
  if (delta1.size() != n || delta2.size() != n || d.cols() != n)
    throw InputError("reconstruct_from_mixed: dimension mismatch");
  if (!(a * d.transpose()).is_zero())
    throw InputError("reconstruct_from_mixed: kernel basis is not orthogonal to A");
  const auto log2 = positive_log(delta2);
  positive_log(delta1);

  // Project log delta2 onto the row space of D.
  std::vector<double> offset(n, 0.0);
  if (d.rows() > 0) {
    const MatrixXd dm = to_eigen(d);
    const VectorXd l2 = Eigen::Map<const VectorXd>(log2.data(), static_cast<Eigen::Index>(n));
    const VectorXd proj = dm.transpose() * (dm * dm.transpose()).llt().solve(dm * l2);
    offset.assign(proj.data(), proj.data() + proj.size());
  }

  const ModelMatrix am = reduce_to_full_row_rank(ModelMatrix(a));
  std::vector<double> data(delta1.begin(), delta1.end());

  Reconstruction out;
  if (variant == Variant::Intensities) {
    out.fit = fit_poisson_newton(am, data, offset, options);
    out.delta = out.fit.params_hat;
  } else {
    const double total = std::accumulate(data.begin(), data.end(), 0.0);
    for (auto& x : data) x /= total;
    const std::vector<std::int64_t> ones(n, 1);
    if (row_space_contains(am.entries(), std::span<const std::int64_t>(ones))) {
      out.fit = fit_poisson_newton(am, data, offset, options);
      const double s = std::accumulate(out.fit.delta_hat.begin(), out.fit.delta_hat.end(), 0.0);
      for (auto& x : out.fit.delta_hat) x /= s;
      out.fit.params_hat = out.fit.delta_hat;
      out.fit.alpha = 1.0;
      out.fit.proportionality = 1.0;
      out.fit.method = FitMethod::PoissonNewtonRescaled;
    } else {
      out.fit = fit_curved_multinomial(am, data, offset, options);
    }
    out.delta = out.fit.params_hat;
  }
  out.alpha = out.fit.proportionality;
  return out;
}

}  // namespace relmod
