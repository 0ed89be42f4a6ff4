#include "relmod/report.hpp"

#include <algorithm>

#include <fmt/format.h>
#include "json.hpp"

namespace relmod {

namespace {

using nlohmann::json;

std::string family_line(const RelationalModel& model) {
  const ModelClass mc = classify(model);
  return fmt::format("{} exponential family of order {}", to_string(mc.kind), mc.order);
}

std::vector<std::vector<std::string>> int_rows(const IntegerMatrix& m) {
  std::vector<std::vector<std::string>> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) rows[r].push_back(m(r, c).str());
  return rows;
}

json int_matrix_json(const IntegerMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.as_int64(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string matrix_text(const IntegerMatrix& m, const std::string& indent) {
  const auto rows = int_rows(m);
  std::size_t w = 1;
  for (const auto& r : rows)
    for (const auto& s : r) w = std::max(w, s.size());
  std::string out;
  for (const auto& r : rows) {
    out += indent + "[";
    for (std::size_t c = 0; c < r.size(); ++c) out += fmt::format("{}{:>{}}", c ? " " : "", r[c], w);
    out += "]\n";
  }
  return out;
}

json model_json(const RelationalModel& model, const std::string& name) {
  const ModelClass mc = classify(model);
  json cells = json::array();
  for (const auto& c : model.table().cells()) cells.push_back(c.to_string());
  json ors = json::array();
  for (const auto& r : generalized_odds_ratios(model))
    ors.push_back({{"u", r.u}, {"v", r.v}, {"target", r.target}, {"homogeneous", is_homogeneous(r)},
                   {"text", format_odds_ratio(model, r)}});
  return {{"name", name},
          {"variant", to_string(model.variant())},
          {"cells", cells},
          {"num_cells", model.num_cells()},
          {"J", model.num_params()},
          {"rank", model.num_params()},
          {"df", degrees_of_freedom(model)},
          {"family", to_string(mc.kind)},
          {"order", mc.order},
          {"overall_effect", mc.overall_effect},
          {"row_names", model.matrix().row_names()},
          {"model_matrix", int_matrix_json(model.matrix().entries())},
          {"kernel_basis", int_matrix_json(model.kernel_basis().D)},
          {"offset", model.offset()},
          {"odds_ratios", ors}};
}

std::string header(const RelationalModel& model, const std::string& name) {
  std::string out;
  if (!name.empty()) out += fmt::format("model: {}\n", name);
  out += fmt::format("variant: {}\n", to_string(model.variant()));
  return out;
}

}  // namespace

std::string describe_text(const RelationalModel& model, const std::string& name) {
  const ModelClass mc = classify(model);
  std::string out = header(model, name);
  out += fmt::format("cells |I|: {}\n", model.num_cells());
  out += fmt::format("parameters J: {}\n", model.num_params());
  out += fmt::format("rank: {}\n", model.num_params());
  out += fmt::format("degrees of freedom: {}\n", degrees_of_freedom(model));
  out += fmt::format("family: {}\n", family_line(model));
  out += fmt::format("overall effect: {}\n", mc.overall_effect ? "yes" : "no");
  if (model.variant() == Variant::Intensities)
    out += fmt::format("as a probability model: {} exponential family of order {}\n",
                       mc.overall_effect ? "regular" : "curved", model.num_params() - 1);
  out += "model matrix A:\n";
  const auto& names = model.matrix().row_names();
  std::size_t w = 0;
  for (const auto& n : names) w = std::max(w, n.size());
  const auto rows = int_rows(model.matrix().entries());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += fmt::format("  {:<{}} [", names[r], w);
    for (std::size_t c = 0; c < rows[r].size(); ++c) out += (c ? " " : "") + rows[r][c];
    out += "]\n";
  }
  if (model.is_saturated()) {
    out += "kernel basis D: none (saturated model, no testable constraints)\n";
    return out;
  }
  out += "kernel basis D:\n" + matrix_text(model.kernel_basis().D, "  ");
  out += "generalized odds ratios:\n";
  for (const auto& r : generalized_odds_ratios(model))
    out += fmt::format("  {}   [{}]\n", format_odds_ratio(model, r),
                       is_homogeneous(r) ? "homogeneous" : "non-homogeneous");
  return out;
}

std::string describe_json(const RelationalModel& model, const std::string& name) {
  return model_json(model, name).dump(2) + "\n";
}

std::string fit_text(const RelationalModel& model, const Observations& obs, const FitResult& fit,
                     const GofReport& gof, int precision, const std::string& name) {
  const int p = precision;
  std::string out = header(model, name);
  out += fmt::format("family: {}\n", family_line(model));
  out += fmt::format("method: {}  converged: {}  iterations: {}  max residual: {:.3g}\n\n",
                     to_string(fit.method), fit.converged ? "yes" : "no", fit.iterations, fit.max_residual);

  std::size_t w = 4;
  for (const auto& c : model.table().cells()) w = std::max(w, c.to_string().size());
  out += fmt::format("{:<{}}  {:>14}  {:>14}\n", "cell", w, "observed", "fitted");
  for (std::size_t i = 0; i < model.num_cells(); ++i)
    out += fmt::format("{:<{}}  {:>14.{}f}  {:>14.{}f}\n", model.table().cell(i).to_string(), w,
                       obs.y()[i], p, fit.delta_hat[i], p);

  const auto& names = model.matrix().row_names();
  std::size_t nw = 6;
  for (const auto& n : names) nw = std::max(nw, n.size());
  out += fmt::format("\n{:<{}}  {:>14}  {:>14}  {:>10}  {:>12}\n", "subset", nw, "observed", "fitted",
                     "ratio", "beta");
  for (std::size_t j = 0; j < names.size(); ++j)
    out += fmt::format("{:<{}}  {:>14.{}f}  {:>14.{}f}  {:>10.{}f}  {:>12.{}f}\n", names[j], nw,
                       fit.observed_sums[j], p, fit.fitted_sums[j], p, fit.sum_ratios[j], p,
                       fit.beta_hat[j], p);
  out += fmt::format("\nproportionality (fitted/observed subset sums): {:.{}f}\n", fit.proportionality, p);
  if (fit.alpha) out += fmt::format("alpha (Lagrange multiplier): {:.{}f}\n", *fit.alpha, p);
  out += fmt::format("N: {:.{}f}\n", obs.total(), p);
  out += fmt::format("\nX2 = {:.{}f}  G2 = {:.{}f}  df = {}\n", gof.x2, p, gof.g2, p, gof.df);
  if (gof.df > 0)
    out += fmt::format("p-value (X2) = {:.{}g}  p-value (G2) = {:.{}g}\n", gof.p_value_x2, p,
                       gof.p_value_g2, p);
  else
    out += "saturated model: no testable constraints\n";
  return out;
}

std::string fit_json(const RelationalModel& model, const Observations& obs, const FitResult& fit,
                     const GofReport& gof, const std::string& name) {
  json doc;
  doc["model"] = model_json(model, name);
  doc["observed"] = obs.y();
  doc["total"] = obs.total();
  doc["fitted"] = fit.delta_hat;
  doc["params_hat"] = fit.params_hat;
  doc["beta_hat"] = fit.beta_hat;
  doc["alpha"] = fit.alpha ? json(*fit.alpha) : json(nullptr);
  doc["subset_sums"] = {{"names", model.matrix().row_names()},
                        {"observed", fit.observed_sums},
                        {"fitted", fit.fitted_sums},
                        {"ratios", fit.sum_ratios}};
  doc["proportionality"] = fit.proportionality;
  doc["gof"] = {{"X2", gof.x2},
                {"G2", gof.g2},
                {"df", gof.df},
                {"p_value_X2", gof.p_value_x2},
                {"p_value_G2", gof.p_value_g2}};
  doc["convergence"] = {{"converged", fit.converged},
                        {"iterations", fit.iterations},
                        {"max_residual", fit.max_residual},
                        {"method", to_string(fit.method)}};
  return doc.dump(2) + "\n";
}

std::string mixed_text(const RelationalModel& model, const std::vector<double>& delta,
                       const MixedParams& params, int precision, const std::string& name) {
  const int p = precision;
  std::string out = header(model, name);
  out += "delta:";
  for (double d : delta) out += fmt::format(" {:.{}f}", d, p);
  out += "\nzeta1 = A delta (mean-value parameters):\n";
  const auto& names = model.matrix().row_names();
  for (std::size_t j = 0; j < params.zeta1.size(); ++j)
    out += fmt::format("  {}: {:.{}f}\n", names[j], params.zeta1[j], p);
  if (params.theta.empty()) {
    out += "saturated model: no canonical part\n";
    return out;
  }
  out += "theta = (D D')^-1 D log delta:\n";
  for (double t : params.theta) out += fmt::format("  {:.{}f}\n", t, p);
  out += "D log delta:\n";
  const auto ors = generalized_odds_ratios(model);
  for (std::size_t l = 0; l < params.zeta2_tilde.size(); ++l) {
    std::string ratio = format_odds_ratio(model, GeneralizedOddsRatio{ors[l].u, ors[l].v, 1.0}, p);
    ratio = ratio.substr(0, ratio.rfind(" = "));
    out += fmt::format("  {:.{}f}   log of {}\n", params.zeta2_tilde[l], p, ratio);
  }
  return out;
}

std::string mixed_json(const RelationalModel& model, const std::vector<double>& delta,
                       const MixedParams& params, const std::string& name) {
  json doc;
  doc["model"] = model_json(model, name);
  doc["delta"] = delta;
  doc["zeta1"] = params.zeta1;
  doc["theta"] = params.theta;
  doc["zeta2_tilde"] = params.zeta2_tilde;
  return doc.dump(2) + "\n";
}

}  // namespace relmod
