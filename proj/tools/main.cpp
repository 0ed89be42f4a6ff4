// relmod: describe, fit and inspect relational models from a spec file.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "relmod/error.hpp"
#include "relmod/mle.hpp"
#include "relmod/report.hpp"
#include "relmod/spec_io.hpp"
#include "relmod/stats.hpp"

namespace {

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

struct Args {
  std::string spec;
  std::string data;
  std::string delta;
  bool json = false;
  int precision = 4;
  std::optional<int> max_iter;
  std::optional<double> tol;
};

int run_describe(const Args& args) {
  const auto spec = relmod::load_model_spec(args.spec);
  const auto model = relmod::build_model(spec);
  std::cout << (args.json ? relmod::describe_json(model, spec.name) : relmod::describe_text(model, spec.name));
  return 0;
}

int run_fit(const Args& args) {
  const auto spec = relmod::load_model_spec(args.spec);
  const auto model = relmod::build_model(spec);
  const auto obs = args.data.empty() ? relmod::spec_observations(spec, model.table())
                                     : relmod::load_counts(args.data, model.table());
  relmod::FitOptions opts;
  if (args.max_iter) opts.max_iter = *args.max_iter;
  if (args.tol) opts.tol_abs = opts.tol_rel = *args.tol;
  const auto fit = relmod::fit(model, obs, opts);
  const auto gof = relmod::goodness_of_fit(obs.y(), fit.delta_hat, relmod::degrees_of_freedom(model));
  if (args.json)
    std::cout << relmod::fit_json(model, obs, fit, gof, spec.name);
  else
    std::cout << relmod::fit_text(model, obs, fit, gof, args.precision, spec.name);
  return 0;
}

int run_mixed(const Args& args) {
  const auto spec = relmod::load_model_spec(args.spec);
  const auto model = relmod::build_model(spec);
  std::vector<double> delta;
  if (!args.delta.empty()) {
    delta = relmod::load_positive_vector(args.delta, model.table());
  } else {
    // no --delta: use the spec's own data, which must then be strictly positive
    delta = relmod::spec_observations(spec, model.table()).y();
    for (double v : delta)
      if (!(v > 0.0)) throw relmod::InputError("mixed parameters need a strictly positive delta; pass --delta");
  }
  const auto params =
      relmod::mixed_parameters(delta, model.matrix().entries(), model.kernel_basis().D);
  if (args.json)
    std::cout << relmod::mixed_json(model, delta, params, spec.name);
  else
    std::cout << relmod::mixed_text(model, delta, params, args.precision, spec.name);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational models for contingency tables"};
  app.require_subcommand(1);
  Args args;

  auto* describe = app.add_subcommand("describe", "Model class, kernel basis and odds ratios");
  describe->add_option("spec", args.spec, "Model spec file")->required()->check(CLI::ExistingFile);
  describe->add_flag("--json", args.json, "Emit JSON");

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit and goodness of fit");
  fit->add_option("spec", args.spec, "Model spec file")->required()->check(CLI::ExistingFile);
  fit->add_option("--data", args.data, "Counts file (overrides the spec's data)")->check(CLI::ExistingFile);
  fit->add_flag("--json", args.json, "Emit JSON with full-precision numbers");
  fit->add_option("--precision", args.precision, "Decimals in text output")->check(CLI::Range(0, 17));
  fit->add_option("--max-iter", args.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
  fit->add_option("--tol", args.tol, "Absolute and relative convergence tolerance")
      ->check(CLI::PositiveNumber);

  auto* mixed = app.add_subcommand("mixed", "Mixed parameters of a positive distribution");
  mixed->add_option("spec", args.spec, "Model spec file")->required()->check(CLI::ExistingFile);
  mixed->add_option("--delta", args.delta, "Cell values in counts-file format")->check(CLI::ExistingFile);
  mixed->add_flag("--json", args.json, "Emit JSON");
  mixed->add_option("--precision", args.precision, "Decimals in text output")->check(CLI::Range(0, 17));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (describe->parsed()) return run_describe(args);
    if (fit->parsed()) return run_fit(args);
    return run_mixed(args);
  } catch (const relmod::NumericalError& e) {
    std::cerr << "relmod: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const relmod::InputError& e) {
    std::cerr << "relmod: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "relmod: " << e.what() << "\n";
    return kInputError;
  }
}
