#pragma once

// Human-readable and JSON renderings of the describe / fit / mixed commands.

#include <string>
#include <vector>

#include "relmod/mle.hpp"
#include "relmod/model.hpp"
#include "relmod/stats.hpp"

namespace relmod {

std::string describe_text(const RelationalModel& model, const std::string& name = {});
std::string describe_json(const RelationalModel& model, const std::string& name = {});

std::string fit_text(const RelationalModel& model, const Observations& obs, const FitResult& fit,
                     const GofReport& gof, int precision = 4, const std::string& name = {});

/// Field names are stable; see README.md for the schema.
std::string fit_json(const RelationalModel& model, const Observations& obs, const FitResult& fit,
                     const GofReport& gof, const std::string& name = {});

std::string mixed_text(const RelationalModel& model, const std::vector<double>& delta,
                       const MixedParams& params, int precision = 4, const std::string& name = {});
std::string mixed_json(const RelationalModel& model, const std::vector<double>& delta,
                       const MixedParams& params, const std::string& name = {});

}  // namespace relmod
