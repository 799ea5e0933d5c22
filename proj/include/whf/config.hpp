#pragma once

#include "whf/engine.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace whf {

enum class ProblemKind { Example, Custom };

/// A user-supplied perturbation m0 with its partial indices.
struct CustomProblem {
    std::vector<int> indices;
    ExpRationalMatrix m0;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::Example;
    int variant = 0;
    std::vector<double> phi_list;
    int order = 1;
    std::size_t grid_points = 2048;
    double mu = 0.5;
    double c_mu = 1.0;
    std::string strategy = "canonical-zero";
    /// Total-frame constants; for the example they start at step two.
    std::vector<CMatrix> explicit_constants;
    std::string output_dir;
    int refine_check = 1;
    OperatorRoute route = OperatorRoute::Automatic;
    double atol = 1e-12;
    bool empirical_c_mu = false;
    std::optional<CustomProblem> custom;
};

/// Parses and validates a JSON document; throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text);

/// Range and consistency checks, rerun after command-line overrides.
void validate_config(const RunConfig& config);

/// Constant-choice strategy named by the config for the steps it governs.
StrategyPtr make_strategy(const RunConfig& config);

} // namespace whf
