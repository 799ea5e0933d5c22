#pragma once

#include "whf/config.hpp"
#include "whf/skexample.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace whf {

/// Shortest text with 17 significant digits, '.' decimal point.
std::string format_number(double v);

/// CSV with header variant,phi,x,p,q,re,im,abs,x_abs.
std::string figure_csv(const std::vector<FigureRow>& rows);

/// CSV with header r,numerator,denominator,value,bound,holds.
std::string alpha_table(int r_max);

/// Engine run on a custom problem; Lambda = w^s Lambda0 from the indices.
FactorizationResult run_custom(const CustomProblem& problem, const GridPtr& grid, const RunOptions& options,
                               const ConstantStrategy& strategy);

/// Runs the configured experiment and writes factors.csv, remainders.csv and diagnostics.json
/// into config.output_dir. Returns the written paths; on failure removes them and rethrows.
std::vector<std::filesystem::path> run_experiment(const RunConfig& config);

} // namespace whf
