#pragma once

#include "whf/engine.hpp"

#include <vector>

namespace whf {

/// The 2 x 2 example family G_phi = R_phi F R_phi^{-1}: closed forms of every matrix involved.
struct ExampleInstance {
    double phi = 0.0;
    double psi = 0.0; // e^{-phi} - 1
    ExpRationalMatrix F;
    ExpRationalMatrix F_minus;
    ExpRationalMatrix F_plus;
    ExpRationalMatrix lambda0;
    ExpRationalMatrix G_phi;
    ExpRationalMatrix G1_phi;
    ExpRationalMatrix M0;
    ExpRationalMatrix M0_plus;
    ExpRationalMatrix M0_minus;
};

ExampleInstance build_example(double phi);

struct VariantSpec {
    int id = 0;
    double phi = 0.0;
    CMatrix c0;
    CMatrix predicted_M1_infinity;
};

/// c0 = psi * B_id; predicted_M1_infinity = c0^2.
VariantSpec variant_constant(int id, double phi);

/// N1+ = Lambda0^{-1}(M0+ - c0), N1- = M0- + c0 sampled from the closed-form split.
struct ClosedFormFirstStep {
    SampledMatrixFunction n_plus;
    SampledMatrixFunction n_minus;
};
ClosedFormFirstStep closed_form_first_step(const ExampleInstance& instance, const VariantSpec& variant, const GridPtr& grid);

/// First step through the generic solver in the canonical frame, checked
/// against the closed-form split; throws NumericalError if they differ by more than 1e-6.
StepSolution first_step_factors(const ExampleInstance& instance, const VariantSpec& variant, const GridPtr& grid,
                                OperatorRoute route = OperatorRoute::Automatic);

/// M1 = -N1- N1+ for the given variant.
SampledMatrixFunction first_remainder(double phi, int variant, const GridPtr& grid,
                                      OperatorRoute route = OperatorRoute::Automatic);

/// Explicit strategy with the variant's constant at step one and `later` from step two on.
StrategyPtr example_strategy(int variant, double phi, StrategyPtr later);

/// Full engine run on the example with profile (1, 0).
FactorizationResult run_example(double phi, int variant, const GridPtr& grid, const RunOptions& options,
                                StrategyPtr later);

struct FigureRow {
    int variant = 0;
    double phi = 0.0;
    double x = 0.0;
    int p = 1;
    int q = 1;
    double re = 0.0;
    double im = 0.0;
    double abs = 0.0;
    double x_abs = 0.0;
};

/// Rows of M1 normalized by phi^2, for every node and entry (p, q are 1-based).
std::vector<FigureRow> figure_data(int variant, const std::vector<double>& phis, const GridPtr& grid,
                                   OperatorRoute route = OperatorRoute::Automatic);

/// Rows for an arbitrary remainder with normalization factor phi^2.
std::vector<FigureRow> figure_rows(int variant, double phi, const SampledMatrixFunction& m1);

} // namespace whf
