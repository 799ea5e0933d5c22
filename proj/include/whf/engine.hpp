#pragma once

#include "whf/rbvp.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace whf {

/// Per-order records of the factor series.
struct StepState {
    std::vector<HalfPlaneFunction> n_plus_terms;
    std::vector<HalfPlaneFunction> n_minus_terms;
    std::vector<SampledMatrixFunction> remainders;
    std::vector<CMatrix> constants;
    std::vector<CMatrix> constants_total;

    int order() const { return static_cast<int>(n_plus_terms.size()); }
};

/// -sum_{j=1..r} N_j- N_{r+1-j}+ for r = state.order().
SampledMatrixFunction next_remainder(const StepState& state);

struct StepContext {
    int step = 1;
    const SampledMatrixFunction* remainder = nullptr;
    std::size_t forced_rows = 0;
    /// Omega0+[remainder](infinity), computed on demand.
    std::function<CMatrix()> omega_plus_at_infinity;
};

/// Chooses the free rows of the additive constant at each step, in the canonical frame.
class ConstantStrategy {
public:
    virtual ~ConstantStrategy() = default;
    virtual std::string name() const = 0;
    virtual CMatrix free_block(const StepContext& ctx) const = 0;
};

using StrategyPtr = std::shared_ptr<const ConstantStrategy>;

StrategyPtr canonical_zero_strategy();
/// Free rows of the total constant set to zero.
StrategyPtr minimize_remainder_infinity_strategy();
/// Total-frame constants for steps 1..size(); later steps use `fallback`.
/// Forced rows of the supplied matrices are ignored.
StrategyPtr explicit_strategy(std::vector<CMatrix> total_constants, StrategyPtr fallback = nullptr);

struct FactorConditionReport {
    /// max_{q < k} |h-(-i) e_q - e_q|
    double minus_at_minus_i_defect = 0.0;
    bool minus_at_minus_i_ok = true;
    /// |h-(inf) h+(inf) - I|
    double infinity_product_defect = 0.0;
};

struct ConvergenceDiagnostics {
    double A = 0.0;
    double epsilon_bound = 0.0;
    double C_mu_used = 1.0;
    double hoelder_norm_N = 0.0;
    HoelderEstimate hoelder;
    bool small_enough = true;
    std::vector<double> alpha;
    std::vector<double> plus_step_norms;
    std::vector<double> minus_step_norms;
    std::vector<double> remainder_norms;
    std::optional<double> c_mu_empirical_lower_bound;
    bool c_mu_below_empirical = false;
    double min_det_h_minus = 0.0;
    double min_det_h_plus = 0.0;
};

struct RunOptions {
    int order = 1;
    double atol = 1e-12;
    OperatorRoute route = OperatorRoute::Automatic;
    double mu = 0.5;
    double c_mu = 1.0;
    bool empirical_c_mu = false;
    int refine_check = 1;
};

struct FactorizationResult {
    int order = 0;
    bool stopped_early = false;
    PartialIndexProfile profile;
    StepState state;
    SampledMatrixFunction lambda0;
    SampledMatrixFunction lambda;
    SampledMatrixFunction g1;
    SampledMatrixFunction h_minus;
    SampledMatrixFunction h_plus;
    double residual_sup = 0.0;
    std::optional<double> residual_refined;
    FactorConditionReport factor_conditions;
    ConvergenceDiagnostics diagnostics;

    /// Factors off the line, from the half-plane representations of the terms.
    CMatrix h_minus_at(cplx z) const;
    CMatrix h_plus_at(cplx z) const;
    CMatrix h_minus_at_infinity() const;
    CMatrix h_plus_at_infinity() const;
};

/// Iterates solve_step / next_remainder for G1 = Lambda + m0 with Lambda = w^s Lambda0.
FactorizationResult run_factorization(const SampledMatrixFunction& lambda0, const SampledMatrixFunction& m0,
                                      const PartialIndexProfile& profile, const RunOptions& options,
                                      const ConstantStrategy& strategy);

FactorConditionReport check_factor_conditions(const FactorizationResult& result, std::size_t k);

/// A = norm * (1 + c_mu)^2.
double convergence_constant_from_norm(double norm, double c_mu);

/// Diagnostics from the Hoelder norm of the (shifted) perturbation.
ConvergenceDiagnostics convergence_constant(const SampledMatrixFunction& m0, double mu, double c_mu);

/// max over a fixed bank of 8 densities of |S0 f|_mu / |f|_mu on `grid`.
double empirical_c_mu_lower_bound(const GridPtr& grid, double mu);

struct AlphaCoefficient {
    int r = 0;
    std::string numerator;
    std::string denominator;
    double value = 0.0;
};

/// alpha_1 = 1/2, alpha_r = (1/2) sum_{j=1}^{r-1} alpha_j alpha_{r-j}, in exact rationals.
std::vector<AlphaCoefficient> alpha_coefficients(int r_max);

} // namespace whf
