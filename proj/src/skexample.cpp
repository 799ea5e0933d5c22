#include "whf/skexample.hpp"

#include "whf/errors.hpp"

#include <cmath>

namespace whf {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr cplx kMinusI{0.0, -1.0};

// a / (x + i) + b e^{i phi x} / (x + i) + c e^{-i phi x} / (x + i)
ExpRational over_x_plus_i(cplx a, cplx b, cplx c, double phi) {
    return ExpRational::term(a, 0.0, kMinusI, 1) + ExpRational::term(b, phi, kMinusI, 1) +
           ExpRational::term(c, -phi, kMinusI, 1);
}

ExpRationalMatrix lambda0_form() {
    ExpRationalMatrix m = ExpRationalMatrix::identity(2);
    m(0, 0) = ExpRational::mobius_power(1);
    return m;
}

} // namespace

ExampleInstance build_example(double phi) {
    ExampleInstance ex;
    ex.phi = phi;
    ex.psi = std::exp(-phi) - 1.0;
    const double e = std::exp(-phi);
    const ExpRational one = ExpRational::constant(1.0);

    ex.F = ExpRationalMatrix(2);
    ex.F(0, 0) = one + ExpRational::term(-4.0 * kI, 0.0, kMinusI, 1);
    ex.F(0, 1) = ExpRational::term(-2.0 * kI, 0.0, kMinusI, 1);
    ex.F(1, 0) = ExpRational::term(4.0 * kI, 0.0, kMinusI, 1);
    ex.F(1, 1) = one + ExpRational::term(2.0 * kI, 0.0, kMinusI, 1);

    ex.F_minus = ExpRationalMatrix::constant({{1.0, -1.0}, {-1.0, 2.0}});
    ex.F_plus = ExpRationalMatrix::constant({{2.0, 1.0}, {1.0, 1.0}});
    ex.lambda0 = lambda0_form();

    ex.G_phi = ex.F;
    ex.G_phi(0, 1) = ExpRational::term(-2.0 * kI, phi, kMinusI, 1);
    ex.G_phi(1, 0) = ExpRational::term(4.0 * kI, -phi, kMinusI, 1);

    // (x - 9i + 4i E- + 4i E+)/(x + i) = 1 + (-10i + 4i E- + 4i E+)/(x + i), and similarly.
    ex.G1_phi = ExpRationalMatrix(2);
    ex.G1_phi(0, 0) = one + over_x_plus_i(-10.0 * kI, 4.0 * kI, 4.0 * kI, phi);
    ex.G1_phi(0, 1) = over_x_plus_i(12.0 * kI, -8.0 * kI, -4.0 * kI, phi);
    ex.G1_phi(1, 0) = over_x_plus_i(-6.0 * kI, 2.0 * kI, 4.0 * kI, phi);
    ex.G1_phi(1, 1) = one + over_x_plus_i(8.0 * kI, -4.0 * kI, -4.0 * kI, phi);

    ex.M0 = ExpRationalMatrix(2);
    ex.M0(0, 0) = over_x_plus_i(-8.0 * kI, 4.0 * kI, 4.0 * kI, phi);
    ex.M0(0, 1) = over_x_plus_i(12.0 * kI, -8.0 * kI, -4.0 * kI, phi);
    ex.M0(1, 0) = over_x_plus_i(-6.0 * kI, 2.0 * kI, 4.0 * kI, phi);
    ex.M0(1, 1) = over_x_plus_i(8.0 * kI, -4.0 * kI, -4.0 * kI, phi);

    const cplx t = 2.0 * kI;
    ex.M0_plus = ExpRationalMatrix(2);
    ex.M0_plus(0, 0) = over_x_plus_i(t * (-4.0 + 2.0 * e), t * 2.0, 0.0, phi);
    ex.M0_plus(0, 1) = over_x_plus_i(t * (6.0 - 2.0 * e), t * -4.0, 0.0, phi);
    ex.M0_plus(1, 0) = over_x_plus_i(t * (-3.0 + 2.0 * e), t * 1.0, 0.0, phi);
    ex.M0_plus(1, 1) = over_x_plus_i(t * (4.0 - 2.0 * e), t * -2.0, 0.0, phi);

    const ExpRational minus_entry = over_x_plus_i(t * (-2.0 * e), 0.0, t * 2.0, phi);
    ex.M0_minus = ExpRationalMatrix(2);
    ex.M0_minus(0, 0) = minus_entry;
    ex.M0_minus(0, 1) = -minus_entry;
    ex.M0_minus(1, 0) = minus_entry;
    ex.M0_minus(1, 1) = -minus_entry;
    return ex;
}

VariantSpec variant_constant(int id, double phi) {
    CMatrix b(2, 2);
    switch (id) {
    case 0: b << 4.0, -6.0, 3.0, -4.0; break;
    case 1: b << 4.0, -6.0, 0.0, 0.0; break;
    case 2: b << 4.0, -6.0, 0.0, 4.0; break;
    case 3: b << 4.0, -6.0, 8.0 / 3.0, -4.0; break;
    default: throw InvalidArgument("variant id must be 0, 1, 2 or 3");
    }
    VariantSpec v;
    v.id = id;
    v.phi = phi;
    v.c0 = (std::exp(-phi) - 1.0) * b;
    v.predicted_M1_infinity = v.c0 * v.c0;
    return v;
}

ClosedFormFirstStep closed_form_first_step(const ExampleInstance& instance, const VariantSpec& variant, const GridPtr& grid) {
    ExpRationalMatrix c(2);
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) c(p, q) = ExpRational::constant(variant.c0(p, q));
    ExpRationalMatrix lambda_inv = ExpRationalMatrix::identity(2);
    lambda_inv(0, 0) = ExpRational::mobius_power(-1);
    const ExpRationalMatrix plus = lambda_inv * (instance.M0_plus - c);
    const ExpRationalMatrix minus = instance.M0_minus + c;
    return {sample(ClosedForm{"split_n1_plus", plus}, grid), sample(ClosedForm{"split_n1_minus", minus}, grid)};
}

StepSolution first_step_factors(const ExampleInstance& instance, const VariantSpec& variant, const GridPtr& grid,
                                OperatorRoute route) {
    if (std::fabs(instance.phi - variant.phi) > 1e-15 * std::max(1.0, std::fabs(instance.phi)))
        throw InvalidArgument("instance and variant belong to different phi");
    const CMatrix m0_plus_at_i = to_matrix(instance.M0_plus.evaluate(lcplx(0.0L, 1.0L)), 2);
    const CMatrix c_can = variant.c0 - m0_plus_at_i;
    const double scale = std::max(1.0, matrix_norm(variant.c0));
    if (c_can.row(0).cwiseAbs().maxCoeff() > 1e-6 * scale)
        throw NumericalError("frames disagree: forced row of the constant does not match M0+(i)");

    const SampledMatrixFunction m0 = sample(ClosedForm{"example_m0", instance.M0}, grid);
    const SampledMatrixFunction lam = sample(ClosedForm{"example_lambda0", instance.lambda0}, grid);
    StepSolution step = solve_step(lam, m0, c_can.bottomRows(1), route);

    const ClosedFormFirstStep split = closed_form_first_step(instance, variant, grid);
    const double gap = std::max(sup_distance(split.n_plus, step.n_plus.boundary()),
                                sup_distance(split.n_minus, step.n_minus.boundary()));
    if (!(gap <= 1e-6)) throw NumericalError("frames disagree: solver and closed-form split differ by " + std::to_string(gap));
    return step;
}

SampledMatrixFunction first_remainder(double phi, int variant, const GridPtr& grid, OperatorRoute route) {
    const ExampleInstance ex = build_example(phi);
    StepState state;
    StepSolution step = first_step_factors(ex, variant_constant(variant, phi), grid, route);
    state.n_plus_terms.push_back(std::move(step.n_plus));
    state.n_minus_terms.push_back(std::move(step.n_minus));
    return next_remainder(state);
}

StrategyPtr example_strategy(int variant, double phi, StrategyPtr later) {
    return explicit_strategy({variant_constant(variant, phi).c0}, std::move(later));
}

FactorizationResult run_example(double phi, int variant, const GridPtr& grid, const RunOptions& options,
                                StrategyPtr later) {
    const ExampleInstance ex = build_example(phi);
    const SampledMatrixFunction lam = sample(ClosedForm{"example_lambda0", ex.lambda0}, grid);
    const SampledMatrixFunction m0 = sample(ClosedForm{"example_m0", ex.M0}, grid);
    const std::vector<int> indices{1, 0};
    const auto strategy = example_strategy(variant, phi, std::move(later));
    return run_factorization(lam, m0, split_indices(indices), options, *strategy);
}

std::vector<FigureRow> figure_rows(int variant, double phi, const SampledMatrixFunction& m1) {
    const double norm = phi * phi;
    std::vector<FigureRow> rows;
    rows.reserve(m1.size() * static_cast<std::size_t>(m1.dim() * m1.dim()));
    for (std::size_t j = 0; j < m1.size(); ++j) {
        const double x = m1.grid().x(j);
        for (Eigen::Index p = 0; p < m1.dim(); ++p)
            for (Eigen::Index q = 0; q < m1.dim(); ++q) {
                const cplx v = m1[j](p, q) / norm;
                rows.push_back({variant, phi, x, static_cast<int>(p) + 1, static_cast<int>(q) + 1, v.real(), v.imag(),
                                std::abs(v), x * std::abs(v)});
            }
    }
    return rows;
}

std::vector<FigureRow> figure_data(int variant, const std::vector<double>& phis, const GridPtr& grid,
                                   OperatorRoute route) {
    if (phis.empty()) throw InvalidArgument("phi list is empty");
    std::vector<FigureRow> rows;
    for (double phi : phis) {
        if (!(phi > 0.0)) throw InvalidArgument("figure data needs phi > 0");
        const auto part = figure_rows(variant, phi, first_remainder(phi, variant, grid, route));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

} // namespace whf
