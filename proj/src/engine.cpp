#include "whf/engine.hpp"

#include "whf/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>

namespace whf {

namespace {

constexpr cplx kI{0.0, 1.0};

class CanonicalZero final : public ConstantStrategy {
public:
    std::string name() const override { return "canonical-zero"; }
    CMatrix free_block(const StepContext& ctx) const override {
        const Eigen::Index n = ctx.remainder->dim();
        return CMatrix::Zero(n - static_cast<Eigen::Index>(ctx.forced_rows), n);
    }
};

class MinimizeInfinity final : public ConstantStrategy {
public:
    std::string name() const override { return "minimize-remainder-infinity"; }
    CMatrix free_block(const StepContext& ctx) const override {
        // C_total = C_can - Omega0+(inf); zero total free rows.
        const Eigen::Index n = ctx.remainder->dim();
        return ctx.omega_plus_at_infinity().bottomRows(n - static_cast<Eigen::Index>(ctx.forced_rows));
    }
};

class ExplicitConstants final : public ConstantStrategy {
public:
    ExplicitConstants(std::vector<CMatrix> total, StrategyPtr fallback)
        : total_(std::move(total)), fallback_(std::move(fallback)) {}
    std::string name() const override { return "explicit"; }
    CMatrix free_block(const StepContext& ctx) const override {
        const std::size_t idx = static_cast<std::size_t>(ctx.step - 1);
        if (idx >= total_.size()) {
            if (fallback_) return fallback_->free_block(ctx);
            throw InvalidArgument("explicit strategy has no constant for step " + std::to_string(ctx.step));
        }
        const Eigen::Index n = ctx.remainder->dim();
        const CMatrix& c = total_[idx];
        if (c.rows() != n || c.cols() != n) throw InvalidArgument("explicit constant has wrong dimensions");
        const Eigen::Index free_rows = n - static_cast<Eigen::Index>(ctx.forced_rows);
        return c.bottomRows(free_rows) + ctx.omega_plus_at_infinity().bottomRows(free_rows);
    }

private:
    std::vector<CMatrix> total_;
    StrategyPtr fallback_;
};

// Right multiplication by Lambda0^{-1} = diag((x+i)/(x-i) on the first k columns, 1).
SampledMatrixFunction times_inverse_index(const SampledMatrixFunction& f, std::size_t k) {
    std::vector<CMatrix> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        out[j] = f[j];
        for (std::size_t q = 0; q < k; ++q) out[j].col(q) *= std::conj(f.grid().w(j));
    }
    std::optional<ClosedForm> form;
    if (f.has_closed_form()) {
        ExpRationalMatrix e = f.closed_form()->expr;
        const ExpRational factor = ExpRational::mobius_power(-1);
        for (std::size_t p = 0; p < e.dim(); ++p)
            for (std::size_t q = 0; q < k; ++q)
                if (!e(p, q).empty()) e(p, q) = e(p, q) * factor;
        form = ClosedForm{f.closed_form()->id, std::move(e)};
    }
    return {f.grid_ptr(), std::move(out), std::move(form)};
}

double min_abs_det(const SampledMatrixFunction& f) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : f.samples()) m = std::min(m, std::abs(s.determinant()));
    return m;
}

double residual_on(const SampledMatrixFunction& g1, const SampledMatrixFunction& hm, const SampledMatrixFunction& lam,
                   const SampledMatrixFunction& hp) {
    double r = 0.0;
    for (std::size_t j = 0; j < g1.size(); ++j) r = std::max(r, matrix_norm(g1[j] - hm[j] * lam[j] * hp[j]));
    return r;
}

ExpRational density_bank_entry(int which) {
    const cplx i{0.0, 1.0};
    switch (which) {
    case 0: return ExpRational::term(1.0, 0.0, -i, 1);
    case 1: return ExpRational::term(1.0, 0.0, i, 1);
    case 2: return ExpRational::term(1.0, 0.0, -i, 2);
    case 3: return ExpRational::term(1.0 / (4.0 * i), 0.0, 2.0 * i, 1) - ExpRational::term(1.0 / (4.0 * i), 0.0, -2.0 * i, 1);
    case 4: return ExpRational::term(1.0, 1.0, -i, 1);
    case 5: return ExpRational::term(1.0, -1.0, i, 1);
    case 6: return ExpRational::term(1.0, -2.0, -2.0 * i, 2);
    default: return ExpRational::term(1.0, 0.5, -3.0 * i, 1) - ExpRational::term(1.0, 0.0, -3.0 * i, 1);
    }
}

} // namespace

StrategyPtr canonical_zero_strategy() { return std::make_shared<CanonicalZero>(); }
StrategyPtr minimize_remainder_infinity_strategy() { return std::make_shared<MinimizeInfinity>(); }
StrategyPtr explicit_strategy(std::vector<CMatrix> total_constants, StrategyPtr fallback) {
    return std::make_shared<ExplicitConstants>(std::move(total_constants), std::move(fallback));
}

SampledMatrixFunction next_remainder(const StepState& state) {
    const int r = state.order();
    if (r < 1) throw InvalidArgument("next_remainder needs at least one solved step");
    const auto& first = state.n_minus_terms.front().boundary();
    SampledMatrixFunction acc = SampledMatrixFunction::zero(first.grid_ptr(), first.dim());
    if (!first.has_closed_form()) acc = acc.without_closed_form();
    for (int j = 1; j <= r; ++j) {
        const auto& minus = state.n_minus_terms[static_cast<std::size_t>(j - 1)].boundary();
        const auto& plus = state.n_plus_terms[static_cast<std::size_t>(r - j)].boundary();
        acc = subtract(acc, multiply(minus, plus));
    }
    return acc;
}

CMatrix FactorizationResult::h_minus_at(cplx z) const {
    const Eigen::Index n = lambda0.dim();
    CMatrix inv = CMatrix::Identity(n, n);
    for (std::size_t q = 0; q < profile.k; ++q) inv(q, q) = (z + kI) / (z - kI);
    CMatrix h = CMatrix::Identity(n, n);
    for (const auto& t : state.n_minus_terms) h += t.value_at(z) * inv;
    return h;
}

CMatrix FactorizationResult::h_plus_at(cplx z) const {
    const Eigen::Index n = lambda0.dim();
    CMatrix h = CMatrix::Identity(n, n);
    for (const auto& t : state.n_plus_terms) h += t.value_at(z);
    return h;
}

CMatrix FactorizationResult::h_minus_at_infinity() const {
    const Eigen::Index n = lambda0.dim();
    CMatrix h = CMatrix::Identity(n, n);
    for (const auto& t : state.n_minus_terms) h += t.at_infinity();
    return h;
}

CMatrix FactorizationResult::h_plus_at_infinity() const {
    const Eigen::Index n = lambda0.dim();
    CMatrix h = CMatrix::Identity(n, n);
    for (const auto& t : state.n_plus_terms) h += t.at_infinity();
    return h;
}

FactorizationResult run_factorization(const SampledMatrixFunction& lambda0, const SampledMatrixFunction& m0,
                                      const PartialIndexProfile& profile, const RunOptions& options,
                                      const ConstantStrategy& strategy) {
    if (!profile.stable) throw UnstableIndices("partial indices are not stable");
    if (options.order < 1) throw InvalidArgument("order must be at least 1");
    const Eigen::Index n = m0.dim();
    if (static_cast<Eigen::Index>(profile.indices.size()) != n)
        throw InvalidArgument("index profile length differs from the matrix dimension");
    if (forced_row_count(lambda0) != profile.k) throw InvalidArgument("index factor does not match the profile");

    const SampledMatrixFunction shifted = shift_density(m0, profile.s);
    FactorizationResult res{.order = 0,
                            .stopped_early = false,
                            .profile = profile,
                            .state = {},
                            .lambda0 = lambda0,
                            .lambda = shift_density(lambda0, -profile.s),
                            .g1 = m0,
                            .h_minus = lambda0,
                            .h_plus = lambda0,
                            .residual_sup = 0.0,
                            .residual_refined = std::nullopt,
                            .factor_conditions = {},
                            .diagnostics = {}};
    res.g1 = add(res.lambda, m0);
    res.state.remainders.push_back(shifted);

    for (int r = 1; r <= options.order; ++r) {
        const SampledMatrixFunction& M = res.state.remainders.back();
        StepContext ctx;
        ctx.step = r;
        ctx.remainder = &M;
        ctx.forced_rows = profile.k;
        ctx.omega_plus_at_infinity = [&M, &options]() {
            return boundary_pair(M, options.route).omega_plus.at_infinity();
        };
        const CMatrix free = strategy.free_block(ctx);
        if (free.rows() != n - static_cast<Eigen::Index>(profile.k) || free.cols() != n || !free.allFinite())
            throw InvalidArgument("constant strategy '" + strategy.name() + "' returned a malformed free block");
        StepSolution step = solve_step(lambda0, M, free, options.route);
        res.state.constants.push_back(step.constant_used);
        res.state.constants_total.push_back(step.constant_total);
        res.diagnostics.plus_step_norms.push_back(sup_norm(step.n_plus.boundary()));
        res.diagnostics.minus_step_norms.push_back(sup_norm(step.n_minus.boundary()));
        res.state.n_plus_terms.push_back(std::move(step.n_plus));
        res.state.n_minus_terms.push_back(std::move(step.n_minus));
        res.order = r;
        SampledMatrixFunction next = next_remainder(res.state);
        const double norm = sup_norm(next);
        if (!std::isfinite(norm)) throw NumericalError("remainder became non-finite at step " + std::to_string(r));
        res.diagnostics.remainder_norms.push_back(norm);
        res.state.remainders.push_back(std::move(next));
        if (norm < options.atol && r < options.order) {
            res.stopped_early = true;
            break;
        }
    }

    const auto& grid = m0.grid_ptr();
    SampledMatrixFunction hm = SampledMatrixFunction::identity(grid, n);
    SampledMatrixFunction hp = SampledMatrixFunction::identity(grid, n);
    if (!m0.has_closed_form() || options.route == OperatorRoute::Quadrature) {
        hm = hm.without_closed_form();
        hp = hp.without_closed_form();
    }
    for (std::size_t r = 0; r < res.state.n_plus_terms.size(); ++r) {
        hm = add(hm, times_inverse_index(res.state.n_minus_terms[r].boundary(), profile.k));
        hp = add(hp, res.state.n_plus_terms[r].boundary());
    }
    res.h_minus = std::move(hm);
    res.h_plus = std::move(hp);
    res.residual_sup = residual_on(res.g1, res.h_minus, res.lambda, res.h_plus);
    if (!std::isfinite(res.residual_sup)) throw NumericalError("residual is not finite");

    if (options.refine_check > 1 && res.h_minus.has_closed_form() && res.h_plus.has_closed_form() &&
        res.g1.has_closed_form() && res.lambda.has_closed_form()) {
        const GridPtr fine = make_grid(grid->size() * static_cast<std::size_t>(options.refine_check));
        res.residual_refined = residual_on(res.g1.resampled(fine), res.h_minus.resampled(fine),
                                           res.lambda.resampled(fine), res.h_plus.resampled(fine));
    }

    res.factor_conditions = check_factor_conditions(res, profile.k);

    ConvergenceDiagnostics diag = convergence_constant(shifted, options.mu, options.c_mu);
    diag.plus_step_norms = std::move(res.diagnostics.plus_step_norms);
    diag.minus_step_norms = std::move(res.diagnostics.minus_step_norms);
    diag.remainder_norms = std::move(res.diagnostics.remainder_norms);
    for (const auto& a : alpha_coefficients(options.order)) diag.alpha.push_back(a.value);
    if (options.empirical_c_mu) {
        diag.c_mu_empirical_lower_bound = empirical_c_mu_lower_bound(grid, options.mu);
        diag.c_mu_below_empirical = options.c_mu < *diag.c_mu_empirical_lower_bound;
    }
    diag.min_det_h_minus = min_abs_det(res.h_minus);
    diag.min_det_h_plus = min_abs_det(res.h_plus);
    res.diagnostics = std::move(diag);
    return res;
}

FactorConditionReport check_factor_conditions(const FactorizationResult& result, std::size_t k) {
    FactorConditionReport rep;
    const Eigen::Index n = result.lambda0.dim();
    if (k > 0 && !result.state.n_minus_terms.empty()) {
        const CMatrix h = result.h_minus_at(-kI);
        double worst = 0.0;
        for (std::size_t q = 0; q < k; ++q) {
            const CMatrix e = CMatrix::Identity(n, n).col(static_cast<Eigen::Index>(q));
            worst = std::max(worst, (h.col(static_cast<Eigen::Index>(q)) - e).cwiseAbs().maxCoeff());
        }
        rep.minus_at_minus_i_defect = worst;
    }
    rep.minus_at_minus_i_ok = rep.minus_at_minus_i_defect <= 1e-8;
    rep.infinity_product_defect =
        matrix_norm(result.h_minus_at_infinity() * result.h_plus_at_infinity() - CMatrix::Identity(n, n));
    return rep;
}

double convergence_constant_from_norm(double norm, double c_mu) {
    if (!(norm >= 0.0)) throw InvalidArgument("norm must be nonnegative");
    if (!(c_mu > 0.0)) throw InvalidArgument("C_mu must be positive");
    return norm * (1.0 + c_mu) * (1.0 + c_mu);
}

ConvergenceDiagnostics convergence_constant(const SampledMatrixFunction& m0, double mu, double c_mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw InvalidArgument("mu must lie in (0, 1)");
    if (!(c_mu > 0.0)) throw InvalidArgument("C_mu must be positive");
    ConvergenceDiagnostics d;
    d.hoelder = hoelder_norm(m0, mu);
    d.hoelder_norm_N = d.hoelder.total;
    d.C_mu_used = c_mu;
    d.A = convergence_constant_from_norm(d.hoelder_norm_N, c_mu);
    d.epsilon_bound = d.A > 0.0 ? 1.0 / d.A : std::numeric_limits<double>::infinity();
    d.small_enough = d.A < 1.0;
    return d;
}

double empirical_c_mu_lower_bound(const GridPtr& grid, double mu) {
    double best = 0.0;
    for (int which = 0; which < 8; ++which) {
        ExpRationalMatrix e(1);
        e(0, 0) = density_bank_entry(which);
        const SampledMatrixFunction f = sample(ClosedForm{"bank", std::move(e)}, grid);
        const SampledMatrixFunction s0 = singular_S0(f, OperatorRoute::ClosedForm);
        best = std::max(best, hoelder_norm(s0, mu).total / hoelder_norm(f, mu).total);
    }
    return best;
}

std::vector<AlphaCoefficient> alpha_coefficients(int r_max) {
    if (r_max < 1) throw InvalidArgument("r_max must be at least 1");
    using boost::multiprecision::cpp_rational;
    std::vector<cpp_rational> a(static_cast<std::size_t>(r_max) + 1);
    a[1] = cpp_rational(1, 2);
    for (int r = 2; r <= r_max; ++r) {
        cpp_rational s = 0;
        for (int j = 1; j < r; ++j) s += a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(r - j)];
        a[static_cast<std::size_t>(r)] = s / 2;
    }
    std::vector<AlphaCoefficient> out;
    for (int r = 1; r <= r_max; ++r) {
        const auto& v = a[static_cast<std::size_t>(r)];
        out.push_back({r, numerator(v).str(), denominator(v).str(), v.convert_to<double>()});
    }
    return out;
}

} // namespace whf
