#include "whf/rbvp.hpp"

#include "whf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace whf {

namespace {

constexpr double kForcedTol = 1e-8;

cplx int_power(cplx base, int s) {
    cplx r{1.0, 0.0};
    const cplx b = s >= 0 ? base : 1.0 / base;
    for (int j = 0; j < std::abs(s); ++j) r *= b;
    return r;
}

std::optional<ClosedForm> times_mobius(const std::optional<ClosedForm>& form, int power) {
    if (!form) return std::nullopt;
    const ExpRational factor = ExpRational::mobius_power(power);
    ExpRationalMatrix e = form->expr;
    for (std::size_t p = 0; p < e.dim(); ++p)
        for (std::size_t q = 0; q < e.dim(); ++q)
            if (!e(p, q).empty()) e(p, q) = factor * e(p, q);
    return ClosedForm{form->id, std::move(e)};
}

} // namespace

PartialIndexProfile split_indices(std::span<const int> raw) {
    if (raw.empty()) throw InvalidArgument("partial index list is empty");
    if (!std::is_sorted(raw.begin(), raw.end(), std::greater<>()))
        throw InvalidArgument("partial indices must be sorted in descending order");
    PartialIndexProfile prof;
    prof.indices.assign(raw.begin(), raw.end());
    prof.s = raw.back();
    prof.stable = raw.front() - raw.back() <= 1;
    if (!prof.stable)
        throw UnstableIndices("partial indices are not stable: spread " + std::to_string(raw.front() - raw.back()) +
                              " exceeds 1");
    prof.k = static_cast<std::size_t>(std::count(raw.begin(), raw.end(), prof.s + 1));
    return prof;
}

SampledMatrixFunction shift_density(const SampledMatrixFunction& N, int s) {
    if (s == 0) return N;
    std::vector<CMatrix> out(N.size());
    for (std::size_t j = 0; j < N.size(); ++j) out[j] = int_power(std::conj(N.grid().w(j)), s) * N[j];
    return {N.grid_ptr(), std::move(out), times_mobius(N.closed_form(), -s)};
}

SampledMatrixFunction index_factor(GridPtr grid, Eigen::Index n, std::size_t k) {
    if (k > static_cast<std::size_t>(n)) throw InvalidArgument("more index-1 rows than the dimension");
    std::vector<CMatrix> s(grid->size(), CMatrix::Identity(n, n));
    for (std::size_t j = 0; j < grid->size(); ++j)
        for (std::size_t p = 0; p < k; ++p) s[j](p, p) = grid->w(j);
    ExpRationalMatrix e = ExpRationalMatrix::identity(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < k; ++p) e(p, p) = ExpRational::mobius_power(1);
    return {std::move(grid), std::move(s), ClosedForm{"index_factor", std::move(e)}};
}

std::size_t forced_row_count(const SampledMatrixFunction& lambda0_plus) {
    const Eigen::Index n = lambda0_plus.dim();
    const MobiusGrid& grid = lambda0_plus.grid();
    std::size_t k = 0;
    bool seen_zero = false;
    for (Eigen::Index p = 0; p < n; ++p) {
        bool is_one = true, is_w = true;
        for (std::size_t j = 0; j < lambda0_plus.size(); ++j) {
            const CMatrix& m = lambda0_plus[j];
            for (Eigen::Index q = 0; q < n; ++q)
                if (q != p && std::abs(m(p, q)) > 1e-12) throw InvalidArgument("index factor must be diagonal");
            is_one = is_one && std::abs(m(p, p) - 1.0) <= 1e-12;
            is_w = is_w && std::abs(m(p, p) - grid.w(j)) <= 1e-12;
        }
        if (is_w) {
            if (seen_zero) throw InvalidArgument("index-1 rows must come first");
            ++k;
        } else if (is_one) {
            seen_zero = true;
        } else {
            throw InvalidArgument("index factor exponent outside {0, 1}");
        }
    }
    return k;
}

ScalarSolution solve_scalar_index1(const SampledMatrixFunction& m, cplx c_forced, OperatorRoute route) {
    if (m.dim() != 1) throw InvalidArgument("scalar solver needs a 1 x 1 density");
    const cplx at_i = cauchy_off_line(m, {0.0, 1.0}, route)(0, 0);
    if (std::abs(at_i - c_forced) > kForcedTol)
        throw InvalidArgument("forced constant differs from Omega0+[m](i); n+ would have a pole at z = i");
    auto pair = boundary_pair(m, route);
    auto density = std::make_shared<const SampledMatrixFunction>(m);
    std::vector<CMatrix> plus(m.size()), minus(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        plus[j] = std::conj(m.grid().w(j)) * pair.omega_plus[j];
        minus[j] = -pair.omega_minus[j];
    }
    SampledMatrixFunction plus_b(m.grid_ptr(), std::move(plus), times_mobius(pair.omega_plus.closed_form(), -1));
    SampledMatrixFunction minus_b(m.grid_ptr(), std::move(minus),
                                  pair.omega_minus.closed_form()
                                      ? std::optional<ClosedForm>(ClosedForm{
                                            "n_minus", pair.omega_minus.closed_form()->expr * lcplx(-1.0L)})
                                      : std::nullopt);
    const CMatrix zero = CMatrix::Zero(1, 1);
    return {HalfPlaneFunction(HalfPlane::Upper, std::move(plus_b), density, 1.0, zero, {true}, route),
            HalfPlaneFunction(HalfPlane::Lower, std::move(minus_b), density, -1.0, zero, {false}, route), 0.0};
}

ScalarSolution solve_scalar_index0(const SampledMatrixFunction& m, cplx c_free, OperatorRoute route) {
    if (m.dim() != 1) throw InvalidArgument("scalar solver needs a 1 x 1 density");
    CMatrix c(1, 1);
    c(0, 0) = c_free;
    auto jump = solve_jump(m, c, route);
    return {std::move(jump.a_plus), std::move(jump.a_minus), c_free};
}

StepSolution solve_step(const SampledMatrixFunction& lambda0_plus, const SampledMatrixFunction& M,
                        const CMatrix& free_rows_constant, OperatorRoute route) {
    const Eigen::Index n = M.dim();
    if (lambda0_plus.dim() != n) throw InvalidArgument("index factor and remainder dimensions differ");
    const std::size_t k = forced_row_count(lambda0_plus);
    const Eigen::Index free_rows = n - static_cast<Eigen::Index>(k);
    if (free_rows_constant.rows() != free_rows || free_rows_constant.cols() != n)
        throw InvalidArgument("free-row constant block must be (n - k) x n");
    if (!free_rows_constant.allFinite()) throw NumericalError("free-row constant block is not finite");

    CMatrix c_can = CMatrix::Zero(n, n);
    c_can.bottomRows(free_rows) = free_rows_constant;

    std::vector<CMatrix> plus(M.size(), CMatrix(n, n)), minus(M.size(), CMatrix(n, n));
    const bool closed = uses_closed_form(M, route);
    ExpRationalMatrix plus_expr(static_cast<std::size_t>(n)), minus_expr(static_cast<std::size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q) {
            const SampledMatrixFunction m = M.entry(p, q);
            const ScalarSolution sol = static_cast<std::size_t>(p) < k
                                           ? solve_scalar_index1(m, 0.0, route)
                                           : solve_scalar_index0(m, c_can(p, q), route);
            for (std::size_t j = 0; j < M.size(); ++j) {
                plus[j](p, q) = sol.n_plus.boundary()[j](0, 0);
                minus[j](p, q) = sol.n_minus.boundary()[j](0, 0);
            }
            if (closed) {
                plus_expr(p, q) = sol.n_plus.boundary().closed_form()->expr(0, 0);
                minus_expr(p, q) = sol.n_minus.boundary().closed_form()->expr(0, 0);
            }
        }
    std::optional<ClosedForm> plus_form, minus_form;
    if (closed) {
        plus_form = ClosedForm{"n_plus", std::move(plus_expr)};
        minus_form = ClosedForm{"n_minus", std::move(minus_expr)};
    }
    auto density = std::make_shared<const SampledMatrixFunction>(M);
    std::vector<bool> divided(static_cast<std::size_t>(n), false);
    for (std::size_t p = 0; p < k; ++p) divided[p] = true;
    HalfPlaneFunction n_plus(HalfPlane::Upper, SampledMatrixFunction(M.grid_ptr(), std::move(plus), plus_form),
                             density, 1.0, -c_can, divided, route);
    HalfPlaneFunction n_minus(HalfPlane::Lower, SampledMatrixFunction(M.grid_ptr(), std::move(minus), minus_form),
                              density, -1.0, c_can, std::vector<bool>(static_cast<std::size_t>(n), false), route);
    CMatrix total = -n_plus.at_infinity();
    return {std::move(n_plus), std::move(n_minus), std::move(c_can), std::move(total), k};
}

} // namespace whf
