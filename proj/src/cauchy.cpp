#include "whf/cauchy.hpp"

#include "whf/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace whf {

namespace {

constexpr cplx kI{0.0, 1.0};

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Nodal values of the plus projection sum_{n>=1} c_n w^n of the trigonometric
// interpolant through `f`; the Nyquist mode is shared equally.
std::vector<cplx> plus_projection(const std::vector<cplx>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> in(f), spec(f.size()), out(f.size());
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pspec = reinterpret_cast<fftw_complex*>(spec.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard lock(planner_mutex());
        fwd = fftw_plan_dft_1d(n, pin, pspec, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, pspec, pout, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const double inv_n = 1.0 / static_cast<double>(n);
    const int top = n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2;
    for (int k = 0; k < n; ++k) {
        double weight = 0.0;
        if (k >= 1 && k <= top) weight = 1.0;
        if (n % 2 == 0 && k == n / 2) weight = 0.5;
        spec[k] *= weight * inv_n;
    }
    fftw_execute(bwd);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return out;
}

cplx to_zeta(cplx z) { return (z - kI) / (z + kI); }

void check_distance(const MobiusGrid& grid, cplx z) {
    const double spacing = std::numbers::pi * (1.0 + z.real() * z.real()) / static_cast<double>(grid.size());
    if (std::fabs(z.imag()) < 10.0 * spacing)
        throw AccuracyError("evaluation point too close to the real line for the grid spacing");
}

// Trapezoid rule in circle coordinates. The limit at infinity is subtracted from the
// density and its transform added back exactly, which keeps points near w = 1 accurate.
CMatrix quadrature_off_line(const SampledMatrixFunction& m, cplx z, bool over_zeta) {
    if (z.imag() == 0.0) throw InvalidArgument("off-line evaluation needs Im z != 0");
    const MobiusGrid& grid = m.grid();
    check_distance(grid, z);
    const cplx zeta = to_zeta(z);
    const CMatrix c = m.at_infinity();
    CMatrix acc = CMatrix::Zero(m.dim(), m.dim());
    const bool inside = std::abs(zeta) < 1.0;
    const cplx u = inside ? cplx{} : 1.0 / zeta;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx tau = grid.w(k);
        cplx kernel;
        if (over_zeta) kernel = 1.0 / (tau - zeta);
        else if (inside) kernel = zeta / (tau - zeta);
        else kernel = 1.0 / (tau * u - 1.0);
        acc += kernel * (m[k] - c);
    }
    acc /= static_cast<double>(grid.size());
    if (!inside) acc -= over_zeta ? CMatrix(c / zeta) : c;
    return acc;
}

} // namespace

bool uses_closed_form(const SampledMatrixFunction& m, OperatorRoute route) {
    switch (route) {
    case OperatorRoute::Quadrature: return false;
    case OperatorRoute::ClosedForm:
        if (!m.has_closed_form()) throw InvalidArgument("closed-form route requested for a density without closed form");
        return true;
    case OperatorRoute::Automatic: return m.has_closed_form();
    }
    return false;
}

ClosedFormPair closed_form_cauchy(const ExpRationalMatrix& m) {
    const std::size_t n = m.dim();
    ClosedFormPair out{ExpRationalMatrix(n), ExpRationalMatrix(n)};
    constexpr lcplx i_ld{0.0L, 1.0L};
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            auto split = split_half_planes(m(p, q));
            const lcplx at_i = split.plus.evaluate(i_ld);
            if (!std::isfinite(std::abs(at_i))) throw NumericalError("plus part is singular at z = i");
            const ExpRational shift = ExpRational::from_terms({{at_i, 0.0L, {}, 0}});
            out.plus(p, q) = split.plus - shift;
            out.minus(p, q) = -(split.minus + shift);
        }
    return out;
}

CMatrix cauchy_off_line(const SampledMatrixFunction& m, cplx z, OperatorRoute route) {
    if (z.imag() == 0.0) throw InvalidArgument("off-line evaluation needs Im z != 0");
    if (uses_closed_form(m, route)) {
        const auto pair = closed_form_cauchy(m.closed_form()->expr);
        const auto& expr = z.imag() > 0.0 ? pair.plus : pair.minus;
        return to_matrix(expr.evaluate(lcplx(z)), expr.dim());
    }
    return quadrature_off_line(m, z, false);
}

CMatrix cauchy_off_line_over_zeta(const SampledMatrixFunction& m, cplx z, OperatorRoute route) {
    if (!(z.imag() > 0.0)) throw InvalidArgument("over-zeta evaluation is defined in the upper half-plane");
    if (uses_closed_form(m, route)) {
        const auto pair = closed_form_cauchy(m.closed_form()->expr);
        ExpRationalMatrix divided(pair.plus.dim());
        const ExpRational factor = ExpRational::mobius_power(-1);
        for (std::size_t p = 0; p < divided.dim(); ++p)
            for (std::size_t q = 0; q < divided.dim(); ++q) divided(p, q) = factor * pair.plus(p, q);
        return to_matrix(divided.evaluate(lcplx(z)), divided.dim());
    }
    return quadrature_off_line(m, z, true);
}

BoundaryPair boundary_pair(const SampledMatrixFunction& m, OperatorRoute route) {
    const std::size_t nodes = m.size();
    const Eigen::Index d = m.dim();
    std::vector<CMatrix> plus(nodes, CMatrix(d, d)), minus(nodes, CMatrix(d, d));
    if (uses_closed_form(m, route)) {
        auto pair = closed_form_cauchy(m.closed_form()->expr);
        for (std::size_t j = 0; j < nodes; ++j) {
            plus[j] = to_matrix(pair.plus.evaluate(lcplx(m.grid().x(j))), static_cast<std::size_t>(d));
            minus[j] = plus[j] - m[j];
        }
        return {SampledMatrixFunction(m.grid_ptr(), std::move(plus), ClosedForm{"omega0_plus", std::move(pair.plus)}),
                SampledMatrixFunction(m.grid_ptr(), std::move(minus),
                                      ClosedForm{"omega0_minus", std::move(pair.minus)})};
    }
    std::vector<cplx> column(nodes);
    for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q) {
            for (std::size_t j = 0; j < nodes; ++j) column[j] = m[j](p, q);
            const auto proj = plus_projection(column);
            for (std::size_t j = 0; j < nodes; ++j) plus[j](p, q) = proj[j];
        }
    for (std::size_t j = 0; j < nodes; ++j) minus[j] = plus[j] - m[j];
    return {SampledMatrixFunction(m.grid_ptr(), std::move(plus)), SampledMatrixFunction(m.grid_ptr(), std::move(minus))};
}

SampledMatrixFunction singular_S0(const SampledMatrixFunction& m, OperatorRoute route) {
    auto pair = boundary_pair(m, route);
    return add(pair.omega_plus, pair.omega_minus);
}

HalfPlaneFunction::HalfPlaneFunction(HalfPlane half_plane, SampledMatrixFunction boundary,
                                     std::shared_ptr<const SampledMatrixFunction> density, double sign,
                                     CMatrix constant_shift, std::vector<bool> divided_rows, OperatorRoute route)
    : half_plane_(half_plane),
      boundary_(std::move(boundary)),
      density_(std::move(density)),
      sign_(sign),
      shift_(std::move(constant_shift)),
      divided_(std::move(divided_rows)),
      route_(route) {
    if (!density_) throw InvalidArgument("half-plane function needs its density");
    if (divided_.empty()) divided_.assign(static_cast<std::size_t>(boundary_.dim()), false);
    if (static_cast<Eigen::Index>(divided_.size()) != boundary_.dim())
        throw InvalidArgument("divided-row mask has wrong length");
    for (std::size_t p = 0; p < divided_.size(); ++p) {
        if (!divided_[p]) continue;
        if (half_plane_ != HalfPlane::Upper) throw InvalidArgument("only upper half-plane rows can be divided");
        if (shift_.row(static_cast<Eigen::Index>(p)).norm() != 0.0)
            throw InvalidArgument("divided rows must have zero constant shift");
    }
}

CMatrix HalfPlaneFunction::value_at(cplx z) const {
    const bool upper = half_plane_ == HalfPlane::Upper;
    if (upper ? !(z.imag() > 0.0) : !(z.imag() < 0.0))
        throw InvalidArgument("evaluation point is outside the half-plane of definition");
    if (route_ != OperatorRoute::Quadrature && boundary_.has_closed_form()) return boundary_.evaluate(z);
    if (route_ == OperatorRoute::ClosedForm) throw InvalidArgument("closed form unavailable for this function");
    CMatrix value = sign_ * quadrature_off_line(*density_, z, false) + shift_;
    bool any_divided = false;
    for (bool b : divided_) any_divided = any_divided || b;
    if (any_divided) {
        const CMatrix over = quadrature_off_line(*density_, z, true);
        for (std::size_t p = 0; p < divided_.size(); ++p)
            if (divided_[p]) value.row(static_cast<Eigen::Index>(p)) = sign_ * over.row(static_cast<Eigen::Index>(p));
    }
    return value;
}

CMatrix HalfPlaneFunction::at_infinity() const { return boundary_.at_infinity(); }

JumpSolution solve_jump(const SampledMatrixFunction& M, const CMatrix& C, OperatorRoute route) {
    auto pair = boundary_pair(M, route);
    auto density = std::make_shared<const SampledMatrixFunction>(M);
    const std::vector<bool> none(static_cast<std::size_t>(M.dim()), false);
    HalfPlaneFunction plus(HalfPlane::Upper, add_constant(pair.omega_plus, -C), density, 1.0, -C, none, route);
    HalfPlaneFunction minus(HalfPlane::Lower, add_constant(scale(pair.omega_minus, -1.0), C), density, -1.0, C, none,
                            route);
    return {std::move(plus), std::move(minus), C};
}

} // namespace whf
