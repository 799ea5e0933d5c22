#include "whf/grid.hpp"

#include "whf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace whf {

cplx mobius_forward(double x) {
    if (std::fabs(x) > 1e8) {
        const double t = 1.0 / x;
        return cplx(1.0 - t * t, -2.0 * t) / (1.0 + t * t);
    }
    const double d = x * x + 1.0;
    return {(x * x - 1.0) / d, -2.0 * x / d};
}

double mobius_inverse(cplx w) {
    // w = e^{i theta} gives x = -cot(theta/2); pick the non-cancelling half-angle form.
    const double u = w.real(), v = w.imag();
    if (u < 0.0) return -v / (1.0 - u);
    return -(1.0 + u) / v;
}

MobiusGrid::MobiusGrid(std::size_t n_points) {
    if (n_points < 2) throw InvalidArgument("grid needs at least 2 points");
    const double n = static_cast<double>(n_points);
    theta_.resize(n_points);
    x_.resize(n_points);
    w_.resize(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        const double th = (2.0 * static_cast<double>(j) + 1.0) * std::numbers::pi / n;
        theta_[j] = th;
        w_[j] = std::polar(1.0, th);
    }
    // Symmetric pairs computed once so that x_{N-1-j} = -x_j exactly.
    for (std::size_t j = 0; j < (n_points + 1) / 2; ++j) {
        const double half = 0.5 * theta_[j];
        const double xj = -std::cos(half) / std::sin(half);
        x_[j] = xj;
        x_[n_points - 1 - j] = -xj;
    }
    if (n_points % 2 == 1) x_[n_points / 2] = 0.0;
}

double MobiusGrid::spacing_at(double x) const {
    return std::numbers::pi * (1.0 + x * x) / static_cast<double>(size());
}

GridPtr make_grid(std::size_t n_points) { return std::make_shared<const MobiusGrid>(n_points); }

SampledMatrixFunction::SampledMatrixFunction(GridPtr grid, std::vector<CMatrix> samples,
                                             std::optional<ClosedForm> closed_form)
    : grid_(std::move(grid)), samples_(std::move(samples)), closed_form_(std::move(closed_form)) {
    if (!grid_) throw InvalidArgument("sampled function needs a grid");
    if (samples_.size() != grid_->size()) throw InvalidArgument("sample count does not match grid");
    dim_ = samples_.empty() ? 0 : samples_.front().rows();
    for (const auto& s : samples_) {
        if (s.rows() != dim_ || s.cols() != dim_) throw InvalidArgument("samples must be square of equal size");
        if (!s.allFinite()) throw NumericalError("non-finite sample value");
    }
    if (closed_form_ && static_cast<Eigen::Index>(closed_form_->expr.dim()) != dim_)
        throw InvalidArgument("closed form dimension does not match samples");
}

SampledMatrixFunction SampledMatrixFunction::zero(GridPtr grid, Eigen::Index n) {
    std::vector<CMatrix> s(grid->size(), CMatrix::Zero(n, n));
    ClosedForm form{"zero", ExpRationalMatrix(static_cast<std::size_t>(n))};
    return {std::move(grid), std::move(s), std::move(form)};
}

SampledMatrixFunction SampledMatrixFunction::identity(GridPtr grid, Eigen::Index n) {
    std::vector<CMatrix> s(grid->size(), CMatrix::Identity(n, n));
    ClosedForm form{"identity", ExpRationalMatrix::identity(static_cast<std::size_t>(n))};
    return {std::move(grid), std::move(s), std::move(form)};
}

CMatrix SampledMatrixFunction::evaluate(cplx z) const {
    if (!closed_form_) throw InvalidArgument("evaluation off the grid needs a closed form");
    return to_matrix(closed_form_->expr.evaluate(lcplx(z)), static_cast<std::size_t>(dim_));
}

CMatrix SampledMatrixFunction::at_infinity() const {
    if (closed_form_) return to_matrix(closed_form_->expr.at_infinity(), static_cast<std::size_t>(dim_));
    // Interpolant sum_{|n|<=K} c_n e^{in theta} at theta = 0 equals
    // (1/N) sum_k f_k D_K(theta_k) with the Dirichlet kernel D_K.
    const std::size_t n = size();
    const double K = n % 2 == 0 ? static_cast<double>(n / 2) - 1.0 : static_cast<double>(n - 1) / 2.0;
    CMatrix acc = CMatrix::Zero(dim_, dim_);
    for (std::size_t k = 0; k < n; ++k) {
        const double th = grid_->theta(k);
        const double kernel = std::sin((2.0 * K + 1.0) * 0.5 * th) / std::sin(0.5 * th);
        acc += kernel * samples_[k];
    }
    return acc / static_cast<double>(n);
}

SampledMatrixFunction SampledMatrixFunction::entry(Eigen::Index p, Eigen::Index q) const {
    std::vector<CMatrix> s(size(), CMatrix(1, 1));
    for (std::size_t j = 0; j < size(); ++j) s[j](0, 0) = samples_[j](p, q);
    std::optional<ClosedForm> form;
    if (closed_form_) {
        ExpRationalMatrix e(1);
        e(0, 0) = closed_form_->expr(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
        form = ClosedForm{closed_form_->id + "[" + std::to_string(p) + "," + std::to_string(q) + "]", std::move(e)};
    }
    return {grid_, std::move(s), std::move(form)};
}

SampledMatrixFunction SampledMatrixFunction::without_closed_form() const { return {grid_, samples_, std::nullopt}; }

SampledMatrixFunction SampledMatrixFunction::resampled(GridPtr grid) const {
    if (!closed_form_) throw InvalidArgument("resampling needs a closed form");
    return sample(*closed_form_, std::move(grid));
}

CMatrix to_matrix(const std::vector<lcplx>& values, std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            const lcplx v = values[p * n + q];
            m(p, q) = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
        }
    return m;
}

CMatrix to_matrix(const std::vector<cplx>& values, std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) m(p, q) = values[p * n + q];
    return m;
}

SampledMatrixFunction sample(const ClosedForm& form, GridPtr grid) {
    const std::size_t n = form.expr.dim();
    std::vector<CMatrix> s(grid->size());
    for (std::size_t j = 0; j < grid->size(); ++j) {
        s[j] = to_matrix(form.expr.evaluate(lcplx(grid->x(j))), n);
        if (!s[j].allFinite()) throw NumericalError("closed form '" + form.id + "' is not finite at a grid node");
    }
    return {std::move(grid), std::move(s), form};
}

namespace {

void require_same_grid(const SampledMatrixFunction& a, const SampledMatrixFunction& b) {
    if (a.grid_ptr() != b.grid_ptr() && a.grid().x_nodes() != b.grid().x_nodes())
        throw InvalidArgument("operands live on different grids");
    if (a.dim() != b.dim()) throw InvalidArgument("operand dimensions differ");
}

} // namespace

SampledMatrixFunction multiply(const SampledMatrixFunction& a, const SampledMatrixFunction& b) {
    require_same_grid(a, b);
    std::vector<CMatrix> s(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) s[j] = a[j] * b[j];
    std::optional<ClosedForm> form;
    if (a.has_closed_form() && b.has_closed_form())
        form = ClosedForm{"product", a.closed_form()->expr * b.closed_form()->expr};
    return {a.grid_ptr(), std::move(s), std::move(form)};
}

SampledMatrixFunction add(const SampledMatrixFunction& a, const SampledMatrixFunction& b) {
    require_same_grid(a, b);
    std::vector<CMatrix> s(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) s[j] = a[j] + b[j];
    std::optional<ClosedForm> form;
    if (a.has_closed_form() && b.has_closed_form())
        form = ClosedForm{"sum", a.closed_form()->expr + b.closed_form()->expr};
    return {a.grid_ptr(), std::move(s), std::move(form)};
}

SampledMatrixFunction subtract(const SampledMatrixFunction& a, const SampledMatrixFunction& b) {
    require_same_grid(a, b);
    std::vector<CMatrix> s(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) s[j] = a[j] - b[j];
    std::optional<ClosedForm> form;
    if (a.has_closed_form() && b.has_closed_form())
        form = ClosedForm{"difference", a.closed_form()->expr - b.closed_form()->expr};
    return {a.grid_ptr(), std::move(s), std::move(form)};
}

SampledMatrixFunction scale(const SampledMatrixFunction& a, cplx s) {
    std::vector<CMatrix> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = s * a[j];
    std::optional<ClosedForm> form;
    if (a.has_closed_form()) form = ClosedForm{a.closed_form()->id, a.closed_form()->expr * lcplx(s)};
    return {a.grid_ptr(), std::move(out), std::move(form)};
}

SampledMatrixFunction add_constant(const SampledMatrixFunction& a, const CMatrix& c) {
    std::vector<CMatrix> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + c;
    std::optional<ClosedForm> form;
    if (a.has_closed_form()) {
        const std::size_t n = static_cast<std::size_t>(a.dim());
        ExpRationalMatrix e = a.closed_form()->expr;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (c(p, q) != cplx{}) e(p, q) += ExpRational::constant(c(p, q));
        form = ClosedForm{a.closed_form()->id, std::move(e)};
    }
    return {a.grid_ptr(), std::move(out), std::move(form)};
}

double matrix_norm(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

double sup_norm(const SampledMatrixFunction& f) {
    double s = 0.0;
    for (const auto& m : f.samples()) s = std::max(s, matrix_norm(m));
    return s;
}

double sup_distance(const SampledMatrixFunction& a, const SampledMatrixFunction& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, matrix_norm(a[j] - b[j]));
    return s;
}

HoelderEstimate hoelder_norm(const SampledMatrixFunction& f, double mu) {
    if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("Hoelder exponent mu must lie in (0, 1]");
    HoelderEstimate est;
    est.mu = mu;
    est.sup_part = sup_norm(f);
    const std::size_t n = f.size();
    const Eigen::Index d = f.dim();
    // Flattened samples for the O(N^2) pair scan.
    std::vector<cplx> flat(n * static_cast<std::size_t>(d * d));
    for (std::size_t j = 0; j < n; ++j)
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = 0; q < d; ++q) flat[(j * d + p) * d + q] = f[j](p, q);
    double semi = 0.0;
    const auto& theta = f.grid().theta_nodes();
    for (std::size_t a = 0; a < n; ++a) {
        const cplx* fa = &flat[a * d * d];
        for (std::size_t b = a + 1; b < n; ++b) {
            const cplx* fb = &flat[b * d * d];
            double norm = 0.0;
            for (Eigen::Index p = 0; p < d; ++p) {
                double row = 0.0;
                for (Eigen::Index q = 0; q < d; ++q) row += std::abs(fa[p * d + q] - fb[p * d + q]);
                norm = std::max(norm, row);
            }
            if (norm == 0.0) continue;
            // |1/(x1+i) - 1/(x2+i)| = |w1 - w2|/2 = |sin((theta1 - theta2)/2)|.
            const double dist = std::fabs(std::sin(0.5 * (theta[a] - theta[b])));
            semi = std::max(semi, norm / std::pow(dist, mu));
        }
    }
    est.seminorm_part = semi;
    est.total = est.sup_part + est.seminorm_part;
    return est;
}

} // namespace whf
