#pragma once

#include "whf/closed_form.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace whf {

using CMatrix = Eigen::MatrixXcd;

/// w = (x - i)/(x + i); |w| = 1 for real x.
cplx mobius_forward(double x);
/// Real x with mobius_forward(x) = w, for |w| = 1 and w != 1.
double mobius_inverse(cplx w);

/// Nodes theta_j = (2j + 1) pi / N on the circle, pulled back to the real line.
/// x_j increases with j and x_{N-1-j} = -x_j.
class MobiusGrid {
public:
    explicit MobiusGrid(std::size_t n_points);

    std::size_t size() const { return x_.size(); }
    double theta(std::size_t j) const { return theta_[j]; }
    double x(std::size_t j) const { return x_[j]; }
    cplx w(std::size_t j) const { return w_[j]; }
    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& theta_nodes() const { return theta_; }

    /// Node spacing in x near the real point `x`: pi (1 + x^2) / N.
    double spacing_at(double x) const;
    /// Largest |x| on the grid.
    double extreme_abs_x() const { return std::fabs(x_.back()); }

private:
    std::vector<double> theta_;
    std::vector<double> x_;
    std::vector<cplx> w_;
};

using GridPtr = std::shared_ptr<const MobiusGrid>;

GridPtr make_grid(std::size_t n_points);

/// n x n matrix function sampled on a grid, optionally with its exact closed form.
class SampledMatrixFunction {
public:
    SampledMatrixFunction(GridPtr grid, std::vector<CMatrix> samples, std::optional<ClosedForm> closed_form = {});

    static SampledMatrixFunction zero(GridPtr grid, Eigen::Index n);
    static SampledMatrixFunction identity(GridPtr grid, Eigen::Index n);

    const MobiusGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return samples_.size(); }
    const CMatrix& operator[](std::size_t j) const { return samples_[j]; }
    const std::vector<CMatrix>& samples() const { return samples_; }

    bool has_closed_form() const { return closed_form_.has_value(); }
    const std::optional<ClosedForm>& closed_form() const { return closed_form_; }

    /// Exact evaluation at complex z; requires a closed form.
    CMatrix evaluate(cplx z) const;
    /// Limit at infinity: exact from the closed form, else the trigonometric
    /// interpolant of the samples at theta = 0.
    CMatrix at_infinity() const;

    SampledMatrixFunction entry(Eigen::Index p, Eigen::Index q) const;
    SampledMatrixFunction without_closed_form() const;
    /// Same closed form sampled on another grid.
    SampledMatrixFunction resampled(GridPtr grid) const;

private:
    GridPtr grid_;
    Eigen::Index dim_ = 0;
    std::vector<CMatrix> samples_;
    std::optional<ClosedForm> closed_form_;
};

CMatrix to_matrix(const std::vector<lcplx>& values, std::size_t n);
CMatrix to_matrix(const std::vector<cplx>& values, std::size_t n);

SampledMatrixFunction sample(const ClosedForm& form, GridPtr grid);

/// Node-wise operations; closed forms propagate when all operands carry one.
SampledMatrixFunction multiply(const SampledMatrixFunction& a, const SampledMatrixFunction& b);
SampledMatrixFunction add(const SampledMatrixFunction& a, const SampledMatrixFunction& b);
SampledMatrixFunction subtract(const SampledMatrixFunction& a, const SampledMatrixFunction& b);
SampledMatrixFunction scale(const SampledMatrixFunction& a, cplx s);
SampledMatrixFunction add_constant(const SampledMatrixFunction& a, const CMatrix& c);

/// Max absolute row sum.
double matrix_norm(const CMatrix& m);
double sup_norm(const SampledMatrixFunction& f);
/// Sup norm of the difference at matching nodes.
double sup_distance(const SampledMatrixFunction& a, const SampledMatrixFunction& b);

struct HoelderEstimate {
    double mu = 0.5;
    double sup_part = 0.0;
    double seminorm_part = 0.0;
    double total = 0.0;
};

/// Pairwise grid estimate with the compactified distance |1/(x1+i) - 1/(x2+i)|^mu.
HoelderEstimate hoelder_norm(const SampledMatrixFunction& f, double mu);

} // namespace whf
