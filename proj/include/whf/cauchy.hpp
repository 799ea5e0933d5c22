#pragma once

#include "whf/grid.hpp"

#include <memory>
#include <vector>

namespace whf {

/// How Cauchy transforms are computed. Automatic uses the closed form when the
/// density carries one and quadrature otherwise.
enum class OperatorRoute { Automatic, Quadrature, ClosedForm };

enum class HalfPlane { Upper, Lower };

/// True when the closed-form route applies to `m` under `route`.
bool uses_closed_form(const SampledMatrixFunction& m, OperatorRoute route);

/// Omega0[m](z) for Im z != 0; Omega0+[m](i) = 0.
CMatrix cauchy_off_line(const SampledMatrixFunction& m, cplx z, OperatorRoute route = OperatorRoute::Automatic);

/// Omega0[m](z)/zeta with zeta = (z - i)/(z + i), for z in the upper half-plane.
/// Finite at z = i, where it equals the first circle coefficient of m.
CMatrix cauchy_off_line_over_zeta(const SampledMatrixFunction& m, cplx z,
                                  OperatorRoute route = OperatorRoute::Automatic);

struct BoundaryPair {
    SampledMatrixFunction omega_plus;
    SampledMatrixFunction omega_minus;
};

/// Boundary values Omega0+[m] and Omega0-[m]; omega_plus - omega_minus = m node-wise.
BoundaryPair boundary_pair(const SampledMatrixFunction& m, OperatorRoute route = OperatorRoute::Automatic);

/// S0[m] = Omega0+[m] + Omega0-[m] on the grid.
SampledMatrixFunction singular_S0(const SampledMatrixFunction& m, OperatorRoute route = OperatorRoute::Automatic);

/// Closed forms of Omega0+ and Omega0- for an exp-rational matrix.
struct ClosedFormPair {
    ExpRationalMatrix plus;
    ExpRationalMatrix minus;
};
ClosedFormPair closed_form_cauchy(const ExpRationalMatrix& m);

/// diag(r)(sign * Omega0[density] + shift), where r_p = (z + i)/(z - i) on
/// divided rows and 1 elsewhere. Boundary samples are stored explicitly.
class HalfPlaneFunction {
public:
    HalfPlaneFunction(HalfPlane half_plane, SampledMatrixFunction boundary,
                      std::shared_ptr<const SampledMatrixFunction> density, double sign, CMatrix constant_shift,
                      std::vector<bool> divided_rows, OperatorRoute route);

    HalfPlane half_plane() const { return half_plane_; }
    const SampledMatrixFunction& boundary() const { return boundary_; }
    const SampledMatrixFunction& density() const { return *density_; }
    const CMatrix& constant_shift() const { return shift_; }
    const std::vector<bool>& divided_rows() const { return divided_; }
    Eigen::Index dim() const { return boundary_.dim(); }

    /// Value at z strictly inside the half-plane.
    CMatrix value_at(cplx z) const;
    /// Limit at infinity.
    CMatrix at_infinity() const;

private:
    HalfPlane half_plane_;
    SampledMatrixFunction boundary_;
    std::shared_ptr<const SampledMatrixFunction> density_;
    double sign_;
    CMatrix shift_;
    std::vector<bool> divided_;
    OperatorRoute route_;
};

struct JumpSolution {
    HalfPlaneFunction a_plus;
    HalfPlaneFunction a_minus;
    CMatrix constant;
};

/// a_plus = Omega0+[M] - C, a_minus = -Omega0-[M] + C, so a_plus + a_minus = M.
JumpSolution solve_jump(const SampledMatrixFunction& M, const CMatrix& C,
                        OperatorRoute route = OperatorRoute::Automatic);

} // namespace whf
