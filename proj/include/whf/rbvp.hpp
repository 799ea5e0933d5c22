#pragma once

#include "whf/cauchy.hpp"

#include <span>
#include <vector>

namespace whf {

/// Partial indices k_1 >= ... >= k_n split as ((x-i)/(x+i))^s times rows of index 1 (first k) and 0.
struct PartialIndexProfile {
    std::vector<int> indices;
    int s = 0;
    std::size_t k = 0;
    bool stable = false;
};

/// Computes s = k_n and k = #{k_j = s + 1}. Rejects unsorted input and,
/// with UnstableIndices, spreads k_1 - k_n >= 2.
PartialIndexProfile split_indices(std::span<const int> raw);

/// Entry-wise multiplication by ((x+i)/(x-i))^s.
SampledMatrixFunction shift_density(const SampledMatrixFunction& N, int s);

/// diag(w, ..., w, 1, ..., 1) with w = (x-i)/(x+i) on the first k rows.
SampledMatrixFunction index_factor(GridPtr grid, Eigen::Index n, std::size_t k);

struct ScalarSolution {
    HalfPlaneFunction n_plus;
    HalfPlaneFunction n_minus;
    cplx constant;
};

/// ((x-i)/(x+i)) n+ + n- = m with n+ = (x+i)/(x-i)(Omega0+[m] - c), n- = -(Omega0-[m] - c).
/// c_forced must match Omega0+[m](i) = 0 to 1e-8, otherwise n+ would have a pole at i.
ScalarSolution solve_scalar_index1(const SampledMatrixFunction& m, cplx c_forced = 0.0,
                                   OperatorRoute route = OperatorRoute::Automatic);

/// n+ + n- = m with n+ = Omega0+[m] - c, n- = -Omega0-[m] + c.
ScalarSolution solve_scalar_index0(const SampledMatrixFunction& m, cplx c_free,
                                   OperatorRoute route = OperatorRoute::Automatic);

struct StepSolution {
    HalfPlaneFunction n_plus;
    HalfPlaneFunction n_minus;
    /// Constant in the canonical frame: zero on forced rows, the free block below.
    CMatrix constant_used;
    /// Total effective constant, N+(inf) = -constant_total.
    CMatrix constant_total;
    std::size_t forced_rows = 0;
};

/// Solves Lambda0+ N+ + N- = M row by row; `free_rows_constant` is the (n-k) x n block.
StepSolution solve_step(const SampledMatrixFunction& lambda0_plus, const SampledMatrixFunction& M,
                        const CMatrix& free_rows_constant, OperatorRoute route = OperatorRoute::Automatic);

/// Number of index-1 rows of a diagonal factor diag(w^{e_p}), e_p in {0, 1}, sorted descending.
std::size_t forced_row_count(const SampledMatrixFunction& lambda0_plus);

} // namespace whf
