#include "oracles.hpp"

#include "whf/cauchy.hpp"
#include "whf/errors.hpp"

#include <doctest.h>

#include <random>

using namespace whf;
using oracle::I;

namespace {

ExpRational from_oracle(const std::vector<oracle::Term>& f) {
    ExpRational r;
    for (const auto& t : f) r += ExpRational::term(t.c, t.a, t.p, t.m);
    return r;
}

SampledMatrixFunction scalar(const ExpRational& f, const GridPtr& g) {
    ExpRationalMatrix e(1);
    e(0, 0) = f;
    return sample(ClosedForm{"scalar", e}, g);
}

// Rational densities without oscillation: the quadrature route is spectrally accurate on them.
const std::vector<oracle::Term> kRational{{{1.0, 0.5}, 0.0, -I, 1},
                                          {{-2.0, 0.0}, 0.0, cplx{0.5, 2.5}, 2},
                                          {{0.0, 3.0}, 0.0, cplx{1.0, -2.0}, 1},
                                          {{0.5, 0.0}, 0.0, cplx{-0.5, 1.5}, 1}};

// Oscillating density for the closed-form route.
const std::vector<oracle::Term> kOscillating{{{1.0, 0.0}, 2.0, -I, 1},
                                             {{0.0, 1.0}, -1.5, -2.0 * I, 2},
                                             {{2.0, -1.0}, 0.7, 3.0 * I, 1},
                                             {{1.0, 1.0}, -0.3, I, 1}};

} // namespace

TEST_CASE("zero density gives zero everywhere") {
    const auto g = make_grid(256);
    const auto z = SampledMatrixFunction::zero(g, 2);
    CHECK(cauchy_off_line(z, 2.0 * I).norm() == 0.0);
    CHECK(cauchy_off_line(z, -2.0 * I).norm() == 0.0);
    CHECK(sup_norm(singular_S0(z)) == 0.0);
    const auto bp = boundary_pair(z);
    CHECK(sup_norm(bp.omega_plus) == 0.0);
    CHECK(sup_norm(bp.omega_minus) == 0.0);
    const auto js = solve_jump(z, CMatrix::Zero(2, 2));
    CHECK(sup_norm(js.a_plus.boundary()) == 0.0);
    CHECK(sup_norm(js.a_minus.boundary()) == 0.0);
}

TEST_CASE("plus function 1/(t+i): off-line values on both routes") {
    const auto g = make_grid(2048);
    const auto m = scalar(ExpRational::term(1.0, 0.0, -I, 1), g);
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature}) {
        CHECK(std::abs(cauchy_off_line(m, 2.0 * I, route)(0, 0) - I / 6.0) < 1e-12);
        CHECK(std::abs(cauchy_off_line(m, -2.0 * I, route)(0, 0) - I / 2.0) < 1e-12);
        CHECK(std::abs(cauchy_off_line(m, I, route)(0, 0)) < 1e-12);
    }
}

TEST_CASE("plus function 1/(t+i): S0 and boundary pair") {
    const auto g = make_grid(2048);
    const auto m = scalar(ExpRational::term(1.0, 0.0, -I, 1), g);
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature}) {
        const auto s0 = singular_S0(m, route);
        const auto bp = boundary_pair(m, route);
        double err_s = 0.0, err_p = 0.0, err_m = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) {
            const double x = g->x(j);
            err_s = std::max(err_s, std::abs(s0[j](0, 0) - (1.0 / (x + I) + I)));
            err_p = std::max(err_p, std::abs(bp.omega_plus[j](0, 0) - (1.0 / (x + I) - 1.0 / (2.0 * I))));
            err_m = std::max(err_m, std::abs(bp.omega_minus[j](0, 0) + 1.0 / (2.0 * I)));
        }
        CHECK(err_s < 1e-12);
        CHECK(err_p < 1e-12);
        CHECK(err_m < 1e-12);
    }
}

TEST_CASE("residue oracle agrees with both routes on rational densities") {
    const auto g = make_grid(2048);
    const auto m = scalar(from_oracle(kRational), g);
    const std::vector<cplx> points{2.0 * I, cplx{1.0, 0.5}, cplx{-3.0, 4.0}, -2.0 * I, cplx{0.5, -1.0}, cplx{-7.0, -3.0}};
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature})
        for (cplx z : points) CHECK(std::abs(cauchy_off_line(m, z, route)(0, 0) - oracle::corrected_cauchy(kRational, z)) < 1e-8);

    const auto bq = boundary_pair(m, OperatorRoute::Quadrature);
    double err = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
        err = std::max(err, std::abs(bq.omega_plus[j](0, 0) - oracle::corrected_plus_boundary(kRational, g->x(j))));
    CHECK(err < 1e-8);
}

TEST_CASE("residue oracle agrees with the closed-form route on oscillating densities") {
    const auto g = make_grid(256);
    const auto m = scalar(from_oracle(kOscillating), g);
    for (cplx z : {2.0 * I, cplx{1.0, 0.5}, cplx{-3.0, 4.0}, -0.5 * I, cplx{0.5, -1.0}})
        CHECK(std::abs(cauchy_off_line(m, z, OperatorRoute::ClosedForm)(0, 0) - oracle::corrected_cauchy(kOscillating, z)) <
              1e-12);
    const auto bp = boundary_pair(m, OperatorRoute::ClosedForm);
    double err = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
        err = std::max(err, std::abs(bp.omega_plus[j](0, 0) - oracle::corrected_plus_boundary(kOscillating, g->x(j))));
    CHECK(err < 1e-12);
}

TEST_CASE("Plemelj jump holds for random sampled densities") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    const auto g = make_grid(2048);
    std::vector<CMatrix> s(g->size(), CMatrix(2, 2));
    // Random smooth density: random low-order trigonometric polynomial in theta plus a bounded constant.
    std::vector<cplx> coef(12);
    for (auto& c : coef) c = {nd(rng), nd(rng)};
    for (std::size_t j = 0; j < g->size(); ++j) {
        const double t = g->theta(j);
        for (int p = 0; p < 4; ++p) {
            cplx v = coef[p];
            for (int n = 1; n <= 2; ++n) v += coef[4 + 2 * p + n - 1] * std::exp(I * (double(n) * t * (p % 2 ? 1.0 : -1.0)));
            s[j](p / 2, p % 2) = v;
        }
    }
    const SampledMatrixFunction m(g, s);
    const auto bp = boundary_pair(m);
    CHECK(sup_distance(subtract(bp.omega_plus, bp.omega_minus), m) < 1e-10);
    {
        const CMatrix c = CMatrix::Constant(2, 2, cplx{1.0, -2.0});
        const auto js = solve_jump(m, c);
        CHECK(sup_distance(add(js.a_plus.boundary(), js.a_minus.boundary()), m) < 1e-10);
    }
}

TEST_CASE("normalization at i and limits at infinity") {
    const auto g = make_grid(2048);
    const auto m = scalar(from_oracle(kRational), g);
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature})
        CHECK(std::abs(cauchy_off_line(m, I, route)(0, 0)) < 1e-10);
    // Omega0[m](z) tends to -Phi(i) along the imaginary axis in both half-planes.
    const cplx limit = -oracle::cauchy_integral(kRational, I);
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature}) {
        CHECK(std::abs(cauchy_off_line(m, 1e6 * I, route)(0, 0) - limit) < 1e-4);
        CHECK(std::abs(cauchy_off_line(m, -1e6 * I, route)(0, 0) - limit) < 1e-4);
    }
    // S0[m](x) tends to -2 Phi(i): at the extreme nodes it matches the oracle and sits within O(1/x) of the limit.
    const auto s0 = singular_S0(m, OperatorRoute::Quadrature);
    for (std::size_t j : {std::size_t{0}, g->size() - 1}) {
        const double x = g->x(j);
        const cplx exact = 2.0 * oracle::corrected_plus_boundary(kRational, x) - oracle::eval(kRational, x);
        CHECK(std::abs(s0[j](0, 0) - exact) < 1e-8);
        CHECK(std::abs(s0[j](0, 0) - 2.0 * limit) < 10.0 / std::fabs(x));
    }
}

TEST_CASE("constant density") {
    const auto g = make_grid(512);
    const auto k = scale(SampledMatrixFunction::identity(g, 2), cplx{2.0, 1.0});
    for (auto route : {OperatorRoute::ClosedForm, OperatorRoute::Quadrature}) {
        const auto js = solve_jump(k, CMatrix::Zero(2, 2), route);
        CHECK(sup_distance(add(js.a_plus.boundary(), js.a_minus.boundary()), k) < 1e-12);
        // The constant belongs to the minus side for the canonical operators.
        CHECK(sup_norm(js.a_plus.boundary()) < 1e-12);
    }
}

TEST_CASE("near-axis evaluation is rejected on the quadrature route") {
    const auto g = make_grid(2048);
    const auto m = scalar(from_oracle(kRational), g);
    CHECK_THROWS_AS(cauchy_off_line(m, cplx{0.0, 1e-3}, OperatorRoute::Quadrature), AccuracyError);
    CHECK_THROWS_AS(cauchy_off_line(m, cplx{3.0, -1e-2}, OperatorRoute::Quadrature), AccuracyError);
    CHECK_THROWS_AS(cauchy_off_line(m, 2.0, OperatorRoute::Quadrature), InvalidArgument);
    CHECK_NOTHROW(cauchy_off_line(m, cplx{0.0, 1e-3}, OperatorRoute::ClosedForm));
}

TEST_CASE("half-plane functions evaluate off the line") {
    const auto g = make_grid(1024);
    const auto m = scalar(from_oracle(kOscillating), g);
    const CMatrix c = CMatrix::Constant(1, 1, cplx{0.25, 0.5});
    const auto js = solve_jump(m, c);
    const cplx zu{0.3, 0.8}, zl{-0.4, -1.2};
    CHECK(std::abs(js.a_plus.value_at(zu)(0, 0) - (oracle::corrected_cauchy(kOscillating, zu) - c(0, 0))) < 1e-12);
    CHECK(std::abs(js.a_minus.value_at(zl)(0, 0) - (-oracle::corrected_cauchy(kOscillating, zl) + c(0, 0))) < 1e-12);
    CHECK_THROWS_AS(js.a_plus.value_at(zl), InvalidArgument);
    CHECK(std::abs(js.a_plus.at_infinity()(0, 0) - (-oracle::cauchy_integral(kOscillating, I) - c(0, 0))) < 1e-12);
}
