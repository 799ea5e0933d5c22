#pragma once

// Reference values computed independently of the library: residue calculus
// for Cauchy integrals, direct formulas, brute-force scans.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/// c e^{i a t} (t - p)^{-m}, m in {1, 2}.
struct Term {
    cplx c;
    double a;
    cplx p;
    int m;
};

inline cplx eval(const std::vector<Term>& f, cplx t) {
    cplx s = 0.0;
    for (const auto& term : f) s += term.c * std::exp(I * term.a * t) / std::pow(t - term.p, term.m);
    return s;
}

/// (1/(2 pi i)) \int_R f(t)/(t - z) dt by closing the contour (Jordan's lemma):
/// upward for a >= 0, downward for a < 0.
inline cplx cauchy_integral(const std::vector<Term>& f, cplx z) {
    cplx s = 0.0;
    for (const auto& t : f) {
        const bool up = t.a >= 0.0;
        const double orient = up ? 1.0 : -1.0;
        auto inside = [&](cplx w) { return up ? w.imag() > 0.0 : w.imag() < 0.0; };
        if (inside(z)) s += orient * t.c * std::exp(I * t.a * z) / std::pow(z - t.p, t.m);
        if (inside(t.p)) {
            const cplx e = std::exp(I * t.a * t.p);
            const cplx d = t.p - z;
            if (t.m == 1) s += orient * t.c * e / d;
            else s += orient * t.c * e * (I * t.a / d - 1.0 / (d * d));
        }
    }
    return s;
}

/// Corrected transform (z - i)/(2 pi i) \int f/((t - i)(t - z)) = Phi(z) - Phi(i).
inline cplx corrected_cauchy(const std::vector<Term>& f, cplx z) { return cauchy_integral(f, z) - cauchy_integral(f, I); }

/// Plus boundary value Omega0+[f](x): limit from above.
inline cplx corrected_plus_boundary(const std::vector<Term>& f, double x) {
    // Phi+(x) = limit from the upper half-plane; evaluate the residue formula with z = x + i0.
    cplx s = 0.0;
    for (const auto& t : f) {
        const bool up = t.a >= 0.0;
        const cplx e = std::exp(I * t.a * t.p);
        const cplx d = t.p - x;
        cplx res_p = t.m == 1 ? t.c * e / d : t.c * e * (I * t.a / d - 1.0 / (d * d));
        const cplx res_z = t.c * std::exp(I * t.a * x) / std::pow(x - t.p, t.m);
        if (up) s += (t.p.imag() > 0.0 ? res_p : 0.0) + res_z;
        else s -= (t.p.imag() < 0.0 ? res_p : 0.0);
    }
    return s - cauchy_integral(f, I);
}

/// alpha_r = Catalan(r - 1) / 2^{2r - 1}, the closed form of the convolution recurrence.
inline double alpha_closed_form(int r) {
    double catalan = 1.0; // Catalan(0)
    for (int n = 0; n < r - 1; ++n) catalan = catalan * 2.0 * (2.0 * n + 1.0) / (n + 2.0);
    return catalan / std::ldexp(1.0, 2 * r - 1);
}

} // namespace oracle
