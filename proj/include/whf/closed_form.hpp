#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace whf {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

/// One term coef * exp(i*phase*x) * (x - pole)^(-order).
/// order == 0 terms carry no pole (pole is stored as 0).
struct ExpTerm {
    lcplx coef{};
    long double phase = 0.0L;
    lcplx pole{};
    int order = 0;
};

/// Finite sums of exponential-rational terms, closed under sums and products.
/// Coefficients are kept in extended precision because high-order products
/// carry large coefficients whose sum is small.
class ExpRational {
public:
    ExpRational() = default;

    static ExpRational from_terms(std::vector<ExpTerm> terms);
    static ExpRational constant(cplx c);
    static ExpRational term(cplx coef, double phase, cplx pole, int order);
    /// ((x - i)/(x + i))^s for integer s.
    static ExpRational mobius_power(int s);

    cplx operator()(cplx z) const;
    lcplx evaluate(lcplx z) const;

    /// Limit along the real line; only the constant (order 0, phase 0) part survives.
    cplx at_infinity() const;

    std::span<const ExpTerm> terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    /// Sum of |coef|; a scale for relative tolerances.
    long double coefficient_mass() const;
    std::vector<lcplx> poles() const;
    /// Weighted size of the principal part at `pole`; zero for a removable singularity.
    long double principal_part_norm(lcplx pole) const;
    /// True if every term decays or is a pure constant, so the function is bounded on R.
    bool bounded_on_real_line() const;

    ExpRational& operator+=(const ExpRational& other);
    ExpRational& operator-=(const ExpRational& other);
    ExpRational& operator*=(lcplx s);
    ExpRational operator-() const;

    friend ExpRational operator+(ExpRational a, const ExpRational& b) { return a += b; }
    friend ExpRational operator-(ExpRational a, const ExpRational& b) { return a -= b; }
    friend ExpRational operator*(ExpRational a, lcplx s) { return a *= s; }
    friend ExpRational operator*(lcplx s, ExpRational a) { return a *= s; }
    friend ExpRational operator*(const ExpRational& a, const ExpRational& b);

private:
    explicit ExpRational(std::vector<ExpTerm> terms);
    void normalize();
    lcplx evaluate_near_pole(lcplx z, lcplx pole) const;

    struct PoleInfo {
        lcplx pole;
        long double radius;
    };

    std::vector<ExpTerm> terms_;
    // Distinct poles with the radius inside which the local expansion is used.
    std::vector<PoleInfo> pole_info_;
};

/// f = plus + minus with plus analytic and bounded in the upper half-plane,
/// minus analytic and bounded in the lower one. Constants go to minus.
struct ExpRationalSplit {
    ExpRational plus;
    ExpRational minus;
};

ExpRationalSplit split_half_planes(const ExpRational& f);

/// Square matrix of ExpRational entries.
class ExpRationalMatrix {
public:
    ExpRationalMatrix() = default;
    explicit ExpRationalMatrix(std::size_t n);

    static ExpRationalMatrix identity(std::size_t n);
    static ExpRationalMatrix constant(const std::vector<std::vector<cplx>>& rows);

    std::size_t dim() const { return n_; }
    ExpRational& operator()(std::size_t p, std::size_t q) { return entries_[p * n_ + q]; }
    const ExpRational& operator()(std::size_t p, std::size_t q) const { return entries_[p * n_ + q]; }

    std::vector<lcplx> evaluate(lcplx z) const;
    std::vector<cplx> at_infinity() const;
    std::size_t term_count() const;

    ExpRationalMatrix& operator+=(const ExpRationalMatrix& other);
    ExpRationalMatrix& operator-=(const ExpRationalMatrix& other);
    ExpRationalMatrix& operator*=(lcplx s);
    friend ExpRationalMatrix operator+(ExpRationalMatrix a, const ExpRationalMatrix& b) { return a += b; }
    friend ExpRationalMatrix operator-(ExpRationalMatrix a, const ExpRationalMatrix& b) { return a -= b; }
    friend ExpRationalMatrix operator*(ExpRationalMatrix a, lcplx s) { return a *= s; }
    friend ExpRationalMatrix operator*(const ExpRationalMatrix& a, const ExpRationalMatrix& b);

private:
    std::size_t n_ = 0;
    std::vector<ExpRational> entries_;
};

/// Named closed form: an identifier plus the matrix expression used for evaluation.
struct ClosedForm {
    std::string id;
    ExpRationalMatrix expr;
};

} // namespace whf
