#include "whf/closed_form.hpp"

#include "whf/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

namespace whf {

namespace {

constexpr long double kPhaseSnap = 1e-14L;
constexpr long double kRemovableRel = 1e-13L;
constexpr lcplx kI{0.0L, 1.0L};

long double phase_tol(long double a) { return 1e-12L * std::max(1.0L, std::fabs(a)); }

lcplx ipow(lcplx base, int m) {
    lcplx r{1.0L, 0.0L};
    while (m > 0) {
        if (m & 1) r *= base;
        base *= base;
        m >>= 1;
    }
    return r;
}

long double binomial(int n, int k) {
    long double r = 1.0L;
    for (int j = 1; j <= k; ++j) r = r * static_cast<long double>(n - k + j) / static_cast<long double>(j);
    return r;
}

long double factorial(int k) {
    long double r = 1.0L;
    for (int j = 2; j <= k; ++j) r *= static_cast<long double>(j);
    return r;
}

bool term_less(const ExpTerm& a, const ExpTerm& b) {
    return std::make_tuple(a.order, a.pole.real(), a.pole.imag(), a.phase) <
           std::make_tuple(b.order, b.pole.real(), b.pole.imag(), b.phase);
}

// Principal part of c e^{iax} (x-p)^{-m} at p: sum_{k<m} c e^{iap} (ia)^k/k! (x-p)^{k-m}.
void append_principal_part(const ExpTerm& t, long double sign, std::vector<ExpTerm>& out) {
    const lcplx base = t.coef * std::exp(kI * t.phase * t.pole);
    lcplx ia_k{1.0L, 0.0L};
    for (int k = 0; k < t.order; ++k) {
        out.push_back({sign * base * ia_k / factorial(k), 0.0L, t.pole, t.order - k});
        ia_k *= kI * t.phase;
    }
}

// (e^u - sum_{k<m} u^k/k!) / u^m for |u| <= 1, by its power series.
lcplx exp_tail(lcplx u, int m) {
    lcplx sum{0.0L, 0.0L};
    lcplx term = 1.0L / factorial(m);
    for (int k = 0; k < 64; ++k) {
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
        term *= u / static_cast<long double>(m + k + 1);
    }
    return sum;
}

} // namespace

ExpRational::ExpRational(std::vector<ExpTerm> terms) : terms_(std::move(terms)) { normalize(); }

ExpRational ExpRational::from_terms(std::vector<ExpTerm> terms) { return ExpRational(std::move(terms)); }

ExpRational ExpRational::constant(cplx c) { return ExpRational({{lcplx(c), 0.0L, {}, 0}}); }

ExpRational ExpRational::term(cplx coef, double phase, cplx pole, int order) {
    if (order < 0) throw InvalidArgument("exp-rational term order must be nonnegative");
    if (order > 0 && pole.imag() == 0.0) throw InvalidArgument("exp-rational pole on the real line");
    return ExpRational({{lcplx(coef), static_cast<long double>(phase), lcplx(pole), order}});
}

ExpRational ExpRational::mobius_power(int s) {
    // (x-i)/(x+i) = 1 - 2i/(x+i); (x+i)/(x-i) = 1 + 2i/(x-i).
    const ExpRational step = s >= 0 ? ExpRational({{1.0L, 0.0L, {}, 0}, {-2.0L * kI, 0.0L, -kI, 1}})
                                    : ExpRational({{1.0L, 0.0L, {}, 0}, {2.0L * kI, 0.0L, kI, 1}});
    ExpRational r = constant(1.0);
    for (int j = 0; j < std::abs(s); ++j) r = r * step;
    return r;
}

void ExpRational::normalize() {
    for (auto& t : terms_) {
        if (std::fabs(t.phase) < kPhaseSnap) t.phase = 0.0L;
        if (t.order == 0) t.pole = {};
    }
    std::erase_if(terms_, [](const ExpTerm& t) { return t.coef == lcplx{}; });
    std::sort(terms_.begin(), terms_.end(), term_less);
    std::vector<ExpTerm> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (last.order == t.order && last.pole == t.pole &&
                std::fabs(last.phase - t.phase) <= phase_tol(last.phase)) {
                last.coef += t.coef;
                continue;
            }
        }
        merged.push_back(t);
    }
    std::erase_if(merged, [](const ExpTerm& t) { return t.coef == lcplx{}; });
    terms_ = std::move(merged);

    pole_info_.clear();
    for (const auto& p : poles()) pole_info_.push_back({p, 0.5L});
    for (auto& a : pole_info_) {
        for (const auto& b : pole_info_)
            if (b.pole != a.pole) a.radius = std::min(a.radius, 0.25L * std::abs(a.pole - b.pole));
        for (const auto& t : terms_)
            if (t.order > 0 && t.pole == a.pole && t.phase != 0.0L) a.radius = std::min(a.radius, 1.0L / std::fabs(t.phase));
    }
}

std::vector<lcplx> ExpRational::poles() const {
    std::vector<lcplx> out;
    for (const auto& t : terms_) {
        if (t.order == 0) continue;
        if (std::find(out.begin(), out.end(), t.pole) == out.end()) out.push_back(t.pole);
    }
    return out;
}

long double ExpRational::coefficient_mass() const {
    long double s = 0.0L;
    for (const auto& t : terms_) s += std::abs(t.coef);
    return s;
}

bool ExpRational::bounded_on_real_line() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const ExpTerm& t) {
        return t.order > 0 ? t.pole.imag() != 0.0L : true;
    });
}

cplx ExpRational::at_infinity() const {
    lcplx s{};
    for (const auto& t : terms_) {
        if (t.order != 0) continue;
        if (t.phase != 0.0L) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
        s += t.coef;
    }
    return cplx(s);
}

long double ExpRational::principal_part_norm(lcplx pole) const {
    int max_order = 0;
    for (const auto& t : terms_)
        if (t.order > 0 && t.pole == pole) max_order = std::max(max_order, t.order);
    long double worst = 0.0L;
    for (int j = 1; j <= max_order; ++j) {
        lcplx d{};
        for (const auto& t : terms_) {
            if (t.order < j || t.pole != pole) continue;
            const int k = t.order - j;
            d += t.coef * std::exp(kI * t.phase * pole) * ipow(kI * t.phase, k) / factorial(k);
        }
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

lcplx ExpRational::evaluate_near_pole(lcplx z, lcplx pole) const {
    const lcplx delta = z - pole;
    int max_order = 0;
    for (const auto& t : terms_)
        if (t.order > 0 && t.pole == pole) max_order = std::max(max_order, t.order);
    lcplx value{};
    // Regular part, term by term without cancellation.
    for (const auto& t : terms_) {
        if (t.order == 0 || t.pole != pole) continue;
        const lcplx base = t.coef * std::exp(kI * t.phase * pole);
        value += base * ipow(kI * t.phase, t.order) * exp_tail(kI * t.phase * delta, t.order);
    }
    // Singular part; coefficients at roundoff level are treated as removable.
    for (int j = 1; j <= max_order; ++j) {
        lcplx d{};
        long double scale = 0.0L;
        for (const auto& t : terms_) {
            if (t.order < j || t.pole != pole) continue;
            const int k = t.order - j;
            const lcplx piece = t.coef * std::exp(kI * t.phase * pole) * ipow(kI * t.phase, k) / factorial(k);
            d += piece;
            scale += std::abs(piece);
        }
        if (std::abs(d) <= kRemovableRel * scale) continue;
        if (delta == lcplx{}) return {std::numeric_limits<long double>::infinity(), 0.0L};
        value += d / ipow(delta, j);
    }
    return value;
}

lcplx ExpRational::evaluate(lcplx z) const {
    std::size_t near = pole_info_.size();
    for (std::size_t a = 0; a < pole_info_.size(); ++a)
        if (std::abs(z - pole_info_[a].pole) < pole_info_[a].radius) {
            near = a;
            break;
        }
    const bool has_near = near < pole_info_.size();
    const lcplx near_pole = has_near ? pole_info_[near].pole : lcplx{};

    // Small caches for repeated phases and poles.
    constexpr std::size_t kCache = 32;
    std::array<long double, kCache> phases;
    std::array<lcplx, kCache> phase_vals;
    std::array<lcplx, kCache> pole_keys;
    std::array<lcplx, kCache> pole_vals;
    std::size_t n_phase = 0, n_pole = 0;
    auto exp_of = [&](long double a) {
        for (std::size_t j = 0; j < n_phase; ++j)
            if (phases[j] == a) return phase_vals[j];
        const long double damp = std::exp(-a * z.imag());
        const lcplx v{damp * std::cos(a * z.real()), damp * std::sin(a * z.real())};
        if (n_phase < kCache) {
            phases[n_phase] = a;
            phase_vals[n_phase++] = v;
        }
        return v;
    };
    auto inv_of = [&](lcplx p) {
        for (std::size_t j = 0; j < n_pole; ++j)
            if (pole_keys[j] == p) return pole_vals[j];
        const lcplx v = 1.0L / (z - p);
        if (n_pole < kCache) {
            pole_keys[n_pole] = p;
            pole_vals[n_pole++] = v;
        }
        return v;
    };

    lcplx value{};
    for (const auto& t : terms_) {
        if (has_near && t.order > 0 && t.pole == near_pole) continue;
        lcplx v = t.coef;
        if (t.phase != 0.0L) v *= exp_of(t.phase);
        if (t.order > 0) v *= ipow(inv_of(t.pole), t.order);
        value += v;
    }
    if (has_near) value += evaluate_near_pole(z, near_pole);
    return value;
}

cplx ExpRational::operator()(cplx z) const {
    const lcplx v = evaluate(lcplx(z));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

ExpRational& ExpRational::operator+=(const ExpRational& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    normalize();
    return *this;
}

ExpRational& ExpRational::operator-=(const ExpRational& other) { return *this += -other; }

ExpRational& ExpRational::operator*=(lcplx s) {
    for (auto& t : terms_) t.coef *= s;
    normalize();
    return *this;
}

ExpRational ExpRational::operator-() const {
    ExpRational r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
}


ExpRational operator*(const ExpRational& a, const ExpRational& b) {
    std::vector<ExpTerm> out;
    out.reserve(a.terms_.size() * b.terms_.size() * 2);
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            const lcplx c = s.coef * t.coef;
            const long double phase = s.phase + t.phase;
            if (s.order == 0) {
                out.push_back({c, phase, t.pole, t.order});
            } else if (t.order == 0) {
                out.push_back({c, phase, s.pole, s.order});
            } else if (s.pole == t.pole) {
                out.push_back({c, phase, s.pole, s.order + t.order});
            } else {
                // 1/((x-p)^m (x-q)^n) by partial fractions.
                const int m = s.order, n = t.order;
                const lcplx p = s.pole, q = t.pole;
                const lcplx dpq = p - q;
                for (int k = 0; k < m; ++k) {
                    const lcplx coef = (k % 2 ? -1.0L : 1.0L) * binomial(n + k - 1, k) / ipow(dpq, n + k);
                    out.push_back({c * coef, phase, p, m - k});
                }
                for (int k = 0; k < n; ++k) {
                    const lcplx coef = (k % 2 ? -1.0L : 1.0L) * binomial(m + k - 1, k) / ipow(-dpq, m + k);
                    out.push_back({c * coef, phase, q, n - k});
                }
            }
        }
    }
    return ExpRational(std::move(out));
}

ExpRationalSplit split_half_planes(const ExpRational& f) {
    std::vector<ExpTerm> plus, minus;
    for (const auto& t : f.terms()) {
        if (t.order == 0) {
            (t.phase > 0.0L ? plus : minus).push_back(t);
            continue;
        }
        if (t.pole.imag() == 0.0L) throw InvalidArgument("exp-rational pole on the real line");
        const bool lower_pole = t.pole.imag() < 0.0L;
        if (lower_pole && t.phase >= 0.0L) {
            plus.push_back(t);
        } else if (!lower_pole && t.phase <= 0.0L) {
            minus.push_back(t);
        } else if (lower_pole) {
            append_principal_part(t, 1.0L, plus);
            minus.push_back(t);
            append_principal_part(t, -1.0L, minus);
        } else {
            append_principal_part(t, 1.0L, minus);
            plus.push_back(t);
            append_principal_part(t, -1.0L, plus);
        }
    }
    ExpRationalSplit out;
    out.plus = ExpRational::from_terms(std::move(plus));
    out.minus = ExpRational::from_terms(std::move(minus));
    return out;
}

ExpRationalMatrix::ExpRationalMatrix(std::size_t n) : n_(n), entries_(n * n) {}

ExpRationalMatrix ExpRationalMatrix::identity(std::size_t n) {
    ExpRationalMatrix m(n);
    for (std::size_t p = 0; p < n; ++p) m(p, p) = ExpRational::constant(1.0);
    return m;
}

ExpRationalMatrix ExpRationalMatrix::constant(const std::vector<std::vector<cplx>>& rows) {
    ExpRationalMatrix m(rows.size());
    for (std::size_t p = 0; p < rows.size(); ++p) {
        if (rows[p].size() != rows.size()) throw InvalidArgument("constant matrix must be square");
        for (std::size_t q = 0; q < rows.size(); ++q)
            if (rows[p][q] != cplx{}) m(p, q) = ExpRational::constant(rows[p][q]);
    }
    return m;
}

std::vector<lcplx> ExpRationalMatrix::evaluate(lcplx z) const {
    std::vector<lcplx> out(entries_.size());
    for (std::size_t j = 0; j < entries_.size(); ++j) out[j] = entries_[j].evaluate(z);
    return out;
}

std::vector<cplx> ExpRationalMatrix::at_infinity() const {
    std::vector<cplx> out(entries_.size());
    for (std::size_t j = 0; j < entries_.size(); ++j) out[j] = entries_[j].at_infinity();
    return out;
}

std::size_t ExpRationalMatrix::term_count() const {
    std::size_t c = 0;
    for (const auto& e : entries_) c += e.terms().size();
    return c;
}

ExpRationalMatrix& ExpRationalMatrix::operator+=(const ExpRationalMatrix& other) {
    if (other.n_ != n_) throw InvalidArgument("matrix dimension mismatch");
    for (std::size_t j = 0; j < entries_.size(); ++j) entries_[j] += other.entries_[j];
    return *this;
}

ExpRationalMatrix& ExpRationalMatrix::operator-=(const ExpRationalMatrix& other) {
    if (other.n_ != n_) throw InvalidArgument("matrix dimension mismatch");
    for (std::size_t j = 0; j < entries_.size(); ++j) entries_[j] -= other.entries_[j];
    return *this;
}

ExpRationalMatrix& ExpRationalMatrix::operator*=(lcplx s) {
    for (auto& e : entries_) e *= s;
    return *this;
}

ExpRationalMatrix operator*(const ExpRationalMatrix& a, const ExpRationalMatrix& b) {
    if (a.n_ != b.n_) throw InvalidArgument("matrix dimension mismatch");
    const std::size_t n = a.n_;
    ExpRationalMatrix c(n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            std::vector<ExpTerm> acc;
            for (std::size_t j = 0; j < n; ++j) {
                if (a(p, j).empty() || b(j, q).empty()) continue;
                const ExpRational prod = a(p, j) * b(j, q);
                acc.insert(acc.end(), prod.terms().begin(), prod.terms().end());
            }
            c(p, q) = ExpRational::from_terms(std::move(acc));
        }
    return c;
}

} // namespace whf
