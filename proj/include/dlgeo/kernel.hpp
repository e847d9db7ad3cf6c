#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "log_scaled.hpp"

namespace dlgeo {

/// One point of the 2(k1+k2)-dimensional integration domain.
struct NodeTuple {
    std::vector<cplx> xi1, eta1, xi2, eta2;

    int k1() const { return static_cast<int>(xi1.size()); }
    int k2() const { return static_cast<int>(xi2.size()); }

    void validate() const {
        if (xi1.size() != eta1.size() || xi2.size() != eta2.size())
            throw DomainError("NodeTuple: xi and eta blocks must have equal length per level");
        if (xi1.empty() || xi2.empty()) throw DomainError("NodeTuple: k1 >= 1 and k2 >= 1 required");
    }

    /// Flattened order used by the evaluators: xi1, eta1, xi2, eta2.
    std::vector<cplx> flat() const {
        std::vector<cplx> z;
        z.reserve(2 * (xi1.size() + xi2.size()));
        z.insert(z.end(), xi1.begin(), xi1.end());
        z.insert(z.end(), eta1.begin(), eta1.end());
        z.insert(z.end(), xi2.begin(), xi2.end());
        z.insert(z.end(), eta2.begin(), eta2.end());
        return z;
    }
};

/// S_j = sum(xi1^j - eta1^j) - sum(xi2^j - eta2^j).
inline cplx power_sum(const NodeTuple& t, int j) {
    if (j < 1 || j > 4) throw std::invalid_argument("power_sum: j must be in 1..4");
    auto p = [j](cplx z) {
        cplx r = z;
        for (int i = 1; i < j; ++i) r *= z;
        return r;
    };
    cplx s{};
    for (std::size_t i = 0; i < t.xi1.size(); ++i) s += p(t.xi1[i]) - p(t.eta1[i]);
    for (std::size_t i = 0; i < t.xi2.size(); ++i) s -= p(t.xi2[i]) - p(t.eta2[i]);
    return s;
}

template <class T>
inline std::complex<T> H_from_sums(std::complex<T> s1, std::complex<T> s2, std::complex<T> s3) {
    const std::complex<T> s1sq = s1 * s1;
    return s1sq * s1sq / T(12) + s2 * s2 / T(4) - s1 * s3 / T(3);
}

/// H = S1^4/12 + S2^2/4 - S1 S3/3.
inline cplx H(const NodeTuple& t) { return H_from_sums(power_sum(t, 1), power_sum(t, 2), power_sum(t, 3)); }

/// Group of flat index p given block sizes: 0 xi1, 1 eta1, 2 xi2, 3 eta2.
inline int cv_group(int p, int k1, int k2) {
    if (p < k1) return 0;
    if (p < 2 * k1) return 1;
    if (p < 2 * k1 + k2) return 2;
    return 3;
}

/**
 * Exponent of (z_p - z_q), p < q, in the Cauchy-Vandermonde factor.
 *
 * Same group +2 (squared Vandermonde), xi-eta of one level -2, xi1-eta2 and
 * eta1-xi2 +1, xi1-xi2 and eta1-eta2 -1. Sign conventions of the squared
 * factors do not matter; the odd ones follow the (first - second) order.
 */
inline constexpr int cv_exponent(int gp, int gq) {
    if (gp == gq) return 2;
    constexpr int table[4][4] = {
        {0, -2, -1, 1},  // xi1 vs (xi1, eta1, xi2, eta2)
        {0, 0, 1, -1},   // eta1
        {0, 0, 0, -2},   // xi2
        {0, 0, 0, 0},    // eta2
    };
    return table[gp][gq];
}

inline constexpr double kSingularTol = 1e-300;

/// Cauchy-Vandermonde factor by composing the Delta products (reference route).
inline cplx cauchy_vandermonde(const NodeTuple& t) {
    t.validate();
    auto vdm2 = [](const std::vector<cplx>& w) {
        cplx r{1.0, 0.0};
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j < w.size(); ++j) r *= (w[j] - w[i]);
        return r * r;
    };
    auto cross = [](const std::vector<cplx>& a, const std::vector<cplx>& b, bool denom) {
        cplx r{1.0, 0.0};
        for (auto u : a)
            for (auto v : b) {
                const cplx d = u - v;
                if (denom && std::abs(d.real()) + std::abs(d.imag()) < kSingularTol)
                    throw SingularityError("cauchy_vandermonde: coincident nodes");
                r *= d;
            }
        return r;
    };
    cplx out{1.0, 0.0};
    const std::vector<cplx>* xs[2] = {&t.xi1, &t.xi2};
    const std::vector<cplx>* es[2] = {&t.eta1, &t.eta2};
    for (int l = 0; l < 2; ++l) {
        const cplx c = cross(*xs[l], *es[l], true);
        out *= vdm2(*xs[l]) * vdm2(*es[l]) / (c * c);
    }
    out *= cross(t.xi1, t.eta2, false) * cross(t.eta1, t.xi2, false) /
           (cross(t.xi1, t.xi2, true) * cross(t.eta1, t.eta2, true));
    return out;
}

/// H times the Cauchy-Vandermonde factor from the pair-exponent table (single pass).
template <class T = double>
inline std::complex<T> hcv_kernel(std::span<const std::complex<T>> z, int k1, int k2) {
    const int n = 2 * (k1 + k2);
    std::complex<T> num{1}, den{1}, s1{}, s2{}, s3{};
    for (int q = 0; q < n; ++q) {
        const int gq = cv_group(q, k1, k2);
        const T sg = (gq == 0 || gq == 3) ? T(1) : T(-1);
        const std::complex<T> zq = z[q], zq2 = zq * zq;
        s1 += sg * zq;
        s2 += sg * zq2;
        s3 += sg * zq2 * zq;
        for (int p = 0; p < q; ++p) {
            const std::complex<T> d = z[p] - zq;
            switch (cv_exponent(cv_group(p, k1, k2), gq)) {
            case 2: num *= d * d; break;
            case 1: num *= d; break;
            case -1:
                if (std::abs(d.real()) + std::abs(d.imag()) < kSingularTol)
                    throw SingularityError("hcv_kernel: coincident nodes");
                den *= d;
                break;
            case -2:
                if (std::abs(d.real()) + std::abs(d.imag()) < kSingularTol)
                    throw SingularityError("hcv_kernel: coincident nodes");
                den *= d * d;
                break;
            default: break;
            }
        }
    }
    return H_from_sums(s1, s2, s3) * num / den;
}

/// h(y) = (1 + y + y^2 + y^3)^4
inline double h_bound(double y) {
    const double b = 1.0 + y * (1.0 + y * (1.0 + y));
    return (b * b) * (b * b);
}

struct IntegrandBounds {
    /// prod h(|node|) over all nodes; bounds |H|.
    double h_product = 1.0;
    /// k1^{k1/2} k2^{k2/2} (k1+k2)^{(k1+k2)/2}
    double prefactor = 1.0;
};

inline double cv_prefactor(int k1, int k2) {
    const double a = k1, b = k2;
    return std::pow(a, a / 2) * std::pow(b, b / 2) * std::pow(a + b, (a + b) / 2);
}

inline IntegrandBounds integrand_bounds(const NodeTuple& t) {
    IntegrandBounds b;
    for (const auto* v : {&t.xi1, &t.eta1, &t.xi2, &t.eta2})
        for (auto z : *v) b.h_product *= h_bound(std::abs(z));
    b.prefactor = cv_prefactor(t.k1(), t.k2());
    return b;
}

} // namespace dlgeo
