#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "log_scaled.hpp"

namespace dlgeo {

enum class ZMethod { circle, residue };

struct ZOptions {
    ZMethod method = ZMethod::circle;
    double radius = 0.5;
    int nodes = 128;
    /// Relative tolerance of the N vs 2N self-check (circle only).
    double tol = 1e-10;
};

namespace detail {

inline double binom_int(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Coefficient of z^j in (1-z)^n for any integer n.
inline double one_minus_z_coeff(int n, int j) {
    if (j < 0) return 0.0;
    double c = 1.0;
    for (int i = 0; i < j; ++i) c = c * (n - i) / (i + 1);
    return (j % 2 == 0) ? c : -c;
}

/// z-dependent factor of one in/out assignment with m out-choices, including 1/(1-z)^2.
inline cplx choice_factor(cplx z, int k1, int k2, int m) {
    const cplx omz = 1.0 - z;
    return std::pow(1.0 / omz, 2 * k1 - m) * std::pow(-z / omz, m) * std::pow(omz, k2) *
           std::pow(1.0 - 1.0 / z, k1) / (omz * omz);
}

inline cplx circle_rule(int k1, int k2, int m, double r, int n) {
    cplx acc{};
    for (int j = 0; j < n; ++j) {
        const cplx z = std::polar(r, 2.0 * std::numbers::pi * j / n);
        acc += choice_factor(z, k1, k2, m) * z;
    }
    return acc / static_cast<double>(n);
}

} // namespace detail

/// Exact z-weight of a single assignment with m out-choices (residue at 0).
inline double z_weight_residue(int k1, int k2, int m) {
    if (m > k1 - 1) return 0.0;
    const double c = detail::one_minus_z_coeff(k2 - k1 - 2, k1 - m - 1);
    return ((k1 + m) % 2 == 0) ? c : -c;
}

/// z-weight of a single assignment with m out-choices by the chosen method.
inline cplx z_weight(int k1, int k2, int m, const ZOptions& opt = {}) {
    if (k1 < 1 || k2 < 1) throw DomainError("z_weight: k1, k2 >= 1 required");
    if (opt.method == ZMethod::residue) return z_weight_residue(k1, k2, m);
    if (!(opt.radius > 0.0 && opt.radius < 1.0)) throw DomainError("z_weight: radius must lie in (0,1)");
    if (opt.nodes < 8) throw DomainError("z_weight: need at least 8 circle nodes");
    const cplx a = detail::circle_rule(k1, k2, m, opt.radius, opt.nodes);
    const cplx b = detail::circle_rule(k1, k2, m, opt.radius, 2 * opt.nodes);
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    if (std::abs(a - b) > opt.tol * scale) throw ConvergenceError("z_weight: circle rule not converged");
    return b;
}

/// Weight of the class (m_xi outs among the xi1, m_eta among the eta1), times its multiplicity.
struct ZClass {
    int m_xi = 0;
    int m_eta = 0;
    double multiplicity = 1.0;
    cplx weight{};
};

inline std::vector<ZClass> z_classes(int k1, int k2, const ZOptions& opt = {}, bool prune = true) {
    std::vector<ZClass> out;
    for (int a = 0; a <= k1; ++a)
        for (int b = 0; b <= k1; ++b) {
            if (prune && z_weight_residue(k1, k2, a + b) == 0.0) continue;
            ZClass c;
            c.m_xi = a;
            c.m_eta = b;
            c.multiplicity = detail::binom_int(k1, a) * detail::binom_int(k1, b);
            c.weight = z_weight(k1, k2, a + b, opt) * c.multiplicity;
            out.push_back(c);
        }
    return out;
}

/**
 * Generic z-integral: the contour of |z| = r of dz/(2 pi i (1-z)^2) times
 * the expansion of the choice operators, with inner(mask) the value of the
 * assignment whose bit i (i < k1: xi_i, else eta_{i-k1}) selects "out".
 */
inline cplx z_integral(int k1, int k2, const std::function<cplx(unsigned)>& inner, const ZOptions& opt = {}) {
    if (k1 < 1 || k2 < 1) throw DomainError("z_integral: k1, k2 >= 1 required");
    if (2 * k1 > 20) throw DomainError("z_integral: k1 too large for explicit enumeration");
    std::vector<cplx> w(2 * k1 + 1);
    for (int m = 0; m <= 2 * k1; ++m) w[m] = z_weight(k1, k2, m, opt);
    cplx acc{};
    const unsigned n = 1u << (2 * k1);
    for (unsigned mask = 0; mask < n; ++mask) acc += w[std::popcount(mask)] * inner(mask);
    return acc;
}

/// Contour of |z| = r of dz/(2 pi i) F(z) by the trapezoid rule.
inline cplx circle_integral(const std::function<cplx(cplx)>& F, double r, int n) {
    cplx acc{};
    for (int j = 0; j < n; ++j) {
        const cplx z = std::polar(r, 2.0 * std::numbers::pi * j / n);
        acc += F(z) * z;
    }
    return acc / static_cast<double>(n);
}

} // namespace dlgeo
