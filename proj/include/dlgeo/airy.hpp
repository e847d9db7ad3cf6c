#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "errors.hpp"

namespace dlgeo::airy {

// Ai(0) and -Ai'(0)
inline constexpr long double kC1 = 0.355028053887817239260063186004183176L;
inline constexpr long double kC2 = 0.258819403792806798405183560189203963L;

/// Maclaurin window; outside it the asymptotic expansions are used.
inline constexpr double kSeriesLow = -8.0;
inline constexpr double kSeriesHigh = 6.0;

/// (Ai, Ai') from the power series, summed in extended precision.
inline std::pair<long double, long double> maclaurin(long double t) {
    const long double t3 = t * t * t;
    long double f = 1, g = t, fp = 0, gp = 1;
    long double a = 1, b = t, ap = t * t / 2, bp = 1;
    fp = ap;
    for (int k = 1; k < 400; ++k) {
        a *= t3 / ((3 * k - 1) * (3.0L * k));
        b *= t3 / ((3.0L * k) * (3 * k + 1));
        bp *= t3 / ((3.0L * k) * (3 * k - 2));
        f += a;
        g += b;
        gp += bp;
        if (k >= 2) {
            ap *= t3 / ((3.0L * k - 3) * (3 * k - 1));
            fp += ap;
        }
        const long double mag = std::fabs(a) + std::fabs(b) + std::fabs(ap) + std::fabs(bp);
        if (k > 4 && mag < 1e-22L * (std::fabs(f) + std::fabs(g) + std::fabs(fp) + std::fabs(gp))) break;
    }
    return {kC1 * f - kC2 * g, kC1 * fp - kC2 * gp};
}

/// Asymptotic series sums for t > 0, scaled: Ai = e^{-z}/(2 sqrt(pi) t^{1/4}) U, Ai' = -t^{1/4} e^{-z}/(2 sqrt(pi)) V.
struct ScaledPositive {
    long double zeta, U, V;
};

inline ScaledPositive asymptotic_positive(long double t) {
    const long double zeta = 2.0L / 3.0L * t * std::sqrt(t);
    long double u = 1, U = 1, V = 1, prev = 1e300L;
    for (int k = 1; k < 200; ++k) {
        u *= (6.0L * k - 5) * (6.0L * k - 3) * (6.0L * k - 1) / ((2.0L * k - 1) * 216.0L * k) / zeta;
        const long double v = -(6.0L * k + 1) / (6.0L * k - 1) * u;
        const long double mag = std::fabs(u) + std::fabs(v);
        if (mag >= prev) break;  // optimal truncation
        prev = mag;
        const long double sg = (k % 2 == 0) ? 1 : -1;
        U += sg * u;
        V += sg * v;
        if (mag < 1e-21L) break;
    }
    return {zeta, U, V};
}

/// (Ai(-x), Ai'(-x)) for large x > 0 from the oscillatory expansions.
inline std::pair<long double, long double> asymptotic_negative(long double x) {
    const long double zeta = 2.0L / 3.0L * x * std::sqrt(x);
    long double u = 1;
    long double Pu = 1, Qu = 0, Pv = 1, Qv = 0, prev = 1e300L;
    for (int k = 1; k < 200; ++k) {
        u *= (6.0L * k - 5) * (6.0L * k - 3) * (6.0L * k - 1) / ((2.0L * k - 1) * 216.0L * k) / zeta;
        const long double v = -(6.0L * k + 1) / (6.0L * k - 1) * u;
        const long double mag = std::fabs(u) + std::fabs(v);
        if (mag >= prev) break;
        prev = mag;
        // even k contribute to P with sign (-1)^{k/2}, odd k to Q with sign (-1)^{(k-1)/2}
        const int h = k / 2;
        const long double sg = (h % 2 == 0) ? 1 : -1;
        if (k % 2 == 0) {
            Pu += sg * u;
            Pv += sg * v;
        } else {
            Qu += sg * u;
            Qv += sg * v;
        }
        if (mag < 1e-21L) break;
    }
    const long double th = zeta - std::numbers::pi_v<long double> / 4;
    const long double c = std::cos(th), s = std::sin(th);
    const long double sp = std::sqrt(std::numbers::pi_v<long double>), x4 = std::pow(x, 0.25L);
    return {(c * Pu + s * Qu) / (sp * x4), x4 * (s * Pv - c * Qv) / sp};
}

/// (Ai, Ai') for any real t in extended precision (no range check).
inline std::pair<long double, long double> ai_and_prime_ld(long double t) {
    if (t >= kSeriesLow && t <= kSeriesHigh) return maclaurin(t);
    if (t > 0) {
        const auto s = asymptotic_positive(t);
        const long double pre = std::exp(-s.zeta) / (2 * std::sqrt(std::numbers::pi_v<long double>));
        const long double t4 = std::pow(t, 0.25L);
        return {pre / t4 * s.U, -pre * t4 * s.V};
    }
    return asymptotic_negative(-t);
}

/// (Ai, Ai') for any real t (no range check).
inline std::pair<double, double> ai_and_prime(double t) {
    const auto [a, ap] = ai_and_prime_ld(t);
    return {static_cast<double>(a), static_cast<double>(ap)};
}

inline void check_range(double t) {
    if (!(t >= -20.0 && t <= 20.0)) {
        std::ostringstream os;
        os << "airy: argument " << t << " outside [-20, 20]";
        throw DomainError(os.str());
    }
}

} // namespace dlgeo::airy

namespace dlgeo {

/// Airy function Ai on [-20, 20].
inline double airy_ai(double t) {
    airy::check_range(t);
    return airy::ai_and_prime(t).first;
}

/// Ai' on [-20, 20].
inline double airy_ai_prime(double t) {
    airy::check_range(t);
    return airy::ai_and_prime(t).second;
}

} // namespace dlgeo
