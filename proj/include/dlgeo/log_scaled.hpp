#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>

namespace dlgeo {

using cplx = std::complex<double>;

/**
 * A complex number stored as exp(log_mag) * phase.
 *
 * Densities in the large-L regime scale like exp(-(4/3) L^{3/2}); keeping the
 * magnitude in log form lets products and sums of such values be formed
 * without underflow. `phase` has unit modulus (it is +-1 for real values).
 * Zero is represented by log_mag = -inf.
 */
struct LogScaledValue {
    double log_mag = -std::numeric_limits<double>::infinity();
    cplx phase{1.0, 0.0};

    static LogScaledValue zero() { return {}; }

    /// exp(log_scale) * z
    static LogScaledValue from_complex(cplx z, double log_scale = 0.0) {
        const double m = std::abs(z);
        if (m == 0.0 || !std::isfinite(m)) {
            LogScaledValue v;
            if (!std::isfinite(m)) v.log_mag = std::numeric_limits<double>::quiet_NaN();
            return v;
        }
        return {std::log(m) + log_scale, z / m};
    }

    static LogScaledValue from_real(double x, double log_scale = 0.0) {
        return from_complex(cplx{x, 0.0}, log_scale);
    }

    static LogScaledValue from_log(double log_mag, double sign = 1.0) {
        return {log_mag, cplx{sign < 0 ? -1.0 : 1.0, 0.0}};
    }

    bool is_zero() const { return log_mag == -std::numeric_limits<double>::infinity(); }

    /// Linear-space value; under/overflows outside double range.
    cplx value() const { return is_zero() ? cplx{} : std::exp(log_mag) * phase; }

    double real_value() const { return value().real(); }

    /// Sign of the real part (0 for zero).
    int sign() const {
        if (is_zero() || phase.real() == 0.0) return 0;
        return phase.real() > 0.0 ? 1 : -1;
    }

    /// |Im| / |value|, scale free.
    double imag_ratio() const { return is_zero() ? 0.0 : std::abs(phase.imag()); }

    /// log|Re(value)|
    double log_abs_real() const { return log_mag + std::log(std::abs(phase.real())); }

    LogScaledValue operator*(const LogScaledValue& o) const {
        return {log_mag + o.log_mag, phase * o.phase};
    }
    LogScaledValue operator/(const LogScaledValue& o) const {
        return {log_mag - o.log_mag, phase / o.phase};
    }
    LogScaledValue operator-() const { return {log_mag, -phase}; }

    LogScaledValue scaled_by(double factor) const {
        if (factor == 0.0) return zero();
        return {log_mag + std::log(std::abs(factor)), factor < 0 ? -phase : phase};
    }
};

/// Max-shifted addition.
inline LogScaledValue operator+(const LogScaledValue& a, const LogScaledValue& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double m = std::max(a.log_mag, b.log_mag);
    const cplx s = std::exp(a.log_mag - m) * a.phase + std::exp(b.log_mag - m) * b.phase;
    return LogScaledValue::from_complex(s, m);
}

inline LogScaledValue operator-(const LogScaledValue& a, const LogScaledValue& b) { return a + (-b); }

inline LogScaledValue log_sum(std::span<const LogScaledValue> terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::max(m, t.log_mag);
    if (!std::isfinite(m)) return LogScaledValue::zero();
    cplx s{};
    for (const auto& t : terms) {
        if (!t.is_zero()) s += std::exp(t.log_mag - m) * t.phase;
    }
    return LogScaledValue::from_complex(s, m);
}

/// |a/b - 1| computed in log space; meaningful for same-phase values.
inline double relative_difference(const LogScaledValue& a, const LogScaledValue& b) {
    if (b.is_zero()) return a.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    const LogScaledValue q = a / b;
    return std::abs(std::exp(q.log_mag) * q.phase - 1.0);
}

} // namespace dlgeo
