#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "log_scaled.hpp"

namespace dlgeo {

/// Raw arguments of the density p(ell1, ell2, x; s).
struct DensityQuery {
    double ell1 = 0.0;
    double ell2 = 0.0;
    double x = 0.0;
    double s = 0.5;

    void validate() const {
        if (!(std::isfinite(ell1) && std::isfinite(ell2) && std::isfinite(x) && std::isfinite(s)))
            throw DomainError("DensityQuery: arguments must be finite");
        if (!(s > 0.0 && s < 1.0)) {
            std::ostringstream os;
            os << "DensityQuery: s must lie in (0,1), got " << s;
            throw DomainError(os.str());
        }
    }
};

/**
 * Real cubic c3*z^3 + c2*z^2 + c1*z.
 *
 * The two exponents entering the density are of this form; evaluation is
 * templated so the same code serves double and long double callers.
 */
struct CubicExponent {
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;

    template <class T>
    std::complex<T> operator()(std::complex<T> z) const {
        return ((T(c3) * z + T(c2)) * z + T(c1)) * z;
    }
    template <class T>
    std::complex<T> d1(std::complex<T> z) const {
        return (T(3 * c3) * z + T(2 * c2)) * z + T(c1);
    }
    template <class T>
    std::complex<T> d2(std::complex<T> z) const {
        return T(6 * c3) * z + T(2 * c2);
    }
    double d3() const { return 6 * c3; }

    double operator()(double t) const { return ((c3 * t + c2) * t + c1) * t; }
    double d1(double t) const { return (3 * c3 * t + 2 * c2) * t + c1; }
    double d2(double t) const { return 6 * c3 * t + 2 * c2; }

    CubicExponent negated() const { return {-c3, -c2, -c1}; }
};

/// Exponent of f1: -(s/3)z^3 - (x/2)z^2 + (ell1 - x^2/(4s)) z.
inline CubicExponent exponent1(const DensityQuery& q) {
    return {-q.s / 3.0, -0.5 * q.x, q.ell1 - q.x * q.x / (4.0 * q.s)};
}

/// Exponent of f2: -((1-s)/3)z^3 + (x/2)z^2 + (ell2 - x^2/(4(1-s))) z.
inline CubicExponent exponent2(const DensityQuery& q) {
    const double r = 1.0 - q.s;
    return {-r / 3.0, 0.5 * q.x, q.ell2 - q.x * q.x / (4.0 * r)};
}

inline cplx f1(cplx zeta, const DensityQuery& q) { return std::exp(exponent1(q)(zeta)); }
inline cplx f2(cplx zeta, const DensityQuery& q) { return std::exp(exponent2(q)(zeta)); }

inline LogScaledValue f1_log(cplx zeta, const DensityQuery& q) {
    const cplx e = exponent1(q)(zeta);
    return {e.real(), std::polar(1.0, e.imag())};
}
inline LogScaledValue f2_log(cplx zeta, const DensityQuery& q) {
    const cplx e = exponent2(q)(zeta);
    return {e.real(), std::polar(1.0, e.imag())};
}

/// Real critical points of the two exponents.
struct SaddlePoints {
    double g1_left = 0.0;
    double g1_right = 0.0;
    double g2_left = 0.0;
    double g2_right = 0.0;
};

/// Saddles -x/(2s) +- sqrt(ell1/s) and x/(2(1-s)) +- sqrt(ell2/(1-s)).
/// Requires ell1, ell2 > 0 and each pair to straddle the origin.
inline SaddlePoints saddle_points(const DensityQuery& q) {
    q.validate();
    if (!(q.ell1 > 0.0) || !(q.ell2 > 0.0)) {
        std::ostringstream os;
        os << "saddle_points: need ell1 > 0 and ell2 > 0 (got " << q.ell1 << ", " << q.ell2 << ")";
        throw DomainError(os.str());
    }
    const double r = 1.0 - q.s;
    SaddlePoints sp;
    const double c1 = -q.x / (2.0 * q.s), h1 = std::sqrt(q.ell1 / q.s);
    const double c2 = q.x / (2.0 * r), h2 = std::sqrt(q.ell2 / r);
    sp.g1_left = c1 - h1;
    sp.g1_right = c1 + h1;
    sp.g2_left = c2 - h2;
    sp.g2_right = c2 + h2;
    if (!(sp.g1_left < 0.0 && sp.g1_right > 0.0 && sp.g2_left < 0.0 && sp.g2_right > 0.0)) {
        std::ostringstream os;
        os << "saddle_points: saddles do not straddle the origin (x too large for ell1=" << q.ell1
           << ", ell2=" << q.ell2 << ")";
        throw DomainError(os.str());
    }
    return sp;
}

} // namespace dlgeo
