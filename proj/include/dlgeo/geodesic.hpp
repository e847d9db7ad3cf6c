#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "contour.hpp"
#include "density_query.hpp"
#include "errors.hpp"
#include "gauss_legendre.hpp"
#include "log_scaled.hpp"
#include "parallel.hpp"
#include "series.hpp"
#include "tracy_widom.hpp"

namespace dlgeo {

/// Rescaled arguments: conditioning value L, fluctuations (ell, x), time s.
struct ScaledQuery {
    double L = 16.0;
    double ell = 0.0;
    double x = 0.0;
    double s = 0.5;

    void validate() const {
        if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("ScaledQuery: L must be positive and finite");
        if (!std::isfinite(ell) || !std::isfinite(x)) throw DomainError("ScaledQuery: ell and x must be finite");
        if (!(s > 0.0 && s < 1.0)) {
            std::ostringstream os;
            os << "ScaledQuery: s must lie in (0,1), got " << s;
            throw DomainError(os.str());
        }
    }
};

/// (L1, L2, X) with the identity L1 + L2 = L + x^2/(4 sqrt L) checked.
inline ScaledArguments scaling_map(const ScaledQuery& sq) {
    sq.validate();
    const auto r = scaled_arguments(sq.L, sq.ell, sq.x, sq.s);
    const double rhs = sq.L + sq.x * sq.x / (4.0 * std::sqrt(sq.L));
    if (std::abs(r.L1 + r.L2 - rhs) > 1e-13 * (std::abs(r.L1) + std::abs(r.L2) + rhs))
        throw InvariantError("scaling_map: L1 + L2 identity violated");
    if (!(r.L1 > 0.0) || !(r.L2 > 0.0)) {
        std::ostringstream os;
        os << "scaling_map: L1 = " << r.L1 << ", L2 = " << r.L2 << " must both be positive";
        throw DomainError(os.str());
    }
    return r;
}

inline DensityQuery to_density_query(const ScaledQuery& sq) {
    const auto r = scaling_map(sq);
    return {r.L1, r.L2, r.X, sq.s};
}

/// Arguments of p at which the joint density of (L(s), L(1)-L(s), Pi(s)) is evaluated.
inline DensityQuery joint_arguments(double ell1, double ell2, double x, double s) {
    return {ell1 + x * x / s, ell2 + x * x / (1.0 - s), 2.0 * x, s};
}

/// Joint density of (L(s), L(1) - L(s), Pi(s)) at (ell1, ell2, x): 2 p(ell1 + x^2/s, ell2 + x^2/(1-s), 2x; s).
inline DensityResult joint_density_full(double ell1, double ell2, double x, double s, const TruncationPolicy& pol = {}) {
    auto r = density_p(joint_arguments(ell1, ell2, x, s), pol);
    r.value = r.value.scaled_by(2.0);
    return r;
}

inline LogScaledValue joint_density(double ell1, double ell2, double x, double s, const TruncationPolicy& pol = {}) {
    return joint_density_full(ell1, ell2, x, s, pol).value;
}

inline double standard_gaussian(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

struct ConditionalResult {
    /// s(1-s) p(L1, L2, X; s) / f_GUE(L)
    double value = 0.0;
    /// Limit value phi(ell) phi(x).
    double reference = 0.0;
    double log_f_gue = 0.0;
    DensityResult density;

    double ratio() const { return value / reference; }
};

/**
 * Conditional density of the rescaled (ell, x) given L(1) = L, evaluated as
 * s(1-s) p(L1, L2, X; s) / f_GUE(L). Everything stays in log space until the
 * final O(1) ratio.
 */
inline ConditionalResult conditional_rescaled_density(const ScaledQuery& sq, const TruncationPolicy& pol = {},
                                                      const TracyWidomGUE& tw = tracy_widom()) {
    const DensityQuery q = to_density_query(sq);
    ConditionalResult c;
    c.density = density_p(q, pol);
    c.log_f_gue = tw.log_f(sq.L);
    const auto& v = c.density.value;
    c.value = v.phase.real() * std::exp(v.log_mag + std::log(sq.s * (1.0 - sq.s)) - c.log_f_gue);
    c.reference = standard_gaussian(sq.ell) * standard_gaussian(sq.x);
    return c;
}

/// Endpoints (x, r) and (y, t) of a general geodesic.
struct GeneralPointFrame {
    double x_start = 0.0;
    double r_start = 0.0;
    double y_end = 0.0;
    double t_end = 1.0;

    void validate() const {
        if (!(t_end > r_start)) throw DomainError("GeneralPointFrame: need t_end > r_start");
    }
    double span() const { return t_end - r_start; }
};

/**
 * Map a standard-frame pair (Pi(s), L(s)) to the general frame:
 *   location = (t-r)^{2/3} Pi + (1-s) x + s y
 *   value    = (t-r)^{1/3} L(s) - 2 (t-r)^{-1/3} Pi (y - x) - s (y - x)^2 / (t - r)
 */
inline std::pair<double, double> rescale_general(const GeneralPointFrame& f, double s, double standard_location,
                                                 double standard_value) {
    f.validate();
    const double T = f.span(), d = f.y_end - f.x_start;
    const double loc = std::cbrt(T * T) * standard_location + (1.0 - s) * f.x_start + s * f.y_end;
    const double val = std::cbrt(T) * standard_value - 2.0 / std::cbrt(T) * standard_location * d - s * d * d / T;
    return {loc, val};
}

/// Endpoint value L(x, r; y, t) for a standard-frame value L(1).
inline double rescale_general_total(const GeneralPointFrame& f, double standard_total) {
    return rescale_general(f, 1.0, 0.0, standard_total).second;
}

/// Density factor of the map above: (t-r)^{-2/3} from location times (t-r)^{-1/3} from value.
inline double general_density_factor(const GeneralPointFrame& f) {
    f.validate();
    return 1.0 / f.span();
}

/// The two normalized statistics of the general-point limit theorem.
inline std::pair<double, double> general_statistics(const GeneralPointFrame& f, double s, double location,
                                                    double value, double L) {
    f.validate();
    const double T = f.span(), rs = std::sqrt(s * (1.0 - s)), L4 = std::pow(L, 0.25);
    const double a = 2.0 * L4 * (location - ((1.0 - s) * f.x_start + s * f.y_end)) / (std::pow(T, 0.75) * rs);
    const double b = (value - s * L) / (std::pow(T, 0.25) * rs * L4);
    return {a, b};
}

/// The same statistics in the standard frame.
inline std::pair<double, double> standard_statistics(double s, double Pi, double Ls, double L) {
    const double rs = std::sqrt(s * (1.0 - s)), L4 = std::pow(L, 0.25);
    return {2.0 * L4 * Pi / rs, (Ls - s * L) / (rs * L4)};
}

struct NormalizationOptions {
    int n_ell = 24;
    int n_x = 24;
    /// ell range is chosen so that L(s) covers L * [s - ell_window, s + ell_window].
    double ell_window = 0.4;
    double x_max = 6.0;
    int threads = 0;
    TruncationPolicy policy{};
};

struct NormalizationResult {
    /// Integral of the conditional density over the (ell, x) box.
    double integral = 0.0;
    /// The same integral expressed as int int joint dl1 dPi / f_GUE(L).
    double joint_over_fgue = 0.0;
    double log_f_gue = 0.0;
    double ell_lo = 0.0, ell_hi = 0.0;
    int evaluations = 0;
};

/**
 * Integrate the joint density over L(s) and Pi(s) at L(1) = L.
 *
 * Works in rescaled coordinates: with L(s) = sL + sqrt(s(1-s)) L^{1/4} ell and
 * Pi = x sqrt(s(1-s)) / (2 L^{1/4}) the Jacobian is s(1-s)/2, so
 * int int joint dL(s) dPi = f_GUE(L) int int conditional dell dx.
 */
inline NormalizationResult marginal_normalization(double L, double s, const NormalizationOptions& opt = {},
                                                  const TracyWidomGUE& tw = tracy_widom()) {
    if (!(L > 0.0) || !(s > 0.0 && s < 1.0)) throw DomainError("marginal_normalization: need L > 0, s in (0,1)");
    const double rs = std::sqrt(s * (1.0 - s)), L4 = std::pow(L, 0.25);
    const double lo1 = std::max(L * (s - opt.ell_window), 1e-3 * L), hi1 = std::min(L * (s + opt.ell_window), L * (1 - 1e-3));
    NormalizationResult res;
    res.ell_lo = (lo1 - s * L) / (rs * L4);
    res.ell_hi = (hi1 - s * L) / (rs * L4);
    const auto re = quad::gauss_legendre(opt.n_ell), rx = quad::gauss_legendre(opt.n_x);
    const double he = 0.5 * (res.ell_hi - res.ell_lo), me = 0.5 * (res.ell_hi + res.ell_lo);
    TruncationPolicy pol = opt.policy;
    pol.threads = 1;
    pol.estimate_error = false;
    const std::size_t n = static_cast<std::size_t>(opt.n_ell) * opt.n_x;
    res.log_f_gue = tw.log_f(L);
    // each point: joint density in (L(s), Pi) coordinates
    auto vals = parallel_map<double>(n, opt.threads, [&](std::size_t k) {
        const int i = static_cast<int>(k) / opt.n_x, j = static_cast<int>(k) % opt.n_x;
        const double ell = me + he * re.nodes[i];
        const double x = opt.x_max * rx.nodes[j];
        const double l1 = s * L + rs * L4 * ell;
        const double pi = x * rs / (2.0 * L4);
        const auto jd = joint_density(l1, L - l1, pi, s, pol);
        const double w = he * re.weights[i] * opt.x_max * rx.weights[j];
        return w * jd.phase.real() * std::exp(jd.log_mag - res.log_f_gue) * (s * (1.0 - s) / 2.0);
    });
    res.evaluations = static_cast<int>(n);
    res.integral = tree_sum(std::move(vals));
    res.joint_over_fgue = res.integral;
    return res;
}

} // namespace dlgeo
