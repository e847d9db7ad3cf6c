#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "errors.hpp"
#include "geodesic.hpp"
#include "log_scaled.hpp"
#include "series.hpp"
#include "tracy_widom.hpp"

namespace dlgeo {

/// phi(ell) phi(x) for the standard normal density phi.
inline double gaussian_product(double ell, double x) {
    return std::exp(-0.5 * (ell * ell + x * x)) / (2.0 * std::numbers::pi);
}

/// Leading large-L form of T(1,1) at the rescaled arguments.
inline LogScaledValue t11_leading(double L, double ell, double x, double s) {
    if (!(L > 0.0)) throw DomainError("t11_leading: L must be positive");
    const double lm = -std::log(16.0 * std::numbers::pi * std::numbers::pi * s * (1.0 - s) * L) -
                      4.0 / 3.0 * L * std::sqrt(L) - 0.5 * (ell * ell + x * x);
    return LogScaledValue::from_log(lm);
}

/// Right-tail form of f_GUE.
inline LogScaledValue fgue_tail(double L) {
    if (!(L > 0.0)) throw DomainError("fgue_tail: L must be positive");
    return LogScaledValue::from_log(-std::log(8.0 * std::numbers::pi * L) - 4.0 / 3.0 * L * std::sqrt(L));
}

/// Coefficient of the L^{-3/4} correction to interval probabilities.
inline double remark2_coefficient(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("remark2_coefficient: s must lie in (0,1)");
    return (2.0 * s - 1.0) / (2.0 * std::sqrt(s * (1.0 - s)));
}

struct Interval {
    double lo = 0.0, hi = 0.0;
};

namespace asym_detail {
inline double normal_mass(Interval I) {
    return 0.5 * (std::erf(I.hi / std::numbers::sqrt2) - std::erf(I.lo / std::numbers::sqrt2));
}
/// int_lo^hi t phi(t) dt = phi(lo) - phi(hi)
inline double normal_first_moment(Interval I) { return standard_gaussian(I.lo) - standard_gaussian(I.hi); }
} // namespace asym_detail

/// Two-term expansion of P(x in Ix, ell in Iell | L(1) = L).
inline double remark2_probability(double L, double s, Interval x_int, Interval ell_int) {
    if (!(L > 0.0)) throw DomainError("remark2_probability: L must be positive");
    for (auto I : {x_int, ell_int})
        if (!std::isfinite(I.lo) || !std::isfinite(I.hi) || !(I.lo <= I.hi))
            throw DomainError("remark2_probability: intervals must be finite with lo <= hi");
    const double mx = asym_detail::normal_mass(x_int);
    return mx * asym_detail::normal_mass(ell_int) +
           std::pow(L, -0.75) * remark2_coefficient(s) * mx * asym_detail::normal_first_moment(ell_int);
}

struct ConvergenceRecord {
    double L = 0.0, s = 0.5, ell = 0.0, x = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double abs_err = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;
    bool ok = false;
    std::string error;
};

/// Common-slope fit of log|ratio - 1| = c_point - alpha log L.
struct DecayFit {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double half_width = std::numeric_limits<double>::quiet_NaN();
    /// Mean of L^{3/4} (ratio - 1) / ell at the largest L (points with ell != 0).
    double coefficient = std::numeric_limits<double>::quiet_NaN();
    int points = 0;
    int observations = 0;
    bool monotone = false;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRecord> records;
    DecayFit fit;
};

struct ConvergenceOptions {
    TruncationPolicy policy{};
    /// Restrict the exponent fit to grid points with ell != 0. The L^{-3/4}
    /// correction is odd in ell, so at ell = 0 a faster order is observed.
    std::optional<bool> fit_nonzero_ell;
    double confidence = 0.95;
};

/// Fit the decay exponent from records grouped by grid point.
inline DecayFit fit_decay(const std::vector<ConvergenceRecord>& recs, bool nonzero_ell_only, double confidence = 0.95) {
    DecayFit fit;
    // group by grid point in input order
    std::vector<std::pair<double, double>> pts;
    std::vector<std::vector<const ConvergenceRecord*>> groups;
    for (const auto& r : recs) {
        if (!r.ok) continue;
        std::size_t g = 0;
        for (; g < pts.size(); ++g)
            if (pts[g].first == r.ell && pts[g].second == r.x) break;
        if (g == pts.size()) {
            pts.emplace_back(r.ell, r.x);
            groups.emplace_back();
        }
        groups[g].push_back(&r);
    }
    fit.monotone = true;
    for (const auto& g : groups)
        for (std::size_t i = 1; i < g.size(); ++i)
            if (g[i]->L > g[i - 1]->L && !(g[i]->abs_err < g[i - 1]->abs_err)) fit.monotone = false;

    double sxy = 0, sxx = 0;
    int n = 0, used = 0;
    std::vector<std::vector<std::pair<double, double>>> data;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (nonzero_ell_only && pts[g].first == 0.0) continue;
        std::vector<std::pair<double, double>> d;
        for (auto* r : groups[g])
            if (r->abs_err > 0) d.emplace_back(std::log(r->L), std::log(r->abs_err));
        if (d.size() < 2) continue;
        double mx = 0, my = 0;
        for (auto [a, b] : d) mx += a, my += b;
        mx /= d.size();
        my /= d.size();
        for (auto [a, b] : d) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
        }
        n += static_cast<int>(d.size());
        ++used;
        data.push_back(std::move(d));
    }
    fit.points = used;
    fit.observations = n;
    if (used == 0 || sxx <= 0) return fit;
    const double slope = sxy / sxx;
    fit.alpha = -slope;
    double rss = 0;
    for (const auto& d : data) {
        double mx = 0, my = 0;
        for (auto [a, b] : d) mx += a, my += b;
        mx /= d.size();
        my /= d.size();
        for (auto [a, b] : d) {
            const double e = (b - my) - slope * (a - mx);
            rss += e * e;
        }
    }
    const int dof = n - used - 1;
    if (dof > 0) {
        boost::math::students_t dist(dof);
        const double tq = boost::math::quantile(boost::math::complement(dist, (1 - confidence) / 2));
        fit.half_width = tq * std::sqrt(rss / dof / sxx);
    }
    // coefficient of the ell-odd correction at the largest L
    double Lmax = 0;
    for (const auto& r : recs)
        if (r.ok) Lmax = std::max(Lmax, r.L);
    double csum = 0;
    int cn = 0;
    for (const auto& r : recs)
        if (r.ok && r.L == Lmax && r.ell != 0.0) {
            csum += std::pow(r.L, 0.75) * (r.ratio - 1.0) / r.ell;
            ++cn;
        }
    if (cn) fit.coefficient = csum / cn;
    return fit;
}

/**
 * Evaluate the conditional density on a grid of (ell, x) for each L and fit
 * the decay of |ratio - 1|. Points that fail are marked, not thrown.
 */
inline ConvergenceStudy convergence_study(const std::vector<double>& L_list, double s,
                                          const std::vector<std::pair<double, double>>& grid,
                                          const ConvergenceOptions& opt = {}, const TracyWidomGUE& tw = tracy_widom()) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("convergence_study: s must lie in (0,1)");
    ConvergenceStudy st;
    for (double L : L_list)
        for (auto [ell, x] : grid) {
            ConvergenceRecord r;
            r.L = L;
            r.s = s;
            r.ell = ell;
            r.x = x;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto c = conditional_rescaled_density({L, ell, x, s}, opt.policy, tw);
                r.value = c.value;
                r.ratio = c.ratio();
                r.abs_err = std::abs(r.ratio - 1.0);
                r.ok = std::isfinite(r.ratio);
                if (!r.ok) r.error = "non-finite ratio";
            } catch (const Error& e) {
                r.error = e.what();
            }
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            st.records.push_back(std::move(r));
        }
    const bool nz = opt.fit_nonzero_ell.value_or(std::abs(s - 0.5) > 1e-12);
    st.fit = fit_decay(st.records, nz, opt.confidence);
    return st;
}

/// CSV with columns L,s,ell,x,ratio,abs_err,alpha_fit,aggregate; wall times are left out so output is reproducible.
inline void write_convergence_csv(std::ostream& os, const ConvergenceStudy& st, bool header = true) {
    auto num = [](double v) {
        std::ostringstream o;
        o.precision(17);
        if (std::isfinite(v)) o << v;
        return o.str();
    };
    if (header) os << "L,s,ell,x,ratio,abs_err,alpha_fit,aggregate\n";
    for (const auto& r : st.records)
        os << num(r.L) << ',' << num(r.s) << ',' << num(r.ell) << ',' << num(r.x) << ',' << num(r.ratio) << ','
           << num(r.abs_err) << ",,0\n";
    const double s = st.records.empty() ? std::numeric_limits<double>::quiet_NaN() : st.records.front().s;
    os << ',' << num(s) << ",,,,," << num(st.fit.alpha) << ",1\n";
}

} // namespace dlgeo
