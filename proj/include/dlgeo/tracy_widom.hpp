#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "airy.hpp"
#include "errors.hpp"
#include "gauss_legendre.hpp"
#include "log_scaled.hpp"

namespace dlgeo {

namespace tw_detail {

/**
 * Closed forms valid where u coincides with Ai (cubic term negligible):
 *   I1(L) = int_L^inf u^2       = Ai'^2 - L Ai^2
 *   I2(L) = int_L^inf (t-L) u^2 = (2 L^2 Ai^2 - 2 L Ai'^2 - Ai Ai') / 3
 * Both are returned as logarithms; for large L the difference Ai'^2 - L Ai^2
 * is formed from the asymptotic sums to avoid cancellation.
 */
struct AiryTails {
    long double log_I1, log_I2;
};

inline AiryTails airy_tails(long double L) {
    if (L > airy::kSeriesHigh) {
        const auto s = airy::asymptotic_positive(L);
        const long double lpre = -2 * s.zeta - std::log(4 * std::numbers::pi_v<long double>);
        const long double d = (s.V - s.U) * (s.V + s.U);       // V^2 - U^2
        const long double e = 2 * L * std::sqrt(L) * (-d) + s.U * s.V;  // 2L^{3/2}(U^2-V^2) + UV
        return {lpre + 0.5L * std::log(L) + std::log(d), lpre + std::log(e / 3)};
    }
    const auto [a, ap] = airy::maclaurin(L);
    const long double i1 = ap * ap - L * a * a;
    const long double i2 = (2 * L * L * a * a - 2 * L * ap * ap - a * ap) / 3;
    return {std::log(i1), std::log(i2)};
}

} // namespace tw_detail

/**
 * Hastings-McLeod solution of u'' = l u + 2 u^3 tabulated on a descending mesh,
 * together with I1 = int_l^inf u^2 and I2 = int_l^inf (t - l) u^2.
 */
struct PainleveSolution {
    std::vector<double> grid;     // descending, step h
    std::vector<double> u, u_prime;
    std::vector<long double> I1, I2;
    double step = 1.0 / 32;
    double accuracy_estimate = 0.0;

    double ell0() const { return grid.front(); }
    double ell_min() const { return grid.back(); }

    struct Local {
        long double u, up, I1, I2;
    };

    /// Taylor expansion of (u, u', I1, I2) from the nearest mesh node.
    Local eval(double ell) const {
        if (!(ell <= ell0() + 1e-12 && ell >= ell_min() - 1e-12)) {
            std::ostringstream os;
            os << "PainleveSolution: " << ell << " outside [" << ell_min() << ", " << ell0() << "]";
            throw DomainError(os.str());
        }
        const long double pos = (ell0() - ell) / step;
        const std::size_t n = std::min<std::size_t>(grid.size() - 1, static_cast<std::size_t>(std::llround(pos)));
        return expand(n, static_cast<long double>(ell) - static_cast<long double>(grid[n]));
    }

    Local expand(std::size_t n, long double h) const {
        constexpr int K = 28;
        std::array<long double, K + 3> a{}, b{}, d{}, sq{}, cu{};
        const long double ln = grid[n];
        a[0] = u[n];
        a[1] = u_prime[n];
        // a*a and a*a*a computed incrementally
        for (int k = 0; k <= K; ++k) {
            sq[k] = 0;
            for (int i = 0; i <= k; ++i) sq[k] += a[i] * a[k - i];
            cu[k] = 0;
            for (int i = 0; i <= k; ++i) cu[k] += sq[i] * a[k - i];
            const long double prev = k >= 1 ? a[k - 1] : 0;
            a[k + 2] = (ln * a[k] + prev + 2 * cu[k]) / ((k + 2.0L) * (k + 1.0L));
            // sq[k], cu[k] only use a[0..k], so the recursion order is consistent
        }
        b[0] = I1[n];
        d[0] = I2[n];
        for (int k = 0; k < K; ++k) {
            b[k + 1] = -sq[k] / (k + 1);
            d[k + 1] = -b[k] / (k + 1);
        }
        Local r{0, 0, 0, 0};
        long double p = 1;
        for (int k = 0; k <= K; ++k) {
            r.u += a[k] * p;
            r.I1 += b[k] * p;
            r.I2 += d[k] * p;
            r.up += (k + 1) * a[k + 1] * p;
            p *= h;
        }
        return r;
    }
};

/**
 * Backward integration from (Ai, Ai')(ell0) down to ell_min with a
 * Runge-Kutta-Fehlberg 7(8) controlled stepper in extended precision.
 */
inline PainleveSolution solve_hastings_mcleod(double ell_min = -10.0, double ell0 = 8.0, double tol = 1e-12) {
    if (!(ell0 >= 6.0)) throw DomainError("solve_hastings_mcleod: ell0 must be >= 6");
    if (!(ell_min >= -10.0 && ell_min < ell0)) throw DomainError("solve_hastings_mcleod: need -10 <= ell_min < ell0");
    using state = std::array<long double, 4>;
    namespace ode = boost::numeric::odeint;
    PainleveSolution sol;
    const double h = sol.step;
    const int n = static_cast<int>(std::ceil((ell0 - ell_min) / h - 1e-9));
    std::vector<long double> times(n + 1);
    for (int i = 0; i <= n; ++i) times[i] = std::max<long double>(ell0 - i * (long double)h, ell_min);
    sol.grid.reserve(n + 1);

    const auto [a0, ap0] = airy::ai_and_prime_ld(ell0);
    const auto tails = tw_detail::airy_tails(ell0);
    state x{a0, ap0, std::exp(tails.log_I1), std::exp(tails.log_I2)};
    auto rhs = [](const state& y, state& dy, long double t) {
        dy[0] = y[1];
        dy[1] = t * y[0] + 2 * y[0] * y[0] * y[0];
        dy[2] = -y[0] * y[0];
        dy[3] = -y[2];
    };
    auto observe = [&](const state& y, long double t) {
        if (!(std::fabs(y[0]) <= 1e6)) throw BlowupError("solve_hastings_mcleod: |u| exceeded 1e6");
        sol.grid.push_back(static_cast<double>(t));
        sol.u.push_back(static_cast<double>(y[0]));
        sol.u_prime.push_back(static_cast<double>(y[1]));
        sol.I1.push_back(y[2]);
        sol.I2.push_back(y[3]);
    };
    auto stepper = ode::make_controlled(1e-19L, 1e-17L, ode::runge_kutta_fehlberg78<state, long double>());
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), -static_cast<long double>(h) / 4, observe);
    sol.grid.back() = ell_min;

    // two-sided defect at midpoints
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < sol.grid.size(); ++i) {
        const long double hm = 0.5L * (sol.grid[i + 1] - sol.grid[i]);
        const auto l = sol.expand(i, hm);
        const auto r = sol.expand(i + 1, -hm);
        acc = std::max<double>(acc, std::fabs(l.u - r.u) + std::fabs(l.up - r.up));
        acc = std::max<double>(acc, std::fabs(l.I2 - r.I2));
    }
    sol.accuracy_estimate = acc;
    if (!(acc <= tol)) {
        std::ostringstream os;
        os << "solve_hastings_mcleod: mesh defect " << acc << " exceeds tol " << tol;
        throw ConvergenceError(os.str());
    }
    return sol;
}

/**
 * F_GUE and f_GUE.
 *
 * F = exp(-I2) with I2(L) = int_L^inf (t - L) u^2. Differentiating,
 * d/dL I2 = -int_L^inf u^2 = -I1, so f = F' = F * I1; no numerical
 * differentiation is involved. Beyond the tabulated range the Airy closed
 * forms are used.
 */
class TracyWidomGUE {
public:
    explicit TracyWidomGUE(PainleveSolution sol) : sol_(std::move(sol)) {}
    TracyWidomGUE() : sol_(solve_hastings_mcleod()) {}

    double domain_min() const { return sol_.ell_min(); }
    double domain_max() const { return std::numeric_limits<double>::infinity(); }
    const PainleveSolution& solution() const { return sol_; }
    static constexpr const char* method_tag = "painleve";

    double log_F(double L) const {
        check(L);
        if (L > sol_.ell0()) return static_cast<double>(-std::exp(tw_detail::airy_tails(L).log_I2));
        return static_cast<double>(-sol_.eval(L).I2);
    }
    double log_f(double L) const {
        check(L);
        if (L > sol_.ell0()) {
            const auto t = tw_detail::airy_tails(L);
            return static_cast<double>(-std::exp(t.log_I2) + t.log_I1);
        }
        const auto e = sol_.eval(L);
        return static_cast<double>(-e.I2 + std::log(e.I1));
    }
    double F(double L) const { return std::exp(log_F(L)); }
    double f(double L) const { return std::exp(log_f(L)); }
    LogScaledValue f_log_scaled(double L) const { return LogScaledValue::from_log(log_f(L)); }

    /// Hastings-McLeod u(L); Ai(L) beyond the mesh.
    double u(double L) const {
        check(L);
        if (L > sol_.ell0()) return airy::ai_and_prime(L).first;
        return static_cast<double>(sol_.eval(L).u);
    }

private:
    void check(double L) const {
        if (!(L >= sol_.ell_min() - 1e-12) || std::isnan(L)) {
            std::ostringstream os;
            os << "TracyWidomGUE: L = " << L << " below the tabulated domain " << sol_.ell_min();
            throw DomainError(os.str());
        }
    }
    PainleveSolution sol_;
};

/// Shared default instance (solved once, immutable afterwards).
inline const TracyWidomGUE& tracy_widom() {
    static const TracyWidomGUE tw;
    return tw;
}

inline double F_gue(double L) { return tracy_widom().F(L); }
inline double f_gue(double L) { return tracy_widom().f(L); }

namespace tw_detail {

inline double fredholm_once(double L, int n) {
    const auto rule = quad::gauss_legendre(n);
    std::vector<double> x(n), sw(n), ai(n), aip(n);
    constexpr double scale = 10.0;
    for (int i = 0; i < n; ++i) {
        const double th = std::numbers::pi * (1.0 + rule.nodes[i]) / 4.0;
        const double c = std::cos(th);
        x[i] = L + scale * std::tan(th);
        sw[i] = std::sqrt(rule.weights[i] * scale * std::numbers::pi / 4.0 / (c * c));
        const auto [a, ap] = airy::ai_and_prime(x[i]);
        ai[i] = a;
        aip[i] = ap;
    }
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double k;
            if (i == j)
                k = aip[i] * aip[i] - x[i] * ai[i] * ai[i];
            else
                k = (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
            M(i, j) = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
        }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

} // namespace tw_detail

/// det(I - K_Airy) on (L, inf) by Nystrom discretization; checked against 2n nodes.
inline double fredholm_F(double L, int n_nodes = 40) {
    if (!(L >= -10.0 && L <= 10.0)) throw DomainError("fredholm_F: L must lie in [-10, 10]");
    if (n_nodes < 20) throw DomainError("fredholm_F: need at least 20 nodes");
    const double a = tw_detail::fredholm_once(L, n_nodes);
    const double b = tw_detail::fredholm_once(L, 2 * n_nodes);
    if (std::abs(a - b) > 1e-8) {
        std::ostringstream os;
        os << "fredholm_F: n=" << n_nodes << " and 2n differ by " << std::abs(a - b) << " at L=" << L;
        throw ConvergenceError(os.str());
    }
    return b;
}

} // namespace dlgeo
