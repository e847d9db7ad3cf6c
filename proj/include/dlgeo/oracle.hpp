#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contour.hpp"
#include "density_query.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "log_scaled.hpp"
#include "parallel.hpp"
#include "z_integral.hpp"

// Independent cross-checks. Nothing here calls the kernel, discretization or
// term evaluators; only the contour geometry is shared.

namespace dlgeo {

struct OracleReport {
    std::string target_id;
    LogScaledValue main_value;
    LogScaledValue oracle_value;
    double rel_diff = 0.0;
    double abs_diff = 0.0;
    double threshold = 0.0;
    double budget_used = 0.0;
    bool passed = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["target_id"] = target_id;
        j["main_log_mag"] = main_value.log_mag;
        j["main_sign"] = main_value.sign();
        j["oracle_log_mag"] = oracle_value.log_mag;
        j["oracle_sign"] = oracle_value.sign();
        j["rel_diff"] = rel_diff;
        j["abs_diff"] = abs_diff;
        j["threshold"] = threshold;
        j["budget_used"] = budget_used;
        j["passed"] = passed;
        return j;
    }
};

/// |a - b| / max(|a|, |b|) evaluated on the ratio, so shared log scales cancel.
inline double oracle_rel_diff(const LogScaledValue& a, const LogScaledValue& b) {
    if (a.is_zero() && b.is_zero()) return 0.0;
    if (a.is_zero() || b.is_zero()) return 1.0;
    const double m = std::max(a.log_mag, b.log_mag);
    const cplx x = std::exp(a.log_mag - m) * a.phase, y = std::exp(b.log_mag - m) * b.phase;
    return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
}

namespace oracle_detail {

/// The two cubic exponents written out directly from the query.
struct Exponents {
    double s, x, l1, l2;
    explicit Exponents(const DensityQuery& q) : s(q.s), x(q.x), l1(q.ell1), l2(q.ell2) {}
    cplx g1(cplx z) const {
        return -(s / 3.0) * z * z * z - (x / 2.0) * z * z + (l1 - x * x / (4.0 * s)) * z;
    }
    cplx g2(cplx z) const {
        const double t = 1.0 - s;
        return -(t / 3.0) * z * z * z + (x / 2.0) * z * z + (l2 - x * x / (4.0 * t)) * z;
    }
};

/// Explicit (1,1) kernel including the overall sign, without the exponentials.
inline cplx t11_rational(cplx xi1, cplx eta1, cplx xi2, cplx eta2) {
    return -((xi1 - eta2) * (eta1 - xi2)) / ((xi1 - eta1) * (xi2 - eta2));
}

struct Nodes {
    std::vector<cplx> z;
    std::vector<cplx> w;  // dz / (2 pi i) times exp(sign g - peak)
    double peak = 0.0;
};

/**
 * Uniform trapezoid nodes on one contour. Rays are cut where the weight has
 * fallen `drop` nats below the value at the center.
 */
inline Nodes trapezoid_nodes(const Contour& c, const std::function<cplx(cplx)>& g, double sign, int n,
                             double drop = 40.0) {
    Nodes out;
    out.peak = sign * g(cplx{c.center, 0.0}).real();
    std::vector<double> lens;
    double vert = 0.0, rays = 0.0;
    for (const auto& sg : c.segments) {
        double len = sg.length;
        if (sg.unbounded) {
            const double step = 0.25 * c.scale;
            len = 0.0;
            int k = 0;
            while (sign * g(sg.anchor + (len + step) * sg.direction).real() - out.peak > -drop) {
                len += step;
                if (++k > 100000) throw CertificateError("trapezoid_nodes: ray does not decay");
            }
            len += step;
            rays += len;
        } else {
            vert += len;
        }
        lens.push_back(len);
    }
    // 3/4 of the nodes on the vertical pieces, the rest on the rays
    const int nv = rays > 0 && vert > 0 ? (3 * n) / 4 : n;
    const int nr = n - (vert > 0 ? nv : 0);
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        const auto& sg = c.segments[i];
        const double len = lens[i];
        const double total = sg.unbounded ? rays : vert;
        const int budget = sg.unbounded ? nr : nv;
        const int m = std::max(2, static_cast<int>(std::lround(budget * len / total)) - 1);
        const double h = len / m;
        for (int j = 0; j <= m; ++j) {
            const cplx z = sg.anchor + (j * h) * sg.direction;
            const double tw = (j == 0 || j == m) ? 0.5 * h : h;
            const cplx dz = static_cast<double>(sg.orientation) * sg.direction * tw;
            out.z.push_back(z);
            out.w.push_back(dz / cplx{0.0, 2.0 * std::numbers::pi} * std::exp(sign * g(z) - out.peak));
        }
    }
    return out;
}

} // namespace oracle_detail

/// Explicit (1,1) integrand at one node tuple, exponentials included.
inline cplx t11_explicit_integrand(const DensityQuery& q, cplx xi1, cplx eta1, cplx xi2, cplx eta2) {
    const oracle_detail::Exponents e(q);
    return oracle_detail::t11_rational(xi1, eta1, xi2, eta2) *
           std::exp(e.g1(xi1) + e.g2(xi2) - e.g1(eta1) - e.g2(eta2));
}

struct BruteForceResult {
    LogScaledValue value;
    double evaluations = 0.0;
};

/**
 * T(1,1) by a dense composite trapezoid rule on the four contours
 * gamma_{L,in}, gamma_{R,in}, gamma_L, gamma_R of `alt_family`.
 */
inline BruteForceResult t11_bruteforce_full(const DensityQuery& q, const ContourFamily& alt_family, int dense_nodes,
                                            double max_evaluations = 1e8, int threads = 0) {
    q.validate();
    if (dense_nodes < 8) throw DomainError("t11_bruteforce: need at least 8 nodes per contour");
    const oracle_detail::Exponents e(q);
    auto G1 = [&](cplx z) { return e.g1(z); };
    auto G2 = [&](cplx z) { return e.g2(z); };
    using enum ContourId;
    const auto a = oracle_detail::trapezoid_nodes(alt_family[L_in], G1, 1.0, dense_nodes);
    const auto b = oracle_detail::trapezoid_nodes(alt_family[R_in], G1, -1.0, dense_nodes);
    const auto c = oracle_detail::trapezoid_nodes(alt_family[L], G2, 1.0, dense_nodes);
    const auto d = oracle_detail::trapezoid_nodes(alt_family[R], G2, -1.0, dense_nodes);
    const double evals = double(a.z.size()) * b.z.size() * c.z.size() * d.z.size();
    if (evals > max_evaluations) {
        std::ostringstream os;
        os << "t11_bruteforce: " << evals << " evaluations exceed the budget " << max_evaluations;
        throw BudgetError(os.str());
    }
    auto rows = parallel_map<cplx>(a.z.size(), threads, [&](std::size_t i) {
        cplx acc{};
        const cplx x1 = a.z[i];
        for (std::size_t j = 0; j < b.z.size(); ++j) {
            const cplx y1 = b.z[j];
            const cplx inv = 1.0 / (x1 - y1);
            cplx inner{};
            for (std::size_t k = 0; k < c.z.size(); ++k) {
                const cplx x2 = c.z[k];
                const cplx p = (y1 - x2) * c.w[k];
                cplx row{};
                for (std::size_t l = 0; l < d.z.size(); ++l) row += d.w[l] * (x1 - d.z[l]) / (x2 - d.z[l]);
                inner += p * row;
            }
            acc += b.w[j] * inv * inner;
        }
        return -a.w[i] * acc;
    });
    const cplx sum = tree_sum(std::move(rows));
    BruteForceResult r;
    r.value = LogScaledValue::from_complex(sum, a.peak + b.peak + c.peak + d.peak);
    r.evaluations = evals;
    return r;
}

inline LogScaledValue t11_bruteforce(const DensityQuery& q, const ContourFamily& alt_family, int dense_nodes,
                                     double max_evaluations = 1e8, int threads = 0) {
    return t11_bruteforce_full(q, alt_family, dense_nodes, max_evaluations, threads).value;
}

struct MCResult {
    LogScaledValue value;
    /// Standard error on the same scale as value.
    double std_err = 0.0;
    double rel_std_err = 0.0;
    std::size_t samples = 0;
};

/**
 * Monte Carlo estimate of T(1,1) on the vertical lines through the centers of
 * gamma_{L,in}, gamma_{R,in}, gamma_L and gamma_R. Each imaginary coordinate is
 * drawn from the Gaussian envelope exp(-|g''(c)| t^2 / 2) of its exponent.
 * Chunk k uses its own generator seeded with (seed, k), so the result does not
 * depend on the thread count.
 */
inline MCResult mc_estimate(const DensityQuery& q, const ContourFamily& family, std::size_t n_samples,
                            std::uint64_t seed, int threads = 0) {
    q.validate();
    if (n_samples < 2) throw DomainError("mc_estimate: need at least 2 samples");
    const oracle_detail::Exponents e(q);
    using enum ContourId;
    struct Line {
        double c, tau, peak, sign;
        bool first;
    };
    auto make = [&](ContourId id, bool first, double sign) {
        const double c = family[id].center;
        const double h = 1e-4 * (1.0 + std::abs(c));
        auto g = [&](double z) { return (first ? e.g1(z) : e.g2(z)).real(); };
        const double g2 = (g(c + h) - 2.0 * g(c) + g(c - h)) / (h * h);
        const double curv = sign * g2;  // exp(sign g(c + it)) has envelope exp(-curv t^2 / 2)
        if (!(curv > 0.0)) throw GeometryError("mc_estimate: no Gaussian envelope on a vertical line");
        return Line{c, 1.0 / std::sqrt(curv), sign * g(c), sign, first};
    };
    const Line lines[4] = {make(L_in, true, 1.0), make(R_in, true, -1.0), make(L, false, 1.0), make(R, false, -1.0)};

    constexpr std::size_t chunk = 1 << 14;
    const std::size_t nchunks = (n_samples + chunk - 1) / chunk;
    struct Acc {
        double sum = 0.0, sq = 0.0;
    };
    auto parts = parallel_map<Acc>(nchunks, threads, [&](std::size_t k) {
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        std::mt19937_64 rng(ss);
        std::normal_distribution<double> nd;
        Acc acc;
        const std::size_t end = std::min(n_samples, (k + 1) * chunk);
        for (std::size_t i = k * chunk; i < end; ++i) {
            cplx z[4];
            cplx val{1.0, 0.0};
            for (int j = 0; j < 4; ++j) {
                const auto& ln = lines[j];
                const double t = ln.tau * nd(rng);
                z[j] = {ln.c, t};
                const cplx g = ln.first ? e.g1(z[j]) : e.g2(z[j]);
                // dz/(2 pi i) = dt/(2 pi); divide by the normal density of t
                const double pdf = std::exp(-0.5 * t * t / (ln.tau * ln.tau)) / (ln.tau * std::sqrt(2.0 * std::numbers::pi));
                val *= std::exp(ln.sign * g - ln.peak) / (2.0 * std::numbers::pi * pdf);
            }
            const double v = (oracle_detail::t11_rational(z[0], z[1], z[2], z[3]) * val).real();
            acc.sum += v;
            acc.sq += v * v;
        }
        return acc;
    });
    const Acc tot = tree_sum(std::move(parts), [](const Acc& x, const Acc& y) { return Acc{x.sum + y.sum, x.sq + y.sq}; });
    const double n = static_cast<double>(n_samples);
    const double mean = tot.sum / n;
    const double var = std::max(0.0, (tot.sq / n - mean * mean) * n / (n - 1.0));
    const double log_scale = lines[0].peak + lines[1].peak + lines[2].peak + lines[3].peak;
    MCResult r;
    r.value = LogScaledValue::from_complex(mean, log_scale);
    r.rel_std_err = std::sqrt(var / n) / std::abs(mean);
    r.std_err = std::sqrt(var / n);
    r.samples = n_samples;
    return r;
}

namespace oracle_detail {

/// Truncated power series in z, coefficients 0..deg.
struct Series {
    std::vector<double> c;
    explicit Series(int deg) : c(deg + 1, 0.0) { c[0] = 1.0; }
    void times_one_minus_z() {
        for (std::size_t j = c.size() - 1; j >= 1; --j) c[j] -= c[j - 1];
    }
    void over_one_minus_z() {
        for (std::size_t j = 1; j < c.size(); ++j) c[j] += c[j - 1];
    }
    void times_minus_z() {
        for (std::size_t j = c.size() - 1; j >= 1; --j) c[j] = -c[j - 1];
        c[0] = 0.0;
    }
};

/**
 * Residue at 0 of (1-z)^{-2} (1-z)^{k2} (1 - 1/z)^{k1} prod_i F_i(z), with
 * F_i = 1/(1-z) for an "in" choice and -z/(1-z) for an "out" choice.
 * (1 - 1/z)^{k1} = (-1)^{k1} z^{-k1} (1-z)^{k1}, so the residue is the
 * z^{k1-1} coefficient of the remaining power series.
 */
inline double series_residue(int k1, int k2, int outs) {
    Series p(k1 - 1);
    for (int i = 0; i < 2 * k1; ++i) {
        p.over_one_minus_z();
        if (i < outs) p.times_minus_z();
    }
    for (int i = 0; i < 2; ++i) p.over_one_minus_z();
    for (int i = 0; i < k2 + k1; ++i) p.times_one_minus_z();
    const double sg = (k1 % 2 == 0) ? 1.0 : -1.0;
    return sg * p.c[k1 - 1];
}

} // namespace oracle_detail

/**
 * Compare the circle-quadrature z-integral of the main path with a residue
 * computed by power-series arithmetic.
 */
inline OracleReport z_methods_compare(int k1, int k2, const std::function<cplx(unsigned)>& inner,
                                      const ZOptions& opt = {}, double threshold = 1e-10) {
    if (k1 < 1 || k2 < 1 || 2 * k1 > 20) throw DomainError("z_methods_compare: need 1 <= k1 <= 10, k2 >= 1");
    ZOptions circ = opt;
    circ.method = ZMethod::circle;
    const cplx main = z_integral(k1, k2, inner, circ);
    cplx orc{};
    double scale = 0.0;
    const unsigned n = 1u << (2 * k1);
    for (unsigned mask = 0; mask < n; ++mask) {
        const cplx v = inner(mask);
        scale = std::max(scale, std::abs(v));
        orc += oracle_detail::series_residue(k1, k2, std::popcount(mask)) * v;
    }
    OracleReport r;
    std::ostringstream id;
    id << "z_integral(" << k1 << "," << k2 << ")";
    r.target_id = id.str();
    r.main_value = LogScaledValue::from_complex(main);
    r.oracle_value = LogScaledValue::from_complex(orc);
    r.abs_diff = std::abs(main - orc);
    const double denom = std::max(std::abs(main), std::abs(orc));
    // a vanishing residue is judged on the absolute scale of the inner values
    r.rel_diff = denom > 1e-12 * std::max(scale, 1.0) ? r.abs_diff / denom : r.abs_diff / std::max(scale, 1.0);
    r.threshold = threshold;
    r.budget_used = static_cast<double>(n) * 3.0 * circ.nodes;
    r.passed = r.rel_diff <= threshold;
    return r;
}

} // namespace dlgeo
