#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contour.hpp"
#include "density_query.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "kernel.hpp"
#include "log_scaled.hpp"
#include "parallel.hpp"
#include "z_integral.hpp"

namespace dlgeo {

struct SeriesTermSpec {
    int k1 = 1;
    int k2 = 1;
    double z_radius = 0.5;
    int z_nodes = 128;
    ZMethod z_method = ZMethod::circle;

    void validate() const {
        if (k1 < 1 || k2 < 1) throw DomainError("SeriesTermSpec: k1, k2 >= 1 required");
        if (!(z_radius > 0.0 && z_radius < 1.0)) throw DomainError("SeriesTermSpec: z_radius must lie in (0,1)");
    }
    ZOptions z_options() const { return {z_method, z_radius, z_nodes, 1e-10}; }
};

struct TermOptions {
    int threads = 0;
    double max_tuples = 1e8;
    DiscretizationOptions disc{};
    /// Also evaluate on a coarser grid and report the difference as est_error.
    bool estimate_error = true;
    /// If set, ConvergenceError when est_error exceeds it.
    std::optional<double> refinement_tol;
    /// Skip assignments whose exact z-weight is zero.
    bool prune_z_classes = true;
};

struct TermResult {
    int k1 = 1, k2 = 1;
    LogScaledValue value;
    /// |fine - coarse| / |fine|; NaN when not estimated.
    double est_error = std::numeric_limits<double>::quiet_NaN();
    std::array<std::size_t, 6> node_counts{};
    double tuples = 0.0;
    double wall_time = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["k1"] = k1;
        j["k2"] = k2;
        j["log_mag"] = value.log_mag;
        j["sign"] = value.sign();
        j["est_error"] = std::isfinite(est_error) ? nlohmann::json(est_error) : nlohmann::json(nullptr);
        j["node_counts"] = node_counts;
        j["wall_time"] = wall_time;
        return j;
    }
};

/// Coarser companion grid for the refinement estimate.
inline DiscretizationOptions coarser(const DiscretizationOptions& d) {
    DiscretizationOptions c = d;
    c.order = std::max(2, (3 * d.order) / 4);
    c.ray_order = std::max(2, (3 * d.ray_order) / 4);
    return c;
}

namespace detail {

/// Per-contour node data with exp(sign*g - log_peak) folded into the weights.
struct WeightedGrid {
    std::vector<cplx> z;
    std::vector<cplx> a;
    double log_scale = 0.0;
};

inline WeightedGrid weighted_grid(const QuadratureGrid& g, const CubicExponent& ex, double sign) {
    WeightedGrid w;
    w.log_scale = g.log_peak;
    w.z = g.nodes;
    w.a.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx e = sign * ex(g.nodes[i]) - g.log_peak;
        w.a[i] = g.weights[i] * std::exp(e);
    }
    return w;
}

/**
 * Tensor-product sum of a[z_0]...a[z_{D-1}] H CV(z) with the loop over the
 * first dimension fixed to index i0. Power sums and Cauchy-Vandermonde
 * factors are accumulated level by level.
 */
class TensorSum {
public:
    TensorSum(std::vector<const WeightedGrid*> dims, int k1, int k2)
        : dims_(std::move(dims)), k1_(k1), k2_(k2), D_(static_cast<int>(dims_.size())) {
        groups_.resize(D_);
        for (int q = 0; q < D_; ++q) groups_[q] = cv_group(q, k1, k2);
        expo_.assign(D_ * D_, 0);
        for (int q = 0; q < D_; ++q)
            for (int p = 0; p < q; ++p) expo_[p * D_ + q] = cv_exponent(groups_[p], groups_[q]);
    }

    cplx block(std::size_t i0) const {
        State st;
        std::array<cplx, 32> zs{};
        cplx acc{};
        push(st, zs, 0, dims_[0]->z[i0], dims_[0]->a[i0]);
        if (D_ == 1) return leaf(st);
        rec(1, st, zs, acc);
        return acc;
    }

private:
    struct State {
        cplx s1{}, s2{}, s3{}, num{1.0, 0.0}, den{1.0, 0.0}, w{1.0, 0.0};
    };

    void push(State& st, std::array<cplx, 32>& zs, int q, cplx zq, cplx aq) const {
        const double sg = (groups_[q] == 0 || groups_[q] == 3) ? 1.0 : -1.0;
        const cplx zq2 = zq * zq;
        st.s1 += sg * zq;
        st.s2 += sg * zq2;
        st.s3 += sg * zq2 * zq;
        st.w *= aq;
        for (int p = 0; p < q; ++p) {
            const cplx d = zs[p] - zq;
            switch (expo_[p * D_ + q]) {
            case 2: st.num *= d * d; break;
            case 1: st.num *= d; break;
            case -1:
                check(d);
                st.den *= d;
                break;
            case -2:
                check(d);
                st.den *= d * d;
                break;
            default: break;
            }
        }
        zs[q] = zq;
    }

    static void check(cplx d) {
        if (std::abs(d.real()) + std::abs(d.imag()) < kSingularTol)
            throw SingularityError("term_T: coincident nodes on distinct contours");
    }

    static cplx leaf(const State& st) { return H_from_sums(st.s1, st.s2, st.s3) * st.num / st.den * st.w; }

    void rec(int q, const State& st, std::array<cplx, 32>& zs, cplx& acc) const {
        const WeightedGrid& g = *dims_[q];
        const std::size_t n = g.z.size();
        if (q == D_ - 1) {
            cplx local{};
            for (std::size_t i = 0; i < n; ++i) {
                State s = st;
                push(s, zs, q, g.z[i], g.a[i]);
                local += leaf(s);
            }
            acc += local;
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            State s = st;
            push(s, zs, q, g.z[i], g.a[i]);
            rec(q + 1, s, zs, acc);
        }
    }

    std::vector<const WeightedGrid*> dims_;
    int k1_, k2_, D_;
    std::vector<int> groups_;
    std::vector<int> expo_;
};

struct TermCore {
    LogScaledValue value;
    std::array<std::size_t, 6> node_counts{};
    double tuples = 0.0;
};

inline TermCore term_core(const SeriesTermSpec& spec, const ContourFamily& family, const DiscretizationOptions& disc,
                          const TermOptions& opt) {
    const DensityQuery& q = family.query;
    const CubicExponent g1 = exponent1(q), g2 = exponent2(q);
    const auto grids = discretize(family, disc);
    std::array<WeightedGrid, 6> wg;
    TermCore core;
    for (int c = 0; c < 6; ++c) {
        wg[c] = weighted_grid(grids[c], contour_uses_g1[c] ? g1 : g2, contour_weight_sign[c]);
        core.node_counts[c] = grids[c].size();
    }
    const int k1 = spec.k1, k2 = spec.k2;
    const auto classes = z_classes(k1, k2, spec.z_options(), opt.prune_z_classes);

    using enum ContourId;
    auto idx = [](ContourId id) { return static_cast<int>(id); };
    // tuple budget
    double tuples = 0.0;
    for (const auto& cl : classes) {
        double t = 1.0;
        t *= std::pow(double(wg[idx(L_out)].z.size()), cl.m_xi) * std::pow(double(wg[idx(L_in)].z.size()), k1 - cl.m_xi);
        t *= std::pow(double(wg[idx(R_out)].z.size()), cl.m_eta) * std::pow(double(wg[idx(R_in)].z.size()), k1 - cl.m_eta);
        t *= std::pow(double(wg[idx(L)].z.size()) * double(wg[idx(R)].z.size()), k2);
        tuples += t;
    }
    core.tuples = tuples;
    if (tuples > opt.max_tuples) {
        std::ostringstream os;
        os << "term_T(" << k1 << "," << k2 << "): " << tuples << " node tuples exceed the budget " << opt.max_tuples;
        throw BudgetError(os.str());
    }

    std::vector<LogScaledValue> parts;
    for (const auto& cl : classes) {
        std::vector<const WeightedGrid*> dims;
        double log_scale = 0.0;
        auto add = [&](ContourId id) {
            dims.push_back(&wg[idx(id)]);
            log_scale += wg[idx(id)].log_scale;
        };
        for (int i = 0; i < k1; ++i) add(i < cl.m_xi ? L_out : L_in);
        for (int i = 0; i < k1; ++i) add(i < cl.m_eta ? R_out : R_in);
        for (int i = 0; i < k2; ++i) add(L);
        for (int i = 0; i < k2; ++i) add(R);
        if (dims.size() > 32) throw DomainError("term_T: too many integration dimensions");
        const TensorSum ts(dims, k1, k2);
        auto blocks = parallel_map<cplx>(dims[0]->z.size(), opt.threads, [&](std::size_t i) { return ts.block(i); });
        const cplx sum = tree_sum(std::move(blocks));
        parts.push_back(LogScaledValue::from_complex(sum * cl.weight, log_scale));
    }
    core.value = log_sum(parts);
    return core;
}

} // namespace detail

/**
 * One z-integrated series term: the contour integral of dz/(2 pi i (1-z)^2)
 * T_{k1,k2}(z), without the 1/(k1! k2!)^2 prefactor.
 */
inline TermResult term_T(const SeriesTermSpec& spec, const ContourFamily& family, const TermOptions& opt = {}) {
    spec.validate();
    family.query.validate();
    const auto t0 = std::chrono::steady_clock::now();
    TermResult r;
    r.k1 = spec.k1;
    r.k2 = spec.k2;
    const auto fine = detail::term_core(spec, family, opt.disc, opt);
    r.value = fine.value;
    r.node_counts = fine.node_counts;
    r.tuples = fine.tuples;
    if (opt.estimate_error) {
        const auto coarse = detail::term_core(spec, family, coarser(opt.disc), opt);
        r.est_error = relative_difference(coarse.value, fine.value);
        if (opt.refinement_tol && !(r.est_error <= *opt.refinement_tol)) {
            std::ostringstream os;
            os << "term_T(" << spec.k1 << "," << spec.k2 << "): refinement difference " << r.est_error
               << " exceeds " << *opt.refinement_tol;
            throw ConvergenceError(os.str());
        }
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline TermResult term_T(const SeriesTermSpec& spec, const DensityQuery& q, const ContourFamily& family,
                         const TermOptions& opt = {}) {
    ContourFamily f = family;
    f.query = q;
    return term_T(spec, f, opt);
}

struct TruncationPolicy {
    /// Terms with k1 + k2 <= k_max are summed (2 or 3).
    int k_max = 2;
    double rel_tol = 1e-6;
    double z_radius = 0.5;
    int z_nodes = 128;
    ZMethod z_method = ZMethod::circle;
    int threads = 0;
    double max_tuples = 1e8;
    bool estimate_error = true;
    DiscretizationOptions disc{};
    /// Coarse grid for the six-dimensional terms (about 16 nodes per contour).
    DiscretizationOptions disc_6d{3, 2, 0.2, 1, std::nullopt};
    SaddleContourOptions contours{};
};

struct DensityResult {
    /// p(ell1, ell2, x; s)
    LogScaledValue value;
    std::vector<TermResult> terms;
    /// Estimated discarded mass relative to |value|.
    double truncation_estimate = 0.0;
    bool truncation_warning = false;
    double log_C = 0.0;
    double wall_time = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["log_mag"] = value.log_mag;
        j["sign"] = value.sign();
        j["value"] = value.real_value();
        j["imag_ratio"] = value.imag_ratio();
        j["truncation_estimate"] = truncation_estimate;
        j["truncation_warning"] = truncation_warning;
        j["terms"] = nlohmann::json::array();
        for (const auto& t : terms) j["terms"].push_back(t.to_json());
        j["wall_time"] = wall_time;
        return j;
    }
};

namespace detail {

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

/// Exact log weight of one (xi, eta) pair at the saddles: g(a) - g(b).
inline std::pair<double, double> saddle_pair_exponents(const DensityQuery& q) {
    const auto sp = saddle_points(q);
    const auto g1 = exponent1(q), g2 = exponent2(q);
    return {g1(sp.g1_left) - g1(sp.g1_right), g2(sp.g2_left) - g2(sp.g2_right)};
}

} // namespace detail

/**
 * p(ell1, ell2, x; s) truncated to k1 + k2 <= k_max.
 *
 * The discarded mass is estimated from the bound shape
 * |T| <= k1^{k1/2} k2^{k2/2} (k1+k2)^{(k1+k2)/2} C^{k1+k2} e^{k1 Lam1 + k2 Lam2},
 * with Lam_i the saddle exponent differences and C fitted to the computed terms.
 */
namespace detail {

inline DensityResult density_p_impl(const DensityQuery& q, const ContourFamily& family11,
                                    const ContourFamily* family3, const TruncationPolicy& pol) {
    q.validate();
    if (pol.k_max < 2 || pol.k_max > 3) throw DomainError("density_p: k_max must be 2 or 3");
    const auto t0 = std::chrono::steady_clock::now();
    DensityResult res;
    std::vector<std::pair<int, int>> idx{{1, 1}};
    if (pol.k_max >= 3) {
        idx.emplace_back(1, 2);
        idx.emplace_back(2, 1);
    }
    std::vector<LogScaledValue> parts;
    for (auto [k1, k2] : idx) {
        SeriesTermSpec spec{k1, k2, pol.z_radius, pol.z_nodes, pol.z_method};
        TermOptions to;
        to.threads = pol.threads;
        to.max_tuples = pol.max_tuples;
        to.disc = (k1 + k2 >= 3) ? pol.disc_6d : pol.disc;
        to.estimate_error = pol.estimate_error;
        ContourFamily f = (k1 + k2 >= 3 && family3) ? *family3 : family11;
        f.query = q;
        auto tr = term_T(spec, f, to);
        const double lf = 2.0 * (detail::log_factorial(k1) + detail::log_factorial(k2));
        parts.push_back(LogScaledValue{tr.value.log_mag - lf, tr.value.phase});
        res.terms.push_back(tr);
    }
    res.value = log_sum(parts);

    // truncation estimate
    try {
        const auto [lam1, lam2] = detail::saddle_pair_exponents(q);
        double logC = -std::numeric_limits<double>::infinity();
        for (const auto& t : res.terms) {
            const double v = (t.value.log_mag - std::log(cv_prefactor(t.k1, t.k2)) - t.k1 * lam1 - t.k2 * lam2) /
                             (t.k1 + t.k2);
            logC = std::max(logC, v);
        }
        res.log_C = logC;
        std::vector<LogScaledValue> tail;
        for (int n = pol.k_max + 1; n <= pol.k_max + 3; ++n)
            for (int k1 = 1; k1 < n; ++k1) {
                const int k2 = n - k1;
                const double lb = std::log(cv_prefactor(k1, k2)) + n * logC + k1 * lam1 + k2 * lam2 -
                                  2.0 * (detail::log_factorial(k1) + detail::log_factorial(k2));
                tail.push_back(LogScaledValue::from_log(lb));
            }
        const auto tl = log_sum(tail);
        res.truncation_estimate = std::exp(tl.log_mag - res.value.log_mag);
    } catch (const DomainError&) {
        res.truncation_estimate = std::numeric_limits<double>::quiet_NaN();
    }
    res.truncation_warning = !(res.truncation_estimate <= pol.rel_tol);
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace detail

/// p with every term evaluated on `family`.
inline DensityResult density_p(const DensityQuery& q, const ContourFamily& family, const TruncationPolicy& pol = {}) {
    return detail::density_p_impl(q, family, nullptr, pol);
}

/**
 * p on saddle families: T(1,1) on contours sitting on their own saddles, the
 * order-3 terms on the nested family their extra poles require.
 */
inline DensityResult density_p(const DensityQuery& q, const TruncationPolicy& pol = {}) {
    SaddleContourOptions o = pol.contours;
    o.nested = false;
    const ContourFamily f11 = build_saddle_contours(q, o);
    if (pol.k_max < 3) return detail::density_p_impl(q, f11, nullptr, pol);
    o.nested = true;
    const ContourFamily f3 = build_saddle_contours(q, o);
    return detail::density_p_impl(q, f11, &f3, pol);
}

} // namespace dlgeo
