#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "density_query.hpp"
#include "errors.hpp"
#include "gauss_legendre.hpp"

namespace dlgeo {

/// (L1, L2, X) for the rescaled arguments (L, ell, x, s); no domain checks.
struct ScaledArguments {
    double L1, L2, X;
};

inline ScaledArguments scaled_arguments(double L, double ell, double x, double s) {
    const double rs = std::sqrt(s * (1.0 - s));
    const double L4 = std::pow(L, 0.25), L2 = std::sqrt(L);
    return {s * L + rs * L4 * ell + x * x * (1.0 - s) / (4.0 * L2),
            (1.0 - s) * L - rs * L4 * ell + x * x * s / (4.0 * L2), x * rs / L4};
}

/**
 * Bound log|w(zeta(t))| <= log_A - B t - D t^2 - C t^3 along arclength t >= 0.
 *
 * For the exponential weights used here the bound is an identity: the real
 * part of a cubic restricted to a ray is itself a real cubic in t.
 */
struct DecayCertificate {
    double log_A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;

    double log_bound(double t) const { return log_A - ((C * t + D) * t + B) * t; }

    /// Peak of the bound over t >= 0.
    double log_peak() const {
        double best = log_bound(0.0);
        // stationary points of B + 2Dt + 3Ct^2
        if (C != 0.0) {
            const double disc = D * D - 3.0 * C * B;
            if (disc >= 0.0) {
                for (double sg : {-1.0, 1.0}) {
                    const double t = (-D + sg * std::sqrt(disc)) / (3.0 * C);
                    if (t > 0.0) best = std::max(best, log_bound(t));
                }
            }
        } else if (D != 0.0) {
            const double t = -B / (2.0 * D);
            if (t > 0.0) best = std::max(best, log_bound(t));
        }
        return best;
    }

    /**
     * Smallest t past which the bound is convex, decreasing, and at least
     * log_cap below `reference`. Throws CertificateError if it never decays.
     */
    double truncation_length(double reference, double log_cap) const {
        if (C < 0.0 || (C == 0.0 && D < 0.0) || (C == 0.0 && D == 0.0 && B <= 0.0))
            throw CertificateError("decay certificate does not decay");
        auto phi = [&](double t) { return reference - log_bound(t); };
        double t0 = 0.0;
        if (C > 0.0) {
            t0 = std::max(t0, -D / (3.0 * C));
            const double disc = D * D - 3.0 * C * B;
            if (disc >= 0.0) t0 = std::max(t0, (-D + std::sqrt(disc)) / (3.0 * C));
        } else if (D > 0.0) {
            t0 = std::max(t0, -B / (2.0 * D));
        }
        if (phi(t0) >= log_cap) return t0;
        double hi = std::max(1.0, 2.0 * t0);
        while (phi(hi) < log_cap) hi *= 2.0;
        double lo = t0;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) < log_cap ? lo : hi) = mid;
        }
        return hi;
    }

    /// log of an upper bound for the integral of the bound over [T, inf).
    double log_tail_bound(double T) const {
        const double slope = B + 2.0 * D * T + 3.0 * C * T * T;
        if (!(slope > 0.0)) return std::numeric_limits<double>::infinity();
        return log_bound(T) - std::log(slope);
    }
};

/// Certificate for exp(sign * g) along anchor + t * direction.
inline DecayCertificate certificate_for(const CubicExponent& g, double sign, cplx anchor, cplx direction) {
    DecayCertificate c;
    c.log_A = sign * g(anchor).real();
    c.B = -sign * (g.d1(anchor) * direction).real();
    c.D = -sign * (0.5 * g.d2(anchor) * direction * direction).real();
    c.C = -sign * (g.d3() / 6.0 * direction * direction * direction).real();
    return c;
}

/// Straight piece anchor + t*direction, t in [0, length] or [0, inf).
struct PathSegment {
    cplx anchor{};
    cplx direction{1.0, 0.0};
    double length = 0.0;
    bool unbounded = false;
    /// +1 if the contour is traversed with increasing t.
    int orientation = 1;
    /// Arclength unit for panel placement (local Gaussian width).
    double scale = 1.0;
    std::optional<DecayCertificate> certificate;

    cplx point(double t) const { return anchor + t * direction; }
};

enum class ContourId : int { L_in = 0, L = 1, L_out = 2, R_out = 3, R = 4, R_in = 5 };

inline constexpr std::array<const char*, 6> contour_names{"gamma_L_in", "gamma_L",  "gamma_L_out",
                                                          "gamma_R_out", "gamma_R", "gamma_R_in"};

/// Orientation sign of the exponential weight on each contour (exp(+g) left, exp(-g) right).
inline constexpr std::array<int, 6> contour_weight_sign{1, 1, 1, -1, -1, -1};

/// true if the contour carries the level-1 exponent g1 (else g2).
inline constexpr std::array<bool, 6> contour_uses_g1{true, false, true, true, false, true};

struct Contour {
    std::vector<PathSegment> segments;
    /// Real-axis crossing (vertical center or ray apex).
    double center = 0.0;
    double scale = 1.0;
    /// log of the largest weight magnitude on the contour.
    double log_peak = 0.0;
};

enum class FamilyKind { saddle, paper, lemma32 };

struct ContourFamily {
    std::array<Contour, 6> contours;
    SaddlePoints saddles;
    /// Representative saddles (the g2 pair, which anchors gamma_L and gamma_R).
    cplx saddle_left{}, saddle_right{};
    FamilyKind kind = FamilyKind::saddle;
    DensityQuery query;
    double log_cap = 36.0;

    const Contour& operator[](ContourId id) const { return contours[static_cast<int>(id)]; }
    Contour& operator[](ContourId id) { return contours[static_cast<int>(id)]; }
};

namespace detail {

inline double seg_point_dist(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double l2 = std::norm(ab);
    double t = l2 > 0 ? ((p - a) * std::conj(ab)).real() / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

inline double seg_seg_dist(cplx a, cplx b, cplx c, cplx d) {
    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return 0.0;
    return std::min({seg_point_dist(a, c, d), seg_point_dist(b, c, d), seg_point_dist(c, a, b),
                     seg_point_dist(d, a, b)});
}

// rays are clipped at this length for the distance check; nested rays only diverge
inline constexpr double kRayProbe = 1e3;

inline std::pair<cplx, cplx> endpoints(const PathSegment& s) {
    const double len = s.unbounded ? kRayProbe : s.length;
    return {s.anchor, s.point(len)};
}

/**
 * Vertical piece through c of half-length h, continued by rays at +-angle.
 * Above `core` the vertical piece only carries the Gaussian tail and is kept
 * as a separate segment whose width equals its length (one panel).
 */
inline Contour vertical_with_rays(double c, double h, double angle, double scale, const CubicExponent& g,
                                  double sign, double core = -1.0) {
    Contour ct;
    ct.center = c;
    ct.scale = scale;
    ct.log_peak = sign * g(c);
    if (core < 0.0 || core > h) core = h;
    const cplx up{0.0, 1.0};
    const cplx ray = std::polar(1.0, angle);
    // upper half traversed outward, lower half inward
    PathSegment v_up{cplx{c, 0.0}, up, core, false, 1, scale, std::nullopt};
    PathSegment e_up{cplx{c, core}, up, h - core, false, 1, h - core, std::nullopt};
    PathSegment r_up{cplx{c, h}, ray, 0.0, true, 1, scale, std::nullopt};
    r_up.certificate = certificate_for(g, sign, r_up.anchor, r_up.direction);
    PathSegment v_dn{cplx{c, 0.0}, std::conj(up), core, false, -1, scale, std::nullopt};
    PathSegment e_dn{cplx{c, -core}, std::conj(up), h - core, false, -1, h - core, std::nullopt};
    PathSegment r_dn{cplx{c, -h}, std::conj(ray), 0.0, true, -1, scale, std::nullopt};
    r_dn.certificate = certificate_for(g, sign, r_dn.anchor, r_dn.direction);
    if (h <= 0.0) {
        ct.segments = {r_up, r_dn};
    } else if (h - core > 1e-12 * h) {
        ct.segments = {v_up, e_up, r_up, v_dn, e_dn, r_dn};
    } else {
        ct.segments = {v_up, r_up, v_dn, r_dn};
    }
    return ct;
}

inline double local_scale(const CubicExponent& g, double c) {
    const double g2 = std::abs(g.d2(c));
    if (!(g2 > 0.0)) throw GeometryError("contour center at an inflection point of the exponent");
    return 1.0 / std::sqrt(0.5 * g2);
}

} // namespace detail

/// Minimum distance between two contours (rays probed to a finite length).
inline double contour_distance(const Contour& a, const Contour& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sa : a.segments) {
        const auto [a0, a1] = detail::endpoints(sa);
        for (const auto& sb : b.segments) {
            const auto [b0, b1] = detail::endpoints(sb);
            best = std::min(best, detail::seg_seg_dist(a0, a1, b0, b1));
        }
    }
    return best;
}

/// True if every contour of the family is closed under complex conjugation.
inline bool is_conjugation_symmetric(const ContourFamily& f, double tol = 1e-14) {
    for (const auto& c : f.contours) {
        for (const auto& s : c.segments) {
            bool found = false;
            for (const auto& t : c.segments) {
                if (std::abs(t.anchor - std::conj(s.anchor)) <= tol * (1 + std::abs(s.anchor)) &&
                    std::abs(t.direction - std::conj(s.direction)) <= tol && t.unbounded == s.unbounded &&
                    std::abs(t.length - s.length) <= tol * (1 + s.length) &&
                    t.orientation == -s.orientation) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    return true;
}

/**
 * Check the nesting order and pairwise separation.
 *
 * `full` also requires the three contours on each side to be mutually
 * separated; the vertical-line family only needs left/right separation.
 */
inline void validate_family(const ContourFamily& f, double min_gap, bool full = true) {
    const auto c = [&](ContourId id) { return f[id].center; };
    using enum ContourId;
    if (!(c(L_in) < 0 && c(L) < 0 && c(L_out) < 0 && c(R_in) > 0 && c(R) > 0 && c(R_out) > 0))
        throw GeometryError("left contours must cross the real axis left of 0, right contours right of 0");
    if (full && !(c(L_in) < c(L) && c(L) < c(L_out) && c(R_out) < c(R) && c(R) < c(R_in))) {
        std::ostringstream os;
        os << "contour centers out of order: " << c(L_in) << ' ' << c(L) << ' ' << c(L_out) << " | "
           << c(R_out) << ' ' << c(R) << ' ' << c(R_in);
        throw GeometryError(os.str());
    }
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            const bool cross_side = (i < 3) != (j < 3);
            if (!full && !cross_side) continue;
            const double d = contour_distance(f.contours[i], f.contours[j]);
            if (d < min_gap) {
                std::ostringstream os;
                os << contour_names[i] << " and " << contour_names[j] << " are " << d
                   << " apart (minimum " << min_gap << ")";
                throw GeometryError(os.str());
            }
        }
    }
}

struct SaddleContourOptions {
    /// Separation between neighbouring contours in units of the smallest local width.
    double gap_factor = 1.0;
    /// Drop of the Gaussian envelope (in nats) where the vertical piece hands over to rays.
    double vertical_drop = 18.0;
    /// Move all contours away from the origin by this many local widths.
    double anchor_shift = 0.0;
    double log_cap = 36.0;
    /// Enforce in < mid < out on each side. The (1,1) kernel has no poles
    /// between contours of the same side, so it can use unnested contours
    /// sitting on their own saddles.
    bool nested = true;
};

/**
 * Generic family: vertical lines through (or next to) the exact saddles,
 * continued by rays at angles 2pi/3 (left) and pi/3 (right).
 *
 * gamma_L and gamma_R sit on the g2 saddles. gamma_{L,in} and gamma_{L,out}
 * sit on the g1 saddle unless that would break the nesting, in which case
 * they are pushed one gap beyond gamma_L; the right side mirrors this.
 * All contours on one side share the vertical half-length.
 */
inline ContourFamily build_saddle_contours(const DensityQuery& q, const SaddleContourOptions& opt = {}) {
    const SaddlePoints sp = saddle_points(q);
    const CubicExponent g1 = exponent1(q), g2 = exponent2(q);
    const double sig1l = detail::local_scale(g1, sp.g1_left), sig2l = detail::local_scale(g2, sp.g2_left);
    const double sig1r = detail::local_scale(g1, sp.g1_right), sig2r = detail::local_scale(g2, sp.g2_right);
    const double gap = opt.gap_factor * std::min({sig1l, sig2l, sig1r, sig2r});

    // near the origin the gap shrinks so the out-contours stay on their side of 0
    const double gap_l = std::min(gap, -0.5 * std::max(sp.g1_left, sp.g2_left));
    const double gap_r = std::min(gap, 0.5 * std::min(sp.g1_right, sp.g2_right));
    double c_L = sp.g2_left, c_Lin = std::min(sp.g1_left, c_L - gap_l), c_Lout = std::max(sp.g1_left, c_L + gap_l);
    double c_R = sp.g2_right, c_Rin = std::max(sp.g1_right, c_R + gap_r), c_Rout = std::min(sp.g1_right, c_R - gap_r);
    if (!opt.nested) {
        // own saddles unless they would nearly coincide with gamma_L / gamma_R
        if (std::abs(sp.g1_left - sp.g2_left) >= gap_l) c_Lin = sp.g1_left;
        if (std::abs(sp.g1_right - sp.g2_right) >= gap_r) c_Rin = sp.g1_right;
        c_Lout = std::max(c_Lin, c_L) + gap_l;
        c_Rout = std::min(c_Rin, c_R) - gap_r;
    }
    const double shift_l = opt.anchor_shift * std::min(sig1l, sig2l);
    const double shift_r = opt.anchor_shift * std::min(sig1r, sig2r);
    c_L -= shift_l;
    c_Lin -= shift_l;
    c_Lout -= shift_l;
    c_R += shift_r;
    c_Rin += shift_r;
    c_Rout += shift_r;

    ContourFamily f;
    f.kind = FamilyKind::saddle;
    f.query = q;
    f.saddles = sp;
    f.saddle_left = sp.g2_left;
    f.saddle_right = sp.g2_right;
    f.log_cap = opt.log_cap;
    const double left = 2.0 * std::numbers::pi / 3.0, right = std::numbers::pi / 3.0;
    const double rd = std::sqrt(opt.vertical_drop);
    // Out-contours may land past the inflection of g1 when the g1 and g2 saddles
    // separate; their bounded vertical piece then grows by a finite amount and
    // the rays still carry certified cubic decay. Their panel width falls back
    // to the one at the g1 saddle.
    auto width = [&](const CubicExponent& g, double c, double sign, double saddle, bool out) {
        if (sign * g.d2(c) > 0.0) return detail::local_scale(g, c);
        if (!out) throw GeometryError("vertical contour placed where the weight grows along the imaginary direction");
        return detail::local_scale(g, saddle);
    };
    const double w_Lin = width(g1, c_Lin, 1.0, sp.g1_left, false), w_L = width(g2, c_L, 1.0, sp.g2_left, false);
    const double w_Lout = width(g1, c_Lout, 1.0, sp.g1_left, true);
    const double w_Rin = width(g1, c_Rin, -1.0, sp.g1_right, false), w_R = width(g2, c_R, -1.0, sp.g2_right, false);
    const double w_Rout = width(g1, c_Rout, -1.0, sp.g1_right, true);
    // one half-length per side keeps the rays parallel, so nesting is inherited from the centers
    const double h_left = rd * std::max({w_Lin, w_L, w_Lout});
    const double h_right = rd * std::max({w_Rin, w_R, w_Rout});
    auto make = [&](double c, const CubicExponent& g, double sign, double angle, double h, double sc) {
        return detail::vertical_with_rays(c, h, angle, sc, g, sign, rd * sc);
    };
    using enum ContourId;
    f[L_in] = make(c_Lin, g1, 1.0, left, h_left, w_Lin);
    f[L] = make(c_L, g2, 1.0, left, h_left, w_L);
    f[L_out] = make(c_Lout, g1, 1.0, left, h_left, w_Lout);
    f[R_out] = make(c_Rout, g1, -1.0, right, h_right, w_Rout);
    f[R] = make(c_R, g2, -1.0, right, h_right, w_R);
    f[R_in] = make(c_Rin, g1, -1.0, right, h_right, w_Rin);
    validate_family(f, 0.5 * std::min(gap_l, gap_r), opt.nested);
    return f;
}

/**
 * Vertical pieces of half-length L^{-1/4} log L centred at the leading-order
 * saddle locations.
 *
 * Only gamma_{L,in}, gamma_L, gamma_{R,in} and gamma_R have closed-form centres;
 * the two out-contours are copies pushed L^{-1/4} towards the origin, and
 * gamma_{L,in}/gamma_L may coincide. Use it for the (1,1) term only.
 */
inline ContourFamily build_paper_contours(double L, double ell, double x, double s, double log_cap = 36.0) {
    if (!(L > 0.0) || !std::isfinite(ell) || !std::isfinite(x) || !(s > 0.0 && s < 1.0))
        throw DomainError("build_paper_contours: need L > 0, finite (ell, x), s in (0,1)");
    const auto sa = scaled_arguments(L, ell, x, s);
    DensityQuery q{sa.L1, sa.L2, sa.X, s};
    const CubicExponent g1 = exponent1(q), g2 = exponent2(q);
    const double L4 = std::pow(L, -0.25), rL = std::sqrt(L);
    const double a = 0.5 * std::sqrt((1 - s) / s) * ell * L4;
    const double b = 0.5 * std::sqrt(s / (1 - s)) * ell * L4;
    const double c_Lin = -sa.X / (2 * s) - rL - a;
    const double c_L = sa.X / (2 * (1 - s)) - rL + b;
    const double c_Rin = -sa.X / (2 * s) + rL + a;
    const double c_R = sa.X / (2 * (1 - s)) + rL - b;
    const double h = L4 * std::log(L);
    const double left = 2.0 * std::numbers::pi / 3.0, right = std::numbers::pi / 3.0;

    ContourFamily f;
    f.kind = FamilyKind::paper;
    f.query = q;
    f.log_cap = log_cap;
    f.saddle_left = c_L;
    f.saddle_right = c_R;
    if (q.ell1 > 0 && q.ell2 > 0) {
        try {
            f.saddles = saddle_points(q);
        } catch (const DomainError&) {
        }
    }
    if (!(c_Lin < 0 && c_L < 0 && c_Rin > 0 && c_R > 0))
        throw GeometryError("build_paper_contours: centers violate the left/right ordering");
    auto make = [&](double c, const CubicExponent& g, double sign, double angle) {
        const double g2v = std::abs(g.d2(c));
        const double sc = g2v > 0 ? 1.0 / std::sqrt(0.5 * g2v) : h;
        return detail::vertical_with_rays(c, h, angle, sc, g, sign);
    };
    using enum ContourId;
    f[L_in] = make(c_Lin, g1, 1.0, left);
    f[L] = make(c_L, g2, 1.0, left);
    f[L_out] = make(std::max(c_Lin, c_L) + L4, g1, 1.0, left);
    f[R_in] = make(c_Rin, g1, -1.0, right);
    f[R] = make(c_R, g2, -1.0, right);
    f[R_out] = make(std::min(c_Rin, c_R) - L4, g1, -1.0, right);
    for (ContourId id : {L_out, R_out}) {
        if ((static_cast<int>(id) < 3) != (f[id].center < 0))
            throw GeometryError("build_paper_contours: out-contour crosses the origin");
    }
    validate_family(f, 0.5 * L4, false);
    return f;
}

struct Lemma32ContourParams {
    double c1 = 1.0;
    double c2 = 1.3;
    double c3 = 1.8;

    void validate() const {
        if (!(c1 > 0 && c1 < c2 && c2 < c3 && c3 < 2 * c1)) {
            std::ostringstream os;
            os << "Lemma32ContourParams: need 0 < c1 < c2 < c3 < 2 c1, got (" << c1 << ", " << c2 << ", "
               << c3 << ")";
            throw InvariantError(os.str());
        }
    }
};

/**
 * Pure-ray family with apexes at -+sqrt(L) -+ c_i L^{-1/4}.
 *
 * Decay certificates need the exponents; without a query the rays carry no
 * certificate and cannot be discretized.
 */
inline ContourFamily build_lemma32_contours(double L, const Lemma32ContourParams& p,
                                            const std::optional<DensityQuery>& q = std::nullopt) {
    p.validate();
    if (!(L > 0.0)) throw DomainError("build_lemma32_contours: need L > 0");
    const double L4 = std::pow(L, -0.25), rL = std::sqrt(L);
    const double left = 2.0 * std::numbers::pi / 3.0, right = std::numbers::pi / 3.0;
    ContourFamily f;
    f.kind = FamilyKind::lemma32;
    if (q) f.query = *q;
    f.saddle_left = -rL;
    f.saddle_right = rL;
    const CubicExponent g1 = q ? exponent1(*q) : CubicExponent{}, g2 = q ? exponent2(*q) : CubicExponent{};
    auto make = [&](double c, const CubicExponent& g, double sign, double angle) {
        Contour ct = detail::vertical_with_rays(c, 0.0, angle, L4, g, sign);
        if (!q) {
            for (auto& s : ct.segments) s.certificate.reset();
            ct.log_peak = 0.0;
        } else {
            double pk = -std::numeric_limits<double>::infinity();
            for (auto& s : ct.segments) pk = std::max(pk, s.certificate->log_peak());
            ct.log_peak = pk;
        }
        return ct;
    };
    using enum ContourId;
    f[L_in] = make(-rL - p.c3 * L4, g1, 1.0, left);
    f[L] = make(-rL - p.c2 * L4, g2, 1.0, left);
    f[L_out] = make(-rL - p.c1 * L4, g1, 1.0, left);
    f[R_out] = make(rL + p.c1 * L4, g1, -1.0, right);
    f[R] = make(rL + p.c2 * L4, g2, -1.0, right);
    f[R_in] = make(rL + p.c3 * L4, g1, -1.0, right);
    validate_family(f, 0.5 * std::sqrt(3.0) / 2.0 * std::min(p.c3 - p.c2, p.c2 - p.c1) * L4, true);
    return f;
}

struct DiscretizationOptions {
    int order = 16;
    int ray_order = 8;
    /// Panels per local width on finite segments.
    double panels_per_unit = 0.2;
    /// Geometrically stretched panels per ray (ratio 2).
    int ray_panels = 1;
    std::optional<double> log_cap;
};

struct QuadratureGrid {
    std::vector<cplx> nodes;
    /// Includes direction, orientation, Jacobian and 1/(2 pi i).
    std::vector<cplx> weights;
    std::vector<int> segment_ids;
    /// Discarded tail mass relative to exp(log_peak), summed over rays.
    double truncation_bound = 0.0;
    double log_peak = 0.0;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline const cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

inline void add_panel(QuadratureGrid& g, const PathSegment& s, int seg_id, double t0, double t1,
                      const quad::Rule& rule) {
    const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
    const cplx jac = static_cast<double>(s.orientation) * s.direction * half / kTwoPiI;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        g.nodes.push_back(s.point(mid + half * rule.nodes[i]));
        g.weights.push_back(jac * rule.weights[i]);
        g.segment_ids.push_back(seg_id);
    }
}

} // namespace detail

/// Quadrature for a single segment; `reference` is the log peak the ray cutoff is measured from.
inline void discretize_segment(QuadratureGrid& g, const PathSegment& s, int seg_id,
                               const DiscretizationOptions& opt, double log_cap,
                               std::optional<double> reference = std::nullopt) {
    if (std::abs(std::abs(s.direction) - 1.0) > 1e-14) throw GeometryError("segment direction is not unit");
    if (!s.unbounded) {
        if (s.length <= 0.0) return;
        const auto rule = quad::gauss_legendre(opt.order);
        const int np = std::max(1, static_cast<int>(std::ceil(s.length * opt.panels_per_unit / s.scale - 1e-12)));
        for (int p = 0; p < np; ++p)
            detail::add_panel(g, s, seg_id, s.length * p / np, s.length * (p + 1) / np, rule);
        return;
    }
    if (!s.certificate) throw CertificateError("unbounded segment has no decay certificate");
    const auto& cert = *s.certificate;
    const double ref = reference ? *reference : cert.log_peak();
    const double T = cert.truncation_length(ref, log_cap);
    const double tail = std::exp(cert.log_tail_bound(T) - ref);
    g.truncation_bound += tail;
    if (T <= 0.0) return;
    const auto rule = quad::gauss_legendre(opt.ray_order);
    const int np = std::max(1, opt.ray_panels);
    // panel lengths h, 2h, 4h, ...
    const double h = T / (std::ldexp(1.0, np) - 1.0);
    double t0 = 0.0;
    for (int p = 0; p < np; ++p) {
        const double t1 = (p == np - 1) ? T : t0 + std::ldexp(h, p);
        detail::add_panel(g, s, seg_id, t0, t1, rule);
        t0 = t1;
    }
}

inline QuadratureGrid discretize(const Contour& c, const DiscretizationOptions& opt = {}, double log_cap = 36.0) {
    QuadratureGrid g;
    g.log_peak = c.log_peak;
    const double cap = opt.log_cap.value_or(log_cap);
    for (std::size_t i = 0; i < c.segments.size(); ++i)
        discretize_segment(g, c.segments[i], static_cast<int>(i), opt, cap, c.log_peak);
    return g;
}

inline std::array<QuadratureGrid, 6> discretize(const ContourFamily& f, const DiscretizationOptions& opt = {}) {
    std::array<QuadratureGrid, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = discretize(f.contours[i], opt, f.log_cap);
    return out;
}

/// CSV: contour_id, segment_id, node_re, node_im, weight_re, weight_im.
inline void write_grids_csv(std::ostream& os, const std::array<QuadratureGrid, 6>& grids) {
    os << "contour_id,segment_id,node_re,node_im,weight_re,weight_im\n";
    os.precision(17);
    for (int c = 0; c < 6; ++c) {
        const auto& g = grids[c];
        for (std::size_t i = 0; i < g.size(); ++i)
            os << contour_names[c] << ',' << g.segment_ids[i] << ',' << g.nodes[i].real() << ','
               << g.nodes[i].imag() << ',' << g.weights[i].real() << ',' << g.weights[i].imag() << '\n';
    }
}

} // namespace dlgeo
