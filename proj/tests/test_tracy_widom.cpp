#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/airy.hpp>

#include "dlgeo/asymptotics.hpp"
#include "dlgeo/tracy_widom.hpp"

using namespace dlgeo;

TEST(Airy, ValueAtZero) { EXPECT_NEAR(airy_ai(0.0), 0.355028053887817239, 1e-15); }

TEST(Airy, MatchesBoostOnRange) {
    double worst = 0.0, worst_p = 0.0;
    for (double t = -20.0; t <= 20.0; t += 0.037) {
        worst = std::max(worst, std::abs(airy_ai(t) - boost::math::airy_ai(t)));
        worst_p = std::max(worst_p, std::abs(airy_ai_prime(t) - boost::math::airy_ai_prime(t)) / std::max(1.0, std::abs(t)));
    }
    EXPECT_LE(worst, 1e-12);
    EXPECT_LE(worst_p, 1e-12);
}

TEST(Airy, LeadingAsymptoticAtTen) {
    const double t = 10.0;
    const double lead = std::exp(-2.0 / 3.0 * t * std::sqrt(t)) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(t, 0.25));
    EXPECT_NEAR(airy_ai(t) / lead, 1.0, 0.01);
}

TEST(Airy, PositiveDecreasing) {
    double prev = airy_ai(0.0);
    for (double t = 0.25; t <= 20.0; t += 0.25) {
        const double v = airy_ai(t);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Airy, Domain) {
    EXPECT_THROW(airy_ai(20.5), DomainError);
    EXPECT_THROW(airy_ai(-21.0), DomainError);
}

TEST(HastingsMcLeod, BoundaryAndPositivity) {
    const auto& sol = tracy_widom().solution();
    EXPECT_NEAR(sol.u.front(), airy_ai(8.0), 1e-12 * airy_ai(8.0) + 1e-300);
    for (double u : sol.u) EXPECT_GT(u, 0.0);
    EXPECT_LE(sol.accuracy_estimate, 1e-12);
    EXPECT_DOUBLE_EQ(sol.ell0(), 8.0);
}

TEST(HastingsMcLeod, ValueAtZeroAgainstFredholm) {
    const double u0 = tracy_widom().u(0.0);
    EXPECT_NEAR(u0, 0.36706155, 1e-7);
    // (log F)'' = -u^2 from the Fredholm route
    const double h = 0.05;
    const double d2 = (std::log(fredholm_F(h)) - 2.0 * std::log(fredholm_F(0.0)) + std::log(fredholm_F(-h))) / (h * h);
    EXPECT_NEAR(-d2, u0 * u0, 1e-3 * u0 * u0);
}

TEST(HastingsMcLeod, Preconditions) {
    EXPECT_THROW(solve_hastings_mcleod(-10.0, 5.0), DomainError);
    EXPECT_THROW(solve_hastings_mcleod(-11.0, 8.0), DomainError);
}

TEST(HastingsMcLeod, SmallerDomainAgrees) {
    const TracyWidomGUE small(solve_hastings_mcleod(-6.0, 8.0));
    for (double L : {-6.0, -1.0, 3.0, 7.5}) EXPECT_NEAR(small.F(L), tracy_widom().F(L), 1e-14);
}

TEST(TracyWidom, Limits) {
    const auto& tw = tracy_widom();
    EXPECT_GE(tw.F(10.0), 1.0 - 1e-19);
    EXPECT_EQ(tw.F(30.0), 1.0);
    EXPECT_LT(tw.f(30.0), 1e-90);
    EXPECT_THROW(tw.F(-10.5), DomainError);
}

TEST(TracyWidom, DensityAtTen) { EXPECT_NEAR(f_gue(10.0) / 1.94e-21, 1.0, 0.05); }

TEST(TracyWidom, MonotoneAndNormalized) {
    const auto& tw = tracy_widom();
    double prev = 0.0;
    for (double L = -10.0; L <= 10.0; L += 0.05) {
        const double F = tw.F(L);
        EXPECT_GE(F, prev);
        EXPECT_GE(tw.f(L), 0.0);
        EXPECT_LE(F, 1.0);
        prev = F;
    }
    const auto rule = quad::gauss_legendre(40);
    double integral = 0.0;
    for (int panel = 0; panel < 20; ++panel) {
        const double a = -10.0 + panel, b = a + 1.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            integral += 0.5 * rule.weights[i] * tw.f(0.5 * (a + b) + 0.5 * rule.nodes[i]);
    }
    EXPECT_GE(integral, 0.999);
    EXPECT_LE(integral, 1.0 + 1e-12);
}

TEST(TracyWidom, DensityIsDerivative) {
    const auto& tw = tracy_widom();
    for (double L : {-4.0, -1.3, 0.0, 2.2}) {
        const double h = 1e-3;
        const double fd = (tw.F(L + h) - tw.F(L - h)) / (2 * h);
        EXPECT_NEAR(tw.f(L), fd, 1e-6);
    }
}

TEST(TracyWidom, TailRatio) {
    double prev = 0.0;
    for (double L : {6.0, 8.0, 10.0, 12.0}) {
        const double r = std::exp(tracy_widom().log_f(L) - fgue_tail(L).log_mag);
        EXPECT_GT(r, prev);
        EXPECT_LT(r, 1.0);
        if (L == 8.0) EXPECT_NEAR(r, 1.0, 0.10);
        prev = r;
    }
}

TEST(Fredholm, AgreesWithPainleve) {
    for (double L = -5.0; L <= 3.0; L += 0.5) EXPECT_NEAR(fredholm_F(L), F_gue(L), 1e-8) << "L=" << L;
}

TEST(Fredholm, RightTail) {
    const double v = fredholm_F(8.0);
    EXPECT_GE(v, 1.0 - 1e-12);
    EXPECT_LE(v, 1.0 + 1e-15);
}

TEST(Fredholm, NodeConvergence) {
    EXPECT_NEAR(tw_detail::fredholm_once(0.0, 20), tw_detail::fredholm_once(0.0, 40), 1e-8);
}

TEST(Fredholm, Preconditions) {
    EXPECT_THROW(fredholm_F(11.0), DomainError);
    EXPECT_THROW(fredholm_F(0.0, 10), DomainError);
}
