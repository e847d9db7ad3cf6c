#include <gtest/gtest.h>

#include <cmath>

#include "dlgeo/geodesic.hpp"

using namespace dlgeo;

TEST(ScalingMap, Examples) {
    auto r = scaling_map({16.0, 0.0, 0.0, 0.5});
    EXPECT_DOUBLE_EQ(r.L1, 8.0);
    EXPECT_DOUBLE_EQ(r.L2, 8.0);
    EXPECT_DOUBLE_EQ(r.X, 0.0);
    r = scaling_map({16.0, 1.0, 0.0, 0.5});
    EXPECT_NEAR(r.L1, 9.0, 1e-14);
    EXPECT_NEAR(r.L2, 7.0, 1e-14);
}

TEST(ScalingMap, SumIdentity) {
    for (double L : {4.0, 16.0, 100.0})
        for (double x : {-2.0, 0.5, 3.0})
            for (double s : {0.2, 0.5, 0.8}) {
                const auto r = scaling_map({L, 0.7, x, s});
                EXPECT_NEAR(r.L1 + r.L2, L + x * x / (4.0 * std::sqrt(L)), 1e-12 * L);
                EXPECT_NEAR(r.X, x * std::sqrt(s * (1 - s)) / std::pow(L, 0.25), 1e-14);
            }
}

TEST(ScalingMap, Domain) {
    EXPECT_THROW(scaling_map({16.0, -20.0, 0.0, 0.5}), DomainError);
    EXPECT_THROW(scaling_map({16.0, 20.0, 0.0, 0.5}), DomainError);
    EXPECT_THROW(scaling_map({16.0, 0.0, 0.0, 1.0}), DomainError);
    EXPECT_THROW(scaling_map({-1.0, 0.0, 0.0, 0.5}), DomainError);
}

TEST(JointDensity, ArgumentsAtZeroX) {
    const auto q = joint_arguments(3.0, 5.0, 0.0, 0.4);
    EXPECT_EQ(q.ell1, 3.0);
    EXPECT_EQ(q.ell2, 5.0);
    EXPECT_EQ(q.x, 0.0);
    const auto a = joint_density(3.0, 5.0, 0.0, 0.4);
    const auto b = density_p(q).value.scaled_by(2.0);
    EXPECT_LE(relative_difference(a, b), 1e-14);
}

TEST(JointDensity, ReflectionSymmetry) {
    // time reversal: (ell1, ell2, x, s) -> (ell2, ell1, x, 1-s)
    TruncationPolicy p;
    p.estimate_error = false;
    const auto a = joint_density(3.0, 4.5, 0.4, 0.4, p);
    const auto b = joint_density(4.5, 3.0, 0.4, 0.6, p);
    EXPECT_LE(relative_difference(a, b), 1e-7);
    // spatial reflection x -> -x
    const auto c = joint_density(3.0, 4.5, -0.4, 0.4, p);
    EXPECT_LE(relative_difference(a, c), 1e-7);
}

TEST(Conditional, ReferenceValues) {
    const auto c = conditional_rescaled_density({16.0, 0.0, 0.0, 0.5});
    EXPECT_NEAR(c.reference, 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(c.ratio(), 1.0, 0.15);
    const auto d = conditional_rescaled_density({16.0, 1.0, 1.0, 0.5});
    EXPECT_NEAR(d.reference, std::exp(-1.0) / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(d.ratio(), 1.0, 0.15);
}

TEST(Conditional, ImprovesWithL) {
    TruncationPolicy p;
    p.estimate_error = false;
    for (auto [ell, x] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}) {
        const double e16 = std::abs(conditional_rescaled_density({16.0, ell, x, 0.5}, p).ratio() - 1.0);
        const double e25 = std::abs(conditional_rescaled_density({25.0, ell, x, 0.5}, p).ratio() - 1.0);
        EXPECT_LT(e25, e16) << ell << "," << x;
    }
}

TEST(GeneralPoint, IdentityFrame) {
    const GeneralPointFrame f{0.0, 0.0, 0.0, 1.0};
    const auto [loc, val] = rescale_general(f, 0.3, 0.7, -1.2);
    EXPECT_DOUBLE_EQ(loc, 0.7);
    EXPECT_DOUBLE_EQ(val, -1.2);
    EXPECT_DOUBLE_EQ(general_density_factor(f), 1.0);
    EXPECT_DOUBLE_EQ(rescale_general_total(f, 2.5), 2.5);
}

TEST(GeneralPoint, TimeScaling) {
    const GeneralPointFrame f{0.0, 1.0, 0.0, 9.0};
    const auto [loc, val] = rescale_general(f, 0.5, 1.0, 1.0);
    EXPECT_NEAR(loc, 4.0, 1e-14);
    EXPECT_NEAR(val, 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(general_density_factor(f), 1.0 / 8.0);
}

TEST(GeneralPoint, ShearedEndpoints) {
    const GeneralPointFrame f{1.0, 0.0, 3.0, 8.0};
    const auto [loc, val] = rescale_general(f, 0.25, 0.5, 2.0);
    EXPECT_NEAR(loc, 4.0 * 0.5 + 0.75 * 1.0 + 0.25 * 3.0, 1e-14);
    EXPECT_NEAR(val, 2.0 * 2.0 - 2.0 / 2.0 * 0.5 * 2.0 - 0.25 * 4.0 / 8.0, 1e-14);
    EXPECT_THROW(rescale_general({0.0, 1.0, 0.0, 1.0}, 0.5, 0.0, 0.0), DomainError);
}

TEST(GeneralPoint, StatisticsMatchStandardFrame) {
    // with x = y the general statistics of the mapped pair equal the standard ones
    for (double T : {0.5, 1.0, 8.0})
        for (double s : {0.3, 0.5}) {
            const GeneralPointFrame f{0.7, 2.0, 0.7, 2.0 + T};
            const double L = 16.0, Pi = 0.12, Ls = 7.3;
            const auto [loc, val] = rescale_general(f, s, Pi, Ls);
            const double Lg = rescale_general_total(f, L);
            const auto g = general_statistics(f, s, loc, val, Lg);
            const auto st = standard_statistics(s, Pi, Ls, L);
            EXPECT_NEAR(g.first, st.first, 1e-12);
            EXPECT_NEAR(g.second, st.second, 1e-12);
        }
}

TEST(Normalization, SmallGridIsClose) {
    NormalizationOptions o;
    o.n_ell = 8;
    o.n_x = 8;
    const auto r = marginal_normalization(6.0, 0.5, o);
    EXPECT_EQ(r.evaluations, 64);
    EXPECT_NEAR(r.integral, 1.0, 0.1);
    EXPECT_LT(r.ell_lo, 0.0);
    EXPECT_NEAR(r.ell_lo, -r.ell_hi, 1e-12);
}
