#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dlgeo/geodesic.hpp"
#include "dlgeo/oracle.hpp"

using namespace dlgeo;

namespace {

struct Fixture {
    DensityQuery q = to_density_query({9.0, 0.0, 0.0, 0.5});
    ContourFamily fam = build_saddle_contours(q);
    LogScaledValue main = term_T({1, 1}, fam).value;
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

ContourFamily shifted(const DensityQuery& q) {
    SaddleContourOptions o;
    o.anchor_shift = 0.3;
    return build_saddle_contours(q, o);
}

ContourFamily widened(const DensityQuery& q) {
    SaddleContourOptions o;
    o.gap_factor = 1.5;
    o.vertical_drop = 22.0;
    return build_saddle_contours(q, o);
}

} // namespace

TEST(BruteForce, AgreesWithMainPath) {
    const auto& f = fx();
    const auto b = t11_bruteforce_full(f.q, shifted(f.q), 48);
    EXPECT_LE(oracle_rel_diff(b.value, f.main), 1e-4);
    EXPECT_GT(b.evaluations, 1e6);
}

TEST(BruteForce, ContourInvariance) {
    const auto& f = fx();
    const auto a = t11_bruteforce(f.q, shifted(f.q), 64);
    const auto b = t11_bruteforce(f.q, widened(f.q), 64);
    EXPECT_LE(oracle_rel_diff(a, b), 1e-8);
}

TEST(BruteForce, IntegrandSpotCheck) {
    const auto& f = fx();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto g1 = exponent1(f.q), g2 = exponent2(f.q);
    for (int i = 0; i < 20; ++i) {
        cplx z[4];
        for (auto& w : z) w = {u(rng), u(rng)};
        const cplx main = z_weight_residue(1, 1, 0) * hcv_kernel<double>(std::span<const cplx>(z, 4), 1, 1) *
                          std::exp(g1(z[0]) - g1(z[1]) + g2(z[2]) - g2(z[3]));
        const cplx o = t11_explicit_integrand(f.q, z[0], z[1], z[2], z[3]);
        EXPECT_LE(std::abs(main - o) / std::abs(o), 1e-12);
    }
}

TEST(BruteForce, Budget) {
    const auto& f = fx();
    EXPECT_THROW(t11_bruteforce(f.q, shifted(f.q), 64, 1e5), BudgetError);
    EXPECT_THROW(t11_bruteforce(f.q, shifted(f.q), 4), DomainError);
}

TEST(MonteCarlo, ErrorScaling) {
    const auto& f = fx();
    const auto a = mc_estimate(f.q, f.fam, 1 << 16, 42);
    const auto b = mc_estimate(f.q, f.fam, 1 << 18, 42);
    EXPECT_NEAR(a.rel_std_err / b.rel_std_err, 2.0, 0.4);
    for (const auto& m : {a, b}) EXPECT_LE(oracle_rel_diff(m.value, f.main), 3.0 * m.rel_std_err);
}

TEST(MonteCarlo, Reproducible) {
    const auto& f = fx();
    const auto a = mc_estimate(f.q, f.fam, 50000, 7, 1);
    const auto b = mc_estimate(f.q, f.fam, 50000, 7, 1);
    const auto c = mc_estimate(f.q, f.fam, 50000, 7, 4);
    EXPECT_EQ(a.value.log_mag, b.value.log_mag);
    EXPECT_EQ(a.value.log_mag, c.value.log_mag);
    EXPECT_EQ(a.std_err, c.std_err);
    const auto d = mc_estimate(f.q, f.fam, 50000, 8, 1);
    EXPECT_NE(a.value.log_mag, d.value.log_mag);
}

TEST(ZOracle, SeriesMatchesClosedForm) {
    for (int k1 = 1; k1 <= 4; ++k1)
        for (int k2 = 1; k2 <= 4; ++k2)
            for (int m = 0; m <= 2 * k1; ++m)
                EXPECT_NEAR(oracle_detail::series_residue(k1, k2, m), z_weight_residue(k1, k2, m), 1e-12)
                    << k1 << k2 << m;
}

TEST(ZOracle, RationalInners) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k1 = 1; k1 <= 3; ++k1)
        for (int k2 = 1; k2 <= 2; ++k2) {
            const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
            auto inner = [&](unsigned m) { return (a + double(m)) / (b + double(std::popcount(m)) + 3.0); };
            const auto r = z_methods_compare(k1, k2, inner, {}, 1e-12);
            EXPECT_TRUE(r.passed) << r.target_id << " " << r.rel_diff;
            EXPECT_EQ(r.to_json()["target_id"], r.target_id);
        }
}

TEST(ZOracle, ZeroAndConstantInners) {
    auto zero = [](unsigned) { return cplx{}; };
    const auto r0 = z_methods_compare(2, 1, zero);
    EXPECT_TRUE(r0.passed);
    EXPECT_EQ(r0.abs_diff, 0.0);
    // constant inner: every assignment contributes
    auto one = [](unsigned) { return cplx{1.0}; };
    const auto r1 = z_methods_compare(2, 2, one);
    EXPECT_LE(r1.abs_diff, 1e-12);
    EXPECT_TRUE(r1.passed);
}
