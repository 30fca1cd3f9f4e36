#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "phonon/scattering.hpp"

using namespace phonon;

namespace {

ScatterParams nearest(double d, double g, Direction dir = Direction::loss_to_gain)
{
    return {d, g, Hopping::nearest, 0.5, dir};
}

ScatterParams next(double d, double g, Direction dir = Direction::loss_to_gain)
{
    return {d, g, Hopping::next_nearest, 0.5, dir};
}

// Bisection for 2 cos k + cos 2k = delta on the branch where the left side
// falls monotonically (k between 0 and the band minimum at cos k = -1/2).
double bisect_next_nearest(double delta)
{
    double a = 0.0;
    double b = std::acos(-0.5);
    auto f = [&](double k) { return 2 * std::cos(k) + std::cos(2 * k) - delta; };
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
        const double m = 0.5 * (a + b);
        (f(m) > 0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(Wavevector, Nearest)
{
    EXPECT_NEAR(wavevector(0.0, Hopping::nearest), kPi / 2, 1e-15);
    EXPECT_LT(wavevector(2.0 - 1e-10, Hopping::nearest), 2e-5);
    EXPECT_NEAR(wavevector(1.0, Hopping::nearest), kPi / 3, 1e-15);
    try {
        wavevector(2.5, Hopping::nearest);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("-2"), std::string::npos);
    }
    EXPECT_THROW(wavevector(2.0, Hopping::nearest), ConfigError);
}

TEST(Wavevector, NextNearestRootAndBranch)
{
    const double k = wavevector(0.0, Hopping::next_nearest);
    EXPECT_LT(std::abs(2 * std::cos(k) + std::cos(2 * k)), 1e-12);
    EXPECT_NEAR(k, bisect_next_nearest(0.0), 1e-12);
    for (double d = -1.49; d < 3.0; d += 0.05) {
        const double q = wavevector(d, Hopping::next_nearest);
        EXPECT_GT(q, 0.0);
        EXPECT_LT(q, kPi);
        EXPECT_GT(2 * std::sin(q) + 2 * std::sin(2 * q), 0.0) << d;
        EXPECT_NEAR(q, bisect_next_nearest(d), 1e-9) << d;
    }
    const Band b = band_edges(Hopping::next_nearest);
    EXPECT_DOUBLE_EQ(b.lower, -1.5);
    EXPECT_DOUBLE_EQ(b.upper, 3.0);
    EXPECT_THROW(wavevector(-1.6, Hopping::next_nearest), ConfigError);
}

TEST(ClosedForm, TrivialAndReciprocal)
{
    for (double d = -1.9; d < 1.95; d += 0.1) {
        const auto s = scatter_closed_form(nearest(d, 0.0));
        EXPECT_EQ(std::abs(s.reflection), 0.0);
        EXPECT_NEAR(std::abs(s.transmission), 1.0, 1e-14);
        for (double g : {-3.0, 0.7, 4.2}) {
            const auto lg = scatter_closed_form(nearest(d, g));
            const auto gl = scatter_closed_form(nearest(d, g, Direction::gain_to_loss));
            EXPECT_EQ(lg.transmission, gl.transmission);
        }
    }
    EXPECT_THROW(scatter_closed_form(nearest(2.0, 1.0)), ConfigError);
    EXPECT_THROW(scatter_closed_form(next(0.0, 1.0)), ConfigError);
}

TEST(ClosedForm, ZeroReflectionLine)
{
    for (double d = -1.9; d < 1.95; d += 0.1) {
        const double g = 2 * std::sqrt(4 - d * d);
        EXPECT_LT(std::abs(scatter_closed_form(nearest(d, g, Direction::gain_to_loss)).reflection), 1e-14);
        EXPECT_GT(std::abs(scatter_closed_form(nearest(d, g)).reflection), 0.1);
    }
}

TEST(Numeric, AgreesWithClosedFormOnGrid)
{
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double d = -1.96 + 3.92 * i / 49;
        for (int j = 0; j < 50; ++j) {
            const double g = -6.0 + 12.0 * j / 49;
            for (auto dir : {Direction::loss_to_gain, Direction::gain_to_loss}) {
                const auto a = scatter_closed_form(nearest(d, g, dir));
                const auto b = scatter_numeric(nearest(d, g, dir));
                worst = std::max({worst, std::abs(a.reflection - b.reflection),
                                  std::abs(a.transmission - b.transmission)});
            }
        }
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Numeric, DefectFreeIsTransparent)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> nn(-1.99, 1.99);
    std::uniform_real_distribution<double> nnn(-1.49, 2.99);
    for (int i = 0; i < 100; ++i) {
        for (const auto& p : {nearest(nn(rng), 0.0), next(nnn(rng), 0.0)}) {
            const auto s = scatter_numeric(p);
            EXPECT_LT(std::abs(s.reflection), 1e-8);
            EXPECT_NEAR(std::abs(s.transmission), 1.0, 1e-8);
            EXPECT_NEAR(std::norm(s.reflection) + std::norm(s.transmission), 1.0, 1e-8);
        }
    }
}

TEST(Numeric, TransmissionReciprocity)
{
    for (double d : {-1.4, -1.2, -0.5, 0.0, 1.1, 2.5}) {
        for (double g : {-5.0, -1.0, 0.3, 2.0, 7.5}) {
            const auto lg = scatter_numeric(next(d, g));
            const auto gl = scatter_numeric(next(d, g, Direction::gain_to_loss));
            EXPECT_LT(std::abs(lg.transmission - gl.transmission), 1e-8) << d << " " << g;
        }
    }
}

TEST(Numeric, WindowIndependent)
{
    for (const auto& p : {nearest(0.4, 1.7), next(0.4, 1.7), next(-1.3, 2.2), next(2.2, -0.9)}) {
        const auto a = scatter_numeric(p, 20);
        const auto b = scatter_numeric(p, 40);
        EXPECT_LT(std::abs(a.reflection - b.reflection), 1e-10);
        EXPECT_LT(std::abs(a.transmission - b.transmission), 1e-10);
        EXPECT_LT(a.residual, 1e-10);
    }
}

TEST(Numeric, ChannelThreshold)
{
    EXPECT_FALSE(scatterable(-1.0, Hopping::next_nearest));
    EXPECT_TRUE(scatterable(-1.0, Hopping::nearest));
    EXPECT_TRUE(scatterable(-1.0 + 1e-6, Hopping::next_nearest));
    EXPECT_FALSE(scatterable(3.0, Hopping::next_nearest));
    EXPECT_THROW(scatter_numeric(next(-1.0, 1.0)), ConfigError);
    const auto map = asymmetry_map({-1.0, 0.0}, {1.0}, Hopping::next_nearest);
    EXPECT_EQ(map.skipped, 1);
}

TEST(Numeric, ChannelCount)
{
    EXPECT_EQ(scatter_numeric(next(0.0, 1.0)).channels, 1);
    EXPECT_EQ(scatter_numeric(next(-1.2, 1.0)).channels, 2);
    EXPECT_THROW(scatter_numeric(next(0.0, 1.0), 10), ConfigError);
}

TEST(Eta, ClampAndLimits)
{
    EXPECT_EQ(asymmetry_eta({0.0, 0.0}, {0.0, 0.0}), 0.0);
    EXPECT_EQ(asymmetry_eta({1.0, 0.0}, {0.0, 0.0}), -30.0);
    EXPECT_EQ(asymmetry_eta({0.0, 0.0}, {1.0, 0.0}, 12.0), 12.0);
    EXPECT_NEAR(asymmetry_eta({0.5, 0.0}, {0.0, 1.0}), std::log(4.0), 1e-15);
}

TEST(Map, AntisymmetryAndRidge)
{
    std::vector<double> deltas{-2.0, -1.0, 0.0, 0.5, 1.5, 2.0};
    std::vector<double> gammas;
    for (int j = 0; j <= 240; ++j) {
        gammas.push_back(-6.0 + 12.0 * j / 240);
    }
    const auto map = asymmetry_map(deltas, gammas, Hopping::nearest);
    EXPECT_EQ(map.skipped, 2);
    ASSERT_EQ(map.points.size(), 4 * gammas.size());
    for (std::size_t r = 0; r < 4; ++r) {
        const MapPoint* row = &map.points[r * gammas.size()];
        double best = -1.0;
        double best_gamma = 0.0;
        for (std::size_t j = 0; j < gammas.size(); ++j) {
            EXPECT_NEAR(row[j].eta, -row[gammas.size() - 1 - j].eta, 1e-9);
            if (row[j].gamma > 0 && std::abs(row[j].eta) > best) {
                best = std::abs(row[j].eta);
                best_gamma = row[j].gamma;
            }
        }
        const double d = row[0].delta;
        EXPECT_NEAR(best_gamma, 2 * std::sqrt(4 - d * d), 12.0 / 240) << d;
        ASSERT_TRUE(row[0].closed_lg.has_value());
    }
}

TEST(Map, ZeroGammaGivesZeroEta)
{
    const auto map = asymmetry_map({-0.5, 0.5}, {0.0}, Hopping::next_nearest);
    for (const auto& p : map.points) {
        EXPECT_EQ(p.eta, 0.0);
        EXPECT_FALSE(p.closed_lg.has_value());
    }
}

TEST(Locus, NearestReduction)
{
    const std::vector<double> deltas{-1.7, -0.6, 0.0, 0.9, 1.8};
    const auto locus = zero_reflection_locus(Hopping::nearest, deltas);
    for (const auto& lp : locus) {
        ASSERT_EQ(lp.roots.size(), 1u) << lp.delta;
        EXPECT_NEAR(lp.roots[0], 2 * std::sqrt(4 - lp.delta * lp.delta), 1e-6);
        EXPECT_LT(lp.beta_gl_at_root[0], 1e-8);
        EXPECT_GT(lp.residual_reflection[0], 0.0);
    }
}

TEST(Locus, NextNearestRoots)
{
    // Zeros of the gain-to-loss reflection trace 2 sqrt(4 - (delta - 1)^2);
    // with two open channels (delta below -1) none exist.
    const std::vector<double> deltas{-1.3, -0.5, 0.0, 1.0, 2.4};
    const auto locus = zero_reflection_locus(Hopping::next_nearest, deltas);
    EXPECT_TRUE(locus[0].roots.empty());
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        const auto& lp = locus[i];
        ASSERT_EQ(lp.roots.size(), 1u) << lp.delta;
        const double shifted = lp.delta - 1.0;
        EXPECT_NEAR(lp.roots[0], 2 * std::sqrt(4 - shifted * shifted), 1e-6);
        EXPECT_LT(lp.beta_gl_at_root[0], 1e-8);
        EXPECT_GT(lp.residual_reflection[0], 0.0);
    }
    EXPECT_THROW(zero_reflection_locus(Hopping::next_nearest, {3.5}), ConfigError);
}
