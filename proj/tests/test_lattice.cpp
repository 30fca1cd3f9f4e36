#include <gtest/gtest.h>

#include <cmath>

#include "phonon/lattice.hpp"

using namespace phonon;

namespace {

ArrayConfig reference_array(CouplingProfile coupling = CouplingProfile::full_long_range, int sites = 15)
{
    ArrayConfig c;
    c.sites = sites;
    c.coupling = coupling;
    c.trap_frequencies.assign(sites, 2 * kPi * 100e3);
    return c;
}

}  // namespace

TEST(Stiffness, ToeplitzSymmetric)
{
    const auto cfg = reference_array();
    const Eigen::MatrixXd k = stiffness_matrix(cfg);
    EXPECT_EQ((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (int i = 0; i < 15; ++i) {
        EXPECT_EQ(k(i, i), 0.0);
        for (int j = 0; j < 15; ++j) {
            if (i != j) {
                EXPECT_EQ(k(i, j), spring_constant(std::abs(i - j), cfg.spacing, cfg.beam, cfg.sphere));
            }
        }
    }
}

TEST(Stiffness, Profiles)
{
    const double k1 = spring_constant(1, 1550e-9, BeamParams{}, SphereParams{});
    const Eigen::MatrixXd nn = stiffness_matrix(reference_array(CouplingProfile::nearest_neighbor));
    const Eigen::MatrixXd inv = stiffness_matrix(reference_array(CouplingProfile::inverse_square));
    const Eigen::MatrixXd nnn = stiffness_matrix(reference_array(CouplingProfile::next_nearest));
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            const int d = std::abs(i - j);
            EXPECT_EQ(nn(i, j), d == 1 ? k1 : 0.0);
            EXPECT_NEAR(inv(i, j), d == 0 ? 0.0 : k1 / (d * d), 1e-25);
            EXPECT_NEAR(nnn(i, j), d == 1 ? k1 : d == 2 ? k1 / 2 : 0.0, 1e-25);
        }
    }
}

TEST(DressedFrequencies, IndependentFormula)
{
    const auto cfg = reference_array();
    const Eigen::VectorXd omega = dressed_frequencies(cfg);
    const Eigen::MatrixXd k = stiffness_matrix(cfg);
    const double m = mass(cfg.sphere);
    for (int i = 0; i < 15; ++i) {
        const double w0 = cfg.trap_frequencies[i];
        EXPECT_NEAR(omega(i), std::sqrt(w0 * w0 + k.row(i).sum() / m), 1e-9 * w0);
    }
    // The end spheres have fewer partners and sit lowest.
    EXPECT_LT(omega(0), omega(7));
    EXPECT_NEAR(omega(0), omega(14), 1e-9 * omega(0));

    auto dressed = cfg;
    dressed.frequencies_are_dressed = true;
    EXPECT_EQ(dressed_frequencies(dressed)(3), cfg.trap_frequencies[3]);
}

TEST(DressedFrequencies, UnstableTrapRejected)
{
    // Between binding nodes the springs turn anti-restoring; a soft trap cannot hold.
    int rejected = 0;
    for (double factor : {1.2, 1.3, 1.4, 1.5, 1.6, 1.7}) {
        auto cfg = reference_array();
        cfg.spacing = factor * cfg.beam.wavelength;
        cfg.trap_frequencies.assign(15, 1.0);
        const double sum = stiffness_matrix(cfg).row(7).sum();
        if (sum < 0.0) {
            EXPECT_THROW(dressed_frequencies(cfg), ConfigError);
            ++rejected;
        }
    }
    EXPECT_GT(rejected, 0);
}

TEST(CouplingMatrix, RotatingWaveRates)
{
    auto cfg = reference_array();
    const Eigen::MatrixXd g = coupling_matrix(cfg);
    const Eigen::VectorXd omega = dressed_frequencies(cfg);
    const Eigen::MatrixXd k = stiffness_matrix(cfg);
    const double m = mass(cfg.sphere);
    for (int i = 0; i < 15; ++i) {
        EXPECT_EQ(g(i, i), 0.0);
        for (int j = 0; j < 15; ++j) {
            if (i != j) {
                EXPECT_NEAR(g(i, j), -k(i, j) / (2 * m * std::sqrt(omega(i) * omega(j))), 1e-9 * std::abs(g(i, j)));
                EXPECT_EQ(g(i, j), g(j, i));
            }
        }
    }
    EXPECT_NEAR(coupling_strength(2, 5, cfg), g(2, 5), 0.0);
    cfg.coupling_scale = 3.0;
    EXPECT_NEAR(coupling_matrix(cfg)(0, 1), 3 * g(0, 1), 1e-12 * std::abs(g(0, 1)));
    EXPECT_THROW(coupling_strength(1, 1, cfg), ConfigError);
}

TEST(CouplingMatrix, TwoSitesAndTridiagonal)
{
    const Eigen::MatrixXd g2 = coupling_matrix(reference_array(CouplingProfile::full_long_range, 2));
    EXPECT_EQ(g2.rows(), 2);
    EXPECT_LT(g2(0, 1), 0.0);
    const Eigen::MatrixXd nn = coupling_matrix(reference_array(CouplingProfile::nearest_neighbor));
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            if (std::abs(i - j) > 1) {
                EXPECT_EQ(nn(i, j), 0.0);
            }
        }
    }
}

TEST(CouplingMatrix, ExplicitOverride)
{
    auto cfg = reference_array(CouplingProfile::explicit_matrix, 3);
    cfg.coupling_override = Eigen::MatrixXd::Zero(3, 3);
    cfg.coupling_override(0, 1) = cfg.coupling_override(1, 0) = 5.0;
    EXPECT_EQ(coupling_matrix(cfg)(1, 0), 5.0);
    cfg.coupling_override(2, 0) = 1.0;
    EXPECT_THROW(coupling_matrix(cfg), ConfigError);
}

TEST(Validation, RejectsBadArrays)
{
    auto cfg = reference_array();
    cfg.trap_frequencies.pop_back();
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = reference_array();
    cfg.spacing = 100e-9;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = reference_array();
    cfg.trap_frequencies[2] = -1.0;
    EXPECT_THROW(validate(cfg), ConfigError);
    EXPECT_THROW(parse_coupling_profile("bogus"), ConfigError);
    EXPECT_EQ(parse_coupling_profile("long_range"), CouplingProfile::full_long_range);
}

TEST(Model, GainLossAndInjection)
{
    const auto cfg = reference_array(CouplingProfile::nearest_neighbor, 3);
    DissipationSpec d = DissipationSpec::none(3);
    d.channels = {Channel::loss, Channel::none, Channel::gain};
    d.rates = {4.0, 0.0, 2.0};
    d.bath_occupations = {0.5, 0.0, 7.0};
    const auto model = build_model(cfg, d);
    EXPECT_EQ(model.gain_loss(0), -2.0);
    EXPECT_EQ(model.gain_loss(2), 1.0);
    EXPECT_EQ(model.injection(0), 2.0);
    EXPECT_EQ(model.injection(2), 0.0);
    EXPECT_FALSE(model.is_closed());
    EXPECT_EQ(model.hopping.diagonal(), dressed_frequencies(cfg));
    d.rates[1] = -1.0;
    EXPECT_THROW(build_model(cfg, d), ConfigError);
}

TEST(State, ThermalAndKick)
{
    const auto n = kick_occupations(5, 2, 10.0, 0.5);
    EXPECT_EQ(n(1), 10.0);
    EXPECT_EQ(n(0), 0.5);
    const auto c = thermal_state(n);
    EXPECT_EQ(c.populations(), n);
    EXPECT_EQ(c.matrix(0, 1), std::complex<double>(0.0));
    EXPECT_THROW(kick_occupations(5, 6), ConfigError);
    EXPECT_THROW(thermal_state(Eigen::VectorXd::Constant(2, -1.0)), ConfigError);
}

TEST(Profiles, ParabolicShapes)
{
    const double edge = 10.0;
    const auto lower = frequency_profile(FrequencyProfile::middle_lower, 15, edge, 0.1);
    const auto higher = frequency_profile(FrequencyProfile::middle_higher, 15, edge, 0.1);
    const auto flat = frequency_profile(FrequencyProfile::uniform, 15, edge, 0.1);
    EXPECT_DOUBLE_EQ(lower.front(), edge);
    EXPECT_DOUBLE_EQ(lower.back(), edge);
    EXPECT_DOUBLE_EQ(lower[7], 9.0);
    EXPECT_DOUBLE_EQ(higher[7], 11.0);
    for (int i = 0; i < 15; ++i) {
        EXPECT_DOUBLE_EQ(flat[i], edge);
        EXPECT_DOUBLE_EQ(lower[i], lower[14 - i]);
        if (i > 0 && i <= 7) {
            EXPECT_LT(lower[i], lower[i - 1]);
        }
    }
    EXPECT_EQ(parse_frequency_profile("middle-higher"), FrequencyProfile::middle_higher);
    EXPECT_THROW(parse_frequency_profile("middle"), ConfigError);
}
