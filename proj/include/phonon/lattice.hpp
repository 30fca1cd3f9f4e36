#pragma once

// Rotating-wave model of the array: hopping matrix W, gain/loss diagonal L,
// bath injection diagonal M, and the thermal initial correlation matrix.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "phonon/errors.hpp"
#include "phonon/optical_binding.hpp"

namespace phonon {

enum class CouplingProfile {
    full_long_range,   // every pair, from the binding stiffness at |i-j| d
    nearest_neighbor,  // |i-j| = 1 only
    inverse_square,    // k_n = k_1 / n^2
    next_nearest,      // k_1 and k_2 = k_1 / 2
    explicit_matrix,   // hopping rates supplied directly
};

inline std::string to_string(CouplingProfile p)
{
    switch (p) {
    case CouplingProfile::full_long_range: return "full_long_range";
    case CouplingProfile::nearest_neighbor: return "nearest_neighbor";
    case CouplingProfile::inverse_square: return "inverse_square";
    case CouplingProfile::next_nearest: return "next_nearest";
    case CouplingProfile::explicit_matrix: return "explicit";
    }
    return "unknown";
}

inline CouplingProfile parse_coupling_profile(const std::string& name)
{
    if (name == "full_long_range" || name == "long_range") return CouplingProfile::full_long_range;
    if (name == "nearest_neighbor") return CouplingProfile::nearest_neighbor;
    if (name == "inverse_square") return CouplingProfile::inverse_square;
    if (name == "next_nearest") return CouplingProfile::next_nearest;
    if (name == "explicit") return CouplingProfile::explicit_matrix;
    throw ConfigError("unknown coupling model '" + name + "'");
}

struct ArrayConfig {
    int sites = 15;
    double spacing = 1550e-9;  // m
    BeamParams beam;
    SphereParams sphere;
    /// Per-site trap frequencies, rad/s. Bare (dressed by the binding springs)
    /// unless frequencies_are_dressed is set, in which case they are used as
    /// the diagonal of W directly.
    std::vector<double> trap_frequencies;
    bool frequencies_are_dressed = false;
    CouplingProfile coupling = CouplingProfile::full_long_range;
    Eigen::MatrixXd coupling_override;  // rad/s, explicit_matrix only
    double coupling_scale = 1.0;        // dimensionless multiplier on every g_ij
};

inline void validate(const ArrayConfig& config)
{
    detail::require(config.sites >= 2, "array needs at least 2 sites");
    detail::require(std::isfinite(config.spacing) && config.spacing > 0.0, "spacing must be > 0");
    validate(config.beam);
    validate(config.sphere);
    detail::require(static_cast<int>(config.trap_frequencies.size()) == config.sites,
                    "need one trap frequency per site");
    for (double w : config.trap_frequencies) {
        detail::require(std::isfinite(w) && w > 0.0, "trap frequencies must be > 0");
    }
    detail::require(std::isfinite(config.coupling_scale), "coupling scale must be finite");
    if (config.coupling == CouplingProfile::explicit_matrix) {
        const auto& g = config.coupling_override;
        detail::require(g.rows() == config.sites && g.cols() == config.sites,
                        "explicit coupling matrix must be sites x sites");
        detail::require(g.allFinite(), "explicit coupling matrix has non-finite entries");
        detail::require((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()),
                        "explicit coupling matrix must be symmetric");
    } else {
        detail::require(config.spacing >= config.sphere.diameter, "spacing below one sphere diameter");
    }
}

/// Pairwise binding stiffness k_ij (N/m) for the configured profile; zero diagonal.
inline Eigen::MatrixXd stiffness_matrix(const ArrayConfig& config)
{
    validate(config);
    detail::require(config.coupling != CouplingProfile::explicit_matrix,
                    "explicit coupling matrices carry no stiffness");
    const int n = config.sites;
    std::vector<double> per_distance(n, 0.0);
    const double k1 = spring_constant(1, config.spacing, config.beam, config.sphere);
    for (int r = 1; r < n; ++r) {
        switch (config.coupling) {
        case CouplingProfile::full_long_range:
            per_distance[r] = spring_constant(r, config.spacing, config.beam, config.sphere);
            break;
        case CouplingProfile::nearest_neighbor:
            per_distance[r] = r == 1 ? k1 : 0.0;
            break;
        case CouplingProfile::inverse_square:
            per_distance[r] = k1 / (static_cast<double>(r) * r);
            break;
        case CouplingProfile::next_nearest:
            per_distance[r] = r == 1 ? k1 : (r == 2 ? k1 / 2 : 0.0);
            break;
        case CouplingProfile::explicit_matrix:
            break;
        }
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) {
                k(i, j) = per_distance[std::abs(i - j)];
            }
        }
    }
    return k;
}

/// Rotating-wave site frequencies Omega_i = sqrt((k0_i + sum_j k_ij) / m), k0_i = m Omega0_i^2.
inline Eigen::VectorXd dressed_frequencies(const ArrayConfig& config)
{
    validate(config);
    const int n = config.sites;
    Eigen::VectorXd omega = Eigen::Map<const Eigen::VectorXd>(config.trap_frequencies.data(), n);
    if (config.frequencies_are_dressed || config.coupling == CouplingProfile::explicit_matrix) {
        return omega;
    }
    const double m = mass(config.sphere);
    const Eigen::MatrixXd k = stiffness_matrix(config);
    for (int i = 0; i < n; ++i) {
        const double total = m * omega(i) * omega(i) + k.row(i).sum();
        if (!(total > 0.0)) {
            throw ConfigError("unstable trap at site " + std::to_string(i + 1)
                              + ": k0 + sum k_ij = " + std::to_string(total) + " N/m");
        }
        omega(i) = std::sqrt(total / m);
    }
    return omega;
}

/// Hopping matrix g_ij (rad/s), zero diagonal.
inline Eigen::MatrixXd coupling_matrix(const ArrayConfig& config)
{
    validate(config);
    if (config.coupling == CouplingProfile::explicit_matrix) {
        Eigen::MatrixXd g = config.coupling_scale * config.coupling_override;
        g.diagonal().setZero();
        return g;
    }
    const int n = config.sites;
    const double m = mass(config.sphere);
    const Eigen::MatrixXd k = stiffness_matrix(config);
    const Eigen::VectorXd omega = dressed_frequencies(config);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = config.coupling_scale * coupling_strength(k(i, j), m, omega(i), omega(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

/// g_ij for one pair of sites (0-based).
inline double coupling_strength(int i, int j, const ArrayConfig& config)
{
    detail::require(i != j, "coupling needs two distinct sites");
    detail::require(i >= 0 && j >= 0 && i < config.sites && j < config.sites, "site index out of range");
    return coupling_matrix(config)(i, j);
}

enum class Channel { none, loss, gain };

/// Per-site feedback: loss sites cool at rate Gamma toward bath occupation n,
/// gain sites amplify at rate Gamma and inject nothing.
struct DissipationSpec {
    std::vector<double> rates;              // Gamma_j, rad/s, >= 0
    std::vector<Channel> channels;
    std::vector<double> bath_occupations;   // n_j >= 0

    static DissipationSpec none(int sites)
    {
        return {std::vector<double>(sites, 0.0), std::vector<Channel>(sites, Channel::none),
                std::vector<double>(sites, 0.0)};
    }
};

struct CouplingModel {
    Eigen::MatrixXd hopping;    // W, rad/s, real symmetric
    Eigen::VectorXd gain_loss;  // diagonal of L, rad/s
    Eigen::VectorXd injection;  // diagonal of M, rad/s, >= 0

    Eigen::Index size() const { return hopping.rows(); }
    bool is_closed() const
    {
        return gain_loss.cwiseAbs().maxCoeff() == 0.0 && injection.cwiseAbs().maxCoeff() == 0.0;
    }

    static CouplingModel closed(Eigen::MatrixXd w)
    {
        const auto n = w.rows();
        return {std::move(w), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    }
};

/// Largest |g_ij|, i != j. Sets the unit of dimensionless time.
inline double max_coupling(const CouplingModel& model)
{
    Eigen::MatrixXd off = model.hopping;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff();
}

inline void validate(const DissipationSpec& diss, int sites)
{
    detail::require(static_cast<int>(diss.rates.size()) == sites
                        && static_cast<int>(diss.channels.size()) == sites
                        && static_cast<int>(diss.bath_occupations.size()) == sites,
                    "dissipation spec must list every site");
    for (int j = 0; j < sites; ++j) {
        detail::require(std::isfinite(diss.rates[j]) && diss.rates[j] >= 0.0, "dissipation rates must be >= 0");
        detail::require(std::isfinite(diss.bath_occupations[j]) && diss.bath_occupations[j] >= 0.0,
                        "bath occupations must be >= 0");
    }
}

inline CouplingModel build_model(const ArrayConfig& config, const DissipationSpec& diss)
{
    validate(config);
    validate(diss, config.sites);
    const int n = config.sites;
    CouplingModel model;
    model.hopping = coupling_matrix(config);
    model.hopping.diagonal() = dressed_frequencies(config);
    model.gain_loss = Eigen::VectorXd::Zero(n);
    model.injection = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        switch (diss.channels[j]) {
        case Channel::loss:
            model.gain_loss(j) = -diss.rates[j] / 2;
            model.injection(j) = diss.rates[j] * diss.bath_occupations[j];
            break;
        case Channel::gain:
            model.gain_loss(j) = diss.rates[j] / 2;
            break;
        case Channel::none:
            break;
        }
    }
    return model;
}

/// C_ij = <b_i^dagger b_j> at time t (s).
struct CorrelationState {
    Eigen::MatrixXcd matrix;
    double time = 0.0;

    Eigen::VectorXd populations() const { return matrix.diagonal().real(); }
};

inline CorrelationState thermal_state(const Eigen::VectorXd& occupations)
{
    for (Eigen::Index i = 0; i < occupations.size(); ++i) {
        detail::require(std::isfinite(occupations(i)) && occupations(i) >= 0.0,
                        "thermal occupations must be >= 0");
    }
    CorrelationState state;
    state.matrix = occupations.cast<std::complex<double>>().asDiagonal();
    return state;
}

/// Occupations with one highly excited site (1-based) over a cold background.
inline Eigen::VectorXd kick_occupations(int sites, int kicked_site, double kick = 1e3, double background = 1e-2)
{
    detail::require(kicked_site >= 1 && kicked_site <= sites, "kicked site out of range");
    Eigen::VectorXd n = Eigen::VectorXd::Constant(sites, background);
    n(kicked_site - 1) = kick;
    return n;
}

enum class FrequencyProfile { uniform, middle_lower, middle_higher };

inline FrequencyProfile parse_frequency_profile(const std::string& name)
{
    if (name == "uniform") return FrequencyProfile::uniform;
    if (name == "middle-lower") return FrequencyProfile::middle_lower;
    if (name == "middle-higher") return FrequencyProfile::middle_higher;
    throw ConfigError("unknown frequency profile '" + name + "'");
}

/// Parabolic trap-frequency profile pinned at the edges: the middle site sits
/// depth * edge_frequency below (middle_lower) or above (middle_higher) the edges.
inline std::vector<double> frequency_profile(FrequencyProfile profile, int sites, double edge_frequency,
                                             double depth = 0.02)
{
    detail::require(sites >= 2, "profile needs at least 2 sites");
    detail::require(edge_frequency > 0.0 && depth >= 0.0 && depth < 1.0, "invalid profile parameters");
    const double sign = profile == FrequencyProfile::middle_lower ? -1.0
        : profile == FrequencyProfile::middle_higher              ? 1.0
                                                                  : 0.0;
    std::vector<double> out(sites);
    for (int i = 1; i <= sites; ++i) {
        const double s = static_cast<double>(2 * i - sites - 1) / (sites - 1);
        out[i - 1] = edge_frequency * (1.0 + sign * depth * (1.0 - s * s));
    }
    return out;
}

}  // namespace phonon
