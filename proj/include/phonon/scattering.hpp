#pragma once

// Scattering of a lattice phonon off an adjacent loss/gain pair.
// Energies and rates are in units of the nearest-neighbour hopping g.
// Sites: left lead n <= 0 at position n, loss site at 1, gain site at 2,
// right lead n >= 0 at position n + 3. The incident wave comes from the left,
// so loss_to_gain meets the loss site first; gain_to_loss is Gamma -> -Gamma.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phonon/constants.hpp"
#include "phonon/errors.hpp"
#include "phonon/parallel.hpp"

namespace phonon {

enum class Hopping { nearest, next_nearest };
enum class Direction { loss_to_gain, gain_to_loss };

inline std::string to_string(Hopping h) { return h == Hopping::nearest ? "nearest" : "next-nearest"; }

inline Hopping parse_hopping(const std::string& name)
{
    if (name == "nearest") return Hopping::nearest;
    if (name == "next-nearest" || name == "next_nearest") return Hopping::next_nearest;
    throw ConfigError("unknown hopping model '" + name + "' (expected nearest or next-nearest)");
}

struct ScatterParams {
    double delta = 0.0;   // E - Omega
    double gamma = 0.0;   // gain/loss rate
    Hopping hopping = Hopping::nearest;
    double ratio = 0.5;   // g2 / g1 for next-nearest hopping
    Direction direction = Direction::loss_to_gain;
};

struct ScatteringSolution {
    std::complex<double> reflection;    // beta
    std::complex<double> transmission;  // gamma
    Direction direction = Direction::loss_to_gain;
    double residual = 0.0;              // max |site equation|, numeric solver only
    double condition = 0.0;             // estimated 1-norm condition number, numeric solver only
    int channels = 1;                   // propagating channels per lead
};

struct Band {
    double lower;
    double upper;
};

/// Energies carried by lead plane waves, 2 cos k + 2 ratio cos 2k.
inline Band band_edges(Hopping hopping, double ratio = 0.5)
{
    if (hopping == Hopping::nearest) {
        return {-2.0, 2.0};
    }
    detail::require(std::isfinite(ratio) && ratio > 0.0, "hopping ratio must be > 0");
    const double upper = std::max(2.0 + 2.0 * ratio, -2.0 + 2.0 * ratio);
    double lower = std::min(2.0 + 2.0 * ratio, -2.0 + 2.0 * ratio);
    const double vertex = -1.0 / (4.0 * ratio);
    if (vertex > -1.0) {
        lower = std::min(lower, vertex - 2.0 * ratio);
    }
    return {lower, upper};
}

namespace detail {

[[noreturn]] inline void out_of_band(double delta, Band band)
{
    std::ostringstream msg;
    msg.precision(17);
    msg << "delta = " << delta << " outside the open band (" << band.lower << ", " << band.upper << ")";
    throw ConfigError(msg.str());
}

// For ratio > 1/4 the k = pi energy lies inside the band: a second channel
// opens there and its group velocity vanishes.
inline bool at_channel_threshold(double delta, Hopping hopping, double ratio)
{
    if (hopping == Hopping::nearest || !(ratio > 0.25)) {
        return false;
    }
    const double threshold = -2.0 + 2.0 * ratio;
    return std::abs(delta - threshold) <= 1e-9 * (1.0 + std::abs(threshold));
}

inline double dispersion_velocity(double q, Hopping hopping, double ratio)
{
    const double v = 2.0 * std::sin(q);
    return hopping == Hopping::nearest ? v : v + 4.0 * ratio * std::sin(2.0 * q);
}

}  // namespace detail

/// True when delta lies in the open band and away from a channel threshold,
/// i.e. scatter_numeric has a well-posed problem to solve.
inline bool scatterable(double delta, Hopping hopping, double ratio = 0.5)
{
    const Band band = band_edges(hopping, ratio);
    return std::isfinite(delta) && delta > band.lower && delta < band.upper
           && !detail::at_channel_threshold(delta, hopping, ratio);
}

/// Wavevector kb in (0, pi) of the incident wave. For next-nearest hopping the
/// branch with cos k = (-1 + sqrt(1 + 4 r (2 r + delta))) / (4 r), whose group
/// velocity 2 sin k (1 + 4 r cos k) is positive.
inline double wavevector(double delta, Hopping hopping, double ratio = 0.5)
{
    const Band band = band_edges(hopping, ratio);
    if (!(std::isfinite(delta) && delta > band.lower && delta < band.upper)) {
        detail::out_of_band(delta, band);
    }
    double c = 0.0;
    if (hopping == Hopping::nearest) {
        c = delta / 2.0;
    } else {
        const double disc = 1.0 + 4.0 * ratio * (2.0 * ratio + delta);
        c = (-1.0 + std::sqrt(std::max(disc, 0.0))) / (4.0 * ratio);
    }
    if (!(c > -1.0 && c < 1.0)) {
        detail::out_of_band(delta, band);
    }
    return std::acos(c);
}

/// Closed-form nearest-neighbour amplitudes.
inline ScatteringSolution scatter_closed_form(const ScatterParams& p)
{
    detail::require(p.hopping == Hopping::nearest, "closed form exists for nearest hopping only");
    detail::require(std::isfinite(p.gamma), "gain/loss rate must be finite");
    if (!(std::isfinite(p.delta) && std::abs(p.delta) < 2.0)) {
        detail::out_of_band(p.delta, band_edges(Hopping::nearest));
    }
    using cd = std::complex<double>;
    const cd i(0.0, 1.0);
    const double d = p.delta;
    const double g = p.direction == Direction::loss_to_gain ? p.gamma : -p.gamma;
    const double s = std::sqrt(4.0 - d * d);
    const double g2 = g * g;
    const double d2 = d * d;
    const cd denom = 16.0 * i - 2.0 * i * g2 - 20.0 * i * d2 + i * g2 * d2 + 4.0 * i * d2 * d2 - 12.0 * d * s
        + g2 * d * s + 4.0 * d2 * d * s;
    ScatteringSolution out;
    out.reflection = -2.0 * i * (g2 + 2.0 * g * s) / denom;
    out.transmission = 8.0 * s / denom;
    out.direction = p.direction;
    return out;
}

/// Direct solution of the site equations on a finite window of explicit
/// amplitudes, matched to exact lead modes outside it. Next-nearest hopping
/// admits evanescent lead modes (or a second propagating channel), which the
/// matching includes; their coefficients are referenced to the window edge.
inline ScatteringSolution scatter_numeric(const ScatterParams& p, int half_length = 20)
{
    using cd = std::complex<double>;
    detail::require(half_length >= 20, "chain half length must be >= 20");
    detail::require(std::isfinite(p.gamma), "gain/loss rate must be finite");
    const double k = wavevector(p.delta, p.hopping, p.ratio);
    if (detail::at_channel_threshold(p.delta, p.hopping, p.ratio)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "delta = " << p.delta << " sits on the second-channel threshold " << -2.0 + 2.0 * p.ratio;
        throw ConfigError(msg.str());
    }
    const int range = p.hopping == Hopping::nearest ? 1 : 2;
    const double g2 = p.hopping == Hopping::nearest ? 0.0 : p.ratio;
    const double gamma = p.direction == Direction::loss_to_gain ? p.gamma : -p.gamma;

    // Lead modes z^p: z + 1/z = 2c for every root c of the dispersion in cos k.
    std::vector<double> cosines;
    if (range == 1) {
        cosines.push_back(p.delta / 2.0);
    } else {
        const double disc = std::sqrt(1.0 + 4.0 * g2 * (2.0 * g2 + p.delta));
        cosines.push_back((-1.0 + disc) / (4.0 * g2));
        cosines.push_back((-1.0 - disc) / (4.0 * g2));
    }
    struct Mode {
        cd z;
        bool unimodular;
    };
    std::vector<Mode> left;
    std::vector<Mode> right;
    for (double c : cosines) {
        const cd root = std::sqrt(cd(c * c - 1.0, 0.0));
        for (const cd z : {cd(c, 0.0) + root, cd(c, 0.0) - root}) {
            const bool unimodular = std::abs(std::abs(z) - 1.0) < 1e-9;
            bool rightward = false;
            if (unimodular) {
                const double v = detail::dispersion_velocity(std::arg(z), p.hopping, g2);
                if (std::abs(v) < 1e-9) {
                    throw NumericalError("lead mode with zero group velocity: delta sits on a band extremum");
                }
                rightward = v > 0.0;
            } else {
                rightward = std::abs(z) < 1.0;
            }
            (rightward ? right : left).push_back({unimodular ? std::polar(1.0, std::arg(z)) : z, unimodular});
        }
    }
    if (static_cast<int>(left.size()) != range || static_cast<int>(right.size()) != range) {
        throw NumericalError("could not separate lead modes by direction");
    }
    const cd incident = std::polar(1.0, k);
    auto nearest_to = [](std::vector<Mode>& modes, cd target) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < modes.size(); ++j) {
            if (std::abs(modes[j].z - target) < std::abs(modes[best].z - target)) {
                best = j;
            }
        }
        std::swap(modes[0], modes[best]);
    };
    nearest_to(left, std::conj(incident));
    nearest_to(right, incident);
    left[0].z = std::conj(incident);
    right[0].z = incident;

    const int lo = -half_length;
    const int hi = half_length + 3;
    const int sites = hi - lo + 1;
    const int unknowns = sites + 2 * range;
    const int beta_col = sites;
    const int gamma_col = sites + range;

    // Amplitude at position q as constant + row over unknowns.
    auto amplitude = [&](int q, Eigen::RowVectorXcd& row, cd& constant) {
        row.setZero();
        constant = 0.0;
        if (q >= lo && q <= hi) {
            row(q - lo) = 1.0;
        } else if (q < lo) {
            constant = std::pow(incident, q);
            for (int j = 0; j < range; ++j) {
                row(sites + j) = left[j].unimodular ? std::pow(left[j].z, q) : std::pow(left[j].z, q - lo);
            }
        } else {
            for (int j = 0; j < range; ++j) {
                row(sites + range + j)
                    = right[j].unimodular ? std::pow(right[j].z, q - 3) : std::pow(right[j].z, q - hi);
            }
        }
    };
    auto onsite = [&](int q) -> cd {
        if (q == 1) return cd(0.0, -gamma / 2.0);
        if (q == 2) return cd(0.0, gamma / 2.0);
        return 0.0;
    };

    Eigen::MatrixXcd a(unknowns, unknowns);
    Eigen::VectorXcd b(unknowns);
    Eigen::RowVectorXcd row(unknowns);
    Eigen::RowVectorXcd nb(unknowns);
    cd c0;
    cd c1;
    int eq = 0;
    for (int q = lo - range; q <= hi + range; ++q, ++eq) {
        amplitude(q, row, c0);
        const cd diag = p.delta - onsite(q);
        Eigen::RowVectorXcd line = diag * row;
        cd constant = diag * c0;
        for (int h = 1; h <= range; ++h) {
            const double gh = h == 1 ? 1.0 : g2;
            for (int other : {q - h, q + h}) {
                amplitude(other, nb, c1);
                line -= gh * nb;
                constant -= gh * c1;
            }
        }
        a.row(eq) = line;
        b(eq) = -constant;
    }

    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        std::ostringstream msg;
        msg << "scattering system is singular (condition number ~ " << (rcond > 0.0 ? 1.0 / rcond : INFINITY)
            << ") at delta = " << p.delta << ", gamma = " << p.gamma;
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXcd x = lu.solve(b);
    ScatteringSolution out;
    out.reflection = x(beta_col);
    out.transmission = x(gamma_col);
    out.direction = p.direction;
    out.residual = (a * x - b).cwiseAbs().maxCoeff();
    out.condition = 1.0 / rcond;
    out.channels = 0;
    for (const auto& m : right) {
        out.channels += m.unimodular ? 1 : 0;
    }
    if (!(out.residual < 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()))) {
        std::ostringstream msg;
        msg << "site-equation residual " << out.residual << " exceeds tolerance at delta = " << p.delta
            << ", gamma = " << p.gamma;
        throw NumericalError(msg.str());
    }
    return out;
}

/// eta = ln(|beta_gl|^2 / |beta_lg|^2), clamped to +-eta_max. Zero when both
/// reflections vanish (the defect-free limit).
inline double asymmetry_eta(std::complex<double> beta_lg, std::complex<double> beta_gl, double eta_max = 30.0)
{
    const double num = std::norm(beta_gl);
    const double den = std::norm(beta_lg);
    if (num < 1e-30 && den < 1e-30) {
        return 0.0;
    }
    if (den == 0.0) return eta_max;
    if (num == 0.0) return -eta_max;
    return std::clamp(std::log(num / den), -eta_max, eta_max);
}

struct MapPoint {
    double delta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    std::complex<double> beta_lg;
    std::complex<double> beta_gl;
    std::complex<double> trans_lg;
    std::complex<double> trans_gl;
    std::optional<ScatteringSolution> closed_lg;  // nearest hopping only
    std::optional<ScatteringSolution> closed_gl;
};

struct AsymmetryMap {
    Hopping hopping = Hopping::nearest;
    std::vector<MapPoint> points;  // delta-major, in grid order
    int skipped = 0;               // grid deltas outside the open band or on a channel threshold
};

struct MapOptions {
    double ratio = 0.5;
    double eta_max = 30.0;
    int half_length = 20;
};

inline AsymmetryMap asymmetry_map(const std::vector<double>& deltas, const std::vector<double>& gammas,
                                  Hopping hopping, const MapOptions& options = {})
{
    std::vector<double> inside;
    AsymmetryMap map;
    map.hopping = hopping;
    for (double d : deltas) {
        if (scatterable(d, hopping, options.ratio)) {
            inside.push_back(d);
        } else {
            ++map.skipped;
        }
    }
    for (double g : gammas) {
        detail::require(std::isfinite(g), "gain/loss grid must be finite");
    }
    map.points.resize(inside.size() * gammas.size());
    parallel_for(map.points.size(), [&](std::size_t idx) {
        const double d = inside[idx / gammas.size()];
        const double g = gammas[idx % gammas.size()];
        ScatterParams p{d, g, hopping, options.ratio, Direction::loss_to_gain};
        const auto lg = scatter_numeric(p, options.half_length);
        p.direction = Direction::gain_to_loss;
        const auto gl = scatter_numeric(p, options.half_length);
        MapPoint& pt = map.points[idx];
        pt.delta = d;
        pt.gamma = g;
        pt.beta_lg = lg.reflection;
        pt.beta_gl = gl.reflection;
        pt.trans_lg = lg.transmission;
        pt.trans_gl = gl.transmission;
        pt.eta = asymmetry_eta(lg.reflection, gl.reflection, options.eta_max);
        if (hopping == Hopping::nearest) {
            p.direction = Direction::loss_to_gain;
            pt.closed_lg = scatter_closed_form(p);
            p.direction = Direction::gain_to_loss;
            pt.closed_gl = scatter_closed_form(p);
        }
    });
    return map;
}

struct LocusPoint {
    double delta = 0.0;
    std::vector<double> roots;                // Gamma values with beta_gl = 0, ascending
    std::vector<double> residual_reflection;  // |beta_lg|^2 at each root
    std::vector<double> beta_gl_at_root;      // |beta_gl| at each root
};

struct LocusOptions {
    double ratio = 0.5;
    double gamma_max = 10.0;
    int scan_points = 1000;
    double root_tolerance = 1e-12;  // bracket width
    double accept = 1e-8;           // |beta_gl| needed to call a minimum a zero
    int half_length = 20;
};

/// Zeros of beta_gain_to_loss in Gamma in (0, gamma_max] for each delta: local
/// minima of |beta| on a scan are refined by bisection on the real reduction
/// Re(beta conj(d beta / d Gamma)), and kept when |beta| falls below accept.
inline std::vector<LocusPoint> zero_reflection_locus(Hopping hopping, const std::vector<double>& deltas,
                                                     const LocusOptions& options = {})
{
    detail::require(options.gamma_max > 0.0 && options.scan_points >= 10, "invalid locus scan");
    const Band band = band_edges(hopping, options.ratio);
    for (double d : deltas) {
        if (!(d > band.lower && d < band.upper)) {
            detail::out_of_band(d, band);
        }
    }
    std::vector<LocusPoint> out(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t idx) {
        const double d = deltas[idx];
        auto beta = [&](double g) {
            return scatter_numeric({d, g, hopping, options.ratio, Direction::gain_to_loss}, options.half_length)
                .reflection;
        };
        const int n = options.scan_points;
        std::vector<double> grid(n);
        std::vector<double> mag(n);
        for (int j = 0; j < n; ++j) {
            grid[j] = options.gamma_max * (j + 1) / n;
            mag[j] = std::abs(beta(grid[j]));
        }
        const double h = 1e-6;
        auto slope = [&](double g) { return std::real(beta(g) * std::conj(beta(g + h) - beta(g - h))); };
        LocusPoint& lp = out[idx];
        lp.delta = d;
        for (int j = 1; j + 1 < n; ++j) {
            if (!(mag[j] <= mag[j - 1] && mag[j] < mag[j + 1])) {
                continue;
            }
            double a = grid[j - 1];
            double b = grid[j + 1];
            double fa = slope(a);
            if (!(fa < 0.0 && slope(b) > 0.0)) {
                continue;
            }
            while (b - a > options.root_tolerance) {
                const double m = 0.5 * (a + b);
                const double fm = slope(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            const double residual = std::abs(beta(root));
            if (residual < options.accept) {
                lp.roots.push_back(root);
                lp.beta_gl_at_root.push_back(residual);
                lp.residual_reflection.push_back(std::norm(
                    scatter_numeric({d, root, hopping, options.ratio, Direction::loss_to_gain}, options.half_length)
                        .reflection));
            }
        }
    });
    return out;
}

}  // namespace phonon
