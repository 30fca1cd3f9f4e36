#pragma once

// Optical binding between two point-dipole spheres trapped by linearly
// polarized beams of a common wavelength, and the harmonic couplings that
// follow from it.

#include <cmath>
#include <string>
#include <vector>

#include "phonon/constants.hpp"
#include "phonon/errors.hpp"

namespace phonon {

struct BeamParams {
    double power = 0.1;             // W
    double waist = 600e-9;          // m
    double wavelength = 1550e-9;    // m
    double polarization_angle = kPi / 2;  // rad, measured from the array axis
};

struct SphereParams {
    double diameter = 200e-9;           // m
    double mass_density = 2200.0;       // kg/m^3, fused silica
    double relative_permittivity = 2.1; // fused silica near 1550 nm
};

inline void validate(const BeamParams& beam)
{
    detail::require(std::isfinite(beam.power) && beam.power >= 0.0, "beam power must be >= 0");
    detail::require(std::isfinite(beam.waist) && beam.waist > 0.0, "beam waist must be > 0");
    detail::require(std::isfinite(beam.wavelength) && beam.wavelength > 0.0,
                    "beam wavelength must be > 0");
    detail::require(beam.polarization_angle >= 0.0 && beam.polarization_angle <= kPi / 2 + 1e-12,
                    "polarization angle must lie in [0, pi/2]");
}

inline void validate(const SphereParams& sphere)
{
    detail::require(std::isfinite(sphere.diameter) && sphere.diameter > 0.0,
                    "sphere diameter must be > 0");
    detail::require(std::isfinite(sphere.mass_density) && sphere.mass_density > 0.0,
                    "sphere mass density must be > 0");
    detail::require(std::isfinite(sphere.relative_permittivity) && sphere.relative_permittivity > 0.0,
                    "relative permittivity must be > 0");
}

/// Non-fatal validity notes (the dipole picture degrades for large spheres).
inline std::vector<std::string> warnings(const BeamParams& beam, const SphereParams& sphere)
{
    std::vector<std::string> out;
    if (sphere.diameter >= beam.wavelength / 5) {
        out.emplace_back("sphere diameter is not small against wavelength/5; dipole approximation is marginal");
    }
    if (sphere.relative_permittivity <= 1.0) {
        out.emplace_back("relative permittivity <= 1 gives a non-positive polarizability");
    }
    return out;
}

inline double radius(const SphereParams& sphere) { return sphere.diameter / 2; }

inline double mass(const SphereParams& sphere)
{
    const double a = radius(sphere);
    return sphere.mass_density * 4.0 / 3.0 * kPi * a * a * a;
}

/// Clausius-Mossotti point-dipole polarizability, C m^2 / V.
inline double polarizability(const SphereParams& sphere)
{
    validate(sphere);
    const double a = radius(sphere);
    const double eps = sphere.relative_permittivity;
    return 4.0 * kPi * kVacuumPermittivity * a * a * a * (eps - 1.0) / (eps + 2.0);
}

/// Peak |E|^2 at the focus of a Gaussian beam, V^2/m^2.
inline double field_amplitude_squared(const BeamParams& beam)
{
    validate(beam);
    return 4.0 * beam.power / (kPi * kVacuumPermittivity * kSpeedOfLight * beam.waist * beam.waist);
}

inline double wavenumber(const BeamParams& beam) { return 2.0 * kPi / beam.wavelength; }

struct ForceDecomposition {
    double separation = 0.0;    // R, m
    double parallel = 0.0;      // F_xx, N: driven by the field component along the array
    double perpendicular = 0.0; // F_xy, N: driven by the transverse component
    double total = 0.0;         // F_x = F_xx + F_xy; positive pushes the pair apart
};

namespace detail {

struct BindingAmplitudes {
    double parallel;       // 2 alpha^2 E_x^2 / (8 pi eps0)
    double perpendicular;  // alpha^2 E_y^2 / (8 pi eps0)
    double k;
};

inline BindingAmplitudes binding_amplitudes(const BeamParams& beam, const SphereParams& sphere)
{
    const double alpha = polarizability(sphere);
    const double e0sq = field_amplitude_squared(beam);
    const double c = std::cos(beam.polarization_angle);
    const double s = std::sin(beam.polarization_angle);
    const double base = alpha * alpha * e0sq / (8.0 * kPi * kVacuumPermittivity);
    return {2.0 * base * c * c, base * s * s, wavenumber(beam)};
}

inline void check_separation(double r, const SphereParams& sphere)
{
    require(std::isfinite(r) && r > 0.0, "separation must be > 0");
    require(r >= sphere.diameter, "separation below one diameter: spheres overlap");
}

// Brackets and their derivatives with respect to x = kR.
// The middle term of the parallel bracket carries cos(kR), not sin(kR).
inline double parallel_bracket(double x)
{
    return (-3.0 - 3.0 * x + x * x) * std::cos(x);
}

inline double parallel_bracket_derivative(double x)
{
    return (-3.0 + 2.0 * x) * std::cos(x) - (-3.0 - 3.0 * x + x * x) * std::sin(x);
}

inline double perpendicular_bracket(double x)
{
    const double c = std::cos(x);
    const double s = std::sin(x);
    return 3.0 * c + 3.0 * x * s - 2.0 * x * x * c - x * x * x * s;
}

inline double perpendicular_bracket_derivative(double x)
{
    const double c = std::cos(x);
    const double s = std::sin(x);
    return -x * c - x * x * s - x * x * x * c;
}

}  // namespace detail

inline ForceDecomposition binding_force(double r, const BeamParams& beam, const SphereParams& sphere)
{
    detail::check_separation(r, sphere);
    const auto amp = detail::binding_amplitudes(beam, sphere);
    const double x = amp.k * r;
    const double r4 = r * r * r * r;
    ForceDecomposition f;
    f.separation = r;
    f.parallel = amp.parallel / r4 * detail::parallel_bracket(x);
    f.perpendicular = amp.perpendicular / r4 * detail::perpendicular_bracket(x);
    f.total = f.parallel + f.perpendicular;
    return f;
}

/// dF_x/dR in closed form, N/m.
inline double force_gradient(double r, const BeamParams& beam, const SphereParams& sphere)
{
    detail::check_separation(r, sphere);
    const auto amp = detail::binding_amplitudes(beam, sphere);
    const double x = amp.k * r;
    const double r4 = r * r * r * r;
    const double r5 = r4 * r;
    const double par = amp.parallel
        * (-4.0 * detail::parallel_bracket(x) / r5 + amp.k * detail::parallel_bracket_derivative(x) / r4);
    const double perp = amp.perpendicular
        * (-4.0 * detail::perpendicular_bracket(x) / r5
           + amp.k * detail::perpendicular_bracket_derivative(x) / r4);
    return par + perp;
}

/// Restoring stiffness of the binding spring between spheres n sites apart,
/// k_n = -dF_x/dR at R = n d (N/m). Positive at stable binding separations.
inline double spring_constant(int n, double spacing, const BeamParams& beam, const SphereParams& sphere)
{
    detail::require(n >= 1, "pair distance index must be >= 1");
    detail::require(std::isfinite(spacing) && spacing > 0.0, "spacing must be > 0");
    return -force_gradient(n * spacing, beam, sphere);
}

/// Rotating-wave hopping rate between two sites, rad/s:
/// g_ij = -k_ij / (2 m sqrt(Omega_i Omega_j)).
inline double coupling_strength(double stiffness, double particle_mass, double omega_i, double omega_j)
{
    detail::require(particle_mass > 0.0, "mass must be > 0");
    detail::require(omega_i > 0.0 && omega_j > 0.0, "trap frequencies must be > 0");
    return -stiffness / (2.0 * particle_mass * std::sqrt(omega_i * omega_j));
}

/// Trap frequency scales with the square root of trapping power.
inline double trap_frequency_for_power(double reference_frequency, double reference_power, double power)
{
    detail::require(reference_frequency > 0.0 && reference_power > 0.0 && power >= 0.0,
                    "trap frequency scaling needs positive reference values");
    return reference_frequency * std::sqrt(power / reference_power);
}

/// Power-law exponent of the far-field |F_x| envelope. Samples |F_x| densely over
/// kR in [kr_min, kr_max], keeps the local maxima of the oscillation and fits
/// log|F| against log R by least squares.
inline double fit_far_field_exponent(const BeamParams& beam, const SphereParams& sphere,
                                     double kr_min = 50.0, double kr_max = 500.0,
                                     int samples_per_radian = 64)
{
    detail::require(kr_max > kr_min && kr_min > 0.0, "invalid kR range");
    const double k = wavenumber(beam);
    const int n = static_cast<int>((kr_max - kr_min) * samples_per_radian) + 1;
    std::vector<double> r(n);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        r[i] = (kr_min + (kr_max - kr_min) * i / (n - 1)) / k;
        f[i] = std::abs(binding_force(r[i], beam, sphere).total);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 1; i + 1 < n; ++i) {
        if (f[i] > f[i - 1] && f[i] >= f[i + 1] && f[i] > 0.0) {
            const double lx = std::log(r[i]);
            const double ly = std::log(f[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++m;
        }
    }
    if (m < 2) {
        throw NumericalError("too few envelope maxima to fit a power law");
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace phonon
