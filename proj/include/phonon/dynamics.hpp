#pragma once

// Time evolution of the correlation matrix,
//   dC/dt = i[W, C] + {L, C} + M,
// by fixed-step RK4 or, for closed systems, by the exact spectral solution.
// Also a classical trajectory integrator for the underlying oscillator chain.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <vector>

#include "phonon/errors.hpp"
#include "phonon/lattice.hpp"

namespace phonon {

enum class Propagator {
    automatic,    // spectral when L = M = 0, Runge-Kutta otherwise
    runge_kutta,
    spectral,
};

struct EvolutionSettings {
    double t_end = 0.0;       // s
    double dt = 0.0;          // s; <= 0 selects default_time_step()
    int sample_stride = 1;    // steps per recorded sample
    int hermitize_every = 100;
    bool keep_states = false; // store the full C in every sample
    Propagator method = Propagator::automatic;
};

struct TrajectorySample {
    double time = 0.0;              // s
    Eigen::VectorXd populations;    // n_i = C_ii
    std::optional<Eigen::MatrixXcd> state;
};

namespace detail {

inline void check_model(const CouplingModel& model)
{
    const auto n = model.size();
    require(n >= 1 && model.hopping.cols() == n, "hopping matrix must be square and non-empty");
    require(model.gain_loss.size() == n && model.injection.size() == n, "model diagonals have wrong size");
    require(model.hopping.allFinite() && model.gain_loss.allFinite() && model.injection.allFinite(),
            "model has non-finite entries");
    require((model.hopping - model.hopping.transpose()).cwiseAbs().maxCoeff()
                <= 1e-12 * (1.0 + model.hopping.cwiseAbs().maxCoeff()),
            "hopping matrix must be symmetric");
    require(model.injection.minCoeff() >= 0.0, "bath injection must be >= 0");
}

inline void check_state(const CorrelationState& c0, Eigen::Index n)
{
    require(c0.matrix.rows() == n && c0.matrix.cols() == n, "correlation matrix does not match the model size");
    require(c0.matrix.allFinite(), "correlation matrix has non-finite entries");
}

inline void hermitize(Eigen::MatrixXcd& c)
{
    c = (0.5 * (c + c.adjoint())).eval();
}

// (e^{ix} - 1) / (ix), continuous at x = 0.
inline std::complex<double> phase_average(double x)
{
    if (std::abs(x) < 1e-6) {
        return {1.0 - x * x / 6.0, x / 2.0};
    }
    return (std::polar(1.0, x) - 1.0) / std::complex<double>(0.0, x);
}

}  // namespace detail

/// Right-hand side of the correlation-matrix equation.
inline Eigen::MatrixXcd correlation_rhs(const CouplingModel& model, const Eigen::MatrixXcd& c)
{
    using cd = std::complex<double>;
    const Eigen::MatrixXcd w = model.hopping.cast<cd>();
    Eigen::MatrixXcd out = cd(0, 1) * (w * c - c * w);
    const auto n = model.size();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, j) += (model.gain_loss(i) + model.gain_loss(j)) * c(i, j);
        }
        out(j, j) += model.injection(j);
    }
    return out;
}

/// 10^-3 of the period of the fastest population dynamics. The commutator is
/// blind to a uniform shift of W, so the scale is set by the spread of W's
/// spectrum about its mean diagonal and by the dissipation rates, not by the
/// bare trap frequency.
inline double default_time_step(const CouplingModel& model)
{
    const auto n = model.size();
    const double shift = model.hopping.diagonal().mean();
    const Eigen::MatrixXd centered = model.hopping - shift * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered, Eigen::EigenvaluesOnly);
    double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
    scale = std::max(scale, 2.0 * model.gain_loss.cwiseAbs().maxCoeff());
    if (!(scale > 0.0)) {
        scale = 1.0;
    }
    return 1e-3 * 2.0 * kPi / scale;
}

/// Exact evolution of a closed system. W = V diag(lambda) V^T, and
/// C(t) = V e^{i lambda t} (V^T C0 V) e^{-i lambda t} V^T.
class SpectralPropagator {
public:
    SpectralPropagator(const CouplingModel& model, const CorrelationState& initial)
        : t0_(initial.time)
    {
        detail::check_model(model);
        detail::check_state(initial, model.size());
        detail::require(model.is_closed(), "spectral propagation needs L = M = 0");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.hopping);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("eigendecomposition of W failed");
        }
        modes_ = eig.eigenvectors();
        frequencies_ = eig.eigenvalues();
        shift_ = frequencies_.mean();
        const Eigen::MatrixXcd v = modes_.cast<std::complex<double>>();
        mode_state_ = v.transpose() * initial.matrix * v;

        // C0 = sum_r mu_r u_r u_r^dagger; populations only need V^T u_r.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> c_eig(initial.matrix);
        const double cut = 1e-300 + 1e-15 * c_eig.eigenvalues().cwiseAbs().maxCoeff();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index r = 0; r < c_eig.eigenvalues().size(); ++r) {
            if (std::abs(c_eig.eigenvalues()(r)) > cut) {
                keep.push_back(r);
            }
        }
        weights_.resize(static_cast<Eigen::Index>(keep.size()));
        projected_.resize(model.size(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t q = 0; q < keep.size(); ++q) {
            const auto idx = static_cast<Eigen::Index>(q);
            weights_(idx) = c_eig.eigenvalues()(keep[q]);
            projected_.col(idx) = v.transpose() * c_eig.eigenvectors().col(keep[q]);
        }
    }

    const Eigen::VectorXd& mode_frequencies() const { return frequencies_; }
    /// Columns are the normal modes of W.
    const Eigen::MatrixXd& modes() const { return modes_; }
    /// <c_k^dagger c_l> at the initial time, in the normal-mode basis.
    const Eigen::MatrixXcd& mode_correlations() const { return mode_state_; }

    Eigen::MatrixXcd state(double t) const
    {
        const Eigen::VectorXcd p = phases(t);
        const Eigen::MatrixXcd evolved = p.asDiagonal() * mode_state_ * p.conjugate().asDiagonal();
        const Eigen::MatrixXcd v = modes_.cast<std::complex<double>>();
        Eigen::MatrixXcd c = v * evolved * v.transpose();
        detail::hermitize(c);
        return c;
    }

    Eigen::VectorXd populations(double t) const
    {
        const Eigen::VectorXcd p = phases(t);
        const Eigen::MatrixXcd amplitudes = modes_.cast<std::complex<double>>() * (p.asDiagonal() * projected_);
        Eigen::VectorXd n = Eigen::VectorXd::Zero(modes_.rows());
        for (Eigen::Index r = 0; r < amplitudes.cols(); ++r) {
            n += weights_(r) * amplitudes.col(r).cwiseAbs2();
        }
        return n;
    }

    /// Exact running average (1/t) * integral_0^t n_i(tau) dtau, t measured from the initial time.
    Eigen::VectorXd mean_populations(double t) const
    {
        if (t <= 0.0) {
            return populations(t0_);
        }
        const auto n = modes_.rows();
        Eigen::MatrixXcd averaged(n, n);
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index k = 0; k < n; ++k) {
                averaged(k, l) = mode_state_(k, l) * detail::phase_average((frequencies_(k) - frequencies_(l)) * t);
            }
        }
        const Eigen::MatrixXcd v = modes_.cast<std::complex<double>>();
        const Eigen::MatrixXcd right = averaged * v.transpose();
        Eigen::VectorXd out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i) = (v.row(i) * right.col(i)).value().real();
        }
        return out;
    }

private:
    Eigen::VectorXcd phases(double t) const
    {
        const double dt = t - t0_;
        Eigen::VectorXcd p(frequencies_.size());
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            p(k) = std::polar(1.0, (frequencies_(k) - shift_) * dt);
        }
        return p;
    }

    double t0_;
    double shift_ = 0.0;
    Eigen::MatrixXd modes_;
    Eigen::VectorXd frequencies_;
    Eigen::MatrixXcd mode_state_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXcd projected_;
};

inline std::vector<TrajectorySample> evolve(const CorrelationState& initial, const CouplingModel& model,
                                            const EvolutionSettings& settings)
{
    detail::check_model(model);
    detail::check_state(initial, model.size());
    detail::require(std::isfinite(settings.t_end) && settings.t_end > 0.0, "t_end must be > 0");
    detail::require(settings.sample_stride >= 1, "sample stride must be >= 1");
    detail::require(settings.hermitize_every >= 1, "hermitize interval must be >= 1");
    const double dt_request = settings.dt > 0.0 ? settings.dt : default_time_step(model);
    detail::require(std::isfinite(dt_request), "dt must be finite");
    const double ratio = settings.t_end / dt_request;
    detail::require(ratio < 1e12, "t_end / dt is too large");
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(ratio - 1e-9)));
    const double dt = settings.t_end / static_cast<double>(steps);

    const bool spectral = settings.method == Propagator::spectral
        || (settings.method == Propagator::automatic && model.is_closed());

    std::vector<TrajectorySample> samples;
    samples.reserve(static_cast<std::size_t>(steps / settings.sample_stride + 2));
    auto record = [&](double t, Eigen::MatrixXcd c) {
        detail::hermitize(c);
        TrajectorySample s;
        s.time = t;
        s.populations = c.diagonal().real();
        if (settings.keep_states) {
            s.state = std::move(c);
        }
        samples.push_back(std::move(s));
    };
    auto is_sample_step = [&](long long step) { return step % settings.sample_stride == 0 || step == steps; };

    if (spectral) {
        const SpectralPropagator prop(model, initial);
        for (long long step = 0; step <= steps; ++step) {
            if (!is_sample_step(step)) {
                continue;
            }
            const double t = initial.time + static_cast<double>(step) * dt;
            if (settings.keep_states) {
                record(t, prop.state(t));
            } else {
                samples.push_back({t, prop.populations(t), std::nullopt});
            }
        }
        return samples;
    }

    // A uniform shift of W drops out of the commutator; removing the mean
    // diagonal keeps the RK4 stages well scaled.
    CouplingModel shifted = model;
    const auto n = model.size();
    shifted.hopping -= model.hopping.diagonal().mean() * Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXcd c = initial.matrix;
    record(initial.time, c);
    for (long long step = 1; step <= steps; ++step) {
        const Eigen::MatrixXcd k1 = correlation_rhs(shifted, c);
        const Eigen::MatrixXcd k2 = correlation_rhs(shifted, c + (0.5 * dt) * k1);
        const Eigen::MatrixXcd k3 = correlation_rhs(shifted, c + (0.5 * dt) * k2);
        const Eigen::MatrixXcd k4 = correlation_rhs(shifted, c + dt * k3);
        c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (step % settings.hermitize_every == 0) {
            detail::hermitize(c);
        }
        if (!c.allFinite() || c.cwiseAbs().maxCoeff() > 1e12) {
            std::ostringstream msg;
            msg << "correlation matrix diverged at step " << step << " (t = " << initial.time + step * dt << " s)";
            throw NumericalError(msg.str());
        }
        if (is_sample_step(step)) {
            record(initial.time + static_cast<double>(step) * dt, c);
        }
    }
    return samples;
}

// Classical chain: x'' = -K x, with K_ii = Omega_i^2 (dressed) and
// K_ij = -k_ij / m. Missing neighbours at the chain ends contribute nothing.

struct ClassicalSettings {
    double t_end = 0.0;   // s
    double dt = 0.0;      // s; <= 0 selects 10^-3 of the fastest period
    int sample_stride = 1;
};

struct ClassicalTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> positions;   // m
    std::vector<Eigen::VectorXd> velocities;  // m/s
};

/// Stiffness per unit mass, s^-2.
inline Eigen::MatrixXd classical_stiffness(const ArrayConfig& config)
{
    const double m = mass(config.sphere);
    Eigen::MatrixXd k = -stiffness_matrix(config) / m;
    const Eigen::VectorXd omega = dressed_frequencies(config);
    k.diagonal() = omega.cwiseAbs2();
    return k;
}

/// Total mechanical energy per unit mass.
inline double classical_energy(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const Eigen::MatrixXd& k)
{
    return 0.5 * v.squaredNorm() + 0.5 * x.dot(k * x);
}

/// Local oscillator energy per unit mass at each site, 1/2 v_i^2 + 1/2 K_ii x_i^2.
inline Eigen::VectorXd site_energies(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const Eigen::MatrixXd& k)
{
    return 0.5 * v.cwiseAbs2() + 0.5 * k.diagonal().cwiseProduct(x.cwiseAbs2());
}

inline ClassicalTrajectory classical_evolve(const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                            const Eigen::MatrixXd& stiffness, const ClassicalSettings& settings)
{
    const auto n = stiffness.rows();
    detail::require(stiffness.cols() == n && x0.size() == n && v0.size() == n, "dimension mismatch");
    detail::require(x0.allFinite() && v0.allFinite() && stiffness.allFinite(), "non-finite initial conditions");
    detail::require(std::isfinite(settings.t_end) && settings.t_end > 0.0, "t_end must be > 0");
    detail::require(settings.sample_stride >= 1, "sample stride must be >= 1");
    double dt_request = settings.dt;
    if (!(dt_request > 0.0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness, Eigen::EigenvaluesOnly);
        const double fastest = std::sqrt(std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300));
        dt_request = 1e-3 * 2.0 * kPi / fastest;
    }
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(settings.t_end / dt_request - 1e-9)));
    const double dt = settings.t_end / static_cast<double>(steps);

    ClassicalTrajectory out;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd v = v0;
    auto record = [&](double t) {
        out.times.push_back(t);
        out.positions.push_back(x);
        out.velocities.push_back(v);
    };
    record(0.0);
    const double scale = std::max(x0.cwiseAbs().maxCoeff(), 1e-300);
    for (long long step = 1; step <= steps; ++step) {
        const Eigen::VectorXd a1 = -stiffness * x;
        const Eigen::VectorXd x2 = x + 0.5 * dt * v;
        const Eigen::VectorXd v2 = v + 0.5 * dt * a1;
        const Eigen::VectorXd a2 = -stiffness * x2;
        const Eigen::VectorXd x3 = x + 0.5 * dt * v2;
        const Eigen::VectorXd v3 = v + 0.5 * dt * a2;
        const Eigen::VectorXd a3 = -stiffness * x3;
        const Eigen::VectorXd x4 = x + dt * v3;
        const Eigen::VectorXd v4 = v + dt * a3;
        const Eigen::VectorXd a4 = -stiffness * x4;
        x += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
        v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12 * scale) {
            std::ostringstream msg;
            msg << "classical trajectory diverged at step " << step;
            throw NumericalError(msg.str());
        }
        if (step % settings.sample_stride == 0 || step == steps) {
            record(static_cast<double>(step) * dt);
        }
    }
    return out;
}

inline ClassicalTrajectory classical_evolve(const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                            const ArrayConfig& config, const ClassicalSettings& settings)
{
    return classical_evolve(x0, v0, classical_stiffness(config), settings);
}

}  // namespace phonon
