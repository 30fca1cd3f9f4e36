#pragma once

// Phonon-position asymmetry A(t), its running mean, generalized Gibbs
// ensemble predictions for closed arrays, and plateau detection on the mean.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "phonon/dynamics.hpp"
#include "phonon/errors.hpp"
#include "phonon/lattice.hpp"

namespace phonon {

/// f_i = (2i - N - 1) / (N - 1) for i = 1..N: -1 at the left end, +1 at the right.
inline Eigen::VectorXd site_weights(Eigen::Index sites)
{
    detail::require(sites >= 2, "asymmetry needs at least 2 sites");
    Eigen::VectorXd f(sites);
    for (Eigen::Index i = 0; i < sites; ++i) {
        f(i) = static_cast<double>(2 * (i + 1) - sites - 1) / static_cast<double>(sites - 1);
    }
    return f;
}

struct AsymmetrySeries {
    std::vector<double> t;     // s
    std::vector<double> A;
    std::vector<double> Abar;  // running mean of A over [t_0, t]
};

inline AsymmetrySeries asymmetry_from_populations(const std::vector<double>& times,
                                                  const std::vector<Eigen::VectorXd>& populations)
{
    detail::require(!times.empty() && times.size() == populations.size(), "need one population vector per time");
    const auto n = populations.front().size();
    const Eigen::VectorXd f = site_weights(n);
    const double total0 = populations.front().sum();
    detail::require(std::isfinite(total0) && total0 > 0.0, "initial population must be > 0");
    AsymmetrySeries out;
    out.t = times;
    out.A.reserve(times.size());
    out.Abar.reserve(times.size());
    double integral = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
        detail::require(populations[s].size() == n, "population vectors differ in size");
        out.A.push_back(f.dot(populations[s]) / total0);
        if (s == 0) {
            out.Abar.push_back(out.A[0]);
            continue;
        }
        const double h = times[s] - times[s - 1];
        detail::require(h > 0.0, "sample times must increase");
        integral += 0.5 * h * (out.A[s] + out.A[s - 1]);
        out.Abar.push_back(integral / (times[s] - times[0]));
    }
    return out;
}

/// A per sample; Abar by cumulative trapezoidal quadrature.
inline AsymmetrySeries asymmetry(const std::vector<TrajectorySample>& samples)
{
    std::vector<double> times;
    std::vector<Eigen::VectorXd> pops;
    times.reserve(samples.size());
    pops.reserve(samples.size());
    for (const auto& s : samples) {
        times.push_back(s.time);
        pops.push_back(s.populations);
    }
    return asymmetry_from_populations(times, pops);
}

/// A and its exact running mean from the spectral solution, at arbitrary
/// (for instance logarithmically spaced) times measured from the initial state.
inline AsymmetrySeries asymmetry_spectral(const SpectralPropagator& prop, const std::vector<double>& times)
{
    const Eigen::VectorXd n0 = prop.populations(0.0);
    const Eigen::VectorXd f = site_weights(n0.size());
    const double total0 = n0.sum();
    detail::require(std::isfinite(total0) && total0 > 0.0, "initial population must be > 0");
    AsymmetrySeries out;
    out.t = times;
    for (double t : times) {
        out.A.push_back(f.dot(prop.populations(t)) / total0);
        out.Abar.push_back(f.dot(prop.mean_populations(t)) / total0);
    }
    return out;
}

struct GGEPrediction {
    Eigen::VectorXd mode_frequencies;  // eps_k, rad/s
    Eigen::VectorXd mode_occupations;  // <c_k^dagger c_k> at t = 0
    Eigen::VectorXd site_populations;  // <b_i^dagger b_i> in the ensemble
    double min_gap = 0.0;              // smallest eps_{k+1} - eps_k, rad/s
    bool reliable = true;              // false when min_gap < 1e-9 max|eps_k|
};

inline GGEPrediction gge_predict(const CouplingModel& model, const CorrelationState& initial)
{
    detail::check_model(model);
    detail::check_state(initial, model.size());
    detail::require(model.is_closed(), "ensemble prediction needs a closed system (L = M = 0)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.hopping);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of W failed");
    }
    const Eigen::MatrixXd& u = eig.eigenvectors();
    const auto n = model.size();
    GGEPrediction out;
    out.mode_frequencies = eig.eigenvalues();
    out.mode_occupations.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.mode_occupations(k) = (u.col(k).transpose().cast<std::complex<double>>() * initial.matrix
                                   * u.col(k).cast<std::complex<double>>())
                                      .value()
                                      .real();
    }
    out.site_populations = u.cwiseAbs2() * out.mode_occupations;
    out.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < n; ++k) {
        out.min_gap = std::min(out.min_gap, out.mode_frequencies(k) - out.mode_frequencies(k - 1));
    }
    out.reliable = !(out.min_gap < 1e-9 * out.mode_frequencies.cwiseAbs().maxCoeff());
    return out;
}

enum class TimeAxis { linear, log10 };

struct PlateauOptions {
    double window = 0.0;      // axis units; <= 0 means 10% of the covered span
    double epsilon = 0.02;
    TimeAxis axis = TimeAxis::linear;
    double time_scale = 1.0;  // axis coordinate is time_scale * t before any log
};

struct PlateauReport {
    bool present = false;
    double t_start = 0.0;  // same units as the series
    double t_end = 0.0;
    double level = 0.0;
    std::string note;
};

/// Longest stretch covered by windows on which Abar stays within epsilon of
/// its window mean while that mean is clear of zero by 3 epsilon.
inline PlateauReport detect_plateau(const AsymmetrySeries& series, const PlateauOptions& options = {})
{
    detail::require(options.epsilon > 0.0, "flatness tolerance must be > 0");
    detail::require(options.time_scale > 0.0, "time scale must be > 0");
    PlateauReport report;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> t;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        double v = series.t[i] * options.time_scale;
        if (options.axis == TimeAxis::log10) {
            if (!(v > 0.0)) {
                continue;
            }
            v = std::log10(v);
        }
        x.push_back(v);
        y.push_back(series.Abar[i]);
        t.push_back(series.t[i]);
    }
    if (x.size() < 2) {
        report.note = "series too short";
        return report;
    }
    const double span = x.back() - x.front();
    const double window = options.window > 0.0 ? options.window : 0.1 * span;
    if (!(span >= 10.0 * window * (1.0 - 1e-12))) {
        report.note = "series covers less than 10 windows";
        return report;
    }

    const std::size_t n = x.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + y[i];
    }
    // Windows [x_i, x_i + window]; the right end only moves forward, so
    // monotone deques give the running max and min.
    std::deque<std::size_t> hi;
    std::deque<std::size_t> lo;
    std::size_t j = 0;
    std::size_t best_start = 0;
    std::size_t best_end = 0;
    double best_len = -1.0;
    bool in_run = false;
    std::size_t run_start = 0;
    std::size_t run_end = 0;
    auto close_run = [&] {
        if (in_run && x[run_end] - x[run_start] > best_len) {
            best_len = x[run_end] - x[run_start];
            best_start = run_start;
            best_end = run_end;
        }
        in_run = false;
    };
    for (std::size_t i = 0; i < n && x[i] + window <= x.back() + 1e-12 * (1.0 + std::abs(x.back())); ++i) {
        while (j < n && x[j] <= x[i] + window) {
            while (!hi.empty() && y[hi.back()] <= y[j]) hi.pop_back();
            hi.push_back(j);
            while (!lo.empty() && y[lo.back()] >= y[j]) lo.pop_back();
            lo.push_back(j);
            ++j;
        }
        while (hi.front() < i) hi.pop_front();
        while (lo.front() < i) lo.pop_front();
        const double mean = (prefix[j] - prefix[i]) / static_cast<double>(j - i);
        const double dev = std::max(y[hi.front()] - mean, mean - y[lo.front()]);
        const bool flat = dev < options.epsilon && std::abs(mean) > 3.0 * options.epsilon;
        if (flat) {
            if (!in_run) {
                in_run = true;
                run_start = i;
            }
            run_end = j - 1;
        } else {
            close_run();
        }
    }
    close_run();
    if (best_len < 0.0) {
        report.note = "no flat window";
        return report;
    }
    report.present = true;
    report.t_start = t[best_start];
    report.t_end = t[best_end];
    report.level = (prefix[best_end + 1] - prefix[best_start]) / static_cast<double>(best_end + 1 - best_start);
    return report;
}

}  // namespace phonon
