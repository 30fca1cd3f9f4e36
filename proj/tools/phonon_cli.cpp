// phonon: command-line front end for the levitated-array toolkit.
//
//   phonon forces     --config F [--r-range a:b:n] [--theta t1,t2,...]
//   phonon couplings  --config F [--coupling NAME]
//   phonon evolve     --config F [--coupling NAME] [--t-end T] [--dt H] [--dump-states]
//   phonon pretherm   --config F --preset PROFILE [--coupling NAME] [--t-end T]
//   phonon scatter    [--grid dmin:dmax:n,gmin:gmax:n] [--hopping nearest|next-nearest]
//
// Every command writes CSV tables and manifest.json into --out (default ".").
// Exit status: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "phonon/config.hpp"
#include "phonon/dynamics.hpp"
#include "phonon/io.hpp"
#include "phonon/lattice.hpp"
#include "phonon/optical_binding.hpp"
#include "phonon/parallel.hpp"
#include "phonon/scattering.hpp"
#include "phonon/thermo.hpp"

#ifndef PHONON_VERSION
#define PHONON_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace phonon;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    bool seedless = false;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;

    std::vector<double> values() const
    {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) {
            v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        }
        return v;
    }
};

Range parse_range(const std::string& text, const std::string& what)
{
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        fields.push_back(item);
    }
    if (fields.size() != 3) {
        throw ConfigError(what + ": expected min:max:n, got '" + text + "'");
    }
    Range r{detail::parse_double(fields[0], what), detail::parse_double(fields[1], what),
            detail::parse_int(fields[2], what)};
    detail::require(r.n >= 1, what + ": need at least one point");
    detail::require(r.n == 1 || r.hi > r.lo, what + ": max must exceed min");
    return r;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    for (const auto& item : detail::split_list(text)) {
        if (!item.empty()) {
            out.push_back(detail::parse_double(item, what));
        }
    }
    detail::require(!out.empty(), what + ": list is empty");
    return out;
}

RunConfig load(const Common& common)
{
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
    if (common.config_path.empty()) {
        apply_frequency_profile(cfg);
    }
    return cfg;
}

json config_snapshot(const RunConfig& cfg)
{
    const auto& a = cfg.array;
    json j;
    j["beam"] = {{"power_w", a.beam.power},
                 {"waist_m", a.beam.waist},
                 {"wavelength_m", a.beam.wavelength},
                 {"polarization_angle_rad", a.beam.polarization_angle}};
    j["sphere"] = {{"diameter_m", a.sphere.diameter},
                   {"density_kg_m3", a.sphere.mass_density},
                   {"permittivity", a.sphere.relative_permittivity}};
    std::vector<double> hz;
    for (double w : a.trap_frequencies) {
        hz.push_back(w / (2.0 * kPi));
    }
    j["array"] = {{"sites", a.sites},
                  {"spacing_m", a.spacing},
                  {"coupling", to_string(a.coupling)},
                  {"coupling_scale", a.coupling_scale},
                  {"frequencies_dressed", a.frequencies_are_dressed},
                  {"trap_frequencies_hz", hz}};
    std::vector<std::string> channels;
    for (auto c : cfg.dissipation.channels) {
        channels.emplace_back(c == Channel::loss ? "loss" : c == Channel::gain ? "gain" : "none");
    }
    j["dissipation"] = {{"channels", channels},
                        {"rates_rad_s", cfg.dissipation.rates},
                        {"bath_occupations", cfg.dissipation.bath_occupations}};
    j["kick"] = {{"site", cfg.kick.site}, {"occupation", cfg.kick.occupation}, {"background", cfg.kick.background}};
    j["run"] = {{"t_end", cfg.run.t_end}, {"dt", cfg.run.dt}, {"sample_stride", cfg.run.sample_stride}};
    return j;
}

class Manifest {
public:
    Manifest(std::string command, const Common& common) : start_(std::chrono::steady_clock::now())
    {
        doc_["command"] = std::move(command);
        doc_["version"] = PHONON_VERSION;
        doc_["config_path"] = common.config_path;
        doc_["seedless"] = common.seedless;
        doc_["threads"] = worker_count();
        doc_["outputs"] = json::array();
    }

    json& operator[](const std::string& key) { return doc_[key]; }
    void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }

    void write(const fs::path& dir)
    {
        doc_["wall_clock_s"]
            = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(dir / "manifest.json");
        if (!out) {
            throw ConfigError("cannot write manifest in '" + dir.string() + "'");
        }
        out << doc_.dump(2) << '\n';
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

fs::path prepare_out(const Common& common)
{
    fs::path dir(common.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("cannot create output directory '" + common.out_dir + "'");
    }
    return dir;
}

void report_warnings(const RunConfig& cfg)
{
    for (const auto& w : warnings(cfg.array.beam, cfg.array.sphere)) {
        std::cerr << "warning: " << w << '\n';
    }
}

double time_unit(const CouplingModel& model)
{
    const double g = max_coupling(model);
    if (!(g > 0.0)) {
        throw ConfigError("all couplings vanish; time in units of 1/g_max is undefined");
    }
    return 1.0 / g;
}

// ---------------------------------------------------------------- forces

struct ForcesArgs {
    std::string r_range;
    std::string theta = "0,0.78539816339744828,1.5707963267948966";
};

void cmd_forces(const Common& common, const ForcesArgs& args)
{
    RunConfig cfg = load(common);
    validate(cfg.array.beam);
    validate(cfg.array.sphere);
    const double lambda = cfg.array.beam.wavelength;
    const Range r = args.r_range.empty() ? Range{0.5 * lambda, 5.0 * lambda, 451}
                                         : parse_range(args.r_range, "--r-range");
    const auto thetas = parse_number_list(args.theta, "--theta");
    for (double t : thetas) {
        detail::require(t >= 0.0 && t <= kPi / 2 + 1e-12, "--theta: angles must lie in [0, pi/2]");
    }
    for (double x : r.values()) {
        detail::require(x > cfg.array.sphere.diameter, "--r-range: separations must exceed the sphere diameter");
    }
    report_warnings(cfg);
    const fs::path dir = prepare_out(common);
    Manifest manifest("forces", common);
    manifest["config"] = config_snapshot(cfg);
    manifest["r_range_m"] = {r.lo, r.hi, r.n};
    manifest["theta_rad"] = thetas;
    manifest["units"] = {{"R", "m"}, {"theta", "rad"}, {"force", "N"}};

    const fs::path path = dir / "forces.csv";
    CsvWriter csv(path.string(), {"R", "theta", "F_xx", "F_xy", "F_x"});
    for (double theta : thetas) {
        BeamParams beam = cfg.array.beam;
        beam.polarization_angle = theta;
        for (double x : r.values()) {
            const auto f = binding_force(x, beam, cfg.array.sphere);
            csv.row({x, theta, f.parallel, f.perpendicular, f.total});
        }
    }
    csv.close();
    manifest.output(path);
    manifest.write(dir);
}

// ---------------------------------------------------------------- couplings

void apply_coupling(RunConfig& cfg, const std::string& name)
{
    if (!name.empty()) {
        cfg.array.coupling = parse_coupling_profile(name);
        detail::require(cfg.array.coupling != CouplingProfile::explicit_matrix,
                        "--coupling: explicit matrices are not available from the command line");
    }
}

void cmd_couplings(const Common& common, const std::string& coupling)
{
    RunConfig cfg = load(common);
    apply_coupling(cfg, coupling);
    validate(cfg);
    report_warnings(cfg);
    const Eigen::MatrixXd g = coupling_matrix(cfg.array);
    const Eigen::VectorXd omega = dressed_frequencies(cfg.array);
    const Eigen::MatrixXd k = stiffness_matrix(cfg.array);

    const fs::path dir = prepare_out(common);
    Manifest manifest("couplings", common);
    manifest["config"] = config_snapshot(cfg);
    manifest["units"] = {{"g", "rad/s"}, {"omega", "rad/s"}, {"stiffness", "N/m"}};

    const int n = cfg.array.sites;
    std::vector<std::string> header{"i"};
    for (int j = 1; j <= n; ++j) {
        header.push_back("g_" + std::to_string(j));
    }
    const fs::path gpath = dir / "couplings.csv";
    CsvWriter gcsv(gpath.string(), header);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row{static_cast<double>(i + 1)};
        for (int j = 0; j < n; ++j) {
            row.push_back(g(i, j));
        }
        gcsv.row(row);
    }
    gcsv.close();
    manifest.output(gpath);

    const fs::path fpath = dir / "frequencies.csv";
    CsvWriter fcsv(fpath.string(), {"site", "omega_bare", "omega"});
    for (int i = 0; i < n; ++i) {
        fcsv.row({static_cast<double>(i + 1), cfg.array.trap_frequencies[i], omega(i)});
    }
    fcsv.close();
    manifest.output(fpath);

    const fs::path kpath = dir / "spring_constants.csv";
    CsvWriter kcsv(kpath.string(), {"n", "R", "k_n"});
    for (int r = 1; r < n; ++r) {
        kcsv.row({static_cast<double>(r), r * cfg.array.spacing, k(0, r)});
    }
    kcsv.close();
    manifest.output(kpath);
    manifest.write(dir);
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
    std::string coupling;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<int> stride;
    std::string method = "auto";
    bool dump_states = false;
};

Propagator parse_method(const std::string& name)
{
    if (name == "auto") return Propagator::automatic;
    if (name == "rk4") return Propagator::runge_kutta;
    if (name == "spectral") return Propagator::spectral;
    throw ConfigError("--method: expected auto, rk4 or spectral");
}

void cmd_evolve(const Common& common, const EvolveArgs& args)
{
    RunConfig cfg = load(common);
    apply_coupling(cfg, args.coupling);
    if (args.t_end) cfg.run.t_end = *args.t_end;
    if (args.dt) cfg.run.dt = *args.dt;
    if (args.stride) cfg.run.sample_stride = *args.stride;
    validate(cfg);
    detail::require(cfg.array.sites >= 2, "[array] sites: evolve needs at least 2 sites");
    const Propagator method = parse_method(args.method);
    report_warnings(cfg);

    const CouplingModel model = build_model(cfg.array, cfg.dissipation);
    detail::require(method != Propagator::spectral || model.is_closed(),
                    "--method spectral needs a closed system (no gain or loss)");
    const double unit = time_unit(model);
    const CorrelationState c0 = thermal_state(
        kick_occupations(cfg.array.sites, cfg.kick.site, cfg.kick.occupation, cfg.kick.background));
    EvolutionSettings settings;
    settings.t_end = cfg.run.t_end * unit;
    settings.dt = cfg.run.dt > 0.0 ? cfg.run.dt * unit : 0.0;
    settings.sample_stride = cfg.run.sample_stride;
    settings.keep_states = args.dump_states;
    settings.method = method;

    const fs::path dir = prepare_out(common);
    Manifest manifest("evolve", common);
    manifest["config"] = config_snapshot(cfg);
    manifest["method"] = args.method;
    manifest["time_unit_s"] = unit;
    manifest["dt_s"] = settings.dt > 0.0 ? settings.dt : default_time_step(model);

    const auto samples = evolve(c0, model, settings);

    std::vector<std::string> header{"t"};
    for (int i = 1; i <= cfg.array.sites; ++i) {
        header.push_back("n_" + std::to_string(i));
    }
    const fs::path path = dir / "trajectory.csv";
    CsvWriter csv(path.string(), header);
    for (const auto& s : samples) {
        std::vector<double> row{s.time / unit};
        row.insert(row.end(), s.populations.data(), s.populations.data() + s.populations.size());
        csv.row(row);
    }
    csv.close();
    manifest.output(path);
    if (args.dump_states) {
        const fs::path bin = dir / "states.bin";
        SnapshotWriter w(bin.string());
        for (const auto& s : samples) {
            w.write(*s.state);
        }
        w.close();
        manifest.output(bin);
        manifest["snapshot_layout"] = "row-major N x N, (re, im) interleaved, float64 little-endian, one per row of "
                                      "trajectory.csv";
    }
    manifest.write(dir);
}

// ---------------------------------------------------------------- pretherm

struct PrethermArgs {
    std::string preset = "middle-lower";
    std::string coupling;
    double t_min = 1.0;
    double t_end = 1e6;
    int points = 601;
    std::optional<double> depth;
    double window = 0.0;
    double epsilon = 0.02;
    std::string axis = "log";
};

void cmd_pretherm(const Common& common, const PrethermArgs& args)
{
    RunConfig cfg = load(common);
    apply_coupling(cfg, args.coupling);
    cfg.profile = parse_frequency_profile(args.preset);
    if (args.depth) cfg.profile_depth = *args.depth;
    cfg.explicit_frequencies = false;
    // The profile sets the rotating-wave site frequencies directly.
    cfg.array.frequencies_are_dressed = true;
    validate(cfg);
    detail::require(cfg.array.sites >= 2, "[array] sites: pretherm needs at least 2 sites");
    apply_frequency_profile(cfg);
    validate(cfg);
    detail::require(args.t_min > 0.0 && args.t_end > args.t_min, "--t-min/--t-end: need 0 < t-min < t-end");
    detail::require(args.points >= 2, "--points: need at least 2");
    detail::require(args.epsilon > 0.0, "--epsilon: must be > 0");
    detail::require(args.axis == "log" || args.axis == "linear", "--axis: expected log or linear");
    for (auto c : cfg.dissipation.channels) {
        detail::require(c == Channel::none, "[dissipation]: pretherm needs a closed system");
    }
    report_warnings(cfg);

    const CouplingModel model = build_model(cfg.array, cfg.dissipation);
    const double unit = time_unit(model);
    const CorrelationState c0 = thermal_state(
        kick_occupations(cfg.array.sites, cfg.kick.site, cfg.kick.occupation, cfg.kick.background));
    const SpectralPropagator prop(model, c0);

    const bool log_axis = args.axis == "log";
    std::vector<double> times(args.points);
    for (int i = 0; i < args.points; ++i) {
        const double u = static_cast<double>(i) / (args.points - 1);
        const double td = log_axis ? args.t_min * std::pow(args.t_end / args.t_min, u)
                                   : args.t_min + (args.t_end - args.t_min) * u;
        times[i] = td * unit;
    }
    times.back() = args.t_end * unit;
    const AsymmetrySeries series = asymmetry_spectral(prop, times);
    PlateauOptions opts;
    opts.window = args.window;
    opts.epsilon = args.epsilon;
    opts.axis = log_axis ? TimeAxis::log10 : TimeAxis::linear;
    opts.time_scale = 1.0 / unit;
    const PlateauReport plateau = detect_plateau(series, opts);
    const GGEPrediction gge = gge_predict(model, c0);
    const Eigen::VectorXd averaged = prop.mean_populations(times.back());

    const fs::path dir = prepare_out(common);
    Manifest manifest("pretherm", common);
    manifest["config"] = config_snapshot(cfg);
    manifest["preset"] = args.preset;
    manifest["profile_depth"] = cfg.profile_depth;
    manifest["time_unit_s"] = unit;
    manifest["time_axis"] = args.axis;
    manifest["running_mean"] = "exact integral of the spectral solution from t = 0";
    manifest["plateau"] = {{"present", plateau.present},
                           {"t_start", plateau.t_start / unit},
                           {"t_end", plateau.t_end / unit},
                           {"level", plateau.level},
                           {"window", args.window},
                           {"epsilon", args.epsilon},
                           {"note", plateau.note}};
    manifest["gge"] = {{"reliable", gge.reliable}, {"min_gap_rad_s", gge.min_gap}};

    const fs::path apath = dir / "asymmetry.csv";
    CsvWriter acsv(apath.string(), {"t", "A", "Abar"});
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        acsv.row({series.t[i] / unit, series.A[i], series.Abar[i]});
    }
    acsv.close();
    manifest.output(apath);

    const fs::path gpath = dir / "gge.csv";
    CsvWriter gcsv(gpath.string(), {"site", "n_gge", "n_timeavg"});
    for (int i = 0; i < cfg.array.sites; ++i) {
        gcsv.row({static_cast<double>(i + 1), gge.site_populations(i), averaged(i)});
    }
    gcsv.close();
    manifest.output(gpath);
    manifest.write(dir);

    std::cout << "plateau: " << (plateau.present ? "present" : "absent");
    if (plateau.present) {
        std::cout << " from t = " << format_number(plateau.t_start / unit) << " to "
                  << format_number(plateau.t_end / unit) << " level " << format_number(plateau.level);
    }
    std::cout << '\n';
}

// ---------------------------------------------------------------- scatter

struct ScatterArgs {
    std::string grid = "-2:2:101,-6:6:101";
    std::string hopping = "nearest";
    double eta_max = 30.0;
    int half_length = 20;
    int locus_points = 1000;
    bool no_locus = false;
};

void cmd_scatter(const Common& common, const ScatterArgs& args)
{
    const auto axes = detail::split_list(args.grid);
    detail::require(axes.size() == 2, "--grid: expected dmin:dmax:n,gmin:gmax:n");
    const Range dr = parse_range(axes[0], "--grid (delta)");
    const Range gr = parse_range(axes[1], "--grid (gamma)");
    const Hopping hopping = parse_hopping(args.hopping);
    detail::require(args.eta_max > 0.0, "--eta-max: must be > 0");
    detail::require(args.half_length >= 20, "--half-length: must be >= 20");
    detail::require(args.locus_points >= 10, "--locus-points: need at least 10");

    MapOptions mo;
    mo.eta_max = args.eta_max;
    mo.half_length = args.half_length;
    const AsymmetryMap map = asymmetry_map(dr.values(), gr.values(), hopping, mo);
    if (map.skipped > 0) {
        std::cerr << "warning: skipped " << map.skipped
                  << " delta value(s) outside the open band or on a channel threshold\n";
    }

    const fs::path dir = prepare_out(common);
    Manifest manifest("scatter", common);
    const Band band = band_edges(hopping, mo.ratio);
    manifest["hopping"] = to_string(hopping);
    manifest["next_nearest_ratio"] = mo.ratio;
    manifest["band"] = {band.lower, band.upper};
    manifest["grid"] = {{"delta", {dr.lo, dr.hi, dr.n}}, {"gamma", {gr.lo, gr.hi, gr.n}}};
    manifest["skipped_deltas"] = map.skipped;
    manifest["eta_max"] = args.eta_max;
    manifest["half_length"] = args.half_length;
    manifest["units"] = "delta and gamma_rate in units of the nearest-neighbour hopping g";

    std::vector<std::string> header{"delta",      "gamma_rate", "eta",      "beta_lg_re", "beta_lg_im",
                                    "beta_gl_re", "beta_gl_im", "trans_re", "trans_im"};
    const bool closed = hopping == Hopping::nearest;
    if (closed) {
        for (const char* h : {"cf_beta_lg_re", "cf_beta_lg_im", "cf_beta_gl_re", "cf_beta_gl_im", "cf_trans_re",
                              "cf_trans_im"}) {
            header.emplace_back(h);
        }
    }
    const fs::path mpath = dir / "eta_map.csv";
    CsvWriter mcsv(mpath.string(), header);
    for (const auto& p : map.points) {
        std::vector<double> row{p.delta,         p.gamma,         p.eta,
                                p.beta_lg.real(), p.beta_lg.imag(), p.beta_gl.real(),
                                p.beta_gl.imag(), p.trans_lg.real(), p.trans_lg.imag()};
        if (closed) {
            row.insert(row.end(), {p.closed_lg->reflection.real(), p.closed_lg->reflection.imag(),
                                   p.closed_gl->reflection.real(), p.closed_gl->reflection.imag(),
                                   p.closed_lg->transmission.real(), p.closed_lg->transmission.imag()});
        }
        mcsv.row(row);
    }
    mcsv.close();
    manifest.output(mpath);

    if (!args.no_locus) {
        std::vector<double> deltas;
        for (double d : dr.values()) {
            if (scatterable(d, hopping)) {
                deltas.push_back(d);
            }
        }
        LocusOptions lo;
        lo.scan_points = args.locus_points;
        lo.half_length = args.half_length;
        const auto locus = zero_reflection_locus(hopping, deltas, lo);
        const fs::path lpath = dir / "locus.csv";
        CsvWriter lcsv(lpath.string(), {"delta", "gamma1", "gamma2", "beta2_residual"});
        int two = 0;
        for (const auto& lp : locus) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const double g1 = lp.roots.size() > 0 ? lp.roots[0] : nan;
            const double g2 = lp.roots.size() > 1 ? lp.roots[1] : nan;
            const double res = lp.roots.empty() ? nan : lp.residual_reflection[0];
            two += lp.roots.size() > 1 ? 1 : 0;
            lcsv.row({lp.delta, g1, g2, res});
        }
        lcsv.close();
        manifest.output(lpath);
        manifest["locus"] = {{"gamma_scan", {0.0, lo.gamma_max, lo.scan_points}},
                             {"accept_beta", lo.accept},
                             {"deltas_with_two_roots", two}};
    }
    manifest.write(dir);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phonon dynamics in optically bound levitated nanosphere arrays"};
    app.set_version_flag("--version", PHONON_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", common.config_path, "INI configuration file")->check(CLI::ExistingFile);
        if (config_required) {
            opt->required();
        }
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_flag("--seedless", common.seedless, "assert that no random numbers are used (always true)");
    };

    ForcesArgs fa;
    auto* forces = app.add_subcommand("forces", "binding force table F(R, theta)");
    add_common(forces, true);
    forces->add_option("--r-range", fa.r_range, "separations min:max:n in metres (default 0.5 to 5 wavelengths)");
    forces->add_option("--theta", fa.theta, "comma-separated polarization angles in radians");

    std::string coupling_name;
    auto* couplings = app.add_subcommand("couplings", "coupling matrix and dressed trap frequencies");
    add_common(couplings, true);
    couplings->add_option("--coupling", coupling_name,
                          "full_long_range | nearest_neighbor | inverse_square | next_nearest");

    EvolveArgs ea;
    auto* evolve_cmd = app.add_subcommand("evolve", "population dynamics after a single-site kick");
    add_common(evolve_cmd, true);
    evolve_cmd->add_option("--coupling", ea.coupling, "override [array] coupling");
    evolve_cmd->add_option("--t-end", ea.t_end, "end time in units of 1/g_max");
    evolve_cmd->add_option("--dt", ea.dt, "step in units of 1/g_max");
    evolve_cmd->add_option("--stride", ea.stride, "steps per recorded sample");
    evolve_cmd->add_option("--method", ea.method, "auto | rk4 | spectral");
    evolve_cmd->add_flag("--dump-states", ea.dump_states, "also write states.bin with every sampled C");

    PrethermArgs pa;
    auto* pretherm = app.add_subcommand("pretherm", "long-time asymmetry, plateau detection, GGE comparison");
    add_common(pretherm, true);
    pretherm->add_option("--preset", pa.preset, "middle-lower | uniform | middle-higher");
    pretherm->add_option("--coupling", pa.coupling, "override [array] coupling");
    pretherm->add_option("--depth", pa.depth, "fractional depth of the frequency profile");
    pretherm->add_option("--t-min", pa.t_min, "first sample time, units of 1/g_max");
    pretherm->add_option("--t-end", pa.t_end, "last sample time, units of 1/g_max");
    pretherm->add_option("--points", pa.points, "number of sample times");
    pretherm->add_option("--axis", pa.axis, "log | linear time axis for sampling and plateau windows");
    pretherm->add_option("--window", pa.window, "plateau window in axis units (default 10% of the span)");
    pretherm->add_option("--epsilon", pa.epsilon, "plateau flatness tolerance");

    ScatterArgs sa;
    auto* scatter = app.add_subcommand("scatter", "reflection asymmetry map and zero-reflection locus");
    add_common(scatter, false);
    scatter->add_option("--grid", sa.grid, "dmin:dmax:n,gmin:gmax:n in units of g");
    scatter->add_option("--hopping", sa.hopping, "nearest | next-nearest");
    scatter->add_option("--eta-max", sa.eta_max, "clamp for |eta|");
    scatter->add_option("--half-length", sa.half_length, "explicit sites on each side of the defect (>= 20)");
    scatter->add_option("--locus-points", sa.locus_points, "gain/loss scan points for the locus search");
    scatter->add_flag("--no-locus", sa.no_locus, "skip the zero-reflection locus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*forces) cmd_forces(common, fa);
        else if (*couplings) cmd_couplings(common, coupling_name);
        else if (*evolve_cmd) cmd_evolve(common, ea);
        else if (*pretherm) cmd_pretherm(common, pa);
        else if (*scatter) cmd_scatter(common, sa);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
