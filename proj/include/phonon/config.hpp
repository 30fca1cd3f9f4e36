#pragma once

// INI run configuration. Keys carry their SI unit in the name; unknown
// sections and keys are rejected so that typos fail before any computation.
//
//   [beam]        power_w, waist_m, wavelength_m, polarization_angle_rad
//   [sphere]      diameter_m, density_kg_m3, permittivity
//   [array]       sites, spacing_m, coupling, coupling_scale,
//                 trap_frequency_hz | trap_frequencies_hz (comma list),
//                 frequencies_dressed, frequency_profile, profile_depth
//   [dissipation] channels (none|loss|gain list), rates_rad_s, bath_occupations
//   [kick]        site, occupation, background
//   [run]         t_end, dt, sample_stride   (times in units of 1/g_max)

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phonon/constants.hpp"
#include "phonon/errors.hpp"
#include "phonon/lattice.hpp"

namespace phonon {

struct KickSpec {
    int site = 1;               // 1-based
    double occupation = 1e3;
    double background = 1e-2;
};

struct RunSpec {
    double t_end = 40.0;  // units of 1/g_max
    double dt = 0.0;      // units of 1/g_max; <= 0 picks the default
    int sample_stride = 1;
};

struct RunConfig {
    ArrayConfig array;
    DissipationSpec dissipation;
    KickSpec kick;
    RunSpec run;
    FrequencyProfile profile = FrequencyProfile::uniform;
    double profile_depth = 0.02;
    double trap_frequency_hz = 100e3;  // edge (uniform) trap frequency
    bool explicit_frequencies = false; // trap_frequencies_hz was given
};

namespace detail {

inline std::string field_name(const std::string& section, const std::string& key)
{
    return "[" + section + "] " + key;
}

inline double parse_double(const std::string& text, const std::string& field)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field + ": expected a number, got '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) {
        ++used;
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw ConfigError(field + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

inline int parse_int(const std::string& text, const std::string& field)
{
    const double v = parse_double(text, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError(field + ": expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

inline bool parse_bool(const std::string& text, const std::string& field)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(field + ": expected true or false, got '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
}

inline Channel parse_channel(const std::string& text, const std::string& field)
{
    if (text == "none") return Channel::none;
    if (text == "loss") return Channel::loss;
    if (text == "gain") return Channel::gain;
    throw ConfigError(field + ": unknown channel '" + text + "'");
}

}  // namespace detail

/// Rebuilds the per-site trap frequencies after the profile or site count changed.
inline void apply_frequency_profile(RunConfig& cfg)
{
    if (cfg.explicit_frequencies) {
        return;
    }
    cfg.array.trap_frequencies
        = frequency_profile(cfg.profile, cfg.array.sites, 2.0 * kPi * cfg.trap_frequency_hz, cfg.profile_depth);
}

inline RunConfig parse_config(const boost::property_tree::ptree& tree)
{
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"beam", {"power_w", "waist_m", "wavelength_m", "polarization_angle_rad"}},
        {"sphere", {"diameter_m", "density_kg_m3", "permittivity"}},
        {"array",
         {"sites", "spacing_m", "coupling", "coupling_scale", "trap_frequency_hz", "trap_frequencies_hz",
          "frequencies_dressed", "frequency_profile", "profile_depth"}},
        {"dissipation", {"channels", "rates_rad_s", "bath_occupations"}},
        {"kick", {"site", "occupation", "background"}},
        {"run", {"t_end", "dt", "sample_stride"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = allowed.find(section);
        if (it == allowed.end() || !body.data().empty()) {
            throw ConfigError("unknown section or top-level key '" + section + "'");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw ConfigError(detail::field_name(section, key) + ": unknown key");
            }
        }
    }
    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(section + "." + key, '.'))) {
            return *v;
        }
        return std::nullopt;
    };
    auto number = [&](const std::string& section, const std::string& key, double& out) {
        if (auto v = get(section, key)) out = detail::parse_double(*v, detail::field_name(section, key));
    };

    RunConfig cfg;
    number("beam", "power_w", cfg.array.beam.power);
    number("beam", "waist_m", cfg.array.beam.waist);
    number("beam", "wavelength_m", cfg.array.beam.wavelength);
    number("beam", "polarization_angle_rad", cfg.array.beam.polarization_angle);
    number("sphere", "diameter_m", cfg.array.sphere.diameter);
    number("sphere", "density_kg_m3", cfg.array.sphere.mass_density);
    number("sphere", "permittivity", cfg.array.sphere.relative_permittivity);

    if (auto v = get("array", "sites")) cfg.array.sites = detail::parse_int(*v, "[array] sites");
    number("array", "spacing_m", cfg.array.spacing);
    number("array", "coupling_scale", cfg.array.coupling_scale);
    if (auto v = get("array", "coupling")) {
        try {
            cfg.array.coupling = parse_coupling_profile(*v);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[array] coupling: ") + e.what());
        }
        detail::require(cfg.array.coupling != CouplingProfile::explicit_matrix,
                        "[array] coupling: explicit matrices are not read from config files");
    }
    if (auto v = get("array", "frequencies_dressed")) {
        cfg.array.frequencies_are_dressed = detail::parse_bool(*v, "[array] frequencies_dressed");
    }
    if (auto v = get("array", "frequency_profile")) {
        try {
            cfg.profile = parse_frequency_profile(*v);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[array] frequency_profile: ") + e.what());
        }
    }
    number("array", "profile_depth", cfg.profile_depth);
    number("array", "trap_frequency_hz", cfg.trap_frequency_hz);
    detail::require(cfg.array.sites >= 1 && cfg.array.sites <= 4096, "[array] sites: must lie in [1, 4096]");
    detail::require(cfg.trap_frequency_hz > 0.0, "[array] trap_frequency_hz: must be > 0");
    if (auto v = get("array", "trap_frequencies_hz")) {
        const auto items = detail::split_list(*v);
        detail::require(static_cast<int>(items.size()) == cfg.array.sites,
                        "[array] trap_frequencies_hz: need one value per site");
        cfg.array.trap_frequencies.clear();
        for (const auto& s : items) {
            cfg.array.trap_frequencies.push_back(2.0 * kPi * detail::parse_double(s, "[array] trap_frequencies_hz"));
        }
        cfg.explicit_frequencies = true;
    } else if (cfg.array.sites >= 2) {
        apply_frequency_profile(cfg);
    } else {
        cfg.array.trap_frequencies = {2.0 * kPi * cfg.trap_frequency_hz};
    }

    const int n = cfg.array.sites;
    cfg.dissipation = DissipationSpec::none(n);
    const auto channels = get("dissipation", "channels");
    const auto rates = get("dissipation", "rates_rad_s");
    const auto baths = get("dissipation", "bath_occupations");
    if (channels || rates || baths) {
        detail::require(channels && rates, "[dissipation]: channels and rates_rad_s are both required");
        const auto c = detail::split_list(*channels);
        const auto r = detail::split_list(*rates);
        detail::require(static_cast<int>(c.size()) == n, "[dissipation] channels: need one entry per site");
        detail::require(static_cast<int>(r.size()) == n, "[dissipation] rates_rad_s: need one entry per site");
        for (int j = 0; j < n; ++j) {
            cfg.dissipation.channels[j] = detail::parse_channel(c[j], "[dissipation] channels");
            cfg.dissipation.rates[j] = detail::parse_double(r[j], "[dissipation] rates_rad_s");
        }
        if (baths) {
            const auto b = detail::split_list(*baths);
            detail::require(static_cast<int>(b.size()) == n, "[dissipation] bath_occupations: need one entry per site");
            for (int j = 0; j < n; ++j) {
                cfg.dissipation.bath_occupations[j] = detail::parse_double(b[j], "[dissipation] bath_occupations");
            }
        }
    }

    if (auto v = get("kick", "site")) cfg.kick.site = detail::parse_int(*v, "[kick] site");
    number("kick", "occupation", cfg.kick.occupation);
    number("kick", "background", cfg.kick.background);
    number("run", "t_end", cfg.run.t_end);
    number("run", "dt", cfg.run.dt);
    if (auto v = get("run", "sample_stride")) cfg.run.sample_stride = detail::parse_int(*v, "[run] sample_stride");
    return cfg;
}

/// Checks everything a run will need, so commands fail before computing.
inline void validate(const RunConfig& cfg)
{
    validate(cfg.array.beam);
    validate(cfg.array.sphere);
    if (cfg.array.sites >= 2) {
        validate(cfg.array);
    }
    validate(cfg.dissipation, cfg.array.sites);
    detail::require(cfg.kick.site >= 1 && cfg.kick.site <= cfg.array.sites, "[kick] site: out of range");
    detail::require(cfg.kick.occupation >= 0.0 && cfg.kick.background >= 0.0,
                    "[kick]: occupations must be >= 0");
    detail::require(cfg.run.t_end > 0.0, "[run] t_end: must be > 0");
    detail::require(cfg.run.sample_stride >= 1, "[run] sample_stride: must be >= 1");
    detail::require(cfg.profile_depth >= 0.0 && cfg.profile_depth < 1.0, "[array] profile_depth: must lie in [0, 1)");
}

inline RunConfig load_config(const std::string& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        std::ostringstream msg;
        msg << e.filename() << ":" << e.line() << ": " << e.message();
        throw ConfigError(msg.str());
    }
    try {
        return parse_config(tree);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace phonon
