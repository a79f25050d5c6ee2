#include "bidop/sweep_config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bidop/profile.hpp"

namespace bidop {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: '" + key + "' is not a number: '" + s + "'");
}

bool to_bool(const std::string& key, std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("config: '" + key + "' is not a boolean: '" + s + "'");
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    const std::set<std::string>& known) {
    for (const auto& [key, _] : section)
        if (!known.count(key)) throw ConfigError("config: unknown key '" + name + "." + key + "'");
}

}  // namespace

SweepConfig parse_sweep_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [section, _] : tree)
        if (section != "sweep" && section != "fixed")
            throw ConfigError("config: unknown section [" + section + "]");

    SweepConfig cfg;
    const pt::ptree empty;
    const auto& sweep = tree.get_child("sweep", empty);
    const auto& fixed = tree.get_child("fixed", empty);
    reject_unknown(sweep, "sweep",
                   {"profiles", "axis", "values", "trials", "seed", "route", "static_rx", "timing",
                    "noiseless", "max_failure_rate"});
    reject_unknown(fixed, "fixed",
                   {"n_static", "window_ms", "snr_db", "sigma_aoa_deg", "T_scale", "sigma_po_deg",
                    "cfo_scale"});

    auto get = [](const pt::ptree& t, const std::string& k) { return t.get_optional<std::string>(k); };

    if (auto v = get(sweep, "profiles")) {
        cfg.profiles = split_list(*v);
        for (auto& p : cfg.profiles) {
            try {
                p = profile_by_name(p).name;
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    }
    if (auto v = get(sweep, "axis")) {
        try {
            cfg.axis = parse_axis(*v);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (auto v = get(sweep, "values")) {
        cfg.axis_values.clear();
        for (const auto& item : split_list(*v)) cfg.axis_values.push_back(to_double("sweep.values", item));
    }
    if (auto v = get(sweep, "trials")) {
        const double n = to_double("sweep.trials", *v);
        if (!(n >= 1) || n != std::floor(n)) throw ConfigError("config: sweep.trials must be a positive integer");
        cfg.n_trials = static_cast<std::size_t>(n);
    }
    if (auto v = get(sweep, "seed")) {
        try {
            std::size_t used = 0;
            cfg.base_seed = std::stoull(*v, &used, 0);
            if (used != v->size()) throw std::invalid_argument(*v);
        } catch (const std::exception&) {
            throw ConfigError("config: sweep.seed is not an unsigned integer: '" + *v + "'");
        }
    }
    if (auto v = get(sweep, "route")) {
        if (*v == "phase") cfg.route = SynthesisRoute::phase;
        else if (*v == "waveform") cfg.route = SynthesisRoute::waveform;
        else throw ConfigError("config: sweep.route must be 'phase' or 'waveform'");
    }
    if (auto v = get(sweep, "static_rx")) cfg.static_rx = to_bool("sweep.static_rx", *v);
    if (auto v = get(sweep, "timing")) cfg.record_timing = to_bool("sweep.timing", *v);
    if (auto v = get(sweep, "noiseless")) cfg.noiseless = to_bool("sweep.noiseless", *v);
    if (auto v = get(sweep, "max_failure_rate"))
        cfg.max_failure_rate = to_double("sweep.max_failure_rate", *v);

    FixedPoint& f = cfg.fixed;
    if (auto v = get(fixed, "n_static")) f.n_static = static_cast<int>(to_double("fixed.n_static", *v));
    if (auto v = get(fixed, "window_ms")) f.window_ms = to_double("fixed.window_ms", *v);
    if (auto v = get(fixed, "snr_db")) f.snr_db = to_double("fixed.snr_db", *v);
    if (auto v = get(fixed, "sigma_aoa_deg")) f.sigma_aoa_deg = to_double("fixed.sigma_aoa_deg", *v);
    if (auto v = get(fixed, "T_scale")) f.T_scale = to_double("fixed.T_scale", *v);
    if (auto v = get(fixed, "sigma_po_deg"))
        f.sigma_po_rad = to_double("fixed.sigma_po_deg", *v) * std::numbers::pi / 180.0;
    if (auto v = get(fixed, "cfo_scale")) f.cfo_scale = to_double("fixed.cfo_scale", *v);

    if (cfg.profiles.empty()) throw ConfigError("config: sweep.profiles is empty");
    if (cfg.axis_values.empty()) throw ConfigError("config: sweep.values is empty");
    if (f.n_static < 2 && cfg.axis != SweepAxis::n_static)
        throw ConfigError("config: fixed.n_static must be at least 2");
    if (cfg.axis == SweepAxis::n_static)
        for (double s : cfg.axis_values)
            if (s < 2 || s != std::floor(s)) throw ConfigError("config: n_static values must be integers >= 2");
    if (!(f.window_ms > 0) || !(f.T_scale > 0) || !(f.sigma_aoa_deg >= 0) || !(f.cfo_scale >= 0))
        throw ConfigError("config: [fixed] values out of range");
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_sweep_config(in);
}

}  // namespace bidop
