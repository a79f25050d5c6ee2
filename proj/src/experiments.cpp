#include "bidop/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "bidop/estimator.hpp"
#include "bidop/phase_model.hpp"
#include "bidop/random.hpp"
#include "bidop/scenario.hpp"
#include "bidop/waveform.hpp"

namespace bidop {

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::n_static: return "n_static";
        case SweepAxis::window_ms: return "window_ms";
        case SweepAxis::snr_db: return "snr_db";
        case SweepAxis::sigma_aoa_deg: return "sigma_aoa_deg";
        case SweepAxis::T_scale: return "T_scale";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& s) {
    for (SweepAxis a : {SweepAxis::n_static, SweepAxis::window_ms, SweepAxis::snr_db,
                        SweepAxis::sigma_aoa_deg, SweepAxis::T_scale})
        if (s == to_string(a)) return a;
    throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

const CellSummary& SweepResult::cell(const std::string& profile, double axis_value) const {
    for (const auto& c : summaries)
        if (c.profile == profile && c.axis_value == axis_value) return c;
    throw std::out_of_range("no sweep cell for " + profile);
}

BoxStats summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty cell");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    auto quantile = [&](double p) {
        const double h = static_cast<double>(n - 1) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, n - 1);
        return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
    };
    BoxStats b;
    b.count = n;
    b.median = quantile(0.5);
    b.q25 = quantile(0.25);
    b.q75 = quantile(0.75);
    const double iqr = b.q75 - b.q25;
    const double lo_fence = b.q25 - 1.5 * iqr;
    const double hi_fence = b.q75 + 1.5 * iqr;
    b.whisker_low = *std::find_if(x.begin(), x.end(), [&](double v) { return v >= lo_fence; });
    b.whisker_high = *std::find_if(x.rbegin(), x.rend(), [&](double v) { return v <= hi_fence; });
    double sum = 0.0;
    for (double v : x) sum += v;
    b.mean = sum / static_cast<double>(n);
    return b;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& profile, double axis_value,
                         std::size_t trial) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : profile) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = base_seed ^ mix_seed(h);
    s = mix_seed(s ^ mix_seed(std::bit_cast<std::uint64_t>(axis_value)));
    return mix_seed(s ^ static_cast<std::uint64_t>(trial));
}

namespace {

struct TrialParams {
    std::size_t n_static;
    double window_s;
    double snr_db;
    double sigma_aoa_rad;
    double period_s;
};

TrialParams resolve(const SweepConfig& cfg, const CarrierProfile& profile, double axis_value) {
    FixedPoint f = cfg.fixed;
    switch (cfg.axis) {
        case SweepAxis::n_static: f.n_static = static_cast<int>(std::lround(axis_value)); break;
        case SweepAxis::window_ms: f.window_ms = axis_value; break;
        case SweepAxis::snr_db: f.snr_db = axis_value; break;
        case SweepAxis::sigma_aoa_deg: f.sigma_aoa_deg = axis_value; break;
        case SweepAxis::T_scale: f.T_scale = axis_value; break;
    }
    TrialParams p;
    p.n_static = static_cast<std::size_t>(std::max(f.n_static, 0));
    p.window_s = f.window_ms * 1e-3;
    p.snr_db = cfg.noiseless ? std::numeric_limits<double>::infinity() : f.snr_db;
    p.sigma_aoa_rad = cfg.noiseless ? 0.0 : f.sigma_aoa_deg * std::numbers::pi / 180.0;
    p.period_s = profile.period_s * f.T_scale;
    return p;
}

double relative_error(double truth, double est) { return std::abs(truth - est) / std::abs(truth); }

}  // namespace

TrialRecord run_trial(const SweepConfig& cfg, const CarrierProfile& profile, double axis_value,
                      std::size_t trial) {
    TrialRecord rec;
    rec.profile = profile.name;
    rec.axis_value = axis_value;
    rec.trial = trial;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto fail = [&] {
        rec.failed = true;
        rec.converged = false;
        rec.eps_fd = rec.eps_eta = rec.eps_v = nan;
        return rec;
    };

    try {
        const TrialParams p = resolve(cfg, profile, axis_value);
        Rng rng(trial_seed(cfg.base_seed, profile.name, axis_value, trial));
        const std::size_t frames = frames_for_window(p.window_s, p.period_s);
        const NuisanceTrace nuisance =
            synthesize_nuisance(p.period_s, profile.sigma_cfo_hz * cfg.fixed.cfo_scale, frames,
                                cfg.fixed.sigma_po_rad, rng);

        PhasePanel panel;
        Scenario scenario;
        if (cfg.route == SynthesisRoute::phase) {
            scenario = sample_scenario(profile, p.n_static, rng);
            if (cfg.static_rx) scenario.v_rx = 0.0;
            PanelOptions opts;
            opts.snr_db = p.snr_db;
            opts.sigma_aoa_rad = p.sigma_aoa_rad;
            panel = synthesize_panel(scenario, profile, nuisance, opts, rng);
        } else {
            WaveformPanelOptions opts;
            opts.snr_db = p.snr_db;
            opts.sigma_aoa_rad = p.sigma_aoa_rad;
            bool built = false;
            for (int attempt = 0; attempt < 100 && !built; ++attempt) {
                scenario = sample_scenario(profile, p.n_static, rng);
                if (cfg.static_rx) scenario.v_rx = 0.0;
                try {
                    panel = synthesize_panel_waveform(scenario, profile, nuisance, opts, rng);
                    built = true;
                } catch (const DelayResolutionError&) {
                    // unresolvable geometry, draw another one
                }
            }
            if (!built) return fail();
        }

        if (cfg.static_rx) {
            const double f_hat = static_baseline(panel);
            rec.eps_fd = relative_error(scenario.f_d_target, f_hat);
            rec.eps_eta = 0.0;
            rec.eps_v = 0.0;
            rec.converged = true;
            return rec;
        }

        const DiffSeries diff = preprocess(panel);
        EstimateOptions eopts;
        const ThetaEstimate init = initialize(diff, profile.wavelength_m, eopts);
        ThetaEstimate est;
        if (cfg.record_timing) {
            const auto t0 = std::chrono::steady_clock::now();
            est = nls_refine(diff, profile.wavelength_m, init, eopts.nls);
            const auto t1 = std::chrono::steady_clock::now();
            rec.nls_micros = std::chrono::duration<double, std::micro>(t1 - t0).count();
        } else {
            est = nls_refine(diff, profile.wavelength_m, init, eopts.nls);
        }
        rec.eps_fd = relative_error(scenario.f_d_target, est.theta.f_d_target);
        rec.eps_eta = angular_distance(scenario.eta, est.theta.eta) / std::abs(scenario.eta);
        rec.eps_v = relative_error(scenario.v_rx, est.theta.v_rx);
        rec.converged = est.converged;
        return rec;
    } catch (const std::exception&) {
        return fail();
    }
}

namespace {

struct Task {
    std::size_t profile;
    double axis_value;
    std::size_t trial;
};

std::vector<Task> make_tasks(const SweepConfig& cfg) {
    std::vector<double> values(cfg.axis_values);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<Task> tasks;
    tasks.reserve(cfg.profiles.size() * values.size() * cfg.n_trials);
    for (std::size_t p = 0; p < cfg.profiles.size(); ++p)
        for (double v : values)
            for (std::size_t t = 0; t < cfg.n_trials; ++t) tasks.push_back({p, v, t});
    return tasks;
}

void check_config(const SweepConfig& cfg) {
    if (cfg.profiles.empty()) throw std::invalid_argument("sweep: no profiles selected");
    if (cfg.axis_values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (cfg.n_trials == 0) throw std::invalid_argument("sweep: n_trials must be positive");
}

SweepResult finish(const SweepConfig& cfg, std::vector<TrialRecord> records) {
    SweepResult r;
    r.axis = cfg.axis;
    r.records = std::move(records);
    r.summaries = summarize_records(r.records, cfg.profiles);
    for (const auto& c : r.summaries) {
        const double rate = static_cast<double>(c.failures) / static_cast<double>(c.trials);
        if (rate > cfg.max_failure_rate) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "sweep: %zu of %zu trials failed for %s at %s=%g",
                          c.failures, c.trials, c.profile.c_str(), to_string(cfg.axis), c.axis_value);
            throw SweepError(buf);
        }
    }
    return r;
}

std::vector<CarrierProfile> load_profiles(const SweepConfig& cfg) {
    std::vector<CarrierProfile> out;
    for (const auto& name : cfg.profiles) out.push_back(profile_by_name(name));
    return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    check_config(cfg);
    const auto profiles = load_profiles(cfg);
    const auto tasks = make_tasks(cfg);
    std::vector<TrialRecord> records(tasks.size());
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Task& t = tasks[static_cast<std::size_t>(i)];
        records[static_cast<std::size_t>(i)] = run_trial(cfg, profiles[t.profile], t.axis_value, t.trial);
    }
    return finish(cfg, std::move(records));
}

SweepResult run_sweep_serial(const SweepConfig& cfg) {
    check_config(cfg);
    const auto profiles = load_profiles(cfg);
    const auto tasks = make_tasks(cfg);
    std::vector<TrialRecord> records;
    records.reserve(tasks.size());
    for (const Task& t : tasks) records.push_back(run_trial(cfg, profiles[t.profile], t.axis_value, t.trial));
    return finish(cfg, std::move(records));
}

SweepResult t_sensitivity(const std::string& profile, const std::vector<double>& T_scales,
                          SweepConfig cfg) {
    cfg.profiles = {profile};
    cfg.axis = SweepAxis::T_scale;
    cfg.axis_values = T_scales;
    // aliasing makes estimation failures part of the measurement here
    cfg.max_failure_rate = 1.0;
    return run_sweep(cfg);
}

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& records,
                                           const std::vector<std::string>& profile_order) {
    std::map<std::pair<std::size_t, double>, std::vector<const TrialRecord*>> cells;
    for (const auto& r : records) {
        const auto it = std::find(profile_order.begin(), profile_order.end(), r.profile);
        const auto idx = static_cast<std::size_t>(it - profile_order.begin());
        cells[{idx, r.axis_value}].push_back(&r);
    }
    std::vector<CellSummary> out;
    for (const auto& [key, rows] : cells) {
        CellSummary c;
        c.profile = rows.front()->profile;
        c.axis_value = key.second;
        c.trials = rows.size();
        std::vector<double> fd, eta, v;
        double micros = 0.0;
        for (const TrialRecord* r : rows) {
            if (r->failed) {
                ++c.failures;
                continue;
            }
            fd.push_back(r->eps_fd);
            eta.push_back(r->eps_eta);
            v.push_back(r->eps_v);
            micros += r->nls_micros;
        }
        if (!fd.empty()) {
            c.eps_fd = summarize(fd);
            c.eps_eta = summarize(eta);
            c.eps_v = summarize(v);
            c.mean_nls_micros = micros / static_cast<double>(fd.size());
        }
        out.push_back(c);
    }
    return out;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json box_json(const BoxStats& b) {
    return {{"count", b.count},       {"median", b.median},
            {"q25", b.q25},           {"q75", b.q75},
            {"whisker_low", b.whisker_low}, {"whisker_high", b.whisker_high},
            {"mean", b.mean}};
}

}  // namespace

void write_records_csv(std::ostream& os, const SweepResult& result) {
    os << "profile,axis,axis_value,trial,eps_fd,eps_eta,eps_v,converged,nls_micros\n";
    const char* axis = to_string(result.axis);
    for (const auto& r : result.records) {
        os << r.profile << ',' << axis << ',' << num(r.axis_value) << ',' << r.trial << ','
           << num(r.eps_fd) << ',' << num(r.eps_eta) << ',' << num(r.eps_v) << ','
           << (r.converged ? 1 : 0) << ',' << num(r.nls_micros) << '\n';
    }
}

void write_summaries_json(std::ostream& os, const SweepResult& result, const SweepConfig& cfg) {
    nlohmann::json j;
    j["axis"] = to_string(result.axis);
    j["n_trials"] = cfg.n_trials;
    j["base_seed"] = cfg.base_seed;
    j["route"] = cfg.route == SynthesisRoute::phase ? "phase" : "waveform";
    j["static_rx"] = cfg.static_rx;
    j["fixed"] = {{"n_static", cfg.fixed.n_static},
                  {"window_ms", cfg.fixed.window_ms},
                  {"snr_db", cfg.fixed.snr_db},
                  {"sigma_aoa_deg", cfg.fixed.sigma_aoa_deg},
                  {"T_scale", cfg.fixed.T_scale}};
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : result.summaries) {
        nlohmann::json cell{{"profile", c.profile},
                            {"axis_value", c.axis_value},
                            {"trials", c.trials},
                            {"failures", c.failures}};
        if (c.failures < c.trials) {
            cell["eps_fd"] = box_json(c.eps_fd);
            cell["eps_eta"] = box_json(c.eps_eta);
            cell["eps_v"] = box_json(c.eps_v);
        }
        if (cfg.record_timing) cell["mean_nls_micros"] = c.mean_nls_micros;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    os << j.dump(2) << '\n';
}

}  // namespace bidop
