#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "bidop/estimator.hpp"
#include "bidop/experiments.hpp"
#include "bidop/panel_io.hpp"
#include "bidop/phase_model.hpp"
#include "bidop/profile.hpp"
#include "bidop/scenario.hpp"
#include "bidop/sweep_config.hpp"
#include "bidop/validation.hpp"
#include "bidop/waveform.hpp"

namespace fs = std::filesystem;
using namespace bidop;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct SweepArgs {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> profile;
    bool waveform = false;
    bool timing = false;
};

struct EstimateArgs {
    std::string panel = "-";
    std::optional<std::string> profile;
    bool static_rx = false;
};

struct GenArgs {
    std::string profile = "60ghz";
    std::uint64_t seed = 1;
    std::optional<std::string> out;
    bool waveform = false;
    bool noiseless = false;
    int n_static = 2;
    double window_ms = 16.0;
    double snr_db = 5.0;
    double sigma_aoa_deg = 5.0;
    bool static_rx = false;
};

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw std::runtime_error("cannot create output directory '" + dir + "'");
    return p;
}

int cmd_sweep(const SweepArgs& a) {
    if (!fs::exists(a.config)) {
        std::cerr << "bidop sweep: config file '" << a.config << "' not found\n";
        return kUsage;
    }
    SweepConfig cfg = load_sweep_config(a.config);
    if (a.seed) cfg.base_seed = *a.seed;
    if (a.trials) cfg.n_trials = *a.trials;
    if (a.profile) cfg.profiles = {profile_by_name(*a.profile).name};
    if (a.waveform) cfg.route = SynthesisRoute::waveform;
    if (a.timing) cfg.record_timing = true;

    const SweepResult res = run_sweep(cfg);
    const fs::path dir = prepare_out_dir(a.out);
    std::ofstream csv(dir / "records.csv", std::ios::binary);
    std::ofstream json(dir / "summary.json", std::ios::binary);
    if (!csv || !json) throw std::runtime_error("cannot write into '" + a.out + "'");
    write_records_csv(csv, res);
    write_summaries_json(json, res, cfg);
    if (!csv.flush() || !json.flush()) throw std::runtime_error("write failed in '" + a.out + "'");

    for (const auto& c : res.summaries) {
        std::printf("%-6s %s=%-8g median eps_fd %.4g  eps_eta %.4g  eps_v %.4g  (%zu/%zu failed)\n",
                    c.profile.c_str(), to_string(res.axis), c.axis_value, c.eps_fd.median,
                    c.eps_eta.median, c.eps_v.median, c.failures, c.trials);
    }
    return kOk;
}

int cmd_estimate(const EstimateArgs& a) {
    PanelFile pf;
    if (a.panel == "-") {
        pf = read_panel_csv(std::cin);
    } else {
        std::ifstream in(a.panel);
        if (!in) throw std::runtime_error("cannot open panel '" + a.panel + "'");
        pf = read_panel_csv(in);
    }
    const std::optional<std::string> name = a.profile ? a.profile : pf.profile;
    if (!name) throw std::runtime_error("panel has no profile metadata; pass --profile");
    const CarrierProfile prof = profile_by_name(*name);

    nlohmann::json out;
    if (a.static_rx) {
        out = {{"f_d_target", static_baseline(pf.panel)}, {"eta", 0.0}, {"v_rx", 0.0},
               {"residual_norm", 0.0}, {"converged", true}, {"branch", "none"}};
    } else {
        const ThetaEstimate est = estimate(pf.panel, prof);
        out = {{"f_d_target", est.theta.f_d_target}, {"eta", est.theta.eta},
               {"v_rx", est.theta.v_rx}, {"residual_norm", est.residual_norm},
               {"converged", est.converged}, {"branch", to_string(est.branch)}};
    }
    std::cout << out.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    return kOk;
}

int cmd_gen_panel(const GenArgs& a) {
    const CarrierProfile prof = profile_by_name(a.profile);
    if (a.n_static < 2) throw std::invalid_argument("--n-static must be at least 2");
    Rng rng(a.seed);
    const std::size_t frames = frames_for_window(a.window_ms * 1e-3, prof.period_s);
    const NuisanceTrace nuisance = synthesize_nuisance(prof, frames, kDefaultSigmaPo, rng);
    const double snr = a.noiseless ? std::numeric_limits<double>::infinity() : a.snr_db;
    const double sigma_aoa = a.noiseless ? 0.0 : a.sigma_aoa_deg * std::numbers::pi / 180.0;

    PhasePanel panel;
    bool built = false;
    for (int attempt = 0; attempt < 100 && !built; ++attempt) {
        Scenario s = sample_scenario(prof, static_cast<std::size_t>(a.n_static), rng);
        if (a.static_rx) s.v_rx = 0.0;
        if (!a.waveform) {
            panel = synthesize_panel(s, prof, nuisance, {snr, sigma_aoa, true}, rng);
            built = true;
            break;
        }
        WaveformPanelOptions wo;
        wo.snr_db = snr;
        wo.sigma_aoa_rad = sigma_aoa;
        try {
            panel = synthesize_panel_waveform(s, prof, nuisance, wo, rng);
            built = true;
        } catch (const DelayResolutionError&) {
        }
    }
    if (!built) throw std::runtime_error("no scenario with resolvable path delays after 100 draws");

    if (!a.out) {
        write_panel_csv(std::cout, panel, prof.name);
        return kOk;
    }
    const fs::path dir = prepare_out_dir(*a.out);
    std::ofstream f(dir / "panel.csv", std::ios::binary);
    write_panel_csv(f, panel, prof.name);
    if (!f.flush()) throw std::runtime_error("write failed in '" + *a.out + "'");
    return kOk;
}

int cmd_validate(std::uint64_t seed) {
    bool all = true;
    for (const auto& r : run_validation(seed)) {
        std::printf("%s  %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.empty() ? "" : ": ", r.detail.c_str());
        all = all && r.passed;
    }
    return all ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bistatic Doppler estimation with asynchronous moving ISAC receivers"};
    app.require_subcommand(1);

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a config file");
    sweep->add_option("--config", sa.config, "INI sweep config")->required();
    sweep->add_option("--out", sa.out, "Output directory for records.csv and summary.json");
    sweep->add_option("--seed", sa.seed, "Base seed (overrides the config)");
    sweep->add_option("--trials", sa.trials, "Trials per cell (overrides the config)")->check(CLI::PositiveNumber);
    sweep->add_option("--profile", sa.profile, "Restrict to one profile")
        ->check(CLI::IsMember({"60ghz", "28ghz", "5ghz"}, CLI::ignore_case));
    sweep->add_flag("--waveform", sa.waveform, "Synthesize panels through the waveform chain");
    sweep->add_flag("--timing", sa.timing, "Record NLS wall-clock time per trial");

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate", "Estimate (f_D, eta, v) from a phase panel CSV");
    est->add_option("--panel", ea.panel, "Panel CSV, '-' for stdin");
    est->add_option("--profile", ea.profile, "Profile (defaults to the panel metadata)")
        ->check(CLI::IsMember({"60ghz", "28ghz", "5ghz"}, CLI::ignore_case));
    est->add_flag("--static-rx", ea.static_rx, "Receiver known to be static");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen-panel", "Simulate one scenario and write its phase panel");
    gen->add_option("--profile", ga.profile)->check(CLI::IsMember({"60ghz", "28ghz", "5ghz"}, CLI::ignore_case));
    gen->add_option("--seed", ga.seed);
    gen->add_option("--out", ga.out, "Output directory (panel.csv); stdout when omitted");
    gen->add_flag("--waveform", ga.waveform, "Go through pilot transmission and CIR estimation");
    gen->add_flag("--noiseless", ga.noiseless, "Infinite SNR and exact AoAs");
    gen->add_flag("--static-rx", ga.static_rx, "Set the receiver speed to zero");
    gen->add_option("--n-static", ga.n_static);
    gen->add_option("--window-ms", ga.window_ms)->check(CLI::PositiveNumber);
    gen->add_option("--snr-db", ga.snr_db);
    gen->add_option("--sigma-aoa-deg", ga.sigma_aoa_deg)->check(CLI::NonNegativeNumber);

    std::uint64_t vseed = 1;
    auto* val = app.add_subcommand("validate", "Run the built-in invariant checks");
    val->add_option("--seed", vseed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*sweep) return cmd_sweep(sa);
        if (*est) return cmd_estimate(ea);
        if (*gen) return cmd_gen_panel(ga);
        if (*val) return cmd_validate(vseed);
    } catch (const std::exception& e) {
        std::cerr << "bidop: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
