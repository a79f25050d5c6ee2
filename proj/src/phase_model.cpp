#include "bidop/phase_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidop {

NuisanceTrace synthesize_nuisance(double period_s, double sigma_cfo_hz, std::size_t frames,
                                  double sigma_po, Rng& rng) {
    if (frames < 2) throw std::invalid_argument("synthesize_nuisance: need at least 2 frames");
    NuisanceTrace n;
    n.period_s = period_s;
    n.cfo_hz.resize(frames);
    n.po_rad.resize(frames);
    n.combined_rad.resize(frames);
    for (std::size_t k = 0; k < frames; ++k) {
        n.cfo_hz[k] = gaussian(rng, sigma_cfo_hz);
        n.po_rad[k] = gaussian(rng, sigma_po);
        n.combined_rad[k] = NuisanceTrace::combine(n.cfo_hz[k], n.po_rad[k], k, period_s);
    }
    return n;
}

NuisanceTrace synthesize_nuisance(const CarrierProfile& profile, std::size_t frames,
                                  double sigma_po, Rng& rng) {
    return synthesize_nuisance(profile.period_s, profile.sigma_cfo_hz, frames, sigma_po, rng);
}

NuisanceTrace zero_nuisance(double period_s, std::size_t frames) {
    if (frames < 2) throw std::invalid_argument("zero_nuisance: need at least 2 frames");
    NuisanceTrace n;
    n.period_s = period_s;
    n.cfo_hz.assign(frames, 0.0);
    n.po_rad.assign(frames, 0.0);
    n.combined_rad.assign(frames, 0.0);
    return n;
}

double phase_noise_std(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return 1.0 / std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0));
}

Theta true_theta(const Scenario& s) { return {s.f_d_target, s.eta, s.v_rx}; }

std::vector<double> measure_aoas(const Scenario& scenario, double sigma_aoa_rad, Rng& rng) {
    std::vector<double> aoas(scenario.n_paths(), 0.0);
    aoas[kTargetPath] = scenario.aoa_target + gaussian(rng, sigma_aoa_rad);
    for (std::size_t s = 0; s < scenario.n_static(); ++s)
        aoas[kFirstStaticPath + s] = scenario.aoa_static[s] + gaussian(rng, sigma_aoa_rad);
    return aoas;
}

PhasePanel synthesize_panel(const Scenario& scenario, const CarrierProfile& profile,
                            const NuisanceTrace& nuisance, const PanelOptions& opts, Rng& rng) {
    const std::size_t frames = nuisance.frames();
    if (frames < 2) throw std::invalid_argument("synthesize_panel: need at least 2 frames");
    const std::size_t paths = scenario.n_paths();
    const double period = nuisance.period_s;

    PhasePanel panel;
    panel.frames = frames;
    panel.paths = paths;
    panel.period_s = period;
    panel.truth = true_theta(scenario);
    panel.phases.resize(frames * paths);

    const auto angles = bistatic_angles(scenario);
    std::vector<double> doppler(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        doppler[i] = scenario.v_rx * std::cos(angles[i].xi) / profile.wavelength_m;
        if (i == kTargetPath) doppler[i] += scenario.f_d_target;
    }

    panel.path_gains.resize(paths);
    std::vector<double> gain_phase(paths, 0.0);
    for (std::size_t i = 0; i < paths; ++i) {
        if (opts.random_path_phases) gain_phase[i] = uniform(rng, 0.0, kTwoPi);
        panel.path_gains[i] = std::polar(1.0, gain_phase[i]);
    }

    const double sigma_w = phase_noise_std(opts.snr_db);
    for (std::size_t k = 0; k < frames; ++k) {
        const Phase common = Phase::from_radians(nuisance.combined_rad[k]);
        const double t = static_cast<double>(k) * period;
        for (std::size_t i = 0; i < paths; ++i) {
            const double own = gain_phase[i] + kTwoPi * t * doppler[i] + gaussian(rng, sigma_w);
            panel.at(k, i) = common + Phase::from_radians(own);
        }
    }

    panel.aoa_meas = measure_aoas(scenario, opts.sigma_aoa_rad, rng);
    return panel;
}

PhasePanel synthesize_panel(const Scenario& scenario, const CarrierProfile& profile,
                            std::size_t frames, double snr_db, double sigma_aoa_rad, Rng& rng) {
    const NuisanceTrace nuisance = synthesize_nuisance(profile, frames, kDefaultSigmaPo, rng);
    PanelOptions opts;
    opts.snr_db = snr_db;
    opts.sigma_aoa_rad = sigma_aoa_rad;
    return synthesize_panel(scenario, profile, nuisance, opts, rng);
}

std::size_t frames_for_window(double window_s, double period_s) {
    const double k = std::round(window_s / period_s);
    if (!(k >= 2.0)) throw std::invalid_argument("window shorter than two frames");
    return static_cast<std::size_t>(k);
}

}  // namespace bidop
