#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "bidop/phase.hpp"
#include "bidop/profile.hpp"
#include "bidop/random.hpp"
#include "bidop/scenario.hpp"

namespace bidop {

/// Unknowns of the estimation problem.
struct Theta {
    double f_d_target = 0.0;  // Hz
    double eta = 0.0;         // rad
    double v_rx = 0.0;        // m/s
};

/// Per-frame clock-asynchrony nuisance shared by every path.
struct NuisanceTrace {
    double period_s = 0.0;
    std::vector<double> cfo_hz;
    std::vector<double> po_rad;
    std::vector<double> combined_rad;  // po + 2 pi cfo k T

    std::size_t frames() const { return cfo_hz.size(); }
    static double combine(double cfo_hz, double po_rad, std::size_t k, double period_s) {
        return po_rad + kTwoPi * cfo_hz * static_cast<double>(k) * period_s;
    }
};

/// K x (S + 2) wrapped phase observations, columns [LoS, target, static_1 .. static_S].
struct PhasePanel {
    std::size_t frames = 0;
    std::size_t paths = 0;
    double period_s = 0.0;
    std::vector<Phase> phases;     // row-major, frames x paths
    std::vector<double> aoa_meas;  // per path, LoS entry fixed at 0
    Theta truth;
    std::vector<std::complex<double>> path_gains;

    Phase at(std::size_t k, std::size_t path) const { return phases[k * paths + path]; }
    Phase& at(std::size_t k, std::size_t path) { return phases[k * paths + path]; }
    std::size_t n_static() const { return paths - 2; }
};

inline constexpr double kDefaultSigmaPo = std::numbers::pi / 2.0;

/// i.i.d. Gaussian CFO (std = profile.sigma_cfo_hz) and PO (std = sigma_po) per frame.
NuisanceTrace synthesize_nuisance(const CarrierProfile& profile, std::size_t frames,
                                  double sigma_po, Rng& rng);

/// Same draw with an explicit frame period.
NuisanceTrace synthesize_nuisance(double period_s, double sigma_cfo_hz, std::size_t frames,
                                  double sigma_po, Rng& rng);

/// All-zero nuisance.
NuisanceTrace zero_nuisance(double period_s, std::size_t frames);

/// Phase-noise std (rad) of a unit-amplitude complex observation at the given SNR.
/// High-SNR approximation sigma = 1 / sqrt(2 SNR); zero for an infinite SNR.
double phase_noise_std(double snr_db);

struct PanelOptions {
    double snr_db = 5.0;
    double sigma_aoa_rad = 0.0;
    bool random_path_phases = true;  // draw each path's reflectivity phase U(0, 2pi)
};

/**
 * @brief Phase-domain forward model.
 *
 * phase[k, i] = mod_2pi(Psi_o(kT) + angle(A_i) + 2 pi k T f_i + w_i[k]) where f_i is
 * the path's total Doppler (RX motion from geometry, plus f_D,t on the
 * target path). Frame count and period come from the nuisance trace. The
 * nuisance enters as a separate modular term so it cancels exactly between
 * columns. Draw order from rng: path phases, phase noise, AoA noise.
 */
PhasePanel synthesize_panel(const Scenario& scenario, const CarrierProfile& profile,
                            const NuisanceTrace& nuisance, const PanelOptions& opts, Rng& rng);

/// Convenience form: draws a nuisance trace (default PO std) from rng first.
PhasePanel synthesize_panel(const Scenario& scenario, const CarrierProfile& profile,
                            std::size_t frames, double snr_db, double sigma_aoa_rad, Rng& rng);

/// Draws the measured AoAs: truth plus N(0, sigma^2) per non-LoS path.
std::vector<double> measure_aoas(const Scenario& scenario, double sigma_aoa_rad, Rng& rng);

Theta true_theta(const Scenario& s);

/// Number of frames covering a window: round(window / T).
std::size_t frames_for_window(double window_s, double period_s);

}  // namespace bidop
