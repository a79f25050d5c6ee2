#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bidop/phase.hpp"
#include "bidop/phase_model.hpp"
#include "bidop/profile.hpp"
#include "bidop/random.hpp"
#include "bidop/scenario.hpp"

namespace bidop {

using cd = std::complex<double>;

/// Binary Golay complementary pair built by the standard recursion
/// a' = [a b], b' = [a -b] from a = b = [1]. Length must be a power of two.
std::pair<std::vector<double>, std::vector<double>> golay_pair(std::size_t length);

/**
 * @brief Channel-estimation pilot burst.
 *
 * golay_sc: [cp(a) | a | cp(b) | b] with a full-length cyclic prefix on each
 * half, so delays below the sequence length correlate circularly.
 * ofdm_bpsk: one symbol of N unit-power BPSK subcarriers with a 25 % cyclic prefix.
 * Unit average power per sample (over the symbol body for OFDM).
 */
struct PilotWaveform {
    WaveformKind kind = WaveformKind::golay_sc;
    std::vector<cd> samples;
    double sample_rate = 0.0;
    std::vector<double> golay_a;
    std::vector<double> golay_b;
    std::vector<double> pilot_symbols;
    std::size_t n_subcarriers = 0;
    std::size_t cyclic_prefix = 0;

    /// Number of delay bins in the estimated CIR.
    std::size_t cir_length() const {
        return kind == WaveformKind::golay_sc ? golay_a.size() : n_subcarriers;
    }
    /// SNR gain from per-sample SNR to CIR-peak SNR (2 L for Golay, N for OFDM).
    double processing_gain() const { return static_cast<double>(kind == WaveformKind::golay_sc ? 2 * golay_a.size() : n_subcarriers); }
    /// Largest delay (samples) that stays inside the cyclic prefix.
    std::size_t max_delay_samples() const { return cyclic_prefix; }
};

inline constexpr std::size_t kDefaultGolayLength = 128;

/// N_sc = round(B / delta_f), nearest integer with halves rounded away from zero.
std::size_t subcarrier_count(const CarrierProfile& profile);

/// Throws std::invalid_argument for an OFDM profile without subcarrier spacing.
PilotWaveform make_pilot(const CarrierProfile& profile, Rng& rng,
                         std::size_t golay_length = kDefaultGolayLength);

struct Tap {
    double delay_s = 0.0;
    cd gain{1.0, 0.0};
    double doppler_hz = 0.0;
};

struct TapChannel {
    std::vector<Tap> taps;  // sorted by delay
    double noise_var = 0.0;
    double timing_offset_s = 0.0;
};

/// One received burst for frame k: sum_m A_m exp(j(2 pi f_m k T + Psi)) x(t - tau_m - tau_o)
/// plus complex AWGN of variance noise_var. Off-grid delays use an 8-tap
/// Kaiser-windowed sinc. Throws std::out_of_range for delays beyond the prefix.
std::vector<cd> propagate(const PilotWaveform& pilot, const TapChannel& chan, std::size_t frame,
                          double period_s, double offset_phase_rad, Rng& rng);

/// Correlation (Golay) or LS-CFR + IDFT (OFDM) CIR estimate, scaled so a unit tap gives a
/// unit peak. Throws std::invalid_argument on a length mismatch.
std::vector<cd> estimate_cir(const std::vector<cd>& received, const PilotWaveform& pilot);

/// Expected total CIR power of pure noise divided by noise_var
/// (1/2 for Golay, 1 for OFDM).
double cir_noise_power_factor(const PilotWaveform& pilot);

struct ExtractedPhases {
    std::size_t frames = 0;
    std::size_t paths = 0;
    std::vector<Phase> phases;  // frames x paths
    std::vector<bool> missing;  // frames x paths

    bool complete() const;
};

/// Reads the phase at each expected bin, refined to the strongest bin within +-1
/// that is not another path's bin. Entries whose power is below
/// detection_threshold_db above the median CIR power are flagged missing.
/// Throws std::invalid_argument when two expected bins coincide.
ExtractedPhases extract_path_phases(const std::vector<std::vector<cd>>& cirs,
                                    const std::vector<std::size_t>& expected_bins,
                                    double detection_threshold_db = 6.0);

class DelayResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WaveformPanelOptions {
    double snr_db = 5.0;  // per received sample, relative to a unit-amplitude path
    double sigma_aoa_rad = 0.0;
    bool path_loss = true;  // |A_i| = LoS length / path length
    bool random_path_phases = true;
    std::size_t golay_length = kDefaultGolayLength;
};

/// Integer delay bin of each path relative to the LoS, LoS first.
std::vector<std::size_t> path_delay_bins(const Scenario& scenario, double sample_rate);

/// Tap channel of a scenario with delays snapped to the sample grid.
TapChannel scenario_channel(const Scenario& scenario, const CarrierProfile& profile,
                            const std::vector<cd>& gains, double noise_var);

/**
 * @brief Signal-level route to a PhasePanel.
 *
 * Builds the scenario's multipath channel, transmits the profile's pilot each
 * frame, re-estimates the CIR and reads the per-path phases. Throws
 * DelayResolutionError when two paths share a delay bin or a path falls
 * outside the CIR window, and when a peak is missed at some frame.
 */
PhasePanel synthesize_panel_waveform(const Scenario& scenario, const CarrierProfile& profile,
                                     const NuisanceTrace& nuisance,
                                     const WaveformPanelOptions& opts, Rng& rng);

}  // namespace bidop
