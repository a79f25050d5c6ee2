#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bidop {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

enum class WaveformKind { golay_sc, ofdm_bpsk };

/// Radio and mobility parameters of one carrier configuration.
struct CarrierProfile {
    std::string name;
    double carrier_hz = 0.0;
    double wavelength_m = 0.0;
    double bandwidth_hz = 0.0;
    std::optional<double> subcarrier_spacing_hz;  // absent for single carrier
    double period_s = 0.0;                        // channel-estimation period T
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    double v_min_mps = 0.0;
    double v_max_mps = 0.0;
    double area_side_m = 0.0;
    double sigma_cfo_hz = 0.0;
    WaveformKind waveform = WaveformKind::golay_sc;

    /// Largest period that keeps per-frame phase changes below pi.
    double max_unambiguous_period_s() const { return 1.0 / (6.0 * f_max_hz); }
};

/// Builds a profile from the carrier frequency; the wavelength is derived as c / f_c.
CarrierProfile make_profile(std::string name, double carrier_hz, double bandwidth_hz,
                            std::optional<double> subcarrier_spacing_hz, double period_s,
                            double f_min_hz, double f_max_hz, double v_min_mps, double v_max_mps,
                            double area_side_m, double sigma_cfo_hz, WaveformKind waveform);

/// Throws std::invalid_argument on an inconsistent profile.
void validate_profile(const CarrierProfile& p);

// Built-in profiles: 802.11ay-like 60 GHz, FR2 28 GHz and 802.11ax-like 5 GHz.
CarrierProfile profile_60ghz();
CarrierProfile profile_28ghz();
CarrierProfile profile_5ghz();

/// Accepts "60ghz", "28ghz", "5ghz" (case-insensitive). Throws std::invalid_argument.
CarrierProfile profile_by_name(std::string_view name);

const std::vector<std::string>& builtin_profile_names();

}  // namespace bidop
