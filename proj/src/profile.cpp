#include "bidop/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace bidop {

CarrierProfile make_profile(std::string name, double carrier_hz, double bandwidth_hz,
                            std::optional<double> subcarrier_spacing_hz, double period_s,
                            double f_min_hz, double f_max_hz, double v_min_mps, double v_max_mps,
                            double area_side_m, double sigma_cfo_hz, WaveformKind waveform) {
    CarrierProfile p;
    p.name = std::move(name);
    p.carrier_hz = carrier_hz;
    p.wavelength_m = kSpeedOfLight / carrier_hz;
    p.bandwidth_hz = bandwidth_hz;
    p.subcarrier_spacing_hz = subcarrier_spacing_hz;
    p.period_s = period_s;
    p.f_min_hz = f_min_hz;
    p.f_max_hz = f_max_hz;
    p.v_min_mps = v_min_mps;
    p.v_max_mps = v_max_mps;
    p.area_side_m = area_side_m;
    p.sigma_cfo_hz = sigma_cfo_hz;
    p.waveform = waveform;
    validate_profile(p);
    return p;
}

void validate_profile(const CarrierProfile& p) {
    auto fail = [&](const char* what) {
        throw std::invalid_argument("profile '" + p.name + "': " + what);
    };
    if (!(p.carrier_hz > 0.0)) fail("carrier frequency must be positive");
    if (std::abs(p.wavelength_m * p.carrier_hz - kSpeedOfLight) > 1e-6 * kSpeedOfLight)
        fail("wavelength must equal c / f_c");
    if (!(p.bandwidth_hz > 0.0)) fail("bandwidth must be positive");
    if (!(p.period_s > 0.0)) fail("period must be positive");
    if (!(p.f_min_hz >= 0.0 && p.f_min_hz <= p.f_max_hz)) fail("need 0 <= f_min <= f_max");
    if (!(p.v_min_mps >= 0.0 && p.v_min_mps <= p.v_max_mps)) fail("need 0 <= v_min <= v_max");
    if (!(p.area_side_m > 0.0)) fail("area side must be positive");
    if (!(p.sigma_cfo_hz >= 0.0)) fail("CFO std must be non-negative");
    if (p.waveform == WaveformKind::ofdm_bpsk &&
        !(p.subcarrier_spacing_hz && *p.subcarrier_spacing_hz > 0.0))
        fail("OFDM pilots need a positive subcarrier spacing");
}

CarrierProfile profile_60ghz() {
    return make_profile("60ghz", 60e9, 1.76e9, std::nullopt, 0.166e-3, 100.0, 1000.0, 0.5, 5.0,
                        20.0, 0.22e6, WaveformKind::golay_sc);
}

CarrierProfile profile_28ghz() {
    return make_profile("28ghz", 28e9, 0.4e9, 120e3, 0.178e-3, 100.0, 930.0, 0.5, 10.0, 50.0,
                        0.12e6, WaveformKind::ofdm_bpsk);
}

CarrierProfile profile_5ghz() {
    return make_profile("5ghz", 5e9, 0.16e9, 78.125e3, 0.5e-3, 100.0, 300.0, 0.5, 20.0, 100.0,
                        0.02e6, WaveformKind::ofdm_bpsk);
}

CarrierProfile profile_by_name(std::string_view name) {
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "60ghz") return profile_60ghz();
    if (key == "28ghz") return profile_28ghz();
    if (key == "5ghz") return profile_5ghz();
    throw std::invalid_argument("unknown profile '" + std::string(name) +
                                "' (expected 60ghz, 28ghz or 5ghz)");
}

const std::vector<std::string>& builtin_profile_names() {
    static const std::vector<std::string> names{"60ghz", "28ghz", "5ghz"};
    return names;
}

}  // namespace bidop
