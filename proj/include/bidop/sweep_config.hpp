#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bidop/experiments.hpp"

namespace bidop {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// INI layout:
//   [sweep]  profiles = 60ghz,28ghz   axis = n_static   values = 2,4,6,8
//            trials, seed, route = phase|waveform, static_rx, timing, noiseless,
//            max_failure_rate
//   [fixed]  n_static, window_ms, snr_db, sigma_aoa_deg, T_scale, sigma_po_deg, cfo_scale
// Angles are in degrees. Unknown keys are rejected so typos do not pass silently.
SweepConfig parse_sweep_config(std::istream& is);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace bidop
