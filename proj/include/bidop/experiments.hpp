#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidop/profile.hpp"

namespace bidop {

enum class SweepAxis { n_static, window_ms, snr_db, sigma_aoa_deg, T_scale };
enum class SynthesisRoute { phase, waveform };

const char* to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);

/// Parameters held constant unless they are the swept axis.
struct FixedPoint {
    int n_static = 2;
    double window_ms = 16.0;
    double snr_db = 5.0;
    double sigma_aoa_deg = 5.0;
    double T_scale = 1.0;
    double sigma_po_rad = std::numbers::pi / 2.0;
    double cfo_scale = 1.0;
};

struct SweepConfig {
    std::vector<std::string> profiles{"60ghz", "28ghz", "5ghz"};
    SweepAxis axis = SweepAxis::n_static;
    std::vector<double> axis_values{2.0};
    FixedPoint fixed;
    std::size_t n_trials = 2000;
    std::uint64_t base_seed = 1;
    SynthesisRoute route = SynthesisRoute::phase;
    bool static_rx = false;      // v_rx = 0 scenarios scored with the static baseline
    bool record_timing = false;  // fill nls_micros (breaks byte-reproducibility)
    bool noiseless = false;      // infinite SNR and exact AoAs
    double max_failure_rate = 0.01;
};

struct TrialRecord {
    std::string profile;
    double axis_value = 0.0;
    std::size_t trial = 0;
    double eps_fd = 0.0;
    double eps_eta = 0.0;
    double eps_v = 0.0;
    bool converged = false;
    bool failed = false;
    double nls_micros = 0.0;  // fractional microseconds
};

/// Boxplot statistics: type-7 (linear interpolation) quantiles, Tukey whiskers
/// at 1.5 IQR clipped to the most extreme samples inside the fences.
struct BoxStats {
    std::size_t count = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    double mean = 0.0;
};

struct CellSummary {
    std::string profile;
    double axis_value = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    BoxStats eps_fd;
    BoxStats eps_eta;
    BoxStats eps_v;
    double mean_nls_micros = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::n_static;
    std::vector<TrialRecord> records;  // sorted by (profile order, axis value, trial)
    std::vector<CellSummary> summaries;

    const CellSummary& cell(const std::string& profile, double axis_value) const;
};

class SweepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument on an empty sample.
BoxStats summarize(std::span<const double> values);

/// Seed of one trial, derived from the base seed, profile, axis value and trial index.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& profile, double axis_value,
                         std::size_t trial);

/// One Monte Carlo trial: scenario, panel, estimate, errors. Never throws for
/// estimation failures; those come back with failed = true.
TrialRecord run_trial(const SweepConfig& cfg, const CarrierProfile& profile, double axis_value,
                      std::size_t trial);

/// Parallel (OpenMP) sweep over every (profile, axis value, trial) cell.
/// Throws SweepError when a cell's failure rate exceeds cfg.max_failure_rate.
SweepResult run_sweep(const SweepConfig& cfg);

/// Single-threaded reference; produces the same records as run_sweep.
SweepResult run_sweep_serial(const SweepConfig& cfg);

/// Sweeps the frame period as multiples of the profile's nominal T.
SweepResult t_sensitivity(const std::string& profile, const std::vector<double>& T_scales,
                          SweepConfig cfg);

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& records,
                                           const std::vector<std::string>& profile_order);

void write_records_csv(std::ostream& os, const SweepResult& result);
void write_summaries_json(std::ostream& os, const SweepResult& result, const SweepConfig& cfg);

}  // namespace bidop
