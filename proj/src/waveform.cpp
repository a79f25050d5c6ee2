#include "bidop/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace bidop {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
class FftPlans {
public:
    ~FftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    // Unnormalized DFT; sign = FFTW_FORWARD or FFTW_BACKWARD.
    void execute(std::vector<cd>& in, std::vector<cd>& out, int sign) {
        const int n = static_cast<int>(in.size());
        out.resize(in.size());
        fftw_plan plan = get(n, sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }

private:
    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cd> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

FftPlans& fft_plans() {
    static FftPlans plans;
    return plans;
}

constexpr int kSincHalfWidth = 4;
constexpr double kKaiserBeta = 5.0;

double windowed_sinc(double x) {
    const double r = x / kSincHalfWidth;
    if (std::abs(r) > 1.0) return 0.0;
    const double w = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
                     std::cyl_bessel_i(0.0, kKaiserBeta);
    const double s = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return s * w;
}

cd complex_gaussian(Rng& rng, double variance) {
    if (variance == 0.0) return {0.0, 0.0};
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> golay_pair(std::size_t length) {
    if (length == 0 || (length & (length - 1)) != 0)
        throw std::invalid_argument("golay_pair: length must be a power of two");
    std::vector<double> a{1.0}, b{1.0};
    while (a.size() < length) {
        std::vector<double> na(a), nb(a);
        na.insert(na.end(), b.begin(), b.end());
        for (double v : b) nb.push_back(-v);
        a = std::move(na);
        b = std::move(nb);
    }
    return {a, b};
}

std::size_t subcarrier_count(const CarrierProfile& profile) {
    if (!profile.subcarrier_spacing_hz || !(*profile.subcarrier_spacing_hz > 0.0))
        throw std::invalid_argument("subcarrier_count: profile has no subcarrier spacing");
    return static_cast<std::size_t>(std::round(profile.bandwidth_hz / *profile.subcarrier_spacing_hz));
}

PilotWaveform make_pilot(const CarrierProfile& profile, Rng& rng, std::size_t golay_length) {
    PilotWaveform p;
    p.kind = profile.waveform;
    p.sample_rate = profile.bandwidth_hz;
    if (p.kind == WaveformKind::golay_sc) {
        std::tie(p.golay_a, p.golay_b) = golay_pair(golay_length);
        p.cyclic_prefix = golay_length;
        for (const auto* seq : {&p.golay_a, &p.golay_b})
            for (int rep = 0; rep < 2; ++rep)
                for (double v : *seq) p.samples.emplace_back(v, 0.0);
        return p;
    }

    const std::size_t n = subcarrier_count(profile);
    if (n < 8) throw std::invalid_argument("make_pilot: too few subcarriers");
    p.n_subcarriers = n;
    p.cyclic_prefix = static_cast<std::size_t>(std::round(0.25 * static_cast<double>(n)));
    std::bernoulli_distribution coin(0.5);
    p.pilot_symbols.resize(n);
    std::vector<cd> freq(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.pilot_symbols[i] = coin(rng) ? 1.0 : -1.0;
        freq[i] = p.pilot_symbols[i];
    }
    std::vector<cd> symbol;
    fft_plans().execute(freq, symbol, FFTW_BACKWARD);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : symbol) v *= norm;
    p.samples.assign(symbol.end() - static_cast<std::ptrdiff_t>(p.cyclic_prefix), symbol.end());
    p.samples.insert(p.samples.end(), symbol.begin(), symbol.end());
    return p;
}

std::vector<cd> propagate(const PilotWaveform& pilot, const TapChannel& chan, std::size_t frame,
                          double period_s, double offset_phase_rad, Rng& rng) {
    const auto len = static_cast<std::ptrdiff_t>(pilot.samples.size());
    std::vector<cd> out(pilot.samples.size(), cd{0.0, 0.0});
    const double t = static_cast<double>(frame) * period_s;

    for (const Tap& tap : chan.taps) {
        const double delay = (tap.delay_s + chan.timing_offset_s) * pilot.sample_rate;
        if (delay < 0.0) throw std::out_of_range("propagate: negative delay");
        auto whole = static_cast<std::ptrdiff_t>(std::floor(delay));
        double frac = delay - static_cast<double>(whole);
        if (frac > 1.0 - 1e-9) {
            ++whole;
            frac = 0.0;
        }
        const bool on_grid = frac < 1e-9;
        const auto reach = static_cast<std::size_t>(whole) + (on_grid ? 0 : kSincHalfWidth);
        if (reach > pilot.max_delay_samples() || static_cast<std::size_t>(whole) >= pilot.cir_length())
            throw std::out_of_range("propagate: tap delay of " + std::to_string(delay) +
                                    " samples exceeds the cyclic prefix");

        const cd coeff = tap.gain * std::polar(1.0, kTwoPi * tap.doppler_hz * t + offset_phase_rad);
        if (on_grid) {
            for (std::ptrdiff_t n = whole; n < len; ++n) out[n] += coeff * pilot.samples[n - whole];
            continue;
        }
        std::array<double, 2 * kSincHalfWidth> h{};
        double sum = 0.0;
        for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
            h[j + kSincHalfWidth - 1] = windowed_sinc(j - frac);
            sum += h[j + kSincHalfWidth - 1];
        }
        for (auto& v : h) v /= sum;
        for (std::ptrdiff_t n = 0; n < len; ++n) {
            cd acc{0.0, 0.0};
            for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
                const std::ptrdiff_t m = n - whole - j;
                if (m >= 0 && m < len) acc += h[j + kSincHalfWidth - 1] * pilot.samples[m];
            }
            out[n] += coeff * acc;
        }
    }
    for (auto& v : out) v += complex_gaussian(rng, chan.noise_var);
    return out;
}

std::vector<cd> estimate_cir(const std::vector<cd>& received, const PilotWaveform& pilot) {
    if (received.size() != pilot.samples.size())
        throw std::invalid_argument("estimate_cir: received length does not match the pilot");

    if (pilot.kind == WaveformKind::golay_sc) {
        const std::size_t l = pilot.golay_a.size();
        const cd* ra = received.data() + pilot.cyclic_prefix;
        const cd* rb = received.data() + 2 * pilot.cyclic_prefix + l;
        std::vector<cd> cir(l);
        const double norm = 1.0 / (2.0 * static_cast<double>(l));
        for (std::size_t lag = 0; lag < l; ++lag) {
            cd acc{0.0, 0.0};
            for (std::size_t n = 0; n < l; ++n) {
                const std::size_t idx = (n + l - lag) % l;
                acc += ra[n] * pilot.golay_a[idx] + rb[n] * pilot.golay_b[idx];
            }
            cir[lag] = acc * norm;
        }
        return cir;
    }

    const std::size_t n = pilot.n_subcarriers;
    std::vector<cd> window(received.begin() + static_cast<std::ptrdiff_t>(pilot.cyclic_prefix),
                           received.begin() + static_cast<std::ptrdiff_t>(pilot.cyclic_prefix + n));
    std::vector<cd> spectrum;
    fft_plans().execute(window, spectrum, FFTW_FORWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) spectrum[i] *= scale / pilot.pilot_symbols[i];
    std::vector<cd> cir;
    fft_plans().execute(spectrum, cir, FFTW_BACKWARD);
    for (auto& v : cir) v /= static_cast<double>(n);
    return cir;
}

double cir_noise_power_factor(const PilotWaveform& pilot) {
    return pilot.kind == WaveformKind::golay_sc ? 0.5 : 1.0;
}

bool ExtractedPhases::complete() const {
    return std::none_of(missing.begin(), missing.end(), [](bool m) { return m; });
}

ExtractedPhases extract_path_phases(const std::vector<std::vector<cd>>& cirs,
                                    const std::vector<std::size_t>& expected_bins,
                                    double detection_threshold_db) {
    for (std::size_t i = 0; i < expected_bins.size(); ++i)
        for (std::size_t j = i + 1; j < expected_bins.size(); ++j)
            if (expected_bins[i] == expected_bins[j])
                throw std::invalid_argument("extract_path_phases: two paths share a delay bin");

    ExtractedPhases out;
    out.frames = cirs.size();
    out.paths = expected_bins.size();
    out.phases.resize(out.frames * out.paths);
    out.missing.assign(out.frames * out.paths, false);
    const double threshold = std::pow(10.0, detection_threshold_db / 10.0);

    std::vector<double> power;
    for (std::size_t k = 0; k < cirs.size(); ++k) {
        const auto& cir = cirs[k];
        const std::size_t len = cir.size();
        for (std::size_t b : expected_bins)
            if (b >= len) throw std::invalid_argument("extract_path_phases: bin outside the CIR");

        power.resize(len);
        for (std::size_t l = 0; l < len; ++l) power[l] = std::norm(cir[l]);
        std::vector<double> sorted(power);
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(len / 2), sorted.end());
        const double floor = sorted[len / 2];

        for (std::size_t p = 0; p < expected_bins.size(); ++p) {
            const std::size_t b = expected_bins[p];
            std::size_t pick = b;
            for (std::size_t cand : {(b + len - 1) % len, (b + 1) % len}) {
                const bool taken = std::find(expected_bins.begin(), expected_bins.end(), cand) !=
                                   expected_bins.end();
                if (!taken && power[cand] > power[pick]) pick = cand;
            }
            const std::size_t idx = k * out.paths + p;
            out.phases[idx] = Phase::from_radians(std::arg(cir[pick]));
            out.missing[idx] = !(power[pick] > 0.0) || power[pick] < threshold * floor;
        }
    }
    return out;
}

std::vector<std::size_t> path_delay_bins(const Scenario& scenario, double sample_rate) {
    std::vector<std::size_t> bins(scenario.n_paths());
    for (std::size_t i = 0; i < scenario.n_paths(); ++i) {
        const double samples = excess_path_length(scenario, i) / kSpeedOfLight * sample_rate;
        bins[i] = static_cast<std::size_t>(std::llround(std::max(samples, 0.0)));
    }
    return bins;
}

TapChannel scenario_channel(const Scenario& scenario, const CarrierProfile& profile,
                            const std::vector<cd>& gains, double noise_var) {
    const auto bins = path_delay_bins(scenario, profile.bandwidth_hz);
    TapChannel chan;
    chan.noise_var = noise_var;
    for (std::size_t i = 0; i < scenario.n_paths(); ++i) {
        Tap tap;
        tap.delay_s = static_cast<double>(bins[i]) / profile.bandwidth_hz;
        tap.gain = gains.at(i);
        tap.doppler_hz = path_doppler(scenario, i, profile.wavelength_m);
        chan.taps.push_back(tap);
    }
    std::stable_sort(chan.taps.begin(), chan.taps.end(),
                     [](const Tap& a, const Tap& b) { return a.delay_s < b.delay_s; });
    return chan;
}

PhasePanel synthesize_panel_waveform(const Scenario& scenario, const CarrierProfile& profile,
                                     const NuisanceTrace& nuisance,
                                     const WaveformPanelOptions& opts, Rng& rng) {
    const PilotWaveform pilot = make_pilot(profile, rng, opts.golay_length);
    const auto bins = path_delay_bins(scenario, pilot.sample_rate);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (bins[i] > pilot.max_delay_samples() || bins[i] >= pilot.cir_length())
            throw DelayResolutionError("path delay falls outside the CIR window");
        for (std::size_t j = 0; j < i; ++j)
            if (bins[i] == bins[j]) throw DelayResolutionError("two paths share a delay bin");
    }

    const std::size_t paths = scenario.n_paths();
    std::vector<cd> gains(paths);
    const double los_length = path_length(scenario, kLosPath);
    for (std::size_t i = 0; i < paths; ++i) {
        const double mag = opts.path_loss ? los_length / path_length(scenario, i) : 1.0;
        const double phase = opts.random_path_phases ? uniform(rng, 0.0, kTwoPi) : 0.0;
        gains[i] = std::polar(mag, phase);
    }
    const double noise_var =
        std::isinf(opts.snr_db) && opts.snr_db > 0 ? 0.0 : std::pow(10.0, -opts.snr_db / 10.0);
    const TapChannel chan = scenario_channel(scenario, profile, gains, noise_var);

    std::vector<std::vector<cd>> cirs;
    cirs.reserve(nuisance.frames());
    for (std::size_t k = 0; k < nuisance.frames(); ++k) {
        const auto rx = propagate(pilot, chan, k, nuisance.period_s, nuisance.combined_rad[k], rng);
        cirs.push_back(estimate_cir(rx, pilot));
    }
    const ExtractedPhases ex = extract_path_phases(cirs, bins);
    if (!ex.complete()) throw DelayResolutionError("a path peak fell below the detection threshold");

    PhasePanel panel;
    panel.frames = nuisance.frames();
    panel.paths = paths;
    panel.period_s = nuisance.period_s;
    panel.phases = ex.phases;
    panel.truth = true_theta(scenario);
    panel.path_gains = gains;
    panel.aoa_meas = measure_aoas(scenario, opts.sigma_aoa_rad, rng);
    return panel;
}

}  // namespace bidop
