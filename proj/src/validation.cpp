#include "bidop/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bidop/estimator.hpp"
#include "bidop/phase_model.hpp"
#include "bidop/profile.hpp"
#include "bidop/random.hpp"
#include "bidop/scenario.hpp"
#include "bidop/waveform.hpp"

namespace bidop {

namespace {

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double truth, double est) { return std::abs(truth - est) / std::max(std::abs(truth), 1e-300); }

CheckResult check_cancellation(Rng& rng, std::size_t n) {
    double worst_mismatch = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& prof = profile_by_name(builtin_profile_names()[t % 3]);
        const std::size_t frames = frames_for_window(16e-3, prof.period_s);
        const Scenario s = sample_scenario(prof, 2 + t % 3, rng);
        PanelOptions opts;
        opts.snr_db = INFINITY;
        const std::uint64_t panel_seed = rng();
        Rng r1(panel_seed), r2(panel_seed);
        const auto a = synthesize_panel(s, prof, zero_nuisance(prof.period_s, frames), opts, r1);
        const auto b = synthesize_panel(
            s, prof, synthesize_nuisance(prof.period_s, 10 * prof.sigma_cfo_hz, frames, kTwoPi, rng), opts, r2);
        const auto ea = estimate(a, prof);
        const auto eb = estimate(b, prof);
        if (!(ea.theta.f_d_target == eb.theta.f_d_target && ea.theta.eta == eb.theta.eta &&
              ea.theta.v_rx == eb.theta.v_rx))
            worst_mismatch = std::max(worst_mismatch, std::abs(ea.theta.f_d_target - eb.theta.f_d_target) + 1e-300);
    }
    return {"nuisance cancellation is exact", worst_mismatch == 0.0,
            fmt("max |delta f| across nuisance draws = %g Hz", worst_mismatch)};
}

CheckResult check_closed_form(Rng& rng, std::size_t n) {
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& prof = profile_by_name(builtin_profile_names()[t % 3]);
        const Scenario s = sample_scenario(prof, 2, rng);
        const Theta truth = true_theta(s);
        const std::vector<double> aoas{s.aoa_target, s.aoa_static[0], s.aoa_static[1]};
        DiffSeries d;
        d.rows = 1;
        d.cols = 3;
        d.period_s = prof.period_s;
        d.delta_bar = g_model(truth, aoas, prof.wavelength_m, prof.period_s);
        d.delta = d.delta_bar;
        d.aoas = aoas;
        const auto cf = closed_form(d, prof.wavelength_m);
        worst = std::max({worst, rel(truth.f_d_target, cf.theta.f_d_target), rel(truth.v_rx, cf.theta.v_rx),
                          angular_distance(truth.eta, cf.theta.eta)});
    }
    return {"closed form inverts the forward model", worst < 1e-9, fmt("max relative error %.3g", worst)};
}

CheckResult check_jacobian(Rng& rng, std::size_t n) {
    double worst = 0.0;
    const auto prof = profile_60ghz();
    for (std::size_t t = 0; t < n; ++t) {
        const Scenario s = sample_scenario(prof, 3, rng);
        const std::vector<double> aoas{s.aoa_target, s.aoa_static[0], s.aoa_static[1], s.aoa_static[2]};
        const Theta th = true_theta(s);
        const auto J = g_jacobian(th, aoas, prof.wavelength_m, prof.period_s);
        const double steps[3] = {1e-3 * std::abs(th.f_d_target), 1e-6, 1e-6 * th.v_rx};
        double scale = 0.0;
        for (double x : J) scale = std::max(scale, std::abs(x));
        for (int c = 0; c < 3; ++c) {
            Theta hi = th, lo = th;
            double* ph = c == 0 ? &hi.f_d_target : c == 1 ? &hi.eta : &hi.v_rx;
            double* pl = c == 0 ? &lo.f_d_target : c == 1 ? &lo.eta : &lo.v_rx;
            *ph += steps[c];
            *pl -= steps[c];
            const auto gh = g_model(hi, aoas, prof.wavelength_m, prof.period_s);
            const auto gl = g_model(lo, aoas, prof.wavelength_m, prof.period_s);
            double col = 0.0;
            for (std::size_t r = 0; r < aoas.size(); ++r) col = std::max(col, std::abs(J[r * 3 + c]));
            for (std::size_t r = 0; r < aoas.size(); ++r) {
                const double fd = (gh[r] - gl[r]) / (2 * steps[c]);
                worst = std::max(worst, std::abs(fd - J[r * 3 + c]) / std::max(col, 1e-300));
            }
        }
    }
    return {"analytic jacobian matches finite differences", worst < 1e-6, fmt("max relative error %.3g", worst)};
}

CheckResult check_golay() {
    bool ok = true;
    for (std::size_t len : {2u, 8u, 64u, 128u}) {
        const auto [a, b] = golay_pair(len);
        for (std::size_t lag = 0; lag < len; ++lag) {
            double s = 0.0;
            for (std::size_t i = 0; i + lag < len; ++i) s += a[i] * a[i + lag] + b[i] * b[i + lag];
            if (s != (lag == 0 ? 2.0 * static_cast<double>(len) : 0.0)) ok = false;
        }
    }
    return {"golay pairs are complementary", ok, ok ? "sidelobes exactly zero" : "nonzero sidelobe"};
}

CheckResult check_cir(Rng& rng) {
    double worst = 0.0;
    for (const auto& name : builtin_profile_names()) {
        const auto prof = profile_by_name(name);
        const auto pilot = make_pilot(prof, rng);
        TapChannel ch;
        const double fs = pilot.sample_rate;
        ch.taps = {{0.0, {1.0, 0.0}, 0.0}, {5.0 / fs, std::polar(0.5, 1.0), 0.0}, {17.0 / fs, std::polar(0.25, -2.0), 0.0}};
        const auto rx = propagate(pilot, ch, 0, prof.period_s, 0.0, rng);
        const auto cir = estimate_cir(rx, pilot);
        for (const auto& tap : ch.taps) {
            const auto bin = static_cast<std::size_t>(std::llround(tap.delay_s * fs));
            worst = std::max(worst, std::abs(cir[bin] - tap.gain) / std::abs(tap.gain));
        }
    }
    return {"noiseless CIR recovers on-grid taps", worst < 1e-6, fmt("max relative tap error %.3g", worst)};
}

CheckResult check_wrap() {
    bool ok = true;
    for (double x : {-10.0, -kTwoPi, -3.14159265, 0.0, 1.0, kTwoPi, 9.0, 100.0}) {
        const double w = wrap_pi(x);
        const double z = wrap_2pi(x);
        if (!(w > -std::numbers::pi && w <= std::numbers::pi)) ok = false;
        if (!(z >= 0.0 && z < kTwoPi)) ok = false;
        if (std::abs(std::remainder(w - x, kTwoPi)) > 1e-12) ok = false;
    }
    const Phase p = Phase::from_radians(1.25);
    if (!((p - p).turns() == 0 && (p + Phase::from_radians(0.0)) == p)) ok = false;
    return {"angle wrapping stays in range", ok, ok ? "" : "wrap out of range"};
}

}  // namespace

std::vector<CheckResult> run_validation(std::uint64_t seed, std::size_t n_random) {
    Rng rng(seed);
    std::vector<CheckResult> out;
    auto guarded = [&](auto&& fn, const char* name) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded([&] { return check_wrap(); }, "angle wrapping");
    guarded([&] { return check_closed_form(rng, n_random); }, "closed form");
    guarded([&] { return check_jacobian(rng, n_random / 2); }, "jacobian");
    guarded([&] { return check_cancellation(rng, n_random / 4); }, "cancellation");
    guarded([&] { return check_golay(); }, "golay");
    guarded([&] { return check_cir(rng); }, "cir");
    return out;
}

}  // namespace bidop
