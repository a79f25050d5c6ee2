#include <doctest.h>

#include <cmath>
#include <limits>

#include "bidop/phase_model.hpp"
#include "oracles.hpp"

using namespace bidop;

TEST_CASE("phase noise std follows 1/sqrt(2 SNR)") {
    CHECK(phase_noise_std(0.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(phase_noise_std(10.0) == doctest::Approx(1.0 / std::sqrt(20.0)));
    CHECK(phase_noise_std(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("frames_for_window rounds KT / T") {
    CHECK(frames_for_window(16e-3, 0.166e-3) == 96);
    CHECK(frames_for_window(16e-3, 0.178e-3) == 90);
    CHECK(frames_for_window(16e-3, 0.5e-3) == 32);
    CHECK_THROWS_AS(frames_for_window(0.1e-3, 0.5e-3), std::invalid_argument);
}

TEST_CASE("nuisance trace combines PO and accumulated CFO") {
    Rng rng(2);
    const auto n = synthesize_nuisance(profile_28ghz(), 50, 0.7, rng);
    REQUIRE(n.frames() == 50);
    for (std::size_t k = 0; k < 50; ++k)
        CHECK(n.combined_rad[k] == doctest::Approx(n.po_rad[k] + oracle::two_pi() * n.cfo_hz[k] * k * n.period_s));
    const auto z = zero_nuisance(1e-3, 5);
    for (double c : z.combined_rad) CHECK(c == 0.0);
    CHECK_THROWS_AS(zero_nuisance(1e-3, 1).frames(), std::invalid_argument);
}

TEST_CASE("noiseless panel phases match the geometric phase model") {
    Rng rng(9);
    const auto prof = profile_5ghz();
    for (int t = 0; t < 50; ++t) {
        const Scenario s = sample_scenario(prof, 3, rng);
        const auto nuis = synthesize_nuisance(prof, 20, 1.0, rng);
        PanelOptions o;
        o.snr_db = std::numeric_limits<double>::infinity();
        const PhasePanel p = synthesize_panel(s, prof, nuis, o, rng);
        CHECK(p.truth.f_d_target == s.f_d_target);
        const auto vd = oracle::velocity_dir({s.tx.x, s.tx.y}, {s.rx.x, s.rx.y}, s.eta);
        std::vector<oracle::P2> pts{{s.tx.x, s.tx.y}, {s.target.x, s.target.y}};
        for (auto q : s.statics) pts.push_back({q.x, q.y});
        for (std::size_t i = 0; i < p.paths; ++i) {
            double f = oracle::motion_doppler(pts[i], {s.rx.x, s.rx.y}, vd, s.v_rx, prof.wavelength_m);
            if (i == 1) f += s.f_d_target;
            const double a0 = std::arg(p.path_gains[i]);
            for (std::size_t k = 0; k < p.frames; ++k) {
                const double expect = nuis.combined_rad[k] + a0 + oracle::two_pi() * k * p.period_s * f;
                CHECK(std::abs(std::remainder(p.at(k, i).radians() - expect, oracle::two_pi())) < 1e-9);
            }
        }
        CHECK(p.aoa_meas[0] == 0.0);
        CHECK(p.aoa_meas[1] == s.aoa_target);
    }
}

TEST_CASE("empirical phase noise matches sigma_w") {
    Rng rng(4);
    const auto prof = profile_60ghz();
    Scenario s = sample_scenario(prof, 2, rng);
    s.v_rx = 0.0;
    s.f_d_target = 0.0;
    PanelOptions o;
    o.snr_db = 10.0;
    o.random_path_phases = false;
    const PhasePanel p = synthesize_panel(s, prof, zero_nuisance(prof.period_s, 20000), o, rng);
    double ss = 0.0;
    for (std::size_t k = 0; k < p.frames; ++k) ss += std::pow(p.at(k, 2).signed_radians(), 2);
    CHECK(std::sqrt(ss / p.frames) == doctest::Approx(phase_noise_std(10.0)).epsilon(0.03));
}

TEST_CASE("AoA noise has the requested spread") {
    Rng rng(8);
    const Scenario s = sample_scenario(profile_60ghz(), 2, rng);
    double ss = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ss += std::pow(measure_aoas(s, 0.05, rng)[1] - s.aoa_target, 2);
    CHECK(std::sqrt(ss / n) == doctest::Approx(0.05).epsilon(0.03));
}
