#include <doctest.h>

#include <cmath>
#include <string>

#include "bidop/phase.hpp"
#include "bidop/profile.hpp"
#include "bidop/scenario.hpp"
#include "oracles.hpp"

using namespace bidop;

namespace {
oracle::P2 p2(Vec2 v) { return {v.x, v.y}; }
}  // namespace

TEST_CASE("profiles carry the published carrier parameters") {
    const auto p60 = profile_60ghz(), p28 = profile_28ghz(), p5 = profile_5ghz();
    CHECK(p60.carrier_hz == 60e9);
    CHECK(p60.bandwidth_hz == 1.76e9);
    CHECK(p60.period_s == doctest::Approx(0.166e-3));
    CHECK(p60.f_max_hz == 1000.0);
    CHECK(p60.v_max_mps == 5.0);
    CHECK(p28.bandwidth_hz == 0.4e9);
    CHECK(*p28.subcarrier_spacing_hz == 120e3);
    CHECK(p28.period_s == doctest::Approx(0.178e-3));
    CHECK(p28.f_max_hz == 930.0);
    CHECK(p5.period_s == doctest::Approx(0.5e-3));
    CHECK(p5.f_max_hz == 300.0);
    CHECK(p5.v_max_mps == 20.0);
    CHECK(p60.wavelength_m == doctest::Approx(299792458.0 / 60e9));
    // T obeys the aliasing bound T < 1/(6 f_max) for every profile
    for (const auto& p : {p60, p28, p5}) CHECK(p.period_s <= 1.0 / (6.0 * p.f_max_hz) + 1e-12);
}

TEST_CASE("profile lookup is case-insensitive and rejects unknown names") {
    CHECK(profile_by_name("28GHz").name == "28ghz");
    CHECK_THROWS_AS(profile_by_name("77ghz"), std::invalid_argument);
    auto bad = profile_5ghz();
    bad.period_s = -1;
    CHECK_THROWS_AS(validate_profile(bad), std::invalid_argument);
}

TEST_CASE("sampled scenarios respect the box, ranges and margins") {
    Rng rng(3);
    for (const auto& name : builtin_profile_names()) {
        const auto prof = profile_by_name(name);
        for (int t = 0; t < 300; ++t) {
            const Scenario s = sample_scenario(prof, 2 + t % 5, rng);
            const double side = prof.area_side_m;
            for (Vec2 p : {s.rx, s.target}) {
                CHECK(p.x >= 0.0);
                CHECK(p.y >= 0.0);
                CHECK(p.x <= side);
                CHECK(p.y <= side);
            }
            CHECK(s.v_rx >= prof.v_min_mps);
            CHECK(s.v_rx <= prof.v_max_mps);
            CHECK(std::abs(s.f_d_target) >= prof.f_min_hz);
            CHECK(std::abs(s.f_d_target) <= prof.f_max_hz);
            CHECK(s.eta >= 0.0);
            CHECK(s.eta < kTwoPi);
            CHECK(std::string(degeneracy_reason(s, 2.0 * std::numbers::pi / 180)).empty());
        }
    }
}

TEST_CASE("sample_scenario needs two static scatterers") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_scenario(profile_60ghz(), 1, rng), std::invalid_argument);
}

TEST_CASE("AoAs and Dopplers agree with raw geometry") {
    Rng rng(5);
    const auto prof = profile_28ghz();
    for (int t = 0; t < 200; ++t) {
        const Scenario s = sample_scenario(prof, 3, rng);
        CHECK(s.aoa_target == doctest::Approx(oracle::aoa(p2(s.tx), p2(s.rx), p2(s.target))).epsilon(1e-12));
        for (std::size_t i = 0; i < s.n_static(); ++i)
            CHECK(s.aoa_static[i] ==
                  doctest::Approx(oracle::aoa(p2(s.tx), p2(s.rx), p2(s.statics[i]))).epsilon(1e-12));

        const auto vd = oracle::velocity_dir(p2(s.tx), p2(s.rx), s.eta);
        const double lam = prof.wavelength_m;
        CHECK(path_doppler(s, kLosPath, lam) ==
              doctest::Approx(oracle::motion_doppler(p2(s.tx), p2(s.rx), vd, s.v_rx, lam)));
        CHECK(path_doppler(s, kTargetPath, lam) ==
              doctest::Approx(s.f_d_target + oracle::motion_doppler(p2(s.target), p2(s.rx), vd, s.v_rx, lam)));
        // LoS Doppler is v/lambda cos(eta) by construction of eta
        CHECK(path_doppler(s, kLosPath, lam) == doctest::Approx(s.v_rx / lam * std::cos(s.eta)));
        // cos xi = cos(alpha - eta)
        const auto ang = bistatic_angles(s);
        CHECK(std::cos(ang[kTargetPath].xi) == doctest::Approx(std::cos(s.aoa_target - s.eta)));
    }
}

TEST_CASE("path lengths are bistatic ranges") {
    Scenario s;
    s.rx = {3, 4};
    s.target = {3, 0};
    s.statics = {{0, 4}, {1, 1}};
    update_aoas(s);
    CHECK(path_length(s, kLosPath) == doctest::Approx(5.0));
    CHECK(path_length(s, kTargetPath) == doctest::Approx(7.0));
    CHECK(excess_path_length(s, kTargetPath) == doctest::Approx(2.0));
    CHECK(s.aoa_target == doctest::Approx(oracle::aoa({0, 0}, {3, 4}, {3, 0})));
}
