#include <doctest.h>

#include <numbers>
#include <sstream>

#include "bidop/sweep_config.hpp"

using namespace bidop;

namespace {
SweepConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_sweep_config(is);
}
}  // namespace

TEST_CASE("defaults follow the figure captions") {
    const auto c = parse("[sweep]\nvalues = 2\n");
    CHECK(c.fixed.snr_db == 5.0);
    CHECK(c.fixed.sigma_aoa_deg == 5.0);
    CHECK(c.fixed.window_ms == 16.0);
    CHECK(c.fixed.n_static == 2);
    CHECK(c.n_trials == 2000);
    CHECK(c.profiles.size() == 3);
}

TEST_CASE("full config parses") {
    const auto c = parse(
        "[sweep]\nprofiles = 5GHz, 60ghz\naxis = snr_db\nvalues = 0, 5,10\ntrials = 30\nseed = 0x2a\n"
        "route = waveform\nstatic_rx = yes\ntiming = true\n\n[fixed]\nn_static = 4\nwindow_ms = 32\n"
        "sigma_aoa_deg = 1\nsigma_po_deg = 90\n");
    CHECK(c.profiles == std::vector<std::string>{"5ghz", "60ghz"});
    CHECK(c.axis == SweepAxis::snr_db);
    CHECK(c.axis_values == std::vector<double>{0, 5, 10});
    CHECK(c.n_trials == 30);
    CHECK(c.base_seed == 42);
    CHECK(c.route == SynthesisRoute::waveform);
    CHECK(c.static_rx);
    CHECK(c.record_timing);
    CHECK(c.fixed.n_static == 4);
    CHECK(c.fixed.window_ms == 32.0);
    CHECK(c.fixed.sigma_po_rad == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("config errors are reported") {
    CHECK_THROWS_AS(parse("[sweep]\nprofile = 5ghz\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nprofiles = 77ghz\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\naxis = foo\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\ntrials = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nvalues = 2, x\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\naxis = n_static\nvalues = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[other]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep\n"), ConfigError);
    CHECK_THROWS_AS(load_sweep_config("/nonexistent/x.ini"), ConfigError);
}
