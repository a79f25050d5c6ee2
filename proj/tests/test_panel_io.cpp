#include <doctest.h>

#include <limits>
#include <sstream>

#include "bidop/panel_io.hpp"

using namespace bidop;

namespace {
PhasePanel sample_panel() {
    Rng rng(31);
    const auto prof = profile_28ghz();
    const auto s = sample_scenario(prof, 3, rng);
    return synthesize_panel(s, prof, 6, 5.0, 0.05, rng);
}
}  // namespace

TEST_CASE("panel CSV round-trips exactly") {
    const PhasePanel p = sample_panel();
    std::stringstream ss;
    write_panel_csv(ss, p, "28ghz");
    const PanelFile f = read_panel_csv(ss);
    CHECK(f.profile == "28ghz");
    CHECK(f.has_truth);
    CHECK(f.panel.frames == p.frames);
    CHECK(f.panel.paths == p.paths);
    CHECK(f.panel.period_s == p.period_s);
    CHECK(f.panel.truth.f_d_target == p.truth.f_d_target);
    CHECK(f.panel.truth.eta == p.truth.eta);
    for (std::size_t i = 1; i < p.paths; ++i) CHECK(f.panel.aoa_meas[i] == p.aoa_meas[i]);
    for (std::size_t k = 0; k < p.frames; ++k)
        for (std::size_t i = 0; i < p.paths; ++i)
            CHECK(std::abs((f.panel.at(k, i) - p.at(k, i)).signed_radians()) < 4e-15);
}

TEST_CASE("malformed panels are rejected") {
    auto bad = [](const std::string& text) {
        std::istringstream is(text);
        CHECK_THROWS_AS(read_panel_csv(is), PanelFormatError);
    };
    const std::string meta = "# period_s=0.001\n";
    bad(meta + "k,path,phase,aoa\n0,0,0,0\n");
    bad(meta + "k,path_id,phase,aoa\n");
    bad("k,path_id,phase,aoa\n0,0,0,0\n0,1,0,1\n1,0,0,0\n1,1,0,1\n");           // no period
    bad(meta + "k,path_id,phase,aoa\n0,0,0,0\n0,1,0,1\n1,0,0,0\n");              // missing entry
    bad(meta + "k,path_id,phase,aoa\n0,0,0,0\n0,0,0,0\n0,1,0,1\n1,0,0,0\n1,1,0,1\n");  // duplicate
    bad(meta + "k,path_id,phase,aoa\n0,0,7,0\n0,1,0,1\n1,0,0,0\n1,1,0,1\n");     // phase out of range
    bad(meta + "k,path_id,phase,aoa\n0,0,x,0\n0,1,0,1\n1,0,0,0\n1,1,0,1\n");
    bad(meta + "k,path_id,phase,aoa\n0,0,0\n");
}

TEST_CASE("panels without truth metadata still load") {
    std::istringstream is("# period_s=0.001\nk,path_id,phase,aoa\n0,0,0,0\n0,1,1,1\n1,0,0,0\n1,1,1.5,1\n");
    const auto f = read_panel_csv(is);
    CHECK(!f.has_truth);
    CHECK(!f.profile);
    CHECK(f.panel.frames == 2);
    CHECK(f.panel.aoa_meas[1] == 1.0);
}
