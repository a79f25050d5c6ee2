#include "bidop/scenario.hpp"

#include <cmath>

#include "bidop/phase.hpp"

namespace bidop {

namespace {

Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double heading(Vec2 a) { return std::atan2(a.y, a.x); }

Vec2 path_point(const Scenario& s, std::size_t path) {
    if (path == kLosPath) return s.tx;
    if (path == kTargetPath) return s.target;
    return s.statics.at(path - kFirstStaticPath);
}

Vec2 uniform_point(Rng& rng, double side) { return {uniform(rng, 0.0, side), uniform(rng, 0.0, side)}; }

double aoa_of(const Scenario& s, Vec2 p) {
    return wrap_2pi(heading(p - s.rx) - heading(s.tx - s.rx));
}

}  // namespace

void update_aoas(Scenario& s) {
    s.aoa_los = 0.0;
    s.aoa_target = aoa_of(s, s.target);
    s.aoa_static.resize(s.statics.size());
    for (std::size_t i = 0; i < s.statics.size(); ++i) s.aoa_static[i] = aoa_of(s, s.statics[i]);
}

const char* degeneracy_reason(const Scenario& s, double margin) {
    std::vector<double> aoas;
    aoas.push_back(s.aoa_target);
    aoas.insert(aoas.end(), s.aoa_static.begin(), s.aoa_static.end());
    for (double a : aoas) {
        if (angular_distance(a, 0.0) < margin) return "AoA too close to the LoS direction";
        if (angular_distance(a, 2.0 * s.eta) < margin) return "AoA too close to twice the heading";
    }
    for (std::size_t i = 0; i < aoas.size(); ++i)
        for (std::size_t j = i + 1; j < aoas.size(); ++j)
            if (angular_distance(aoas[i], aoas[j]) < margin) return "two paths share an AoA";
    return "";
}

Scenario sample_scenario(const CarrierProfile& profile, std::size_t n_static, Rng& rng,
                         const SamplingOptions& opts) {
    if (n_static < 2)
        throw std::invalid_argument("sample_scenario: at least two static scatterers are required");
    validate_profile(profile);
    const double side = profile.area_side_m;

    for (int draw = 0; draw < opts.max_draws; ++draw) {
        Scenario s;
        s.tx = {0.0, 0.0};
        s.rx = uniform_point(rng, side);
        s.target = uniform_point(rng, side);
        s.statics.resize(n_static);
        for (auto& p : s.statics) p = uniform_point(rng, side);
        s.v_rx = uniform(rng, profile.v_min_mps, profile.v_max_mps);
        s.eta = uniform(rng, 0.0, kTwoPi);
        const double sign = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -1.0 : 1.0;
        s.f_d_target = sign * uniform(rng, profile.f_min_hz, profile.f_max_hz);

        if (norm(s.rx - s.tx) < opts.min_separation_m) continue;
        bool too_close = false;
        for (std::size_t i = kTargetPath; i < s.n_paths(); ++i) {
            Vec2 p = path_point(s, i);
            if (norm(p - s.rx) < opts.min_separation_m || norm(p - s.tx) < opts.min_separation_m)
                too_close = true;
        }
        if (too_close) continue;

        update_aoas(s);
        if (*degeneracy_reason(s, opts.angle_margin_rad) != '\0') continue;
        return s;
    }
    throw ScenarioInfeasible("sample_scenario: no admissible geometry after " +
                             std::to_string(opts.max_draws) + " draws");
}

std::vector<PathAngles> bistatic_angles(const Scenario& s) {
    const double los_heading = heading(s.rx - s.tx);
    const Vec2 velocity{std::cos(los_heading + s.eta), std::sin(los_heading + s.eta)};
    std::vector<PathAngles> out(s.n_paths());
    for (std::size_t i = 0; i < s.n_paths(); ++i) {
        const Vec2 p = path_point(s, i);
        const Vec2 elong = s.rx - p;
        const double cross = elong.x * velocity.y - elong.y * velocity.x;
        const double dot = elong.x * velocity.x + elong.y * velocity.y;
        out[i].aoa = i == kLosPath ? 0.0 : aoa_of(s, p);
        out[i].xi = std::atan2(std::abs(cross), dot);
    }
    return out;
}

double rx_doppler(const Scenario& s, std::size_t path, double wavelength_m) {
    if (s.v_rx == 0.0) return 0.0;
    return s.v_rx * std::cos(bistatic_angles(s).at(path).xi) / wavelength_m;
}

double path_doppler(const Scenario& s, std::size_t path, double wavelength_m) {
    double f = rx_doppler(s, path, wavelength_m);
    if (path == kTargetPath) f += s.f_d_target;
    return f;
}

double path_length(const Scenario& s, std::size_t path) {
    if (path == kLosPath) return norm(s.rx - s.tx);
    const Vec2 p = path_point(s, path);
    return norm(p - s.tx) + norm(s.rx - p);
}

double excess_path_length(const Scenario& s, std::size_t path) {
    return path_length(s, path) - path_length(s, kLosPath);
}

}  // namespace bidop
