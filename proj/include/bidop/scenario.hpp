#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bidop/profile.hpp"
#include "bidop/random.hpp"

namespace bidop {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/**
 * @brief Ground-truth bistatic geometry for one processing window.
 *
 * The TX sits at the origin and every position lies in the
 * [0, area_side] x [0, area_side] box. AoAs are measured counter-clockwise at
 * the RX from the RX->TX direction, in [0, 2pi). The heading eta is the
 * direction of the RX velocity measured from the TX->RX direction.
 */
struct Scenario {
    Vec2 tx;
    Vec2 rx;
    Vec2 target;
    std::vector<Vec2> statics;
    double v_rx = 0.0;        // m/s
    double eta = 0.0;         // rad, [0, 2pi)
    double f_d_target = 0.0;  // Hz
    double aoa_los = 0.0;     // always 0
    double aoa_target = 0.0;
    std::vector<double> aoa_static;

    std::size_t n_static() const { return statics.size(); }
    /// Path count including LoS and target.
    std::size_t n_paths() const { return statics.size() + 2; }
};

/// Path ordering used throughout: 0 = LoS, 1 = target, 2.. = static scatterers.
inline constexpr std::size_t kLosPath = 0;
inline constexpr std::size_t kTargetPath = 1;
inline constexpr std::size_t kFirstStaticPath = 2;

struct SamplingOptions {
    double angle_margin_rad = 2.0 * 3.14159265358979323846 / 180.0;
    int max_draws = 1000;
    double min_separation_m = 1.0;  // from TX and RX, for every point
};

class ScenarioInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Draws a random geometry respecting the closed-form conditions
/// (alpha != 0, distinct AoAs, alpha != 2 eta) with an angular margin.
/// Throws ScenarioInfeasible when no draw succeeds within the budget.
Scenario sample_scenario(const CarrierProfile& profile, std::size_t n_static, Rng& rng,
                         const SamplingOptions& opts = {});

/// Rebuilds the AoAs of an existing scenario from its coordinates.
void update_aoas(Scenario& s);

/// Reports which closed-form condition a scenario violates; empty when none.
const char* degeneracy_reason(const Scenario& s, double angle_margin_rad);

struct PathAngles {
    double aoa = 0.0;  // alpha_i
    double xi = 0.0;   // angle between the path elongation and the velocity, [0, pi]
};

/// Per-path (alpha, xi) computed from coordinates, LoS first.
std::vector<PathAngles> bistatic_angles(const Scenario& s);

/// RX-motion Doppler of path i (Hz), from the geometric xi.
double rx_doppler(const Scenario& s, std::size_t path, double wavelength_m);

/// Total Doppler observed on path i: RX motion plus the target's own shift.
double path_doppler(const Scenario& s, std::size_t path, double wavelength_m);

/// Excess propagation length of path i over the LoS (m); zero for the LoS.
double excess_path_length(const Scenario& s, std::size_t path);

/// Total propagation length of path i (m).
double path_length(const Scenario& s, std::size_t path);

}  // namespace bidop
