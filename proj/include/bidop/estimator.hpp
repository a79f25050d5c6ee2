#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bidop/phase.hpp"
#include "bidop/phase_model.hpp"
#include "bidop/profile.hpp"

namespace bidop {

/// LoS-referenced phases, K x (S + 1), columns [target, static_1 .. static_S].
struct CancelledPhases {
    std::size_t frames = 0;
    std::size_t paths = 0;
    std::vector<Phase> values;

    Phase at(std::size_t k, std::size_t col) const { return values[k * paths + col]; }
};

/// First-order phase differences and their time average.
struct DiffSeries {
    std::size_t rows = 0;  // K - 1
    std::size_t cols = 0;  // S + 1
    double period_s = 0.0;
    std::vector<double> delta;      // rows x cols, each entry in (-pi, pi]
    std::vector<double> delta_bar;  // cols
    std::vector<double> aoas;       // measured AoA per column

    double at(std::size_t k, std::size_t col) const { return delta[k * cols + col]; }
    std::size_t n_static() const { return cols - 1; }
};

/// Which closed-form heading candidate was kept: the atan output, or atan output + pi.
enum class Branch { principal, shifted, none };

const char* to_string(Branch b);

struct ThetaEstimate {
    Theta theta;
    double residual_norm = 0.0;
    int n_iterations = 0;
    Theta init;
    Branch branch = Branch::none;
    bool converged = false;
    std::pair<std::size_t, std::size_t> static_pair{0, 0};  // 0-based static indices
};

class EstimationError : public std::runtime_error {
public:
    enum class Kind { degenerate_pair, branch_inconsistency, non_finite, infeasible };

    EstimationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr double kDenominatorEpsilon = 1e-9;

/// Subtracts the LoS phase from every other path, frame by frame.
CancelledPhases cancel_offsets(const PhasePanel& panel);

/// Wrapped frame-to-frame differences re-mapped to (-pi, pi], then averaged over time.
/// `aoas` holds the measured AoA of each cancelled column.
DiffSeries difference_and_average(const CancelledPhases& cancelled, double period_s,
                                  std::span<const double> aoas);

/// Convenience: cancel and difference a panel in one go.
DiffSeries preprocess(const PhasePanel& panel);

/// Predicted averaged differences for theta (length S + 1).
std::vector<double> g_model(const Theta& theta, std::span<const double> aoas, double wavelength_m,
                            double period_s);

/// Analytic Jacobian of g_model, (S + 1) x 3 row-major, columns (f, eta, v).
std::vector<double> g_jacobian(const Theta& theta, std::span<const double> aoas,
                               double wavelength_m, double period_s);

/// ||delta_bar - g(theta)||_2.
double residual_norm(const DiffSeries& diff, const Theta& theta, double wavelength_m);

struct ClosedFormCandidate {
    Branch branch = Branch::principal;
    Theta theta;              // v may come out negative on the wrong branch
    double residual = 0.0;    // evaluated at theta with v clipped to >= 0
    bool feasible = false;    // v >= 0
};

/// Both heading branches for the static pair (first, second).
/// Throws EstimationError::degenerate_pair when a denominator falls below epsilon.
std::array<ClosedFormCandidate, 2> closed_form_candidates(const DiffSeries& diff,
                                                          double wavelength_m, std::size_t first,
                                                          std::size_t second);

/// Three-path closed-form inversion using the target and static paths (first, second).
/// Keeps the branch with v >= 0 and the smaller residual over all S + 1 equations.
ThetaEstimate closed_form(const DiffSeries& diff, double wavelength_m, std::size_t first = 0,
                          std::size_t second = 1);

struct NlsOptions {
    int max_iterations = 200;
    double initial_damping = 1e-3;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-12;  // relative to the parameter norm
};

/// Levenberg-Marquardt refinement of ||delta_bar - g(theta)||^2 starting at init.theta.
/// The result never has a larger residual than the initial point; on non-convergence
/// the best iterate is returned with converged = false.
ThetaEstimate nls_refine(const DiffSeries& diff, double wavelength_m, const ThetaEstimate& init,
                         const NlsOptions& opts = {});

struct EstimateOptions {
    bool static_rx = false;         // RX known to be still: use the direct target-path estimate
    std::size_t max_pairs = 20;     // cap on static pairs tried by the closed form
    std::uint64_t pair_seed = 0x5eed;
    NlsOptions nls;
};

/// Best closed-form initialization over the static pairs (lowest full residual).
/// Throws EstimationError::infeasible when every pair is degenerate.
ThetaEstimate initialize(const DiffSeries& diff, double wavelength_m,
                         const EstimateOptions& opts = {});

/// Full pipeline: cancel, difference, average, closed form over pairs, NLS.
ThetaEstimate estimate(const PhasePanel& panel, const CarrierProfile& profile,
                       const EstimateOptions& opts = {});

ThetaEstimate estimate(const DiffSeries& diff, double wavelength_m,
                       const EstimateOptions& opts = {});

/// Static-RX reference: f = delta_bar_target / (2 pi T).
double static_baseline(const PhasePanel& panel);

}  // namespace bidop
