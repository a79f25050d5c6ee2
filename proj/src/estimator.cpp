#include "bidop/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bidop/random.hpp"

namespace bidop {

const char* to_string(Branch b) {
    switch (b) {
        case Branch::principal: return "principal";
        case Branch::shifted: return "shifted";
        case Branch::none: return "none";
    }
    return "none";
}

CancelledPhases cancel_offsets(const PhasePanel& panel) {
    if (panel.paths < 2) throw std::invalid_argument("cancel_offsets: panel has no LoS/target pair");
    CancelledPhases out;
    out.frames = panel.frames;
    out.paths = panel.paths - 1;
    out.values.resize(out.frames * out.paths);
    for (std::size_t k = 0; k < panel.frames; ++k) {
        const Phase los = panel.at(k, kLosPath);
        for (std::size_t i = 1; i < panel.paths; ++i) out.values[k * out.paths + (i - 1)] = panel.at(k, i) - los;
    }
    return out;
}

DiffSeries difference_and_average(const CancelledPhases& cancelled, double period_s,
                                  std::span<const double> aoas) {
    if (cancelled.frames < 2) throw std::invalid_argument("difference_and_average: need K >= 2");
    if (aoas.size() != cancelled.paths)
        throw std::invalid_argument("difference_and_average: one AoA per column required");
    DiffSeries d;
    d.rows = cancelled.frames - 1;
    d.cols = cancelled.paths;
    d.period_s = period_s;
    d.aoas.assign(aoas.begin(), aoas.end());
    d.delta.resize(d.rows * d.cols);
    d.delta_bar.assign(d.cols, 0.0);
    for (std::size_t k = 0; k < d.rows; ++k) {
        for (std::size_t c = 0; c < d.cols; ++c) {
            // modular subtraction lands the raw (-2pi, 2pi) difference in (-pi, pi]
            const double v = (cancelled.at(k + 1, c) - cancelled.at(k, c)).signed_radians();
            d.delta[k * d.cols + c] = v;
            d.delta_bar[c] += v;
        }
    }
    for (double& m : d.delta_bar) m /= static_cast<double>(d.rows);
    return d;
}

DiffSeries preprocess(const PhasePanel& panel) {
    const CancelledPhases c = cancel_offsets(panel);
    return difference_and_average(c, panel.period_s,
                                  std::span<const double>(panel.aoa_meas).subspan(1));
}

std::vector<double> g_model(const Theta& theta, std::span<const double> aoas, double wavelength_m,
                            double period_s) {
    const double scale = kTwoPi * period_s;
    const double rx = theta.v_rx / wavelength_m;
    const double cos_eta = std::cos(theta.eta);
    std::vector<double> out(aoas.size());
    for (std::size_t c = 0; c < aoas.size(); ++c)
        out[c] = scale * rx * (std::cos(aoas[c] - theta.eta) - cos_eta);
    if (!out.empty()) out[0] += scale * theta.f_d_target;
    return out;
}

std::vector<double> g_jacobian(const Theta& theta, std::span<const double> aoas,
                               double wavelength_m, double period_s) {
    const double scale = kTwoPi * period_s;
    const double sin_eta = std::sin(theta.eta);
    const double cos_eta = std::cos(theta.eta);
    std::vector<double> jac(aoas.size() * 3, 0.0);
    for (std::size_t c = 0; c < aoas.size(); ++c) {
        const double d = aoas[c] - theta.eta;
        jac[c * 3 + 0] = c == 0 ? scale : 0.0;
        jac[c * 3 + 1] = scale * theta.v_rx / wavelength_m * (std::sin(d) + sin_eta);
        jac[c * 3 + 2] = scale / wavelength_m * (std::cos(d) - cos_eta);
    }
    return jac;
}

double residual_norm(const DiffSeries& diff, const Theta& theta, double wavelength_m) {
    const auto g = g_model(theta, diff.aoas, wavelength_m, diff.period_s);
    double s = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double r = diff.delta_bar[c] - g[c];
        s += r * r;
    }
    return std::sqrt(s);
}

std::array<ClosedFormCandidate, 2> closed_form_candidates(const DiffSeries& diff,
                                                          double wavelength_m, std::size_t first,
                                                          std::size_t second) {
    if (diff.n_static() < 2 || first == second || first >= diff.n_static() ||
        second >= diff.n_static())
        throw std::invalid_argument("closed_form: need two distinct static paths");

    const double d_t = diff.delta_bar[0];
    const double d_1 = diff.delta_bar[first + 1];
    const double d_2 = diff.delta_bar[second + 1];
    const double a_t = diff.aoas[0];
    const double a_1 = diff.aoas[first + 1];
    const double a_2 = diff.aoas[second + 1];
    const double scale = kTwoPi * diff.period_s;

    const double num = d_2 * (std::cos(a_1) - 1.0) - d_1 * (std::cos(a_2) - 1.0);
    const double den = d_1 * std::sin(a_2) - d_2 * std::sin(a_1);
    if (std::abs(den) < kDenominatorEpsilon)
        throw EstimationError(EstimationError::Kind::degenerate_pair,
                              "closed_form: heading denominator vanishes for this static pair");
    const double eta_tilde = std::atan(num / den);

    std::array<ClosedFormCandidate, 2> out;
    for (int b = 0; b < 2; ++b) {
        ClosedFormCandidate& c = out[b];
        c.branch = b == 0 ? Branch::principal : Branch::shifted;
        const double eta = wrap_2pi(eta_tilde + (b == 0 ? 0.0 : std::numbers::pi));
        const double cos_eta = std::cos(eta);
        const double ref = std::cos(a_1 - eta) - cos_eta;
        if (std::abs(ref) < kDenominatorEpsilon)
            throw EstimationError(EstimationError::Kind::degenerate_pair,
                                  "closed_form: Doppler denominator vanishes for this static pair");
        c.theta.eta = eta;
        c.theta.v_rx = wavelength_m * d_1 / (scale * ref);
        c.theta.f_d_target = (d_t - d_1 * (std::cos(a_t - eta) - cos_eta) / ref) / scale;
        c.feasible = c.theta.v_rx >= 0.0;
        Theta clipped = c.theta;
        clipped.v_rx = std::max(clipped.v_rx, 0.0);
        c.residual = residual_norm(diff, clipped, wavelength_m);
    }
    return out;
}

ThetaEstimate closed_form(const DiffSeries& diff, double wavelength_m, std::size_t first,
                          std::size_t second) {
    const auto cands = closed_form_candidates(diff, wavelength_m, first, second);
    const ClosedFormCandidate* best = nullptr;
    for (const auto& c : cands)
        if (c.feasible && (!best || c.residual < best->residual)) best = &c;
    if (!best)
        throw EstimationError(EstimationError::Kind::branch_inconsistency,
                              "closed_form: no branch yields a non-negative speed");
    if (!std::isfinite(best->theta.f_d_target) || !std::isfinite(best->theta.v_rx))
        throw EstimationError(EstimationError::Kind::non_finite, "closed_form: non-finite solution");

    ThetaEstimate est;
    est.theta = best->theta;
    est.init = best->theta;
    est.residual_norm = best->residual;
    est.branch = best->branch;
    est.converged = true;
    est.static_pair = {first, second};
    return est;
}

namespace {

using Vec3 = Eigen::Vector3d;

Theta to_theta(const Vec3& x) { return {x[0], x[1], x[2]}; }
Vec3 to_vec(const Theta& t) { return {t.f_d_target, t.eta, t.v_rx}; }

struct Linearization {
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;  // of g, not of the residual
    double cost = 0.0;
};

Linearization linearize(const DiffSeries& diff, const Theta& theta, double wavelength_m) {
    const auto g = g_model(theta, diff.aoas, wavelength_m, diff.period_s);
    const auto j = g_jacobian(theta, diff.aoas, wavelength_m, diff.period_s);
    Linearization lin;
    lin.residual.resize(diff.cols);
    lin.jacobian.resize(diff.cols, 3);
    for (std::size_t c = 0; c < diff.cols; ++c) {
        lin.residual[c] = diff.delta_bar[c] - g[c];
        for (int p = 0; p < 3; ++p) lin.jacobian(c, p) = j[c * 3 + p];
    }
    lin.cost = lin.residual.squaredNorm();
    return lin;
}

double cost_at(const DiffSeries& diff, const Theta& theta, double wavelength_m) {
    const double r = residual_norm(diff, theta, wavelength_m);
    return r * r;
}

// Maps (eta, v) onto eta in [0, 2pi), v >= 0; g is invariant under (eta + pi, -v).
Theta canonical(Theta t) {
    if (t.v_rx < 0.0) {
        t.v_rx = -t.v_rx;
        t.eta += std::numbers::pi;
    }
    t.eta = wrap_2pi(t.eta);
    return t;
}

}  // namespace

ThetaEstimate nls_refine(const DiffSeries& diff, double wavelength_m, const ThetaEstimate& init,
                         const NlsOptions& opts) {
    if (diff.cols < 3) throw std::invalid_argument("nls_refine: need at least S + 1 = 3 equations");
    ThetaEstimate out = init;
    out.init = init.theta;
    out.converged = false;
    out.n_iterations = 0;

    Vec3 x = to_vec(init.theta);
    if (!x.allFinite())
        throw EstimationError(EstimationError::Kind::non_finite, "nls_refine: non-finite initial point");
    Linearization lin = linearize(diff, init.theta, wavelength_m);
    if (!std::isfinite(lin.cost))
        throw EstimationError(EstimationError::Kind::non_finite, "nls_refine: non-finite residual");

    double damping = opts.initial_damping;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const Eigen::Matrix3d normal = lin.jacobian.transpose() * lin.jacobian;
        const Vec3 gradient = lin.jacobian.transpose() * lin.residual;
        if (gradient.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
            out.converged = true;
            break;
        }
        out.n_iterations = it + 1;

        Vec3 diag = normal.diagonal();
        const double floor = std::max(diag.maxCoeff(), 1.0) * 1e-12;
        diag = diag.cwiseMax(floor);

        bool accepted = false;
        bool small_step = false;
        while (damping < 1e16) {
            Eigen::Matrix3d lhs = normal;
            lhs.diagonal() += damping * diag;
            const Vec3 step = lhs.ldlt().solve(gradient);
            const Vec3 trial = x + step;
            const double trial_cost = cost_at(diff, to_theta(trial), wavelength_m);
            if (std::isfinite(trial_cost) && trial_cost < lin.cost) {
                small_step = step.norm() < opts.step_tolerance * (x.norm() + opts.step_tolerance);
                x = trial;
                lin = linearize(diff, to_theta(x), wavelength_m);
                damping = std::max(damping / 10.0, 1e-15);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted || small_step) {
            // no descent direction left at working precision
            out.converged = true;
            break;
        }
    }

    out.theta = canonical(to_theta(x));
    out.residual_norm = std::sqrt(lin.cost);
    if (!std::isfinite(out.residual_norm))
        throw EstimationError(EstimationError::Kind::non_finite, "nls_refine: non-finite residual");
    return out;
}

ThetaEstimate initialize(const DiffSeries& diff, double wavelength_m, const EstimateOptions& opts) {
    const std::size_t s = diff.n_static();
    if (s < 2) throw std::invalid_argument("initialize: need at least two static paths");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j) pairs.emplace_back(i, j);
    if (pairs.size() > opts.max_pairs) {
        Rng rng(opts.pair_seed);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        pairs.resize(opts.max_pairs);
        std::sort(pairs.begin(), pairs.end());
    }

    ThetaEstimate best;
    bool found = false;
    for (const auto& [i, j] : pairs) {
        try {
            ThetaEstimate e = closed_form(diff, wavelength_m, i, j);
            if (!found || e.residual_norm < best.residual_norm) {
                best = e;
                found = true;
            }
        } catch (const EstimationError&) {
            // try the next pair
        }
    }
    if (!found)
        throw EstimationError(EstimationError::Kind::infeasible,
                              "estimate: every static pair is degenerate");
    return best;
}

ThetaEstimate estimate(const DiffSeries& diff, double wavelength_m, const EstimateOptions& opts) {
    if (opts.static_rx) {
        ThetaEstimate e;
        e.theta = {diff.delta_bar[0] / (kTwoPi * diff.period_s), 0.0, 0.0};
        e.init = e.theta;
        e.residual_norm = residual_norm(diff, e.theta, wavelength_m);
        e.converged = true;
        return e;
    }
    const ThetaEstimate init = initialize(diff, wavelength_m, opts);
    return nls_refine(diff, wavelength_m, init, opts.nls);
}

ThetaEstimate estimate(const PhasePanel& panel, const CarrierProfile& profile,
                       const EstimateOptions& opts) {
    if (panel.paths < 4 && !opts.static_rx)
        throw std::invalid_argument("estimate: panel needs LoS, target and two static paths");
    return estimate(preprocess(panel), profile.wavelength_m, opts);
}

double static_baseline(const PhasePanel& panel) {
    const DiffSeries d = preprocess(panel);
    return d.delta_bar[0] / (kTwoPi * d.period_s);
}

}  // namespace bidop
