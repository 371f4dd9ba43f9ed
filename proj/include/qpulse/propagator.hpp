// propagator.hpp
// Time-ordered evolution operator for an arbitrary single pulse, evaluated as
// a right-to-left product of per-step closed-form 2x2 exponentials taken at
// the step midpoint. Each factor is exactly unitary, so unitarity never
// drifts; the remaining time-ordering error is second order in the step size.
// Delta kicks are applied as exact jump matrices, never approximated.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qpulse/core.hpp"
#include "qpulse/pulse.hpp"

namespace qpulse {

/// Step refinement never exceeds this many total steps.
inline constexpr std::int64_t kMaxTotalSteps = std::int64_t(1) << 22;

struct PropagationSettings {
    /// Steps per unit time inside the pulse support; 0 picks a default of
    /// 64 steps per characteristic time. Outside the support the Hamiltonian
    /// is constant and each step is exact, so free stretches are sampled
    /// only densely enough for time-series output.
    std::int64_t step_count = 0;
    /// Target matrix error; also the unitarity-defect bound beyond which
    /// propagation is declared diverged. Must lie in (0, 1e-4].
    double tolerance = 1e-9;
    /// Record every record_stride-th step (the final time is always kept).
    std::int64_t record_stride = 1;
};

/// U(t) sampled along the propagation, plus the state trajectory when an
/// initial state was supplied.
struct EvolutionRecord {
    std::vector<double> times;
    std::vector<Mat2> propagators;
    std::optional<std::vector<QubitState>> states;
    std::int64_t total_steps = 0;

    const Mat2& final_u() const { return propagators.back(); }
    double final_time() const { return times.back(); }

    /// Propagator at the recorded time nearest to t (within tol).
    const Mat2& at_time(double t, double tol = 1e-9) const {
        const auto it = std::lower_bound(times.begin(), times.end(), t - tol);
        if (it == times.end() || std::abs(*it - t) > tol)
            throw std::invalid_argument("EvolutionRecord: time " + std::to_string(t) +
                                        " was not recorded");
        return propagators[static_cast<std::size_t>(it - times.begin())];
    }
};

/// min(tau, 2*pi*hbar / max(delta_e, hbar/tau)): the shorter of the pulse
/// duration and the fastest phase-rotation period. Guards against
/// under-resolving fast phase rotation when delta_e is large. A kick has no
/// pulse time scale; its characteristic time is the free period (infinite
/// when delta_e = 0, where every step is exact anyway).
inline double characteristic_time(const SystemParams& params, const Pulse& pulse) {
    const double two_pi = 2.0 * std::numbers::pi;
    double tau = 0.0;
    if (!pulse.is_kick()) tau = pulse.duration();
    if (tau <= 0.0) {
        return params.delta_e > 0.0 ? two_pi * params.hbar / params.delta_e
                                    : std::numeric_limits<double>::infinity();
    }
    const double rate = std::max(params.delta_e, params.hbar / tau);
    return std::min(tau, two_pi * params.hbar / rate);
}

namespace detail {

struct Segment {
    double a;
    double b;
    bool in_support;
};

inline std::vector<Segment> make_segments(const Pulse& pulse, double t_final) {
    std::vector<double> pts{0.0, t_final};
    for (double b : pulse.breakpoints())
        if (b > 0.0 && b < t_final) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [t_final](double x, double y) {
                              return std::abs(x - y) <= 1e-15 * std::max(1.0, t_final);
                          }),
              pts.end());

    const auto [on, off] = pulse.support();
    std::vector<Segment> segs;
    segs.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        const bool inside = !pulse.is_kick() && mid >= on && mid <= off;
        segs.push_back({pts[i], pts[i + 1], inside});
    }
    return segs;
}

}  // namespace detail

/// Evolution operator of the driven two-level system over [0, t_final],
/// realized as the time-ordered product of midpoint exponentials
/// exp(-i H(t_mid) dt / hbar) with steps aligned to pulse edges, kick times,
/// and sample knots. Earliest factors are applied first.
inline EvolutionRecord propagate(const SystemParams& params, const Pulse& pulse, double t_final,
                                 const PropagationSettings& settings = {},
                                 const std::optional<QubitState>& initial = std::nullopt) {
    const double two_pi = 2.0 * std::numbers::pi;
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("propagate: t_final must be finite and > 0");
    if (!(settings.tolerance > 0.0) || settings.tolerance > 1e-4)
        throw std::invalid_argument("propagate: tolerance must lie in (0, 1e-4]");
    if (settings.record_stride < 1)
        throw std::invalid_argument("propagate: record_stride must be >= 1");
    if (settings.step_count < 0)
        throw std::invalid_argument("propagate: step_count must be > 0 (or 0 for automatic)");

    const double t_char = characteristic_time(params, pulse);
    double support_rate;
    if (settings.step_count > 0) {
        support_rate = static_cast<double>(settings.step_count);
        if (std::isfinite(t_char) && support_rate * t_char < 16.0)
            throw std::invalid_argument(
                "propagate: step_count gives fewer than 16 steps per characteristic time");
    } else {
        support_rate = std::isfinite(t_char) ? 64.0 / t_char : 1.0;
    }
    // Free evolution is exact per step; 16 samples per free period is for
    // time-series readability only.
    const double free_rate =
        params.delta_e > 0.0 ? 16.0 * params.delta_e / (two_pi * params.hbar) : 0.0;

    const bool kick = pulse.is_kick();
    const double t_k = kick ? pulse.kick().t_k : -1.0;
    const Mat2 jump =
        kick ? pauli_rotation(pulse.kick().alpha_k, 0.0, 0.0, 1.0) : Mat2::identity();

    EvolutionRecord rec;
    Mat2 u = Mat2::identity();
    std::int64_t steps_done = 0;

    const auto record = [&](double t) {
        const double defect = u.unitarity_defect();
        if (defect > settings.tolerance)
            throw PropagationError("propagation diverged: unitarity defect " +
                                   std::to_string(defect) + " at t = " + std::to_string(t));
        rec.times.push_back(t);
        rec.propagators.push_back(u);
        if (initial) {
            if (!rec.states) rec.states.emplace();
            rec.states->push_back(apply(u, *initial, std::max(settings.tolerance, 1e-10)));
        }
    };

    record(0.0);
    if (kick && t_k == 0.0) u = jump * u;  // kick exactly at the origin

    const auto segments = detail::make_segments(pulse, t_final);
    const double hz = -0.5 * params.delta_e / params.hbar;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto& seg = segments[si];
        const double len = seg.b - seg.a;
        const double rate = seg.in_support ? support_rate : free_rate;
        const std::int64_t n =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len * rate)));
        const double dt = len / static_cast<double>(n);
        for (std::int64_t i = 0; i < n; ++i) {
            const double tm = seg.a + (static_cast<double>(i) + 0.5) * dt;
            const double v = seg.in_support ? pulse.value(tm) : 0.0;
            u = pauli_rotation(v / params.hbar, 0.0, hz, dt) * u;
            ++steps_done;
            const bool seg_end = (i + 1 == n);
            const double t_now = seg_end ? seg.b : seg.a + static_cast<double>(i + 1) * dt;
            if (kick && seg_end && std::abs(seg.b - t_k) <= 1e-15 * std::max(1.0, t_final))
                u = jump * u;
            const bool last = seg_end && si + 1 == segments.size();
            if (steps_done % settings.record_stride == 0 || last) record(t_now);
        }
    }
    rec.total_steps = steps_done;
    return rec;
}

/// Richardson-style step doubling: run at step rates r and 2r, estimate the
/// error as the Frobenius distance between the final propagators, and keep
/// doubling until the estimate is below target_tol. Returns the finer record
/// and the estimate. Throws "step refinement exhausted" past kMaxTotalSteps.
inline std::pair<EvolutionRecord, double> refine_to_tolerance(
    const SystemParams& params, const Pulse& pulse, double t_final, double target_tol,
    const std::optional<QubitState>& initial = std::nullopt,
    std::int64_t record_stride = 1) {
    if (!(target_tol >= 1e-13))
        throw std::invalid_argument("refine_to_tolerance: target_tol must be >= 1e-13");

    const double t_char = characteristic_time(params, pulse);
    std::int64_t rate = 1;
    if (std::isfinite(t_char))
        rate = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(16.0 / t_char)));

    PropagationSettings settings;
    settings.step_count = rate;
    settings.record_stride = record_stride;
    settings.tolerance = 1e-8;  // divergence guard only; accuracy comes from doubling

    EvolutionRecord coarse = propagate(params, pulse, t_final, settings, initial);
    while (true) {
        settings.step_count = 2 * settings.step_count;
        EvolutionRecord fine = propagate(params, pulse, t_final, settings, initial);
        const double estimate = frobenius_distance(coarse.final_u(), fine.final_u());
        if (estimate <= target_tol) return {std::move(fine), estimate};
        if (2 * fine.total_steps > kMaxTotalSteps)
            throw PropagationError("step refinement exhausted: error estimate " +
                                   std::to_string(estimate) + " above target " +
                                   std::to_string(target_tol) + " at " +
                                   std::to_string(fine.total_steps) + " steps");
        coarse = std::move(fine);
    }
}

}  // namespace qpulse
