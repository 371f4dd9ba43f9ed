// regimes.hpp
// Closed-form propagators for the limiting regimes of a simply pulsed qubit:
// degenerate (dit), theta-extended degenerate, perturbative, zero-potential,
// adiabatic, and kicked. Validity is never enforced here (the map module
// reports it); the formulas must be evaluable outside their regions so their
// failure can be charted.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "qpulse/core.hpp"
#include "qpulse/propagator.hpp"
#include "qpulse/pulse.hpp"
#include "qpulse/quadrature.hpp"

namespace qpulse {

enum class RegimeKind {
    Degenerate,
    DegenerateExtended,
    Perturbative,
    ZeroPotential,
    Adiabatic,
    Kicked,
};

inline constexpr std::array<RegimeKind, 6> kAllRegimes = {
    RegimeKind::Degenerate,   RegimeKind::DegenerateExtended, RegimeKind::Perturbative,
    RegimeKind::ZeroPotential, RegimeKind::Adiabatic,          RegimeKind::Kicked,
};

inline std::string_view regime_name(RegimeKind k) {
    switch (k) {
        case RegimeKind::Degenerate: return "degenerate";
        case RegimeKind::DegenerateExtended: return "degenerate_extended";
        case RegimeKind::Perturbative: return "perturbative";
        case RegimeKind::ZeroPotential: return "zero_potential";
        case RegimeKind::Adiabatic: return "adiabatic";
        case RegimeKind::Kicked: return "kicked";
    }
    return "unknown";
}

inline std::optional<RegimeKind> regime_from_name(std::string_view name) {
    for (RegimeKind k : kAllRegimes)
        if (regime_name(k) == name) return k;
    return std::nullopt;
}

/// Generalized Rabi frequency sqrt(V^2 + (delta_e/2)^2) at time t. For a
/// kick the pointwise V is 0 away from t_k; the kick's strength enters the
/// theta integral as a lump instead.
inline double omega_at(const SystemParams& params, const Pulse& pulse, double t) {
    const double v = pulse.is_kick() ? 0.0 : pulse.value(t);
    const double half = 0.5 * params.delta_e;
    return std::sqrt(v * v + half * half);
}

/// alpha(t) = ∫0..t V/hbar (the action integral) and
/// theta(t) = ∫0..t Omega/hbar (the extended phase).
struct PhaseIntegrals {
    double alpha;
    double theta;
};

inline PhaseIntegrals phase_integrals(const SystemParams& params, const Pulse& pulse, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("phase_integrals: t must be >= 0");
    const double alpha = pulse.integrated_strength(0.0, t, params.hbar);
    const double half = 0.5 * params.delta_e;

    if (pulse.is_kick()) {
        // Baseline Omega = delta_e/2 everywhere; the kick contributes |V|'s
        // full lump (the narrow-pulse limit of ∫ sqrt(V^2 + c^2)).
        const double lump =
            (pulse.kick().t_k >= 0.0 && pulse.kick().t_k < t) ? std::abs(pulse.kick().alpha_k)
                                                              : 0.0;
        return {alpha, half * t / params.hbar + lump};
    }

    const auto [on, off] = pulse.support();
    const double a = std::max(0.0, on);
    const double b = std::min(t, off);
    double theta = 0.0;
    if (b > a) {
        const auto f = [&](double tt) {
            const double v = pulse.value(tt);
            return std::sqrt(v * v + half * half);
        };
        const double tau = pulse.duration();
        const int panels = std::max(
            8, (int) std::ceil((b - a) * std::max(params.delta_e / params.hbar,
                                                  tau > 0.0 ? 1.0 / tau : 0.0)));
        theta = adaptive_simpson(f, a, b, 1e-12, panels) / params.hbar;
    }
    // Outside the support Omega is exactly delta_e/2.
    const double free_span = b > a ? t - (b - a) : t;
    theta += half * free_span / params.hbar;
    return {alpha, theta};
}

/// Eq.-style dit evolution: [[cos a, -i sin a], [-i sin a, cos a]].
inline Mat2 dit_matrix(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)};
}

/// Degenerate-qubit ("dit") propagator: pure sigma_x rotation by the action
/// integral alpha, exact at delta_e = 0 for any pulse shape.
inline Mat2 degenerate_u(const Pulse& pulse, double t, double hbar) {
    return dit_matrix(pulse.integrated_strength(0.0, t, hbar));
}

/// Same matrix form with alpha replaced by theta = ∫ Omega/hbar, extending
/// validity to the whole region right of the map diagonal.
inline Mat2 degenerate_extended_u(const SystemParams& params, const Pulse& pulse, double t) {
    return dit_matrix(phase_integrals(params, pulse, t).theta);
}

/// Free-evolution propagator diag(e^{+i t dE/2hbar}, e^{-i t dE/2hbar}).
inline Mat2 zero_potential_u(const SystemParams& params, double t) {
    const double phi = 0.5 * params.delta_e * t / params.hbar;
    return {std::polar(1.0, phi), 0.0, 0.0, std::polar(1.0, -phi)};
}

/// First-order propagator: exact free phases on the diagonal, first-order
/// pulse integrals (with phase-resolved quadrature) off the diagonal.
/// Unitary only to first order in the pulse area.
inline Mat2 perturbative_u(const SystemParams& params, const Pulse& pulse, double t) {
    const double k = 0.5 * params.delta_e / params.hbar;  // phase rate
    Mat2 u = zero_potential_u(params, t);

    if (pulse.is_kick()) {
        const auto& kk = pulse.kick();
        u.u12 = cplx(0.0, -kk.alpha_k) * std::polar(1.0, k * (t - 2.0 * kk.t_k));
        u.u21 = cplx(0.0, -kk.alpha_k) * std::polar(1.0, -k * (t - 2.0 * kk.t_k));
        return u;
    }

    const auto [on, off] = pulse.support();
    const double a = std::max(0.0, on);
    const double b = off;
    if (b > a) {
        const auto f12 = [&](double tp) {
            return std::polar(1.0, k * (t - 2.0 * tp)) * pulse.value(tp);
        };
        const double tau = pulse.duration();
        const int panels = std::max(
            8, (int) std::ceil((b - a) * std::max(2.0 * k, tau > 0.0 ? 1.0 / tau : 0.0)));
        const cplx integral = adaptive_simpson(f12, a, b, 1e-12, panels);
        u.u12 = cplx(0.0, -1.0) / params.hbar * integral;
        u.u21 = cplx(0.0, -1.0) / params.hbar * std::conj(integral);
    }
    return u;
}

/// Adiabatic propagator with Omega and theta evaluated at t. Requires the
/// potential to have returned to its initial value (or t beyond the support
/// with V(0) = 0); mid-pulse evaluation at a different level is undefined.
inline Mat2 adiabatic_u(const SystemParams& params, const Pulse& pulse, double t) {
    const auto [on, off] = pulse.support();
    double v_now;
    if (pulse.is_kick()) {
        if (!(t > off) && !(t < on))
            throw std::invalid_argument(
                "adiabatic_u: pulse does not return to initial value (kick instant)");
        v_now = 0.0;
    } else {
        v_now = pulse.value(t);
        const double v0 = pulse.value(0.0);
        const double vmax = pulse.max_abs_value();
        const bool returned = std::abs(v_now - v0) <= 1e-9 * vmax;
        const bool past_support = (t > off || t < on) && v0 == 0.0;
        if (!returned && !past_support)
            throw std::invalid_argument("adiabatic_u: pulse does not return to initial value");
    }

    const double half = 0.5 * params.delta_e;
    const double omega = std::sqrt(v_now * v_now + half * half);
    const double theta = phase_integrals(params, pulse, t).theta;
    double ratio_e, ratio_v;
    if (omega == 0.0) {
        // delta_e = 0 and V(t) = 0: the degenerate limit, where V/Omega -> 1.
        ratio_e = 0.0;
        ratio_v = 1.0;
    } else {
        ratio_e = half / omega;
        ratio_v = v_now / omega;
    }
    const double c = std::cos(theta), s = std::sin(theta);
    return {cplx(c, ratio_e * s), cplx(0.0, -ratio_v * s),
            cplx(0.0, -ratio_v * s), cplx(c, -ratio_e * s)};
}

/// Exact kicked propagator (free evolution, instantaneous sigma_x rotation
/// by alpha_k at t_k, free evolution again).
inline Mat2 kicked_u(const SystemParams& params, const Pulse& pulse, double t) {
    const auto& kk = pulse.kick();
    if (t < kk.t_k)
        throw std::invalid_argument("kicked_u: kick not yet applied; use zero_potential_u");
    const double k = 0.5 * params.delta_e / params.hbar;
    const double ca = std::cos(kk.alpha_k), sa = std::sin(kk.alpha_k);
    return {ca * std::polar(1.0, k * t),
            cplx(0.0, -sa) * std::polar(1.0, k * (t - 2.0 * kk.t_k)),
            cplx(0.0, -sa) * std::polar(1.0, -k * (t - 2.0 * kk.t_k)),
            ca * std::polar(1.0, -k * t)};
}

/// Delta kick with the same integrated strength and area centroid as the
/// pulse: the kick approximation evaluated for arbitrary shapes.
inline Pulse equivalent_kick(const Pulse& pulse, double hbar) {
    if (pulse.is_kick()) return pulse;
    const auto [on, off] = pulse.support();
    const double a = std::max(0.0, on);
    const double alpha = pulse.integrated_strength(a, off, hbar);
    double t_k = 0.5 * (a + off);
    if (alpha != 0.0) {
        const auto f = [&](double tp) { return tp * pulse.value(tp); };
        const double first_moment = adaptive_simpson(f, a, off, 1e-12, 16) / hbar;
        t_k = first_moment / alpha;
    }
    t_k = std::clamp(t_k, a, off > a ? off : a);
    return Pulse::delta_kick(alpha, std::max(0.0, t_k));
}

/// (p_stay, p_transfer) read off the propagator column of the initial basis
/// state: (|u_ii|^2, |u_ji|^2).
inline std::pair<double, double> population_transfer(const Mat2& u, int initial_state_index) {
    if (!u.is_unitary())
        throw std::invalid_argument("population_transfer: matrix failed the unitarity check");
    if (initial_state_index == 1) return {std::norm(u.u11), std::norm(u.u21)};
    if (initial_state_index == 2) return {std::norm(u.u22), std::norm(u.u12)};
    throw std::invalid_argument("population_transfer: initial_state_index must be 1 or 2");
}

/// Closed form for `kind` at time t. Non-kick pulses use the equivalent-kick
/// approximation for RegimeKind::Kicked; that is exactly the narrow-pulse
/// approximation whose quality the map charts.
inline Mat2 regime_u(RegimeKind kind, const SystemParams& params, const Pulse& pulse, double t) {
    switch (kind) {
        case RegimeKind::Degenerate: return degenerate_u(pulse, t, params.hbar);
        case RegimeKind::DegenerateExtended: return degenerate_extended_u(params, pulse, t);
        case RegimeKind::Perturbative: return perturbative_u(params, pulse, t);
        case RegimeKind::ZeroPotential: return zero_potential_u(params, t);
        case RegimeKind::Adiabatic: return adiabatic_u(params, pulse, t);
        case RegimeKind::Kicked: {
            const Pulse k = equivalent_kick(pulse, params.hbar);
            return kicked_u(params, k, t);
        }
    }
    throw std::invalid_argument("regime_u: unknown regime");
}

/// For each width, builds a Gaussian of that equivalent width carrying
/// integrated strength alpha_k centered at t_k, propagates it numerically,
/// and reports the Frobenius error against the exact kicked propagator at a
/// common post-pulse time. Errors shrink roughly linearly in
/// width * delta_e / hbar.
inline std::vector<std::pair<double, double>> kick_convergence_study(
    const SystemParams& params, double alpha_k, double t_k, const std::vector<double>& widths) {
    if (widths.empty()) throw std::invalid_argument("kick_convergence_study: no widths");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] > 0.0))
            throw std::invalid_argument("kick_convergence_study: widths must be positive");
        if (i > 0 && !(widths[i] < widths[i - 1]))
            throw std::invalid_argument("kick_convergence_study: widths must be decreasing");
    }
    const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
    const double sigma_max = widths.front() / sqrt_2pi;
    if (t_k - kGaussianSupportSigmas * sigma_max < 0.0)
        throw std::invalid_argument(
            "kick_convergence_study: t_k too early for the widest pulse's support");

    const double t_final = t_k + kGaussianSupportSigmas * sigma_max + 1.0;
    const Pulse kick = Pulse::delta_kick(alpha_k, t_k);
    const Mat2 u_ref = kicked_u(params, kick, t_final);

    std::vector<std::pair<double, double>> out;
    out.reserve(widths.size());
    for (double w : widths) {
        const double sigma = w / sqrt_2pi;
        const double v_peak = alpha_k * params.hbar / w;
        const Pulse g = Pulse::gaussian(v_peak, t_k, sigma);
        const auto [rec, est] = refine_to_tolerance(params, g, t_final, 1e-11);
        out.emplace_back(w, frobenius_distance(rec.final_u(), u_ref));
    }
    return out;
}

}  // namespace qpulse
