// pulse.hpp
// Single-pulse external potentials V(t): rectangular, Gaussian, delta kick,
// and sampled (linearly interpolated) shapes, with the integrals, durations,
// and derivatives the regime formulas and map coordinates are built from.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qpulse/quadrature.hpp"

namespace qpulse {

/// Gaussian support truncation, in sigmas. Beyond it V is exactly 0; the
/// discarded tail is below 1.3e-14 of the peak, under every tolerance used
/// in this library.
inline constexpr double kGaussianSupportSigmas = 8.0;

struct RectangularPulse {
    double v0;
    double t_start;
    double width;
};

struct GaussianPulse {
    double v_peak;
    double t_center;
    double sigma;
};

/// V(t) = alpha_k * hbar * delta(t - t_k). alpha_k is the integrated
/// strength directly; the shape has no pointwise value.
struct DeltaKickPulse {
    double alpha_k;
    double t_k;
};

/// Linear interpolation between samples; V = 0 outside the sample range.
struct SampledPulse {
    std::vector<std::pair<double, double>> samples;  // (t, v), strictly increasing t
};

class Pulse {
  public:
    using Shape = std::variant<RectangularPulse, GaussianPulse, DeltaKickPulse, SampledPulse>;

    static Pulse rectangular(double v0, double t_start, double width) {
        require_finite(v0, "v0");
        require_finite(t_start, "t_start");
        if (!(width > 0.0) || !std::isfinite(width))
            throw std::invalid_argument("Pulse: rectangular width must be finite and > 0");
        return Pulse(RectangularPulse{v0, t_start, width});
    }

    static Pulse gaussian(double v_peak, double t_center, double sigma) {
        require_finite(v_peak, "v_peak");
        require_finite(t_center, "t_center");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("Pulse: gaussian sigma must be finite and > 0");
        return Pulse(GaussianPulse{v_peak, t_center, sigma});
    }

    static Pulse delta_kick(double alpha_k, double t_k) {
        require_finite(alpha_k, "alpha_k");
        if (!(t_k >= 0.0) || !std::isfinite(t_k))
            throw std::invalid_argument("Pulse: kick time t_k must be finite and >= 0");
        return Pulse(DeltaKickPulse{alpha_k, t_k});
    }

    static Pulse sampled(std::vector<std::pair<double, double>> samples) {
        if (samples.size() < 2)
            throw std::invalid_argument("Pulse: sampled pulse needs at least 2 samples");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
                throw std::invalid_argument("Pulse: sampled values must be finite");
            if (i > 0 && !(samples[i].first > samples[i - 1].first))
                throw std::invalid_argument("Pulse: sample times must be strictly increasing");
        }
        return Pulse(SampledPulse{std::move(samples)});
    }

    const Shape& shape() const { return shape_; }
    bool is_kick() const { return std::holds_alternative<DeltaKickPulse>(shape_); }
    const DeltaKickPulse& kick() const { return std::get<DeltaKickPulse>(shape_); }

    /// [t_on, t_off]; V is exactly 0 outside.
    std::pair<double, double> support() const {
        return std::visit(
            [](const auto& s) -> std::pair<double, double> {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>)
                    return {s.t_start, s.t_start + s.width};
                else if constexpr (std::is_same_v<T, GaussianPulse>)
                    return {s.t_center - kGaussianSupportSigmas * s.sigma,
                            s.t_center + kGaussianSupportSigmas * s.sigma};
                else if constexpr (std::is_same_v<T, DeltaKickPulse>)
                    return {s.t_k, s.t_k};
                else
                    return {s.samples.front().first, s.samples.back().first};
            },
            shape_);
    }

    /// Pointwise V(t). Delta kicks have none; callers must use
    /// integrated_strength or the propagator's jump path.
    double value(double t) const {
        if (is_kick())
            throw std::invalid_argument("Pulse: a delta kick has no pointwise value");
        const auto [on, off] = support();
        if (t < on || t > off) return 0.0;
        return std::visit(
            [t](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    return s.v0;
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    const double u = (t - s.t_center) / s.sigma;
                    return s.v_peak * std::exp(-0.5 * u * u);
                } else if constexpr (std::is_same_v<T, SampledPulse>) {
                    return sampled_value(s, t);
                } else {
                    return 0.0;  // unreachable (kick handled above)
                }
            },
            shape_);
    }

    /// Integral of V over [t_from, t_to) divided by hbar. A kick contributes
    /// alpha_k when t_k lies in the half-open window, which keeps the
    /// integral additive over adjacent windows.
    double integrated_strength(double t_from, double t_to, double hbar) const {
        if (!(t_from <= t_to))
            throw std::invalid_argument("Pulse: integration window must have t_from <= t_to");
        if (!(hbar > 0.0)) throw std::invalid_argument("Pulse: hbar must be > 0");
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    const double a = std::max(t_from, s.t_start);
                    const double b = std::min(t_to, s.t_start + s.width);
                    return b > a ? s.v0 * (b - a) / hbar : 0.0;
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    const auto [on, off] = support();
                    const double a = std::max(t_from, on);
                    const double b = std::min(t_to, off);
                    if (!(b > a)) return 0.0;
                    const auto f = [&s](double t) {
                        const double u = (t - s.t_center) / s.sigma;
                        return s.v_peak * std::exp(-0.5 * u * u);
                    };
                    const int panels = std::max(4, (int) std::ceil((b - a) / s.sigma));
                    return adaptive_simpson(f, a, b, 1e-12, panels) / hbar;
                } else if constexpr (std::is_same_v<T, DeltaKickPulse>) {
                    return (s.t_k >= t_from && s.t_k < t_to) ? s.alpha_k : 0.0;
                } else {
                    return sampled_integral(s, t_from, t_to) / hbar;
                }
            },
            shape_);
    }

    /// Pulse duration tau. Rectangular: the width, exactly. Kick: 0.
    /// Gaussian and sampled: equivalent width |∫V dt| / max|V| (the absolute
    /// value keeps tau >= 0 for negative pulses, so the splitting-phase map
    /// coordinate stays nonnegative and V -> -V leaves tau unchanged).
    double duration() const {
        return std::visit(
            [this](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    return s.width;
                } else if constexpr (std::is_same_v<T, DeltaKickPulse>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    // Amplitude-independent: integrate the unit-peak shape.
                    const auto f = [&s](double t) {
                        const double u = (t - s.t_center) / s.sigma;
                        return std::exp(-0.5 * u * u);
                    };
                    const auto [on, off] = support();
                    const int panels = std::max(4, (int) std::ceil((off - on) / s.sigma));
                    return adaptive_simpson(f, on, off, 1e-12, panels);
                } else {
                    double vmax = 0.0;
                    for (const auto& [t, v] : s.samples) vmax = std::max(vmax, std::abs(v));
                    if (vmax == 0.0)
                        throw std::invalid_argument(
                            "Pulse: degenerate pulse (all-zero samples has no duration)");
                    return std::abs(sampled_integral(s, s.samples.front().first,
                                                     s.samples.back().first)) /
                           vmax;
                }
            },
            shape_);
    }

    /// dV/dt. nullopt marks a non-differentiable point (rectangular edges
    /// with v0 != 0); the adiabaticity checker treats it as a violation.
    std::optional<double> derivative(double t) const {
        if (is_kick())
            throw std::invalid_argument("Pulse: a delta kick has no derivative");
        return std::visit(
            [t, this](const auto& s) -> std::optional<double> {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    if (s.v0 == 0.0) return 0.0;
                    const double scale = std::max({1.0, std::abs(s.t_start),
                                                   std::abs(s.t_start + s.width)});
                    if (std::abs(t - s.t_start) <= 1e-12 * scale ||
                        std::abs(t - (s.t_start + s.width)) <= 1e-12 * scale)
                        return std::nullopt;
                    return 0.0;
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    const auto [on, off] = support();
                    if (t < on || t > off) return 0.0;
                    const double u = (t - s.t_center) / s.sigma;
                    return -s.v_peak * u / s.sigma * std::exp(-0.5 * u * u);
                } else if constexpr (std::is_same_v<T, SampledPulse>) {
                    const double span = s.samples.back().first - s.samples.front().first;
                    const double h = std::max(1e-9, 1e-7 * span);
                    return (sampled_value(s, t + h) - sampled_value(s, t - h)) / (2.0 * h);
                } else {
                    return std::nullopt;  // unreachable
                }
            },
            shape_);
    }

    /// sup of |V| over the support (0 for a kick, whose strength lives in
    /// alpha_k instead).
    double max_abs_value() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>)
                    return std::abs(s.v0);
                else if constexpr (std::is_same_v<T, GaussianPulse>)
                    return std::abs(s.v_peak);
                else if constexpr (std::is_same_v<T, DeltaKickPulse>)
                    return 0.0;
                else {
                    double vmax = 0.0;
                    for (const auto& [t, v] : s.samples) vmax = std::max(vmax, std::abs(v));
                    return vmax;
                }
            },
            shape_);
    }

    /// Times where the potential is non-smooth. The propagator aligns its
    /// step grid to these so discontinuities cost no accuracy order.
    std::vector<double> breakpoints() const {
        return std::visit(
            [](const auto& s) -> std::vector<double> {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>)
                    return {s.t_start, s.t_start + s.width};
                else if constexpr (std::is_same_v<T, GaussianPulse>)
                    return {s.t_center - kGaussianSupportSigmas * s.sigma,
                            s.t_center + kGaussianSupportSigmas * s.sigma};
                else if constexpr (std::is_same_v<T, DeltaKickPulse>)
                    return {s.t_k};
                else {
                    std::vector<double> ts;
                    ts.reserve(s.samples.size());
                    for (const auto& [t, v] : s.samples) ts.push_back(t);
                    return ts;
                }
            },
            shape_);
    }

    /// Same pulse with V -> -V (kicks flip alpha_k).
    Pulse negated() const {
        return std::visit(
            [](auto s) -> Pulse {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    s.v0 = -s.v0;
                    return Pulse(s);
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    s.v_peak = -s.v_peak;
                    return Pulse(s);
                } else if constexpr (std::is_same_v<T, DeltaKickPulse>) {
                    s.alpha_k = -s.alpha_k;
                    return Pulse(s);
                } else {
                    for (auto& [t, v] : s.samples) v = -v;
                    return Pulse(std::move(s));
                }
            },
            shape_);
    }

    /// Same shape displaced by dt (V'(t) = V(t - dt)).
    Pulse time_shifted(double dt) const {
        return std::visit(
            [dt](auto s) -> Pulse {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, RectangularPulse>) {
                    s.t_start += dt;
                    return Pulse(s);
                } else if constexpr (std::is_same_v<T, GaussianPulse>) {
                    s.t_center += dt;
                    return Pulse(s);
                } else if constexpr (std::is_same_v<T, DeltaKickPulse>) {
                    s.t_k += dt;
                    return Pulse(s);
                } else {
                    for (auto& [t, v] : s.samples) t += dt;
                    return Pulse(std::move(s));
                }
            },
            shape_);
    }

  private:
    explicit Pulse(Shape s) : shape_(std::move(s)) {}

    static void require_finite(double x, const char* name) {
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string("Pulse: ") + name + " must be finite");
    }

    static double sampled_value(const SampledPulse& s, double t) {
        if (t <= s.samples.front().first || t >= s.samples.back().first) {
            // Exactly at the end knots the knot value applies; outside, 0.
            if (t == s.samples.front().first) return s.samples.front().second;
            if (t == s.samples.back().first) return s.samples.back().second;
            return 0.0;
        }
        const auto it = std::upper_bound(
            s.samples.begin(), s.samples.end(), t,
            [](double lhs, const std::pair<double, double>& p) { return lhs < p.first; });
        const auto& [t1, v1] = *it;
        const auto& [t0, v0] = *(it - 1);
        const double w = (t - t0) / (t1 - t0);
        return v0 + w * (v1 - v0);
    }

    /// Exact integral of the piecewise-linear interpolant over
    /// [t_from, t_to] (trapezoids on clipped segments).
    static double sampled_integral(const SampledPulse& s, double t_from, double t_to) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < s.samples.size(); ++i) {
            const auto& [t0, v0] = s.samples[i];
            const auto& [t1, v1] = s.samples[i + 1];
            const double a = std::max(t_from, t0);
            const double b = std::min(t_to, t1);
            if (!(b > a)) continue;
            const double slope = (v1 - v0) / (t1 - t0);
            const double va = v0 + slope * (a - t0);
            const double vb = v0 + slope * (b - t0);
            total += 0.5 * (va + vb) * (b - a);
        }
        return total;
    }

    Shape shape_;
};

}  // namespace qpulse
