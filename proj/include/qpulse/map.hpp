// map.hpp
// Qubit-map coordinates, regime classification with validity margins, the
// pointwise adiabaticity condition, and the empirical atlas: per-regime
// error fields of every closed form against refined numerical propagation
// over a log-spaced coordinate grid.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qpulse/core.hpp"
#include "qpulse/propagator.hpp"
#include "qpulse/pulse.hpp"
#include "qpulse/regimes.hpp"

namespace qpulse {

/// Map coordinates of the pulsed-qubit chart: x is the field phase
/// ∫0..inf V dt / hbar, y the splitting phase delta_e * tau / (2 hbar).
/// Both dimensionless; x can be negative for negative pulses.
struct MapCoordinates {
    double x;
    double y;
};

inline MapCoordinates map_coordinates(const SystemParams& params, const Pulse& pulse) {
    double x;
    if (pulse.is_kick()) {
        x = pulse.kick().alpha_k;
    } else {
        const auto [on, off] = pulse.support();
        const double a = std::max(0.0, on);
        x = off > a ? pulse.integrated_strength(a, off, params.hbar) : 0.0;
    }
    const double y = 0.5 * params.delta_e * pulse.duration() / params.hbar;
    return {x, y};
}

/// Pointwise adiabaticity measure hbar*|dV/dt|*delta_e / [V^2+(dE/2)^2]^(3/2)
/// (satisfied when << 1). Returns 0 whenever delta_e = 0 (the numerator
/// vanishes for any pulse) and +inf at a non-differentiable point.
inline double adiabaticity_ratio(const SystemParams& params, const Pulse& pulse, double t) {
    if (params.delta_e == 0.0) return 0.0;
    if (pulse.is_kick()) return std::numeric_limits<double>::infinity();
    const auto dv = pulse.derivative(t);
    if (!dv) return std::numeric_limits<double>::infinity();
    const double v = pulse.value(t);
    const double half = 0.5 * params.delta_e;
    const double denom = std::pow(v * v + half * half, 1.5);
    return params.hbar * std::abs(*dv) * params.delta_e / denom;
}

/// Worst-case Eq.-(18) ratio over the pulse support. Rectangular pulses with
/// nonzero amplitude violate the condition at their edges as distributions,
/// so they report +inf, as do kicks (unless delta_e = 0).
inline double max_adiabaticity_ratio(const SystemParams& params, const Pulse& pulse,
                                     int samples = 2048) {
    if (params.delta_e == 0.0) return 0.0;
    if (pulse.is_kick()) return std::numeric_limits<double>::infinity();
    if (std::holds_alternative<RectangularPulse>(pulse.shape()) && pulse.max_abs_value() != 0.0)
        return std::numeric_limits<double>::infinity();
    const auto [on, off] = pulse.support();
    if (!(off > on)) return 0.0;
    double worst = 0.0;
    const double h = (off - on) / samples;
    for (int i = 0; i < samples; ++i) {
        const double t = on + (i + 0.5) * h;
        worst = std::max(worst, adiabaticity_ratio(params, pulse, t));
    }
    return worst;
}

struct RegimeMargin {
    RegimeKind kind;
    /// Distance from the regime's validity threshold as a ratio; the regime
    /// applies iff margin < 1 under the configured "<<" ratio.
    double margin;
};

struct RegimeReport {
    MapCoordinates coords{0.0, 0.0};
    std::vector<RegimeMargin> applicable;
    /// Worst-case pointwise adiabaticity ratio over the pulse (inf sentinel
    /// for non-differentiable shapes with delta_e > 0).
    double adiabatic_pointwise = 0.0;
    std::vector<std::string> notes;
    bool central = false;
    double threshold_ratio = 0.1;

    bool has(RegimeKind k) const {
        for (const auto& m : applicable)
            if (m.kind == k) return true;
        return false;
    }
    std::optional<double> margin(RegimeKind k) const {
        for (const auto& m : applicable)
            if (m.kind == k) return m.margin;
        return std::nullopt;
    }
};

/// Classify a parameter point. "<<" is interpreted as `ratio` (default 0.1):
///   perturbative       iff |x| < ratio * 2pi
///   kicked             iff  y  < ratio * 2pi
///   degenerate         iff  y  < ratio * |x|  and  y^2 < ratio * |x|
///   degenerate-extended iff |x| > y (right of the map diagonal)
///   adiabatic          iff worst Eq.-(18) ratio < ratio
///   zero-potential     iff x = 0 exactly
/// Central is flagged when nothing applies and both coordinates sit in the
/// order-2pi band.
inline RegimeReport classify(const SystemParams& params, const Pulse& pulse,
                             double ratio = 0.1) {
    if (!(ratio > 0.0))
        throw std::invalid_argument("classify: threshold ratio must be > 0");
    const double two_pi = 2.0 * std::numbers::pi;
    const double inf = std::numeric_limits<double>::infinity();

    RegimeReport report;
    report.threshold_ratio = ratio;
    report.coords = map_coordinates(params, pulse);
    const double ax = std::abs(report.coords.x);
    const double y = report.coords.y;

    const bool rect_edges =
        std::holds_alternative<RectangularPulse>(pulse.shape()) && pulse.max_abs_value() != 0.0;
    const bool kick_shape = pulse.is_kick();

    report.adiabatic_pointwise = max_adiabaticity_ratio(params, pulse);

    const auto margin_of = [&](RegimeKind k) -> double {
        switch (k) {
            case RegimeKind::Perturbative:
                return ax / (ratio * two_pi);
            case RegimeKind::Kicked:
                return y / (ratio * two_pi);
            case RegimeKind::Degenerate:
                return ax > 0.0 ? std::max(y, y * y) / (ratio * ax) : inf;
            case RegimeKind::DegenerateExtended:
                return ax > 0.0 ? y / ax : inf;
            case RegimeKind::Adiabatic:
                if (rect_edges || (kick_shape && params.delta_e > 0.0)) return inf;
                return report.adiabatic_pointwise / ratio;
            case RegimeKind::ZeroPotential:
                return report.coords.x == 0.0 ? 0.0 : inf;
        }
        return inf;
    };

    for (RegimeKind k : kAllRegimes) {
        const double m = margin_of(k);
        if (m < 1.0) report.applicable.push_back({k, m});
        else if (std::isfinite(m) && m < 1.25)
            report.notes.push_back(std::string(regime_name(k)) + ": just outside threshold");
        if (m >= 0.8 && m < 1.0)
            report.notes.push_back(std::string(regime_name(k)) + ": near boundary");
    }

    if (rect_edges)
        report.notes.push_back("adiabatic: non-differentiable edges");
    if (kick_shape && params.delta_e > 0.0)
        report.notes.push_back("adiabatic: delta kick is not differentiable");

    report.central = report.applicable.empty() && ax >= ratio * two_pi &&
                     ax <= two_pi / ratio && y >= ratio * two_pi && y <= two_pi / ratio;
    return report;
}

enum class PulseFamily { Gaussian, Rectangular, Kick };

inline std::string_view family_name(PulseFamily f) {
    switch (f) {
        case PulseFamily::Gaussian: return "gaussian";
        case PulseFamily::Rectangular: return "rectangular";
        case PulseFamily::Kick: return "kick";
    }
    return "unknown";
}

inline std::optional<PulseFamily> family_from_name(std::string_view name) {
    if (name == "gaussian") return PulseFamily::Gaussian;
    if (name == "rectangular") return PulseFamily::Rectangular;
    if (name == "kick") return PulseFamily::Kick;
    return std::nullopt;
}

struct AtlasGridSpec {
    int nx = 48;
    int ny = 48;
    /// Axis ranges for the field phase x and splitting phase y. Cells are
    /// log-spaced and inclusive of both endpoints.
    double x_min = 0.01 * 2.0 * std::numbers::pi;
    double x_max = 100.0 * 2.0 * std::numbers::pi;
    double y_min = 0.01 * 2.0 * std::numbers::pi;
    double y_max = 100.0 * 2.0 * std::numbers::pi;
    PulseFamily family = PulseFamily::Gaussian;
    /// Flip the sign of the potential (the error fields are invariant).
    bool negate = false;
    double delta_e = 1.0;
    double hbar = 1.0;
    double ratio = 0.1;
    /// Per-cell numerical refinement target.
    double refine_tolerance = 1e-6;
};

struct AtlasCell {
    std::array<double, 6> matrix_error{};    // indexed like kAllRegimes
    std::array<double, 6> transfer_error{};  // |delta P2| from initial state 1
    bool valid = false;
};

struct AtlasGrid {
    std::vector<double> x_axis;
    std::vector<double> y_axis;
    std::vector<AtlasCell> cells;  // row-major: iy * nx + ix
    AtlasGridSpec spec;

    const AtlasCell& at(int ix, int iy) const {
        return cells[static_cast<std::size_t>(iy) * x_axis.size() + ix];
    }
    int invalid_count() const {
        int n = 0;
        for (const auto& c : cells)
            if (!c.valid) ++n;
        return n;
    }
};

namespace detail {

inline std::vector<double> log_axis(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("atlas: bad axis range");
    if (n < 2) throw std::invalid_argument("atlas: axis needs at least 2 cells");
    std::vector<double> axis(n);
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i)
        axis[i] = std::exp(la + (lb - la) * i / (n - 1));
    axis.front() = lo;  // endpoints exact, not exp(log(.)) rounded
    axis.back() = hi;
    return axis;
}

/// Member of the atlas pulse family hitting map coordinates (x, y).
inline Pulse family_pulse(const AtlasGridSpec& spec, double x, double y) {
    const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
    const double sign = spec.negate ? -1.0 : 1.0;
    switch (spec.family) {
        case PulseFamily::Gaussian: {
            // tau = sqrt(2pi) sigma, y = dE tau / 2hbar, x = v_peak tau / hbar
            const double sigma = 2.0 * spec.hbar * y / (spec.delta_e * sqrt_2pi);
            const double v_peak = x * spec.hbar / (sqrt_2pi * sigma);
            const double center = kGaussianSupportSigmas * sigma;
            return Pulse::gaussian(sign * v_peak, center, sigma);
        }
        case PulseFamily::Rectangular: {
            const double width = 2.0 * spec.hbar * y / spec.delta_e;
            const double v0 = x * spec.hbar / width;
            return Pulse::rectangular(sign * v0, 0.25 * width, width);
        }
        case PulseFamily::Kick:
            // A kick has tau = 0 identically; y only sets the kick time, so
            // each row probes the same physics. Selectable for shape
            // comparison along x.
            return Pulse::delta_kick(sign * x, 2.0 * spec.hbar * y / spec.delta_e);
    }
    throw std::invalid_argument("atlas: unknown pulse family");
}

inline AtlasCell evaluate_cell(const AtlasGridSpec& spec, double x, double y) {
    const SystemParams params(spec.delta_e, spec.hbar);
    const Pulse pulse = family_pulse(spec, x, y);
    const auto [on, off] = pulse.support();
    // Post-pulse evaluation: end of support plus one free-evolution period,
    // where the physical claims (adiabatic return, frozen dit populations)
    // live.
    const double free_period =
        spec.delta_e > 0.0 ? 2.0 * std::numbers::pi * spec.hbar / spec.delta_e : 0.0;
    const double t_eval = std::max(off, 0.0) + free_period;

    AtlasCell cell;
    EvolutionRecord rec;
    try {
        auto [r, est] = refine_to_tolerance(params, pulse, t_eval, spec.refine_tolerance);
        rec = std::move(r);
    } catch (const PropagationError&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        cell.matrix_error.fill(nan);
        cell.transfer_error.fill(nan);
        cell.valid = false;
        return cell;
    }
    const Mat2& u_num = rec.final_u();
    const double p2_num = std::norm(u_num.u21);
    for (std::size_t i = 0; i < kAllRegimes.size(); ++i) {
        const Mat2 u_r = regime_u(kAllRegimes[i], params, pulse, t_eval);
        cell.matrix_error[i] = frobenius_distance(u_r, u_num);
        cell.transfer_error[i] = std::abs(std::norm(u_r.u21) - p2_num);
    }
    cell.valid = true;
    return cell;
}

}  // namespace detail

/// Sweep the grid, refining the numerical propagator per cell and scoring
/// every closed form against it. Cells are independent; `jobs` worker
/// threads split them (0 = hardware concurrency). Cells whose refinement
/// fails are marked invalid, never silently filled.
inline AtlasGrid build_atlas(const AtlasGridSpec& spec, int jobs = 0) {
    if (!(spec.delta_e > 0.0))
        throw std::invalid_argument("atlas: delta_e must be > 0 (y would be pinned at 0)");
    const double two_pi = 2.0 * std::numbers::pi;
    const double lo = 1e-3 * two_pi, hi = 1e3 * two_pi;
    if (spec.x_min < lo || spec.x_max > hi || spec.y_min < lo || spec.y_max > hi)
        throw std::invalid_argument("atlas: axes must lie within [1e-3, 1e3] in units of 2pi");

    AtlasGrid grid;
    grid.spec = spec;
    grid.x_axis = detail::log_axis(spec.x_min, spec.x_max, spec.nx);
    grid.y_axis = detail::log_axis(spec.y_min, spec.y_max, spec.ny);
    grid.cells.resize(static_cast<std::size_t>(spec.nx) * spec.ny);

    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    std::atomic<std::size_t> next{0};
    const std::size_t total = grid.cells.size();
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) break;
            const int ix = static_cast<int>(i % spec.nx);
            const int iy = static_cast<int>(i / spec.nx);
            try {
                grid.cells[i] = detail::evaluate_cell(spec, grid.x_axis[ix], grid.y_axis[iy]);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total);
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs - 1);
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return grid;
}

}  // namespace qpulse
