// quadrature.hpp
// Adaptive Simpson integration for smooth real- or complex-valued integrands.
// Oscillatory integrands are handled by pre-splitting the interval into
// phase-resolved panels before adapting.

#pragma once

#include <cmath>
#include <complex>
#include <type_traits>
#include <utility>

namespace qpulse {

namespace detail {

template <class F, class V>
V simpson_rec(F& f, double a, double b, V fa, V fm, V fb, V whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const V flm = f(lm);
    const V frm = f(rm);
    const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const V delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Integrate f over [a, b] with absolute tolerance abs_tol. `panels` splits
/// the interval up front so that locally oscillatory integrands present a
/// resolvable shape to the adaptive refinement.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double abs_tol, int panels = 1)
    -> std::decay_t<decltype(f(a))> {
    using V = std::decay_t<decltype(f(a))>;
    if (!(b > a)) return V{};
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    const double panel_tol = abs_tol / panels;
    V total{};
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * h;
        const double pb = (i + 1 == panels) ? b : a + (i + 1) * h;
        const double pm = 0.5 * (pa + pb);
        const V fa = f(pa);
        const V fm = f(pm);
        const V fb = f(pb);
        const V whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total = total + detail::simpson_rec(f, pa, pb, fa, fm, fb, whole, panel_tol, 48);
    }
    return total;
}

}  // namespace qpulse
