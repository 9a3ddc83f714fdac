#pragma once

#include <cmath>
#include <functional>

namespace tailex {

namespace detail {

template <class Real, class F>
Real simpson_rec_t(F& f, Real a, Real fa, Real b, Real fb, Real m, Real fm,
                   Real whole, Real tol, int depth) {
    const Real lm = (a + m) / 2;
    const Real rm = (m + b) / 2;
    const Real flm = f(lm);
    const Real frm = f(rm);
    const Real left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Real right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Real delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15 * tol) {
        return left + right + delta / 15;
    }
    return simpson_rec_t<Real>(f, a, fa, m, fm, lm, flm, left, tol / 2,
                               depth - 1) +
           simpson_rec_t<Real>(f, m, fm, b, fb, rm, frm, right, tol / 2,
                               depth - 1);
}

} // namespace detail

// Adaptive Simpson on [a,b], usable at double or extended precision.
// rel_tol is relative to the running estimate, with an absolute floor for
// integrals near zero.
template <class Real, class F>
Real adaptive_simpson_any(F&& f, Real a, Real b, Real rel_tol,
                          Real abs_floor = Real(1e-300), int max_depth = 52) {
    if (a == b) return Real(0);
    const Real m = (a + b) / 2;
    const Real fa = f(a), fb = f(b), fm = f(m);
    const Real whole = (b - a) / 6 * (fa + 4 * fm + fb);
    const Real tol = std::max(std::fabs(whole) * rel_tol, abs_floor);
    return detail::simpson_rec_t<Real>(f, a, fa, b, fb, m, fm, whole, tol,
                                       max_depth);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-10,
                        double abs_floor = 1e-300, int max_depth = 52);

// Integral of a survival-like function on [x, +inf): adaptive Simpson up to
// `cut`, then the power-tail remainder cut*f(cut)/(theta-1) obtained from
// f(t) ~ K t^{-theta}. Used as a generic fallback and as a test oracle.
double integrate_survival_tail(const std::function<double(double)>& survival,
                               double x, double cut, double theta,
                               double rel_tol = 1e-10);

} // namespace tailex
