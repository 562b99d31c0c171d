#pragma once

// Small adaptive quadrature toolkit for spectral integrals on the line.
// Integrands here are smooth away from 0 and decay either exponentially or like
// a power; callers handle endpoint singularities via substitution before calling.

#include <cmath>
#include <cstddef>
#include <functional>

#include "she/errors.hpp"

namespace she::quad {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                            double b, double fb, double m, double fm, double whole,
                            double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0) {
        throw NumericError(NumericError::Kind::NotConverged,
                           "adaptive quadrature exceeded maximum refinement depth");
    }
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson on [a,b] with absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Integral over [a, +inf) of an eventually exponentially-decaying integrand:
// doubles the window until the marginal panel is negligible.
inline double integrate_to_inf(const std::function<double(double)>& f, double a,
                               double tol = 1e-12, double first_width = 1.0) {
    double total = 0.0;
    double lo = a, width = first_width;
    for (int k = 0; k < 200; ++k) {
        const double hi = lo + width;
        const double piece = integrate(f, lo, hi, tol * 0.25);
        total += piece;
        if (k > 2 && std::fabs(piece) < tol * (1.0 + std::fabs(total))) return total;
        lo = hi;
        width *= 2.0;
    }
    throw NumericError(NumericError::Kind::NotConverged,
                       "half-line quadrature did not converge (integrand decays too slowly)");
}

} // namespace she::quad
