#ifndef COULREG_QUADRATURE_HPP
#define COULREG_QUADRATURE_HPP

#include <cmath>
#include <functional>

#include "coulreg/errors.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

/// Adaptive Simpson quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40) {
    struct Impl {
        const std::function<double(double)>& f;
        int max_depth;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Impl{f, max_depth}.run(a, b, fa, fm, fb, whole, tol, 0);
}

/// Integral of a radial function g(|y|) over the ball B(x, R) in R^3,
/// reduced to one dimension by the spherical-cap area formula.
inline double ball_integral_radial(const std::function<double(double)>& g, double center_norm,
                                   double R, double tol = 1e-9) {
    const double rho = center_norm;
    if (R <= 0) throw Error("ball_integral_radial: R > 0 required");
    if (rho == 0.0) {
        return 4.0 * M_PI * integrate([&](double s) { return s * s * g(s); }, 0.0, R, tol);
    }
    double total = 0.0;
    if (R > rho) {
        total += 4.0 * M_PI *
                 integrate([&](double s) { return s * s * g(s); }, 0.0, R - rho, tol);
    }
    const double lo = std::abs(rho - R), hi = rho + R;
    total += (M_PI / rho) *
             integrate([&](double s) { return s * g(s) * (R * R - (rho - s) * (rho - s)); }, lo,
                       hi, tol);
    return total;
}

}  // namespace coulreg

#endif
