#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "gdm/error.hpp"

namespace gdm {

struct LineSearchResult {
    double x = 0.0;
    double fx = 0.0;
    std::size_t evaluations = 0;
};

/// Brent's bounded minimizer (golden section with parabolic steps) on [a, b].
/// Finds a local minimum to within roughly `abs_tol` in x; endpoints are not
/// evaluated.
template <class F>
LineSearchResult brent_minimize(F&& f, double a, double b, double abs_tol = 1e-4,
                                std::size_t max_evaluations = 500) {
    if (!(a <= b)) throw ArgumentError("line search interval must satisfy a <= b");
    if (!(abs_tol > 0.0)) throw ArgumentError("line search tolerance must be positive");
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    LineSearchResult out;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x);
    ++out.evaluations;
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    while (out.evaluations < max_evaluations) {
        const double mid = 0.5 * (a + b);
        const double tol1 = eps * std::abs(x) + abs_tol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) break;

        bool golden_step = true;
        if (std::abs(e) > tol1) {
            // parabola through x, w, v
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < mid) ? tol1 : -tol1;
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x < mid) ? b - x : a - x;
            d = golden * e;
        }

        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        ++out.evaluations;

        if (fu <= fx) {
            if (u < x) b = x;
            else a = x;
            v = w, fv = fw;
            w = x, fw = fx;
            x = u, fx = fu;
        } else {
            if (u < x) a = u;
            else b = u;
            if (fu <= fw || w == x) {
                v = w, fv = fw;
                w = u, fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u, fv = fu;
            }
        }
    }
    out.x = x;
    out.fx = fx;
    return out;
}

}  // namespace gdm
