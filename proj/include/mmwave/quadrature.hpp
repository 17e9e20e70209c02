#pragma once

#include <cmath>
#include <cstdlib>

namespace mmwave::quad {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature with Richardson correction.
template <class F>
double adaptive(const F& f, double a, double b, double tol = 1e-12,
                int max_depth = 48) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// Double-exponential (tanh-sinh) rule on (-1, 1), robust to integrable
// endpoint singularities.  The integrand is called as f(p, q) with
// p = 1 + x and q = 1 - x so singular endpoint factors can be formed
// without cancellation.
template <class F>
double tanh_sinh(const F& f, double tol = 1e-13, int max_level = 10) {
    const double tmax = 4.0; // endpoint distances resolved down to ~1e-37
    auto term = [&f](double t) {
        const double u = 0.5 * M_PI * std::sinh(t);
        const double ch = std::cosh(u);
        const double p = 2.0 / (std::exp(-2.0 * u) + 1.0);
        const double q = 2.0 / (std::exp(2.0 * u) + 1.0);
        const double v = 0.5 * M_PI * std::cosh(t) / (ch * ch) * f(p, q);
        return std::isfinite(v) ? v : 0.0;
    };
    double h = 0.5;
    double sum = term(0.0);
    for (long i = 1; i * h <= tmax; ++i) sum += term(i * h) + term(-i * h);
    double integral = h * sum;
    for (int lvl = 1; lvl <= max_level; ++lvl) {
        h *= 0.5;
        double add = 0.0;
        for (long i = 1; i * h <= tmax; i += 2) add += term(i * h) + term(-i * h);
        const double next = 0.5 * integral + h * add;
        const bool done = lvl >= 3 && std::abs(next - integral) <= tol * std::abs(next);
        integral = next;
        if (done) break;
    }
    return integral;
}

// Trapezoid rule on n uniform panels over one period of a periodic integrand;
// spectrally accurate for smooth periodic f.
template <class F>
double periodic_trapezoid(const F& f, double a, double period, int n) {
    double sum = 0.0;
    const double h = period / n;
    for (int i = 0; i < n; ++i) sum += f(a + i * h);
    return sum * h;
}

} // namespace mmwave::quad
