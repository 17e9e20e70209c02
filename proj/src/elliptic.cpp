#include "mmwave/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace mmwave::elliptic {

namespace {

constexpr int kMaxIter = 64;

// Carlson symmetric integrals R_F and R_D (duplication iteration), used for
// the incomplete Legendre integrals.
double carlson_rf(double x, double y, double z) {
    const double tol = 1e-14;
    for (int it = 0; it < kMaxIter; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const double mu = (x + y + z) / 3.0;
        const double ex = std::abs(1.0 - x / mu), ey = std::abs(1.0 - y / mu),
                     ez = std::abs(1.0 - z / mu);
        if (std::max({ex, ey, ez}) < tol) {
            const double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
            const double e2 = dx * dy - dz * dz;
            const double e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 / 44.0 * e3) * e2 + e3 / 14.0) /
                   std::sqrt(mu);
        }
    }
    return 1.0 / std::sqrt((x + y + z) / 3.0);
}

double carlson_rd(double x, double y, double z) {
    const double tol = 1e-14;
    double sum = 0.0, fac = 1.0;
    for (int it = 0; it < kMaxIter; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const double mu = (x + y + 3.0 * z) / 5.0;
        const double ex = std::abs(1.0 - x / mu), ey = std::abs(1.0 - y / mu),
                     ez = std::abs(1.0 - z / mu);
        if (std::max({ex, ey, ez}) < tol) {
            const double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
            const double ea = dx * dy, eb = dz * dz, ec = ea - eb,
                         ed = ea - 6.0 * eb, ee = ed + ec + ec;
            return 3.0 * sum +
                   fac *
                       (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed -
                                    9.0 / 52.0 * dz * ee) +
                        dz * (1.0 / 6.0 * ee +
                              dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea))) /
                       (mu * std::sqrt(mu));
        }
    }
    return 3.0 * sum;
}

// F and E restricted to |phi| <= pi/2, via Carlson forms.
double incomplete_F_principal(double phi, const Modulus& k) {
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, 1.0 - k.k2() * s * s, 1.0);
}

double incomplete_E_principal(double phi, const Modulus& k) {
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    const double q = 1.0 - k.k2() * s * s;
    return s * carlson_rf(c * c, q, 1.0) -
           k.k2() / 3.0 * s * s * s * carlson_rd(c * c, q, 1.0);
}

} // namespace

Modulus::Modulus(double k) : k_(k) {
    if (!(k >= 0.0) || k >= 1.0)
        throw std::domain_error("elliptic modulus must satisfy 0 <= k < 1");
}

double Modulus::kc() const { return std::sqrt((1.0 - k_) * (1.0 + k_)); }

double complete_K(Modulus k) {
    double a = 1.0, b = k.kc();
    for (int it = 0; it < kMaxIter && std::abs(a - b) > 1e-16 * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

double complete_E(Modulus k) {
    double a = 1.0, b = k.kc(), c = k.k();
    double csum = 0.5 * c * c; // sum of 2^{n-1} c_n^2, n = 0 term
    double pow2 = 1.0;
    for (int it = 0; it < kMaxIter && std::abs(c) > 1e-17; ++it) {
        const double an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        csum += 0.5 * pow2 * c * c;
    }
    return M_PI / (2.0 * a) * (1.0 - csum);
}

double incomplete_F(double phi, Modulus k) {
    if (!std::isfinite(phi)) throw std::domain_error("incomplete_F: phi not finite");
    const double n = std::floor(phi / M_PI + 0.5);
    const double r = phi - n * M_PI; // |r| <= pi/2
    return 2.0 * n * complete_K(k) + incomplete_F_principal(r, k);
}

double incomplete_E(double phi, Modulus k) {
    if (!std::isfinite(phi)) throw std::domain_error("incomplete_E: phi not finite");
    const double n = std::floor(phi / M_PI + 0.5);
    const double r = phi - n * M_PI;
    return 2.0 * n * complete_E(k) + incomplete_E_principal(r, k);
}

JacobiTriple jacobi(double u, Modulus k) {
    if (!std::isfinite(u)) throw std::domain_error("jacobi: u not finite");
    if (k.k() < 1e-12) return {std::sin(u), std::cos(u), 1.0, u};

    // Descending Landen: AGM scale sequence, then back-recursion on the
    // amplitude (Abramowitz & Stegun 16.4).
    double a[kMaxIter], c[kMaxIter];
    a[0] = 1.0;
    c[0] = k.k();
    double b = k.kc();
    int n = 0;
    while (n < kMaxIter - 1 && std::abs(c[n]) > 1e-16 * a[n]) {
        ++n;
        a[n] = 0.5 * (a[n - 1] + b);
        c[n] = 0.5 * (a[n - 1] - b);
        b = std::sqrt(a[n - 1] * b);
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i >= 1; --i) {
        const double s = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(s));
    }
    JacobiTriple t;
    t.am = phi;
    t.sn = std::sin(phi);
    t.cn = std::cos(phi);
    // dn >= k' > 0 for k < 1, so the identity form is well conditioned
    // everywhere (the cos-ratio back-recursion form is 0/0 at u = K).
    t.dn = std::sqrt(1.0 - k.k2() * t.sn * t.sn);
    return t;
}

double inverse_cn(double x, Modulus k) {
    if (x > 1.0 + 1e-12 || x < -1.0 - 1e-12)
        throw std::domain_error("inverse_cn: argument outside [-1, 1]");
    x = std::clamp(x, -1.0, 1.0);
    return incomplete_F(std::acos(x), k);
}

double conjugate_pair_integral(double alpha, double b1, double a1, double y) {
    if (!(y > alpha)) throw std::domain_error("conjugate_pair_integral: y <= alpha");
    if (a1 == 0.0) throw std::domain_error("conjugate_pair_integral: a1 = 0");
    const double A = std::hypot(b1 - alpha, a1);
    const double g = 1.0 / std::sqrt(A);
    const double k2 = (A + b1 - alpha) / (2.0 * A);
    const double cphi = (A + alpha - y) / (A - alpha + y);
    return g * inverse_cn(cphi, Modulus(std::sqrt(k2)));
}

} // namespace mmwave::elliptic
