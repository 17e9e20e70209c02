#pragma once

#include <stdexcept>

// Elliptic-function kernel: complete/incomplete Legendre integrals and the
// Jacobi functions sn, cn, dn, am.  All interfaces take the modulus k
// (not the parameter m = k^2).

namespace mmwave::elliptic {

// Real elliptic modulus, 0 <= k < 1.  k -> 1 is rejected as degenerate;
// values very close to 1 are accepted but flagged.
class Modulus {
public:
    explicit Modulus(double k);

    double k() const { return k_; }
    double k2() const { return k_ * k_; }
    // Complementary modulus k' = sqrt(1 - k^2).
    double kc() const;
    bool near_degenerate() const { return k_ > 1.0 - 1e-8; }

private:
    double k_;
};

struct JacobiTriple {
    double sn;
    double cn;
    double dn;
    double am; // Jacobi amplitude, radians
};

// Complete elliptic integral of the first kind, by AGM iteration.
double complete_K(Modulus k);

// Complete elliptic integral of the second kind, by the AGM c-sum.
double complete_E(Modulus k);

// Incomplete integrals F(phi, k) and E(phi, k) for arbitrary real phi,
// extended by quasi-periodicity F(phi+pi) = F(phi) + 2K, E(phi+pi) = E(phi) + 2E.
double incomplete_F(double phi, Modulus k);
double incomplete_E(double phi, Modulus k);

// sn, cn, dn, am at real argument u via the descending Landen (AGM) recursion.
JacobiTriple jacobi(double u, Modulus k);

// Inverse of cn on the monotone branch [0, 2K]: returns u with cn(u, k) = x.
// x is clamped into [-1, 1] within 1e-12 slack; beyond that it is a domain error.
double inverse_cn(double x, Modulus k);

// Integral \int_alpha^y dt / sqrt((t - alpha) ((t - b1)^2 + a1^2)), the
// three-linear-factor reduction with one real root and a complex conjugate
// pair: equals g * cn^{-1}(cos phi, k) with A^2 = (b1-alpha)^2 + a1^2,
// g = 1/sqrt(A), k^2 = (A + b1 - alpha) / (2A),
// cos phi = (A + alpha - y) / (A - alpha + y).
double conjugate_pair_integral(double alpha, double b1, double a1, double y);

} // namespace mmwave::elliptic
