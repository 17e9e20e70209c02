#include "mmwave/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mmwave/quadrature.hpp"

namespace mmwave::orbits {

PotentialLevel::PotentialLevel(double c0_, double beta_) : c0(c0_), beta(beta_) {
    if (!(beta > 0.0)) throw std::domain_error("PotentialLevel: beta must be positive");
    if (!(c0 > 0.0) || !(c0 < saddle_energy()))
        throw std::domain_error("PotentialLevel: c0 outside (0, 1/(6 beta^2))");
}

double potential(double U, double beta) {
    return 0.5 * U * U - beta / 3.0 * U * U * U;
}

double potential_energy(double U, double Uprime, double beta) {
    return 0.5 * Uprime * Uprime + potential(U, beta);
}

TurningPoints turning_points(const PotentialLevel& level) {
    const double beta = level.beta, c0 = level.c0;
    // V(U) = c0 as a monic cubic in U, shifted to depressed form
    // w^3 + p w + q with U = w + 1/(2 beta); three real roots by the
    // trigonometric method, then Newton polish.
    const double arg = std::clamp(1.0 - 12.0 * beta * beta * c0, -1.0, 1.0);
    const double theta = std::acos(arg);
    double roots[3];
    for (int j = 0; j < 3; ++j)
        roots[j] = std::cos((theta - 2.0 * M_PI * j) / 3.0) / beta + 0.5 / beta;
    std::sort(roots, roots + 3);
    for (double& r : roots) {
        for (int it = 0; it < 4; ++it) {
            const double f = potential(r, beta) - c0;
            const double df = r - beta * r * r;
            if (df == 0.0) break;
            r -= f / df;
        }
    }
    return {roots[0], roots[1], roots[2]};
}

double period_of_energy(const PotentialLevel& level) {
    const TurningPoints tp = turning_points(level);
    const double half = 0.5 * (tp.u_max - tp.u_min);
    const double dfar = tp.u_far - tp.u_max;
    const double beta = level.beta;
    // T = 2 \int dU / sqrt(2 (c0 - V(U))) over [u_min, u_max], with the cubic
    // factored through the polished roots so the kernel stays exact near the
    // turning points.  U = mid + half x; the double-exponential rule receives
    // 1 +- x directly, which keeps the kernel well conditioned both at the
    // endpoints and in the near-homoclinic regime u_far -> u_max.
    auto kernel = [&](double p, double q) {
        return 1.0 / std::sqrt(2.0 * beta / 3.0 * (half * p) * (half * q) *
                               (dfar + half * q));
    };
    return 2.0 * half * quad::tanh_sinh(kernel);
}

namespace {

struct State {
    double u, v;
};

State rk4_step(const State& s, double h, double beta) {
    auto acc = [beta](double u) { return -u + beta * u * u; };
    const State k1{s.v, acc(s.u)};
    const State k2{s.v + 0.5 * h * k1.v, acc(s.u + 0.5 * h * k1.u)};
    const State k3{s.v + 0.5 * h * k2.v, acc(s.u + 0.5 * h * k2.u)};
    const State k4{s.v + h * k3.v, acc(s.u + h * k3.u)};
    return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

} // namespace

PeriodicOrbit orbit_from_energy(const PotentialLevel& level, int n_samples) {
    if (n_samples < 64) throw std::invalid_argument("orbit_from_energy: n_samples < 64");
    PeriodicOrbit orbit{level, period_of_energy(level), turning_points(level),
                        false, {}, {}, {}};
    orbit.near_homoclinic =
        (level.saddle_energy() - level.c0) < 1e-6 * level.saddle_energy();

    const int substeps =
        std::max(1, static_cast<int>(std::ceil(8192.0 / n_samples)));
    const double h = orbit.period / (static_cast<double>(n_samples) * substeps);

    orbit.z.resize(n_samples);
    orbit.u.resize(n_samples);
    orbit.uprime.resize(n_samples);
    State s{orbit.turning.u_min, 0.0};
    for (int i = 0; i < n_samples; ++i) {
        orbit.z[i] = i * orbit.period / n_samples;
        orbit.u[i] = s.u;
        orbit.uprime[i] = s.v;
        for (int j = 0; j < substeps; ++j) s = rk4_step(s, h, level.beta);
    }
    return orbit;
}

PeriodicOrbit orbit_for_period(double Tbar, double beta, int n_samples) {
    if (!(Tbar > 2.0 * M_PI))
        throw std::domain_error("orbit_for_period: no orbit with period <= 2 pi");
    const double saddle = 1.0 / (6.0 * beta * beta);
    // Bisection on s = log(1 - c0/saddle): the period decreases monotonically
    // in s, diverging logarithmically at the saddle.  When the energy interval
    // collapses to machine spacing before the period tolerance is met (very
    // long periods), the closest representable level is returned.
    double slo = std::log(1e-16), shi = std::log1p(-1e-12);
    auto period_at = [&](double s) {
        return period_of_energy(PotentialLevel(saddle * (1.0 - std::exp(s)), beta));
    };
    double sbest = 0.5 * (slo + shi);
    for (int it = 0; it < 200 && shi - slo > 1e-15; ++it) {
        sbest = 0.5 * (slo + shi);
        const double T = period_at(sbest);
        if (std::abs(T - Tbar) < 1e-10) break;
        if (T > Tbar)
            slo = sbest;
        else
            shi = sbest;
    }
    return orbit_from_energy(PotentialLevel(saddle * (1.0 - std::exp(sbest)), beta),
                             n_samples);
}

double CnoidalParameters::period() const { return 4.0 * elliptic::complete_K(k) * g; }

double cnoidal_profile(const CnoidalParameters& params, double z) {
    const double cn = elliptic::jacobi(z / params.g, params.k).cn;
    if (1.0 + cn < 1e-10)
        throw std::domain_error("cnoidal_profile: singular at z/g near 2K(k)");
    return params.A * (1.0 - cn) / (1.0 + cn) + params.alpha;
}

CnoidalParameters cnoidal_from_modulus(double beta, double k) {
    if (!(beta > 0.0)) throw std::domain_error("cnoidal_from_modulus: beta <= 0");
    const elliptic::Modulus mod(k);
    const double m2 = 1.0 - 2.0 * k * k;
    const double disc = 4.0 * m2 * m2 - 3.0;
    if (!(disc > 0.0))
        throw std::domain_error("cnoidal_from_modulus: |1 - 2k^2| <= sqrt(3)/2");
    const double g2 = std::sqrt(disc); // g^2
    const double A = 3.0 / (2.0 * beta * g2);
    const double alpha = (1.0 + 2.0 * m2 / g2) / (2.0 * beta);
    return {A, alpha, std::sqrt(g2), mod};
}

HomoclinicPoint homoclinic_profile(double beta, double z) {
    if (!(beta > 0.0)) throw std::domain_error("homoclinic_profile: beta <= 0");
    const double sech = 1.0 / std::cosh(0.5 * z);
    const double tanh = std::tanh(0.5 * z);
    return {1.0 / beta - 1.5 / beta * sech * sech,
            1.5 / beta * sech * sech * tanh};
}

void write_csv(const PeriodicOrbit& orbit, std::ostream& out) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# beta=%.17g\n# c0=%.17g\n# period=%.17g\n",
                  orbit.level.beta, orbit.level.c0, orbit.period);
    out << buf << "z,U,Uprime\n";
    for (std::size_t i = 0; i < orbit.z.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", orbit.z[i],
                      orbit.u[i], orbit.uprime[i]);
        out << buf;
    }
}

} // namespace mmwave::orbits
