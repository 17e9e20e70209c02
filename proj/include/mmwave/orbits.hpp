#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "mmwave/elliptic.hpp"

// Unperturbed travelling-wave orbits of U'' + U - beta U^2 = 0: first
// integral, turning points, period/profile computation, the cnoidal closed
// form and the homoclinic profile.

namespace mmwave::orbits {

// Energy level of the first integral (1/2)U'^2 + U^2/2 - beta U^3/3 = c0.
// A periodic orbit around the center U = 0 requires 0 < c0 < 1/(6 beta^2).
struct PotentialLevel {
    double c0;
    double beta;

    PotentialLevel(double c0_, double beta_);
    double saddle_energy() const { return 1.0 / (6.0 * beta * beta); }
};

struct TurningPoints {
    double u_min; // left turning point (negative)
    double u_max; // right turning point, in (0, 1/beta)
    double u_far; // third cubic root, beyond the saddle
};

struct PeriodicOrbit {
    PotentialLevel level;
    double period;
    TurningPoints turning;
    bool near_homoclinic = false;
    // Uniform samples over one period, z_i = i * period / n, i = 0..n-1,
    // with the even-phase convention U(0) = u_min, U'(0) = 0 (the phase in
    // which the cnoidal closed form and the homoclinic limit are written).
    std::vector<double> z;
    std::vector<double> u;
    std::vector<double> uprime;
};

// Parameters of the closed-form family U(z) = A (1 - cn(z/g)) / (1 + cn(z/g)) + alpha.
struct CnoidalParameters {
    double A;
    double alpha;
    double g;
    elliptic::Modulus k;

    double period() const; // 4 K(k) g
};

double potential(double U, double beta);                       // V(U)
double potential_energy(double U, double Uprime, double beta); // (1/2)U'^2 + V(U)

// The three real roots of V(U) = c0, Newton-polished to residual <= 1e-12.
TurningPoints turning_points(const PotentialLevel& level);

// Period by turning-point quadrature (double-exponential substitution removes
// the endpoint singularities); profile by fixed-step RK4 from (u_min, 0).
PeriodicOrbit orbit_from_energy(const PotentialLevel& level, int n_samples);

// Period of the orbit at level c0, without building the profile.
double period_of_energy(const PotentialLevel& level);

// Invert the period map T(c0) = Tbar by bisection; requires Tbar > 2 pi.
PeriodicOrbit orbit_for_period(double Tbar, double beta, int n_samples = 1024);

// Closed-form cnoidal evaluation; throws when 1 + cn(z/g) < 1e-10 where the
// formula diverges.
double cnoidal_profile(const CnoidalParameters& params, double z);

// Member of the closed-form family solving U'' + U - beta U^2 = 0 for a given
// modulus k: A = 3/(2 beta g^2), alpha = (1 + 2(1-2k^2)/g^2)/(2 beta),
// g^2 = sqrt(4(1-2k^2)^2 - 3).  Requires |1-2k^2| > sqrt(3)/2.
CnoidalParameters cnoidal_from_modulus(double beta, double k);

struct HomoclinicPoint {
    double value;      // Gamma(z)
    double derivative; // Gamma'(z)
};

// Gamma(z) = 1/beta - (3/(2 beta)) sech^2(z/2), asymptotic to the saddle 1/beta.
HomoclinicPoint homoclinic_profile(double beta, double z);

// CSV export: metadata header lines (beta, c0, period) then z,U,Uprime rows.
void write_csv(const PeriodicOrbit& orbit, std::ostream& out);

} // namespace mmwave::orbits
