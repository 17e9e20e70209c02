#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mmwave/orbits.hpp"

// Subharmonic and homoclinic Melnikov functions, simple-zero detection, and
// the damping thresholds below which persistence of the travelling waves is
// predicted.  Each function comes in a closed-form and an independent
// quadrature flavour where both exist.

namespace mmwave::melnikov {

// Travelling drive h(z) = Delta cos z (2 pi periodic, even).
struct DriveSpec {
    double Delta;
};

// Resonance index: orbit period Tbar locked to the 2 pi drive with u
// oscillations (the v = 1 case), omega = 2 pi u / Tbar.
struct SubharmonicIndex {
    int u;
    double Tbar;

    double omega() const;
};

struct SimpleZero {
    double a0;
    int slope_sign; // sign of dM/da at the zero
};

struct MelnikovCurve {
    std::vector<double> phases;
    std::vector<double> values;
    std::vector<SimpleZero> zeros;
};

// Value of the verbatim closed form from the subharmonic analysis, tagged so
// downstream reporting can distinguish it from the quadrature path.
struct VerbatimClosedForm {
    double value;
    bool verbatim_closed_form = true;
};

struct PeriodicThreshold {
    double gamma_star;
    bool small_orbit; // harmonic-limit warning: both terms vanish with the orbit
};

// M^u(a) by spectrally accurate trapezoid quadrature on the orbit samples.
// Requires the sampling to resolve u drive oscillations (n_samples >= 32 u).
double subharmonic_numeric(const orbits::PeriodicOrbit& orbit,
                           const SubharmonicIndex& idx, double gamma,
                           const DriveSpec& drive, double a);

// The closed form with Xi = P / (24 pi^5 u^5 K^5(k)), evaluated exactly as
// printed (E(am(4K,k),k) = 4E(k), cn at the 4K endpoint).  Kept for logging
// against the quadrature path, not for assertions.
VerbatimClosedForm subharmonic_closed(const orbits::CnoidalParameters& params,
                                   const SubharmonicIndex& idx, double gamma,
                                   const DriveSpec& drive, double a);

// M(a) = -6 (gamma + 5 beta pi omega^2 Delta csch(pi omega) sin a) / (5 beta^2).
double homoclinic_closed(double beta, double omega, double gamma,
                         const DriveSpec& drive, double a);

// M(a) = \int (-gamma Gamma' + h(omega z + a)) Gamma' dz by adaptive
// quadrature over a cutoff interval where sech^2 has fully decayed.
double homoclinic_numeric(double beta, double omega, double gamma,
                          const DriveSpec& drive, double a);

// gamma* = 5 beta pi omega^2 Delta csch(pi omega); persistence iff gamma < gamma*.
double damping_threshold_homoclinic(double beta, double omega, double Delta);

// gamma* as |drive-term amplitude| / \int U0'^2 from the numeric Melnikov
// decomposition.  Throws if the drive term vanishes identically.
PeriodicThreshold damping_threshold_periodic(const orbits::PeriodicOrbit& orbit,
                                             const SubharmonicIndex& idx,
                                             const DriveSpec& drive);

// Sample M on a uniform phase grid over [0, 2 pi), bracket sign changes,
// refine by bisection + secant to |M| < 1e-10 and verify simplicity by a
// centered difference.  An empty zero list is a valid outcome.
MelnikovCurve find_simple_zeros(const std::function<double(double)>& M,
                                int grid_size);

void write_curve_csv(const MelnikovCurve& curve, std::ostream& out);
void write_summary_json(const MelnikovCurve& curve, double threshold,
                        std::ostream& out);

} // namespace mmwave::melnikov
