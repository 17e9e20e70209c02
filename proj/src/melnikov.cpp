#include "mmwave/melnikov.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "mmwave/quadrature.hpp"

namespace mmwave::melnikov {

double SubharmonicIndex::omega() const { return 2.0 * M_PI * u / Tbar; }

namespace {

// Trapezoid sums over the uniform periodic orbit grid.
double orbit_integral(const orbits::PeriodicOrbit& orbit,
                      const std::function<double(std::size_t)>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < orbit.z.size(); ++i) sum += f(i);
    return sum * orbit.period / static_cast<double>(orbit.z.size());
}

double drive_term(const orbits::PeriodicOrbit& orbit, const SubharmonicIndex& idx,
                  const DriveSpec& drive, double a) {
    // -omega_u \int h'(omega_u z + a) U0(z) dz with h'(x) = -Delta sin x.
    const double w = idx.omega();
    return w * drive.Delta *
           orbit_integral(orbit, [&](std::size_t i) {
               return std::sin(w * orbit.z[i] + a) * orbit.u[i];
           });
}

double damping_integral(const orbits::PeriodicOrbit& orbit) {
    return orbit_integral(orbit, [&](std::size_t i) {
        return orbit.uprime[i] * orbit.uprime[i];
    });
}

} // namespace

double subharmonic_numeric(const orbits::PeriodicOrbit& orbit,
                           const SubharmonicIndex& idx, double gamma,
                           const DriveSpec& drive, double a) {
    if (gamma < 0.0) throw std::domain_error("subharmonic_numeric: gamma < 0");
    if (static_cast<int>(orbit.z.size()) < 32 * idx.u)
        throw std::invalid_argument(
            "subharmonic_numeric: orbit sampling cannot resolve u drive oscillations");
    return -gamma * damping_integral(orbit) + drive_term(orbit, idx, drive, a);
}

VerbatimClosedForm subharmonic_closed(const orbits::CnoidalParameters& params,
                                   const SubharmonicIndex& idx, double gamma,
                                   const DriveSpec& drive, double a) {
    const double k = params.k.k();
    if (k < 1e-12 || params.k.near_degenerate())
        throw std::domain_error("subharmonic_closed: singular as k -> 0 or k -> 1");
    const double K = elliptic::complete_K(params.k);
    const double E4 = 4.0 * elliptic::complete_E(params.k); // E(am(4K,k),k)
    const double cn4K = 1.0;                                // cn(4K) = 1
    const double u = idx.u;

    const double damping =
        4.0 * params.A * params.A / params.g *
        (((-1.0 + 2.0 * k) * E4 - 4.0 * (-1.0 + k) * K) /
         (3.0 * std::pow(1.0 + cn4K, 4) * k));

    // P as printed, including the cos/sin arguments 2 pi u K(k)^2.
    const double K2 = K * K;
    const double piuK = M_PI * M_PI * u * u * K2;
    const double P =
        -(64.0 * M_PI * u * std::cos(2.0 * M_PI * u * K2) * K2 *
              (24.0 - 48.0 * k + piuK * (-3.0 + 16.0 * (-1.0 + 2.0 * k) * K2)) +
          32.0 *
              (-24.0 + 48.0 * k +
               piuK * (3.0 + K2 * (48.0 - 96.0 * k +
                                   2.0 * piuK * (-3.0 + 8.0 * (-1.0 + 2.0 * k) * K2)))) *
              std::sin(2.0 * M_PI * u * K2));
    const double Xi = P / (24.0 * std::pow(M_PI, 5) * std::pow(u, 5) *
                           std::pow(K, 5));

    return {-gamma * damping +
            params.A * M_PI * u / (2.0 * K) * Xi * drive.Delta * std::sin(a)};
}

double homoclinic_closed(double beta, double omega, double gamma,
                         const DriveSpec& drive, double a) {
    if (!(beta > 0.0) || !(omega > 0.0))
        throw std::domain_error("homoclinic_closed: beta and omega must be positive");
    return -6.0 *
           (gamma + 5.0 * beta * M_PI * omega * omega * drive.Delta /
                        std::sinh(M_PI * omega) * std::sin(a)) /
           (5.0 * beta * beta);
}

double homoclinic_numeric(double beta, double omega, double gamma,
                          const DriveSpec& drive, double a) {
    if (!(beta > 0.0) || !(omega > 0.0))
        throw std::domain_error("homoclinic_numeric: beta and omega must be positive");
    // Cutoff where sech^2(Z/2) < 1e-16, with safety margin.
    const double Z = 2.0 * std::acosh(1.0 / std::sqrt(1e-16)) * 1.25;
    auto integrand = [&](double z) {
        const auto g = orbits::homoclinic_profile(beta, z);
        return (-gamma * g.derivative +
                drive.Delta * std::cos(omega * z + a)) *
               g.derivative;
    };
    const double scale =
        (std::abs(gamma) + std::abs(drive.Delta) + 1.0) / (beta * beta);
    // Panelled so the localized Gamma' bump cannot fall between the initial
    // Simpson samples (the integrand vanishes at z = 0 and in both tails).
    const double cuts[] = {-Z, -24.0, -12.0, -6.0, -3.0, -1.0, 0.0,
                           1.0, 3.0,  6.0,   12.0, 24.0, Z};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i)
        total += quad::adaptive(integrand, cuts[i], cuts[i + 1], 1e-13 * scale);
    return total;
}

double damping_threshold_homoclinic(double beta, double omega, double Delta) {
    if (!(beta > 0.0) || !(omega > 0.0) || Delta < 0.0)
        throw std::domain_error("damping_threshold_homoclinic: invalid parameters");
    return 5.0 * beta * M_PI * omega * omega * Delta / std::sinh(M_PI * omega);
}

PeriodicThreshold damping_threshold_periodic(const orbits::PeriodicOrbit& orbit,
                                             const SubharmonicIndex& idx,
                                             const DriveSpec& drive) {
    if (!(drive.Delta > 0.0))
        throw std::domain_error("damping_threshold_periodic: Delta must be positive");
    const double D = damping_integral(orbit);
    const double tc = drive_term(orbit, idx, drive, 0.0);
    const double ts = drive_term(orbit, idx, drive, 0.5 * M_PI);
    const double amp = std::hypot(tc, ts);
    if (amp < 1e-14 * drive.Delta)
        throw std::domain_error(
            "damping_threshold_periodic: drive term vanishes (non-resonant index)");
    return {amp / D, D < 1e-6};
}

MelnikovCurve find_simple_zeros(const std::function<double(double)>& M,
                                int grid_size) {
    if (grid_size < 32) throw std::invalid_argument("find_simple_zeros: grid_size < 32");
    MelnikovCurve curve;
    curve.phases.resize(grid_size);
    curve.values.resize(grid_size);
    double scale = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        curve.phases[i] = 2.0 * M_PI * i / grid_size;
        curve.values[i] = M(curve.phases[i]);
        scale = std::max(scale, std::abs(curve.values[i]));
    }
    if (scale == 0.0) return curve; // identically sampled zero: no simple zeros

    auto refine = [&](double lo, double hi) {
        double flo = M(lo);
        for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = M(mid);
            if ((flo <= 0.0) == (fm <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        // Secant polish from the bracket midpoint.
        double x0 = lo, x1 = hi, f0 = M(x0), f1 = M(x1);
        for (int it = 0; it < 8 && std::abs(f1) > 1e-14 && f1 != f0; ++it) {
            const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = M(x1);
        }
        return x1;
    };

    auto record = [&](double a0) {
        if (std::abs(M(a0)) >= 1e-10) return;
        const double h = 1e-5;
        const double d = (M(a0 + h) - M(a0 - h)) / (2.0 * h);
        if (std::abs(d) <= 1e-8) return; // not simple
        a0 = std::fmod(a0 + 2.0 * M_PI, 2.0 * M_PI);
        for (const auto& z : curve.zeros)
            if (std::abs(z.a0 - a0) < 1e-8 ||
                std::abs(std::abs(z.a0 - a0) - 2.0 * M_PI) < 1e-8)
                return;
        curve.zeros.push_back({a0, d > 0.0 ? 1 : -1});
    };

    for (int i = 0; i < grid_size; ++i) {
        const double vi = curve.values[i];
        const double vj = curve.values[(i + 1) % grid_size];
        const double ai = curve.phases[i];
        const double aj = ai + 2.0 * M_PI / grid_size;
        if (std::abs(vi) < 1e-13 * scale)
            record(ai);
        else if (vi * vj < 0.0)
            record(refine(ai, aj));
    }
    return curve;
}

void write_curve_csv(const MelnikovCurve& curve, std::ostream& out) {
    out << "a,M\n";
    char buf[80];
    for (std::size_t i = 0; i < curve.phases.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.phases[i],
                      curve.values[i]);
        out << buf;
    }
}

void write_summary_json(const MelnikovCurve& curve, double threshold,
                        std::ostream& out) {
    nlohmann::ordered_json j;
    j["zeros"] = nlohmann::ordered_json::array();
    for (const auto& z : curve.zeros)
        j["zeros"].push_back({{"a0", z.a0}, {"slope_sign", z.slope_sign}});
    j["threshold"] = threshold;
    j["persistence_predicted"] = !curve.zeros.empty();
    out << j.dump(2) << "\n";
}

} // namespace mmwave::melnikov
