#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmwave/orbits.hpp"

// Fourier pseudo-spectral collocation for the travelling-frame advance-delay
// equation
//   omega^2 U'' + U - beta U^2 - lambda omega^2 [U''(z-p) + U''(z+p)]
//     + gamma omega U' - Delta cos z = 0
// with Newton iteration and pseudo-arclength branch continuation.

namespace mmwave::wavesolver {

struct ModelParams {
    double beta = 1.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double omega = 0.5;
    double p = 2.0 * M_PI / 20.0;
    double Delta = 0.0;

    void validate() const; // beta > 0, omega > 0, |lambda| < 1/2, p != 0, gamma >= 0
};

// Truncated trigonometric series on period L:
//   U(z) = sum_j A[j] cos(j kt z) + sum_j B[j] sin((j+1) kt z),  kt = 2 pi / L,
// with A.size() == B.size() == J (cosine orders 0..J-1, sine orders 1..J).
struct FourierSolution {
    double L = 2.0 * M_PI;
    std::vector<double> A;
    std::vector<double> B;

    int modes() const { return static_cast<int>(A.size()); }
    double wavenumber() const { return 2.0 * M_PI / L; }
};

struct BranchPoint {
    double param;
    FourierSolution solution;
    double norm;
    std::optional<bool> stable;
};

struct BifurcationBranch {
    std::string parameter_name; // "gamma" or "Delta"
    std::vector<BranchPoint> points;
    std::vector<double> folds;
    bool closed_loop = false;
    bool step_underflow = false;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double residual)
        : std::runtime_error(what), final_residual(residual) {}
    double final_residual;
};

class SingularJacobian : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Series value or term-by-term derivative (order 0, 1 or 2) at z.
double evaluate(const FourierSolution& sol, double z, int derivative = 0);

// Evaluation at z + shift; exact for the truncated series (phase rotation of
// each mode).
double shift_evaluate(const FourierSolution& sol, double z, double shift,
                      int derivative = 0);

// The 2J collocation points: uniform midpoints z_i = -L/2 + (i + 1/2) L/(2J).
// (The half-spacing offset keeps the order-J sine mode visible on the grid.)
std::vector<double> collocation_grid(int J, double L);

// Advance-delay residual at the 2J collocation points.
std::vector<double> residual(const FourierSolution& sol, const ModelParams& params);

// Newton iteration with the analytic Jacobian.  For gamma = 0 the equation is
// reversible and the solve is restricted to the even (cosine) subspace; at
// Delta = 0 this also removes the translation null vector.  Throws
// NonConvergence / SingularJacobian.
FourierSolution newton_solve(const FourierSolution& initial,
                             const ModelParams& params, double tol = 1e-10,
                             int max_iter = 50);

// Single-mode solution of the linearized driven equation: with
// D = 1 - omega^2 + 2 lambda omega^2 cos p the cos z / sin z amplitudes solve
// [D, gamma omega; -gamma omega, D] [C; S] = [Delta; 0].
FourierSolution linear_response_guess(const ModelParams& params, int J = 50);

// Least-squares-free spectral projection of f onto a J-mode series (midpoint
// rule with 8J points); used for seeding Newton from sampled profiles.
template <class F>
FourierSolution fit_series(const F& f, double L, int J) {
    FourierSolution sol;
    sol.L = L;
    sol.A.assign(J, 0.0);
    sol.B.assign(J, 0.0);
    const int M = 8 * J;
    const double kt = 2.0 * M_PI / L;
    for (int m = 0; m < M; ++m) {
        const double z = (m + 0.5) * L / M - 0.5 * L;
        const double fz = f(z);
        for (int j = 0; j < J; ++j) {
            sol.A[j] += fz * std::cos(j * kt * z);
            sol.B[j] += fz * std::sin((j + 1) * kt * z);
        }
    }
    sol.A[0] /= M;
    for (int j = 1; j < J; ++j) sol.A[j] *= 2.0 / M;
    for (int j = 0; j < J; ++j) sol.B[j] *= 2.0 / M;
    return sol;
}

// Seed series U(z) = U0(z / omega) from an unperturbed orbit, on L = omega * Tbar.
FourierSolution orbit_seed(const orbits::PeriodicOrbit& orbit, double omega, int J);

// Exact Parseval norm sqrt(int_0^L U^2 dz).
double solution_norm(const FourierSolution& sol);

enum class ContinuationParameter { Gamma, Delta };

struct StepControl {
    double initial_step = 1e-4;
    double max_step = 1e-2; // arclength cap the accepted step may grow to
    double min_step = 1e-12;
    int max_steps = 2000;
    double newton_tol = 1e-10;
    int max_newton = 25;
    double fold_tol = 1e-6; // parameter resolution of fold localisation
};

// Pseudo-arclength continuation from a converged start solution at the
// parameter value carried in params; the first step is aimed at range_to.
// Folds are detected by parameter-increment sign changes and localised to
// fold_tol; the trace stops when it returns to the start point (closed
// loop), leaves the window [range_from, range_to], or exhausts max_steps.
BifurcationBranch continue_branch(const FourierSolution& start,
                                  const ModelParams& params,
                                  ContinuationParameter parameter,
                                  double range_from, double range_to,
                                  const StepControl& control);

// CSV (param, norm, stable, fold_flag) and JSON round-trip formats.
void write_branch_csv(const BifurcationBranch& branch, std::ostream& out);
void write_branch_json(const BifurcationBranch& branch, const ModelParams& params,
                       std::ostream& out);
void write_solution_json(const FourierSolution& sol, const ModelParams& params,
                         std::ostream& out);
std::pair<FourierSolution, ModelParams> read_solution_json(std::istream& in);

} // namespace mmwave::wavesolver
