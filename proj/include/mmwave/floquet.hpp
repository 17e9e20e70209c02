#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mmwave/wavesolver.hpp"

// Linear stability of travelling waves on a finite periodic lattice: the
// linearized first-order system is integrated over one period from basis
// initial conditions to build the monodromy matrix, whose eigenvalues are the
// Floquet multipliers.

namespace mmwave::floquet {

struct LatticeCoupling {
    int N;
    double lambda;
    Eigen::MatrixXd mass;         // 1 on diagonal, -lambda on cyclic neighbours
    Eigen::MatrixXd mass_inverse; // precomputed dense inverse
};

struct MonodromyResult {
    Eigen::MatrixXd matrix; // 2N x 2N
    std::vector<std::complex<double>> multipliers;
    double max_modulus;
    bool stable;
    double tolerance;
    double log_abs_det; // log |det M|, kept in log form against underflow
    int det_sign;
    double period; // integration period L / omega
};

enum class InstabilityType { None, PeriodDoubling, RealPositive, Complex };

struct StabilityVerdict {
    bool stable;
    int n_outside; // multipliers with |chi| > 1 + tol
    InstabilityType type;
    double max_modulus;
    std::complex<double> dominant;
};

struct StabilitySegment {
    std::size_t first;
    std::size_t last;
    bool stable;
};

// Periodic tridiagonal mass matrix for |lambda| < 1/2 (strictly diagonally
// dominant) and its inverse.
LatticeCoupling build_mass(int N, double lambda);

// Monodromy over one period T = L / omega with fixed-step RK4 (default 2^12
// steps).  Requires p N = 0 (mod 2 pi).  With verify_steps set, the
// integration is repeated at half the step and a max-multiplier drift above
// 1e-6 is an error.
MonodromyResult monodromy(const wavesolver::FourierSolution& sol,
                          const wavesolver::ModelParams& params, int N,
                          int steps = 4096, bool verify_steps = false);

StabilityVerdict classify(const MonodromyResult& result, double tol = 1e-6);

// Fill the stable flag of every branch point; per-point failures are skipped
// without aborting the sweep.  Returns contiguous stability segments.
std::vector<StabilitySegment>
stability_along_branch(wavesolver::BifurcationBranch& branch,
                       const wavesolver::ModelParams& params, int N,
                       int steps = 4096);

// CSV of (Re chi, Im chi, |chi|) per multiplier and a JSON verdict.
void write_multipliers_csv(const MonodromyResult& result, std::ostream& out);
void write_verdict_json(const StabilityVerdict& verdict, std::ostream& out);

} // namespace mmwave::floquet
