#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mmwave/floquet.hpp"
#include "mmwave/wavesolver.hpp"

// Direct time integration of the full lattice model
//   (d^2/dt^2)(q_n - lambda q_{n-1} - lambda q_{n+1}) + gamma q_n' + q_n
//     - beta q_n^2 - Delta cos(omega t + p n) = 0
// on N sites with periodic boundaries, with blow-up detection.

namespace mmwave::lattice {

struct LatticeState {
    double t = 0.0;
    Eigen::VectorXd q;
    Eigen::VectorXd qdot;
};

struct BlowUp {
    double time;
    int site;
};

struct SpaceTimeField {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> frames;
    std::optional<BlowUp> blowup;
};

// Travelling-wave initial data q_n = U(n p), qdot_n = omega U'(n p) at t = 0.
// Requires p N = 0 (mod 2 pi).
LatticeState seed_from_wave(const wavesolver::FourierSolution& sol,
                            const wavesolver::ModelParams& params, int N);

// One fixed-step RK4 step of the mass-coupled system.  Overflowing states are
// returned as-is (non-finite entries signal blow-up to the caller).
LatticeState step(const LatticeState& state, const wavesolver::ModelParams& params,
                  const floquet::LatticeCoupling& coupling, double dt);

// Advance for `duration`, recording a frame every `sample_every` steps;
// terminates early (flagging time and site) when max |q_n| exceeds 1e6.
SpaceTimeField simulate(const LatticeState& initial,
                        const wavesolver::ModelParams& params,
                        const floquet::LatticeCoupling& coupling, double duration,
                        int sample_every, double dt);

// Conserved energy of the undamped, undriven lattice:
// H = (1/2) qdot^T M qdot + sum(q^2/2 - beta q^3/3).
double energy(const LatticeState& state, const floquet::LatticeCoupling& coupling,
              double beta);

// CSV matrix (rows = time, cols = sites) and JSON metadata.
void write_field_csv(const SpaceTimeField& field, std::ostream& out);
void write_field_json(const SpaceTimeField& field,
                      const wavesolver::ModelParams& params, double dt,
                      std::ostream& out);

} // namespace mmwave::lattice
