#pragma once

#include <iosfwd>
#include <string>

#include "mmwave/wavesolver.hpp"

// Run configuration: flat key = value text grouped by [section] headers.
// Unknown sections or keys are a parse error; module invariants are
// re-validated on load.

namespace mmwave::config {

struct Discretization {
    int J = 50;
    int N = 20;
    int dt_steps_per_period = 4096;
    int n_samples = 1024;
};

struct WaveConfig {
    int u = 1;               // subharmonic index: Tbar = 2 pi u / omega
    std::string seed = "orbit"; // "orbit" or "linear"
};

struct ContinuationConfig {
    std::string parameter = "gamma";
    double from = 0.0;
    double to = 0.01;
    double step = 1e-4;
    bool stability = false;
};

struct MelnikovConfig {
    int grid_size = 256;
    std::string mode = "homoclinic"; // or "subharmonic"
};

struct SimulationConfig {
    double duration_periods = 50.0;
    int sample_every = 64;
    bool perturb = false;
};

struct RunConfig {
    wavesolver::ModelParams model; // beta=1, J=50, N=20 defaults per the model
    Discretization disc;
    WaveConfig wave;
    ContinuationConfig continuation;
    MelnikovConfig melnikov;
    SimulationConfig simulation;
    bool p_explicit = false; // p defaults to 2 pi / N unless given

    void finalize(); // fill derived defaults and validate
};

class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

// Emit in the same format (round-trips through parse_config).
void write_config(const RunConfig& cfg, std::ostream& out);

} // namespace mmwave::config
