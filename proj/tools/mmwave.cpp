// Batch front door for the travelling-wave toolkit: each subcommand
// orchestrates the library modules and writes its artifacts, together with a
// manifest (inputs, git-style content hashes, wall time), into one output
// directory per run.

#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmwave/acceptance.hpp"
#include "mmwave/config.hpp"
#include "mmwave/floquet.hpp"
#include "mmwave/lattice.hpp"
#include "mmwave/melnikov.hpp"
#include "mmwave/orbits.hpp"
#include "mmwave/wavesolver.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace mmwave;

namespace {

// ---------------------------------------------------------------------------
// SHA-1 (FIPS 180-1), used for git-style blob hashes in the manifest:
// sha1("blob <size>\0" + content), matching `git hash-object`.

class Sha1 {
public:
    void update(const unsigned char* data, std::size_t len) {
        total_ += len;
        while (len > 0) {
            const std::size_t take = std::min<std::size_t>(64 - fill_, len);
            std::memcpy(block_ + fill_, data, take);
            fill_ += take;
            data += take;
            len -= take;
            if (fill_ == 64) {
                process();
                fill_ = 0;
            }
        }
    }

    std::string hex_digest() {
        const std::uint64_t bits = total_ * 8;
        const unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0;
        while (fill_ != 56) update(&zero, 1);
        unsigned char len_be[8];
        for (int i = 0; i < 8; ++i)
            len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len_be, 8);
        std::ostringstream out;
        out << std::hex << std::setfill('0');
        for (std::uint32_t word : h_) out << std::setw(8) << word;
        return out.str();
    }

private:
    static std::uint32_t rol(std::uint32_t x, int s) {
        return (x << s) | (x >> (32 - s));
    }

    void process() {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(block_[4 * i]) << 24) |
                   (std::uint32_t(block_[4 * i + 1]) << 16) |
                   (std::uint32_t(block_[4 * i + 2]) << 8) |
                   std::uint32_t(block_[4 * i + 3]);
        for (int i = 16; i < 80; ++i)
            w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = t;
        }
        h_[0] += a;
        h_[1] += b;
        h_[2] += c;
        h_[3] += d;
        h_[4] += e;
    }

    std::uint32_t h_[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                           0xC3D2E1F0u};
    unsigned char block_[64];
    std::size_t fill_ = 0;
    std::uint64_t total_ = 0;
};

std::string git_blob_sha1(const std::string& content) {
    Sha1 h;
    const std::string header = "blob " + std::to_string(content.size());
    h.update(reinterpret_cast<const unsigned char*>(header.data()),
             header.size() + 1); // include the trailing NUL
    h.update(reinterpret_cast<const unsigned char*>(content.data()),
             content.size());
    return h.hex_digest();
}

// ---------------------------------------------------------------------------
// Run context: option storage, config resolution, and artifact bookkeeping.

struct RunContext {
    std::string config_path;
    std::string out_dir = "out";
    long long seed = 12345;
    int threads = 1;

    // Model overrides (applied only when the flag was given).
    double beta = 0, gamma = 0, lambda = 0, omega = 0, p = 0, delta = 0;
    CLI::App* cmd = nullptr;

    config::RunConfig cfg;
    ordered_json artifacts = ordered_json::array();
    fs::path out;

    void resolve() {
        if (!config_path.empty()) {
            cfg = config::parse_config_file(config_path);
        } else {
            cfg = config::RunConfig{};
            cfg.finalize();
        }
        if (cmd->count("--beta")) cfg.model.beta = beta;
        if (cmd->count("--gamma")) cfg.model.gamma = gamma;
        if (cmd->count("--lambda")) cfg.model.lambda = lambda;
        if (cmd->count("--omega")) cfg.model.omega = omega;
        if (cmd->count("--p")) {
            cfg.model.p = p;
            cfg.p_explicit = true;
        }
        if (cmd->count("--delta")) cfg.model.Delta = delta;
        cfg.model.validate();
        if (threads < 1)
            throw std::invalid_argument("--threads must be a positive integer");
        out = out_dir;
        fs::create_directories(out);
    }

    void emit(const std::string& name, const std::string& content) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write artifact: " + name);
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for artifact: " + name);
        artifacts.push_back({{"name", name},
                             {"bytes", content.size()},
                             {"sha1", git_blob_sha1(content)}});
    }

    void write_manifest(const std::string& subcommand, double wall_seconds) {
        ordered_json inputs;
        if (config_path.empty()) {
            inputs["config_file"] = nullptr;
        } else {
            std::ifstream f(config_path, std::ios::binary);
            std::ostringstream raw;
            raw << f.rdbuf();
            inputs["config_file"] = config_path;
            inputs["config_sha1"] = git_blob_sha1(raw.str());
        }
        std::ostringstream resolved;
        config::write_config(cfg, resolved);
        inputs["resolved_config"] = resolved.str();
        inputs["seed"] = seed;
        inputs["threads"] = threads;

        ordered_json m;
        m["tool"] = "mmwave";
        m["subcommand"] = subcommand;
        m["inputs"] = inputs;
        m["artifacts"] = artifacts;
        m["wall_time_seconds"] = wall_seconds;
        std::ofstream f(out / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
    }
};

void add_common_options(CLI::App* cmd, RunContext& ctx) {
    ctx.cmd = cmd;
    cmd->add_option("--config", ctx.config_path, "Run configuration file");
    cmd->add_option("--out", ctx.out_dir, "Output directory (one per run)");
    cmd->add_option("--seed", ctx.seed, "RNG seed for perturbation protocols");
    cmd->add_option("--threads", ctx.threads, "Worker thread budget");
    cmd->add_option("--beta", ctx.beta, "Nonlinearity coefficient");
    cmd->add_option("--gamma", ctx.gamma, "Loss coefficient");
    cmd->add_option("--lambda", ctx.lambda, "Neighbour coupling");
    cmd->add_option("--omega", ctx.omega, "Drive frequency");
    cmd->add_option("--p", ctx.p, "Wavenumber (defaults to 2 pi / N)");
    cmd->add_option("--delta", ctx.delta, "Drive amplitude");
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces.

wavesolver::FourierSolution solve_wave(const config::RunConfig& cfg) {
    const auto& m = cfg.model;
    wavesolver::FourierSolution seed;
    if (cfg.wave.seed == "linear") {
        seed = wavesolver::linear_response_guess(m, cfg.disc.J);
    } else {
        const double Tbar = 2.0 * M_PI * cfg.wave.u / m.omega;
        const auto orbit =
            orbits::orbit_for_period(Tbar, m.beta, cfg.disc.n_samples);
        seed = wavesolver::orbit_seed(orbit, m.omega, cfg.disc.J);
    }
    return wavesolver::newton_solve(seed, m);
}

double residual_inf(const wavesolver::FourierSolution& sol,
                    const wavesolver::ModelParams& m) {
    double worst = 0.0;
    for (double r : wavesolver::residual(sol, m))
        worst = std::max(worst, std::abs(r));
    return worst;
}

template <class F>
std::string capture(const F& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands.

int run_solve(RunContext& ctx) {
    const auto sol = solve_wave(ctx.cfg);
    const double res = residual_inf(sol, ctx.cfg.model);
    ctx.emit("solution.json", capture([&](std::ostream& o) {
                 wavesolver::write_solution_json(sol, ctx.cfg.model, o);
             }));
    ordered_json report;
    report["residual_inf"] = res;
    report["norm"] = wavesolver::solution_norm(sol);
    report["modes"] = sol.modes();
    report["period"] = sol.L;
    ctx.emit("report.json", report.dump(2) + "\n");
    std::cout << "solve: residual_inf = " << std::scientific << res
              << ", norm = " << wavesolver::solution_norm(sol) << '\n';
    return 0;
}

int run_branch(RunContext& ctx) {
    const auto& cc = ctx.cfg.continuation;
    wavesolver::ContinuationParameter param;
    if (cc.parameter == "gamma")
        param = wavesolver::ContinuationParameter::Gamma;
    else if (cc.parameter == "Delta" || cc.parameter == "delta")
        param = wavesolver::ContinuationParameter::Delta;
    else
        throw std::invalid_argument("branch: unknown continuation parameter '" +
                                    cc.parameter + "'");
    const auto start = solve_wave(ctx.cfg);
    wavesolver::StepControl control;
    control.initial_step = cc.step;
    control.max_steps = 4000;
    auto branch = wavesolver::continue_branch(start, ctx.cfg.model, param,
                                              cc.from, cc.to, control);
    if (cc.stability)
        floquet::stability_along_branch(branch, ctx.cfg.model, ctx.cfg.disc.N,
                                        ctx.cfg.disc.dt_steps_per_period);
    ctx.emit("branch.csv", capture([&](std::ostream& o) {
                 wavesolver::write_branch_csv(branch, o);
             }));
    ctx.emit("branch.json", capture([&](std::ostream& o) {
                 wavesolver::write_branch_json(branch, ctx.cfg.model, o);
             }));
    std::cout << "branch: " << branch.points.size() << " points, "
              << branch.folds.size() << " folds"
              << (branch.closed_loop ? ", closed loop" : "") << '\n';
    return 0;
}

int run_floquet(RunContext& ctx) {
    const auto sol = solve_wave(ctx.cfg);
    const auto mono = floquet::monodromy(sol, ctx.cfg.model, ctx.cfg.disc.N,
                                         ctx.cfg.disc.dt_steps_per_period);
    const auto verdict = floquet::classify(mono);
    ctx.emit("multipliers.csv", capture([&](std::ostream& o) {
                 floquet::write_multipliers_csv(mono, o);
             }));
    ctx.emit("verdict.json", capture([&](std::ostream& o) {
                 floquet::write_verdict_json(verdict, o);
             }));
    std::cout << "floquet: max |chi| = " << mono.max_modulus << " ("
              << (verdict.stable ? "stable" : "unstable") << ")\n";
    return 0;
}

int run_melnikov(RunContext& ctx, bool homoclinic_flag) {
    const auto& m = ctx.cfg.model;
    const melnikov::DriveSpec drive{m.Delta};
    const bool homoclinic =
        homoclinic_flag || ctx.cfg.melnikov.mode == "homoclinic";
    double threshold;
    melnikov::MelnikovCurve curve;
    if (homoclinic) {
        threshold =
            melnikov::damping_threshold_homoclinic(m.beta, m.omega, m.Delta);
        curve = melnikov::find_simple_zeros(
            [&](double a) {
                return melnikov::homoclinic_closed(m.beta, m.omega, m.gamma,
                                                   drive, a);
            },
            ctx.cfg.melnikov.grid_size);
    } else {
        const double Tbar = 2.0 * M_PI * ctx.cfg.wave.u / m.omega;
        const melnikov::SubharmonicIndex idx{ctx.cfg.wave.u, Tbar};
        const auto orbit =
            orbits::orbit_for_period(Tbar, m.beta, ctx.cfg.disc.n_samples);
        threshold =
            melnikov::damping_threshold_periodic(orbit, idx, drive).gamma_star;
        curve = melnikov::find_simple_zeros(
            [&](double a) {
                return melnikov::subharmonic_numeric(orbit, idx, m.gamma, drive,
                                                     a);
            },
            ctx.cfg.melnikov.grid_size);
    }
    ctx.emit("curve.csv", capture([&](std::ostream& o) {
                 melnikov::write_curve_csv(curve, o);
             }));
    ctx.emit("summary.json", capture([&](std::ostream& o) {
                 melnikov::write_summary_json(curve, threshold, o);
             }));
    std::cout << "melnikov: " << curve.zeros.size()
              << " simple zeros, damping threshold = " << std::scientific
              << threshold << '\n';
    return 0;
}

int run_simulate(RunContext& ctx) {
    const auto& m = ctx.cfg.model;
    const auto sol = solve_wave(ctx.cfg);
    auto state = lattice::seed_from_wave(sol, m, ctx.cfg.disc.N);
    if (ctx.cfg.simulation.perturb) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(ctx.seed));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int n = 0; n < ctx.cfg.disc.N; ++n)
            state.q[n] *= 1.0 + 1e-8 * unit(rng);
    }
    const auto coupling = floquet::build_mass(ctx.cfg.disc.N, m.lambda);
    const double period = sol.L / m.omega;
    const double dt = period / ctx.cfg.disc.dt_steps_per_period;
    const auto field =
        lattice::simulate(state, m, coupling,
                          ctx.cfg.simulation.duration_periods * period,
                          ctx.cfg.simulation.sample_every, dt);
    ctx.emit("field.csv", capture([&](std::ostream& o) {
                 lattice::write_field_csv(field, o);
             }));
    ctx.emit("field.json", capture([&](std::ostream& o) {
                 lattice::write_field_json(field, m, dt, o);
             }));
    std::cout << "simulate: " << field.times.size() << " frames";
    if (field.blowup)
        std::cout << ", blow-up at t = " << field.blowup->time << " (site "
                  << field.blowup->site << ")";
    std::cout << '\n';
    return 0;
}

int run_verify(RunContext& ctx) {
    std::ostringstream log;
    const auto results = acceptance::run_all(log);
    std::cout << log.str();
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed == 0)
        std::cout << "all criteria passed\n";
    else
        std::cout << failed << " criteria FAILED\n";
    ctx.emit("verify.txt", log.str());
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Travelling-wave toolkit for the damped, driven nonlinear "
                 "magnetic lattice"};
    app.require_subcommand(1);

    RunContext ctx[6];
    auto* solve = app.add_subcommand("solve", "Compute one travelling wave "
                                              "and report its residual");
    auto* branch = app.add_subcommand("branch", "Pseudo-arclength continuation "
                                                "with fold detection");
    auto* floq = app.add_subcommand("floquet", "Floquet multiplier cloud and "
                                               "stability verdict");
    auto* meln = app.add_subcommand("melnikov", "Melnikov curve, simple zeros "
                                                "and damping threshold");
    auto* simu = app.add_subcommand("simulate", "Direct lattice integration "
                                                "with blow-up detection");
    auto* verify = app.add_subcommand("verify", "Run the full verification "
                                                "suite");
    CLI::App* cmds[6] = {solve, branch, floq, meln, simu, verify};
    for (int i = 0; i < 6; ++i) add_common_options(cmds[i], ctx[i]);

    std::string branch_param;
    branch->add_option("--param", branch_param,
                       "Continuation parameter: gamma or Delta");
    bool homoclinic = false;
    meln->add_flag("--homoclinic", homoclinic,
                   "Use the homoclinic Melnikov function");

    CLI11_PARSE(app, argc, argv);

    int which = 0;
    for (int i = 0; i < 6; ++i)
        if (cmds[i]->parsed()) which = i;
    RunContext& c = ctx[which];
    const std::string name = cmds[which]->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    int status = 1;
    try {
        c.resolve();
        if (which == 1 && branch->count("--param"))
            c.cfg.continuation.parameter = branch_param;
        switch (which) {
        case 0: status = run_solve(c); break;
        case 1: status = run_branch(c); break;
        case 2: status = run_floquet(c); break;
        case 3: status = run_melnikov(c, homoclinic); break;
        case 4: status = run_simulate(c); break;
        default: status = run_verify(c); break;
        }
    } catch (const std::exception& e) {
        std::cerr << "mmwave " << name << ": error: " << e.what() << '\n';
        // Retain partial artifacts; mark the run as failed.
        if (!c.out.empty()) {
            std::ofstream marker(c.out / "FAILED");
            marker << e.what() << '\n';
        }
        status = 1;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!c.out.empty() && fs::exists(c.out)) c.write_manifest(name, wall);
    return status;
}
