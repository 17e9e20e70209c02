#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mmwave/config.hpp"

using namespace mmwave::config;

namespace {

RunConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

} // namespace

TEST_CASE("empty input yields all defaults") {
    const RunConfig cfg = parse_text("");
    CHECK(cfg.model.beta == 1.0);
    CHECK(cfg.model.gamma == 0.0);
    CHECK(cfg.model.lambda == 0.0);
    CHECK(cfg.model.omega == 0.5);
    CHECK(cfg.model.Delta == 0.0);
    CHECK(cfg.disc.J == 50);
    CHECK(cfg.disc.N == 20);
    CHECK(cfg.disc.dt_steps_per_period == 4096);
    CHECK(cfg.wave.u == 1);
    CHECK(cfg.wave.seed == "orbit");
    CHECK(cfg.continuation.parameter == "gamma");
    CHECK(cfg.melnikov.mode == "homoclinic");
    CHECK(cfg.simulation.duration_periods == 50.0);
    // p defaults to the smallest lattice-compatible wavenumber 2 pi / N
    CHECK(cfg.model.p == doctest::Approx(2.0 * M_PI / 20.0).epsilon(1e-15));
}

TEST_CASE("values, comments and whitespace") {
    const RunConfig cfg = parse_text(
        "# leading comment\n"
        "[model]\n"
        "  beta = 2.5\n"
        "gamma=0.01\n"
        "Delta = 7e-4\n"
        "\n"
        "[discretization]\n"
        "N = 10\n"
        "[continuation]\n"
        "parameter = Delta\n"
        "to = 0.5\n"
        "stability = true\n");
    CHECK(cfg.model.beta == 2.5);
    CHECK(cfg.model.gamma == 0.01);
    CHECK(cfg.model.Delta == 7e-4);
    CHECK(cfg.disc.N == 10);
    CHECK(cfg.model.p == doctest::Approx(2.0 * M_PI / 10.0).epsilon(1e-15));
    CHECK(cfg.continuation.parameter == "Delta");
    CHECK(cfg.continuation.to == 0.5);
    CHECK(cfg.continuation.stability);
}

TEST_CASE("explicit p wins over the N default") {
    const RunConfig cfg = parse_text("[model]\np = 0.62831853071795865\n"
                                     "[discretization]\nN = 10\n");
    CHECK(cfg.p_explicit);
    CHECK(cfg.model.p == doctest::Approx(0.62831853071795865).epsilon(1e-15));
}

TEST_CASE("diagnostics carry the offending line and key") {
    // unknown key
    CHECK_THROWS_WITH_AS(parse_text("[model]\nbta = 1\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse_text("[model]\nbta = 1\n"),
                         doctest::Contains("bta"), ParseError);
    // unknown section
    CHECK_THROWS_WITH_AS(parse_text("[mdoel]\n"), doctest::Contains("mdoel"),
                         ParseError);
    // malformed constructs
    CHECK_THROWS_AS(parse_text("[model\n"), ParseError);
    CHECK_THROWS_AS(parse_text("beta = 1\n"), ParseError); // outside a section
    CHECK_THROWS_AS(parse_text("[model]\nbeta\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[model]\nbeta = fast\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[model]\nbeta = 1.0x\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[discretization]\nJ = 2.5\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[continuation]\nstability = maybe\n"), ParseError);
}

TEST_CASE("validation re-checks module invariants") {
    CHECK_THROWS_WITH_AS(parse_text("[model]\nlambda = 0.6\n"),
                         doctest::Contains("lambda"), ParseError);
    CHECK_THROWS_AS(parse_text("[model]\nbeta = -1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[model]\nomega = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[model]\ngamma = -0.1\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[discretization]\nN = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[discretization]\nJ = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[wave]\nu = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[wave]\nseed = random\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[continuation]\nparameter = mu\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[continuation]\nstep = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[melnikov]\ngrid_size = 8\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[melnikov]\nmode = both\n"), ParseError);
    CHECK_THROWS_AS(parse_text("[simulation]\nsample_every = 0\n"), ParseError);
}

TEST_CASE("round trip: emit defaults, re-parse, structural equality") {
    RunConfig cfg;
    cfg.model.gamma = 0.0123456789012345678;
    cfg.model.Delta = 7e-4;
    cfg.continuation.parameter = "Delta";
    cfg.continuation.to = 0.25;
    cfg.melnikov.grid_size = 512;
    cfg.simulation.perturb = true;
    cfg.finalize();

    std::ostringstream out;
    write_config(cfg, out);
    const RunConfig back = parse_text(out.str());

    CHECK(back.model.beta == cfg.model.beta);
    CHECK(back.model.gamma == cfg.model.gamma);
    CHECK(back.model.lambda == cfg.model.lambda);
    CHECK(back.model.omega == cfg.model.omega);
    CHECK(back.model.p == cfg.model.p);
    CHECK(back.model.Delta == cfg.model.Delta);
    CHECK(back.disc.J == cfg.disc.J);
    CHECK(back.disc.N == cfg.disc.N);
    CHECK(back.disc.dt_steps_per_period == cfg.disc.dt_steps_per_period);
    CHECK(back.disc.n_samples == cfg.disc.n_samples);
    CHECK(back.wave.u == cfg.wave.u);
    CHECK(back.wave.seed == cfg.wave.seed);
    CHECK(back.continuation.parameter == cfg.continuation.parameter);
    CHECK(back.continuation.from == cfg.continuation.from);
    CHECK(back.continuation.to == cfg.continuation.to);
    CHECK(back.continuation.step == cfg.continuation.step);
    CHECK(back.continuation.stability == cfg.continuation.stability);
    CHECK(back.melnikov.grid_size == cfg.melnikov.grid_size);
    CHECK(back.melnikov.mode == cfg.melnikov.mode);
    CHECK(back.simulation.duration_periods == cfg.simulation.duration_periods);
    CHECK(back.simulation.sample_every == cfg.simulation.sample_every);
    CHECK(back.simulation.perturb == cfg.simulation.perturb);
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path/cfg.txt"), ParseError);
}
