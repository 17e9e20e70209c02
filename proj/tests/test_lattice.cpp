#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmwave/lattice.hpp"
#include "mmwave/orbits.hpp"
#include "mmwave/wavesolver.hpp"

using namespace mmwave;
using namespace mmwave::lattice;
using wavesolver::FourierSolution;
using wavesolver::ModelParams;

namespace {

const FourierSolution& reference_wave() {
    static const FourierSolution sol = [] {
        ModelParams pr;
        pr.omega = 0.5;
        const auto orbit = orbits::orbit_for_period(4.0 * M_PI, 1.0, 2048);
        return wavesolver::newton_solve(wavesolver::orbit_seed(orbit, pr.omega, 50),
                                        pr);
    }();
    return sol;
}

FourierSolution zero_wave(int J = 4) {
    FourierSolution sol;
    sol.L = 2.0 * M_PI;
    sol.A.assign(J, 0.0);
    sol.B.assign(J, 0.0);
    return sol;
}

LatticeState advance(LatticeState st, const ModelParams& pr,
                     const floquet::LatticeCoupling& c, double duration, int n) {
    const double dt = duration / n;
    for (int i = 0; i < n; ++i) st = step(st, pr, c, dt);
    return st;
}

} // namespace

TEST_CASE("seed from wave") {
    ModelParams pr;
    CHECK(seed_from_wave(zero_wave(), pr, 20).q.norm() == 0.0);
    CHECK(seed_from_wave(zero_wave(), pr, 20).qdot.norm() == 0.0);

    FourierSolution mode = zero_wave();
    mode.A[1] = 1.0; // U(z) = cos z
    const auto st = seed_from_wave(mode, pr, 20);
    for (int n = 0; n < 20; ++n) {
        CHECK(st.q(n) == doctest::Approx(std::cos(2.0 * M_PI * n / 20.0))
                             .epsilon(1e-14));
        CHECK(st.qdot(n) ==
              doctest::Approx(-pr.omega * std::sin(2.0 * M_PI * n / 20.0))
                  .epsilon(1e-14));
    }

    pr.p = 0.3; // incompatible with N = 20
    CHECK_THROWS_AS(seed_from_wave(mode, pr, 20), std::domain_error);
}

TEST_CASE("step: harmonic site") {
    // beta = gamma = Delta = lambda = 0: each site is an independent harmonic
    // oscillator; one revolution returns (q, qdot) with O(dt^4) global error.
    ModelParams pr;
    pr.beta = 1.0; // beta multiplies q^2 = 0 here only through q != 0 sites
    pr.Delta = 0.0;
    const auto c = floquet::build_mass(3, 0.0);
    LatticeState st;
    st.q = Eigen::Vector3d(1.0, 0.0, 0.0);
    st.qdot = Eigen::Vector3d::Zero();

    ModelParams lin = pr;
    lin.beta = 1.0;
    // keep the site amplitude in the linear regime by scaling down
    st.q(0) = 1e-6;
    const double T = 2.0 * M_PI;
    const auto a1 = advance(st, lin, c, T, 256);
    const auto a2 = advance(st, lin, c, T, 512);
    const double e1 = std::abs(a1.q(0) - st.q(0)) + std::abs(a1.qdot(0));
    const double e2 = std::abs(a2.q(0) - st.q(0)) + std::abs(a2.qdot(0));
    const double order = std::log2(e1 / e2);
    CHECK(e1 < 1e-12);
    CHECK(order > 3.5);
    CHECK(order < 4.5);

    CHECK_THROWS_AS(step(st, lin, c, 0.0), std::domain_error);
    CHECK_THROWS_AS(step(st, lin, c, -0.1), std::domain_error);
}

TEST_CASE("step: damped linear lattice dissipates") {
    ModelParams pr;
    pr.beta = 1.0;
    pr.gamma = 0.1;
    const auto c = floquet::build_mass(5, 0.2);
    LatticeState st;
    st.q = Eigen::VectorXd::Zero(5);
    st.qdot = Eigen::VectorXd::Zero(5);
    st.q(0) = 1e-8; // linear regime: the quadratic term is negligible
    st.q(2) = -5e-9;

    double prev = energy(st, c, 0.0);
    for (int i = 0; i < 200; ++i) {
        st = step(st, pr, c, 0.05);
        const double e = energy(st, c, 0.0);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("energy conservation without loss and drive") {
    ModelParams pr;
    pr.omega = 0.5;
    const auto c = floquet::build_mass(20, 0.0);
    LatticeState st = seed_from_wave(reference_wave(), pr, 20);

    const double T = reference_wave().L / pr.omega;
    const double e0 = energy(st, c, pr.beta);
    const double dt = T / 4096.0;
    for (int period = 0; period < 10; ++period) {
        for (int i = 0; i < 4096; ++i) st = step(st, pr, c, dt);
        CHECK(std::abs(energy(st, c, pr.beta) - e0) < 1e-6 * std::abs(e0));
    }
}

TEST_CASE("travelling-wave consistency") {
    // q_n(t) = U(omega t + n p) for the seeded exact wave.
    ModelParams pr;
    pr.omega = 0.5;
    const auto& sol = reference_wave();
    const auto c = floquet::build_mass(20, 0.0);
    LatticeState st = seed_from_wave(sol, pr, 20);
    const LatticeState init = st;

    const double T = sol.L / pr.omega;
    const double dt = T / 4096.0;
    for (int i = 0; i < 1024; ++i) st = step(st, pr, c, dt); // quarter period
    double err = 0.0;
    for (int n = 0; n < 20; ++n)
        err = std::max(err, std::abs(st.q(n) - wavesolver::evaluate(
                                                   sol, pr.omega * st.t + n * pr.p)));
    CHECK(err < 1e-4);

    for (int i = 0; i < 3072; ++i) st = step(st, pr, c, dt); // full period
    CHECK((st.q - init.q).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK((st.qdot - init.qdot).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("simulate: stable wave and degenerate duration") {
    ModelParams pr;
    pr.omega = 0.5;
    const auto& sol = reference_wave();
    const auto c = floquet::build_mass(20, 0.0);
    const LatticeState init = seed_from_wave(sol, pr, 20);

    const auto still = simulate(init, pr, c, 0.0, 16, 0.01);
    CHECK(still.times.size() == 1);
    CHECK(still.frames.size() == 1);
    CHECK_FALSE(still.blowup.has_value());

    const double T = sol.L / pr.omega;
    const double dt = T / 4096.0;
    const auto field = simulate(init, pr, c, 10.0 * T, 256, dt);
    CHECK_FALSE(field.blowup.has_value());
    for (std::size_t i = 1; i < field.times.size(); ++i)
        CHECK(field.times[i] > field.times[i - 1]);
    for (const auto& f : field.frames) CHECK(f.size() == 20);
    // bounded return error after ten periods
    CHECK((field.frames.back() - init.q).lpNorm<Eigen::Infinity>() < 1e-2);

    CHECK_THROWS_AS(simulate(init, pr, c, -1.0, 16, dt), std::domain_error);
    CHECK_THROWS_AS(simulate(init, pr, c, 1.0, 0, dt), std::domain_error);
}

TEST_CASE("simulate: escape over the potential barrier blows up") {
    // A site released beyond the cubic barrier escapes to infinity in finite
    // time; the run must terminate with the blow-up time and site flagged.
    ModelParams pr;
    pr.beta = 1.0;
    const auto c = floquet::build_mass(3, 0.0);
    LatticeState st;
    st.q = Eigen::Vector3d(3.0, 0.0, 0.0);
    st.qdot = Eigen::Vector3d::Zero();

    const auto field = simulate(st, pr, c, 100.0, 4, 0.001);
    REQUIRE(field.blowup.has_value());
    CHECK(field.blowup->site == 0);
    CHECK(field.blowup->time > 0.0);
    CHECK(field.blowup->time < 20.0);
    CHECK(field.times.back() == field.blowup->time);
}

TEST_CASE("exports") {
    ModelParams pr;
    const auto c = floquet::build_mass(3, 0.0);
    LatticeState st;
    st.q = Eigen::Vector3d(0.1, 0.0, -0.1);
    st.qdot = Eigen::Vector3d::Zero();
    const auto field = simulate(st, pr, c, 0.1, 2, 0.01);

    std::ostringstream csv;
    write_field_csv(field, csv);
    const std::string text = csv.str();
    CHECK(text.rfind("t,q0,q1,q2\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) ==
          field.times.size() + 1);

    std::ostringstream json;
    write_field_json(field, pr, 0.01, json);
    const std::string jtext = json.str();
    CHECK(jtext.find("\"dt\": 0.01") != std::string::npos);
    CHECK(jtext.find("\"blowup\": null") != std::string::npos);

    std::ostringstream jblow;
    LatticeState big;
    big.q = Eigen::Vector3d(3.0, 0.0, 0.0);
    big.qdot = Eigen::Vector3d::Zero();
    write_field_json(simulate(big, pr, c, 100.0, 4, 0.001), pr, 0.001, jblow);
    CHECK(jblow.str().find("\"site\": 0") != std::string::npos);
}
