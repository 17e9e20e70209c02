#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mmwave/wavesolver.hpp"
#include "oracles.hpp"

using namespace mmwave::wavesolver;

namespace {

FourierSolution random_solution(unsigned seed, int J = 6, double L = 2.0 * M_PI) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FourierSolution sol;
    sol.L = L;
    sol.A.resize(J);
    sol.B.resize(J);
    for (int j = 0; j < J; ++j) {
        sol.A[j] = u(rng) / (1.0 + j * j);
        sol.B[j] = u(rng) / (1.0 + j * j);
    }
    return sol;
}

double max_residual(const FourierSolution& sol, const ModelParams& pr) {
    double m = 0.0;
    for (double r : residual(sol, pr)) m = std::max(m, std::abs(r));
    return m;
}

} // namespace

TEST_CASE("series evaluation") {
    FourierSolution zero;
    zero.A.assign(4, 0.0);
    zero.B.assign(4, 0.0);
    for (int d : {0, 1, 2}) CHECK(evaluate(zero, 0.7, d) == 0.0);

    FourierSolution cosz;
    cosz.A.assign(4, 0.0);
    cosz.B.assign(4, 0.0);
    cosz.A[1] = 1.0;
    CHECK(evaluate(cosz, 0.9) == doctest::Approx(std::cos(0.9)).epsilon(1e-15));
    CHECK(evaluate(cosz, 0.9, 2) == doctest::Approx(-std::cos(0.9)).epsilon(1e-15));

    const FourierSolution sol = random_solution(11);
    const double h = 1e-4;
    for (double z : {-2.0, 0.3, 1.9}) {
        const double d1 = (evaluate(sol, z + h) - evaluate(sol, z - h)) / (2.0 * h);
        const double d2 =
            (evaluate(sol, z + h) - 2.0 * evaluate(sol, z) + evaluate(sol, z - h)) /
            (h * h);
        CHECK(evaluate(sol, z, 1) == doctest::Approx(d1).epsilon(1e-6));
        CHECK(evaluate(sol, z, 2) == doctest::Approx(d2).epsilon(1e-6));
    }
    CHECK_THROWS_AS(evaluate(sol, 0.0, 3), std::invalid_argument);
}

TEST_CASE("shifted evaluation is an exact phase rotation") {
    const FourierSolution sol = random_solution(23);
    for (double z : {-1.0, 0.4, 2.7}) {
        CHECK(shift_evaluate(sol, z, 0.0) == evaluate(sol, z));
        CHECK(shift_evaluate(sol, z, sol.L, 2) ==
              doctest::Approx(evaluate(sol, z, 2)).epsilon(1e-12));
        CHECK(shift_evaluate(sol, z, 0.31, 1) ==
              doctest::Approx(evaluate(sol, z + 0.31, 1)).epsilon(1e-13));
    }

    FourierSolution cosz;
    cosz.A.assign(3, 0.0);
    cosz.B.assign(3, 0.0);
    cosz.A[1] = 1.0;
    CHECK(shift_evaluate(cosz, 1.1, 0.5) ==
          doctest::Approx(std::cos(1.6)).epsilon(1e-15));
}

TEST_CASE("collocation grid") {
    const auto z = collocation_grid(8, 2.0 * M_PI);
    REQUIRE(z.size() == 16);
    CHECK(z.front() == doctest::Approx(-M_PI + M_PI / 16.0).epsilon(1e-14));
    CHECK(z.back() < M_PI);
    for (std::size_t i = 1; i < z.size(); ++i)
        CHECK(z[i] - z[i - 1] == doctest::Approx(2.0 * M_PI / 16.0).epsilon(1e-13));
}

TEST_CASE("residual on reference inputs") {
    ModelParams pr;
    pr.omega = 0.5;

    FourierSolution zero;
    zero.L = 2.0 * M_PI;
    zero.A.assign(10, 0.0);
    zero.B.assign(10, 0.0);
    CHECK(max_residual(zero, pr) == 0.0);

    pr.Delta = 0.3;
    const auto r = residual(zero, pr);
    const auto grid = collocation_grid(10, zero.L);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(r[i] == doctest::Approx(-0.3 * std::cos(grid[i])).epsilon(1e-14));

    // travelling orbit profile solves the unperturbed equation
    pr.Delta = 0.0;
    const auto orbit = mmwave::orbits::orbit_for_period(4.0 * M_PI, 1.0, 2048);
    const FourierSolution seed = orbit_seed(orbit, pr.omega, 50);
    CHECK(max_residual(seed, pr) < 1e-8);
}

TEST_CASE("newton solve: unperturbed wave") {
    ModelParams pr;
    pr.omega = 0.5;
    const auto orbit = mmwave::orbits::orbit_for_period(4.0 * M_PI, 1.0, 2048);
    const FourierSolution seed = orbit_seed(orbit, pr.omega, 50);
    const FourierSolution sol = newton_solve(seed, pr);

    CHECK(max_residual(sol, pr) < 1e-10);

    // even subspace: sine coefficients identically zero
    for (double b : sol.B) CHECK(std::abs(b) < 1e-12);

    // coefficient tail decays
    double amax = 0.0;
    for (double a : sol.A) amax = std::max(amax, std::abs(a));
    CHECK(std::abs(sol.A.back()) < 1e-10 * amax);

    // residual holds off the collocation grid too
    double off = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double z = -0.5 * sol.L + (i + 0.37) * sol.L / 200.0;
        const double u = evaluate(sol, z);
        const double r = pr.omega * pr.omega * evaluate(sol, z, 2) + u -
                         pr.beta * u * u -
                         pr.lambda * pr.omega * pr.omega *
                             (shift_evaluate(sol, z, -pr.p, 2) +
                              shift_evaluate(sol, z, pr.p, 2));
        off = std::max(off, std::abs(r));
    }
    CHECK(off < 1e-9);

    // profile against the integrated orbit (frame: z = omega * t)
    double perr = 0.0;
    for (std::size_t i = 0; i < orbit.z.size(); ++i)
        perr = std::max(perr, std::abs(evaluate(sol, pr.omega * orbit.z[i]) -
                                       orbit.u[i]));
    CHECK(perr < 1e-6);

    // spectral consistency when doubling J
    const FourierSolution sol2 = newton_solve(orbit_seed(orbit, pr.omega, 100), pr);
    CHECK(std::abs(solution_norm(sol2) - solution_norm(sol)) < 1e-9);

    // truncation too severe: J=8 cannot meet the tolerance
    CHECK_THROWS_AS(newton_solve(orbit_seed(orbit, pr.omega, 8), pr, 1e-10, 50),
                    std::runtime_error);
}

TEST_CASE("newton solve: driven wave from the linear guess") {
    ModelParams pr;
    pr.omega = 0.5;
    pr.gamma = 0.02;
    pr.lambda = 0.1;
    pr.Delta = 1e-3;
    const FourierSolution guess = linear_response_guess(pr, 30);
    const FourierSolution sol = newton_solve(guess, pr, 1e-12, 5);
    CHECK(max_residual(sol, pr) < 1e-12);
    CHECK(solution_norm(sol) ==
          doctest::Approx(solution_norm(guess)).epsilon(0.05));
}

TEST_CASE("linear response guess") {
    ModelParams pr;
    pr.omega = 2.0;
    pr.Delta = 0.1;
    const FourierSolution g = linear_response_guess(pr, 8);
    CHECK(g.A[1] == doctest::Approx(-1.0 / 30.0).epsilon(1e-14));
    CHECK(g.B[0] == 0.0);

    pr.Delta = 0.05;
    CHECK(linear_response_guess(pr, 8).A[1] ==
          doctest::Approx(-0.5 / 30.0).epsilon(1e-14));

    pr.Delta = 0.0;
    const FourierSolution z = linear_response_guess(pr, 8);
    CHECK(solution_norm(z) == 0.0);

    pr.omega = 1.0; // D = 0 at lambda = gamma = 0: resonant
    pr.Delta = 0.1;
    CHECK_THROWS_AS(linear_response_guess(pr, 8), std::domain_error);
}

TEST_CASE("parseval norm") {
    FourierSolution cosz;
    cosz.A.assign(4, 0.0);
    cosz.B.assign(4, 0.0);
    cosz.A[1] = 1.0;
    CHECK(solution_norm(cosz) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));

    const FourierSolution sol = random_solution(5);
    const double direct = std::sqrt(oracle::romberg(
        [&](double z) { const double u = evaluate(sol, z); return u * u; }, 0.0,
        sol.L, 1e-13));
    CHECK(solution_norm(sol) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("branch continuation: driven branch in Delta") {
    ModelParams pr;
    pr.omega = 0.5;
    pr.lambda = 0.1;
    pr.gamma = 0.0;
    pr.Delta = 0.0;

    FourierSolution start;
    start.L = 2.0 * M_PI;
    start.A.assign(30, 0.0);
    start.B.assign(30, 0.0);

    StepControl ctl;
    ctl.initial_step = 2e-3;
    const BifurcationBranch branch =
        continue_branch(start, pr, ContinuationParameter::Delta, 0.0, 0.01, ctl);
    REQUIRE(branch.points.size() > 3);
    CHECK(branch.parameter_name == "Delta");
    CHECK(branch.folds.empty());

    // monotone norm growth, linear in Delta at leading order
    for (std::size_t i = 1; i < branch.points.size(); ++i) {
        CHECK(branch.points[i].param > branch.points[i - 1].param);
        CHECK(branch.points[i].norm > branch.points[i - 1].norm);
    }
    const auto& last = branch.points.back();
    ModelParams plast = pr;
    plast.Delta = last.param;
    const double amp = solution_norm(linear_response_guess(plast, 30));
    CHECK(last.norm == doctest::Approx(amp).epsilon(0.05));

    // degenerate range: single point
    const BifurcationBranch single =
        continue_branch(start, pr, ContinuationParameter::Delta, 0.0, 0.0, ctl);
    CHECK(single.points.size() == 1);
}

TEST_CASE("branch continuation: gamma loop with folds") {
    ModelParams pr;
    pr.omega = 0.5;
    pr.lambda = 1e-4;
    pr.Delta = 7e-4;
    pr.gamma = 0.0;

    const auto orbit = mmwave::orbits::orbit_for_period(4.0 * M_PI, 1.0, 2048);
    const FourierSolution seed = orbit_seed(orbit, pr.omega, 40);

    StepControl ctl;
    ctl.initial_step = 2e-4;
    ctl.max_steps = 4000;
    const BifurcationBranch branch = continue_branch(
        seed, pr, ContinuationParameter::Gamma, -0.01, 0.01, ctl);

    CHECK(branch.closed_loop);
    REQUIRE(branch.folds.size() == 2);
    const double fpos = std::max(branch.folds[0], branch.folds[1]);
    const double fneg = std::min(branch.folds[0], branch.folds[1]);
    CHECK(fpos > 0.0);
    CHECK(fneg < 0.0);
    // loop symmetry under gamma -> -gamma
    CHECK(fpos == doctest::Approx(-fneg).epsilon(1e-2));

    // order of magnitude of the Melnikov prediction
    const double predicted = 5.0 * M_PI * 0.25 * 7e-4 / std::sinh(0.5 * M_PI);
    CHECK(fpos > 0.5 * predicted);
    CHECK(fpos < 2.0 * predicted);
}

TEST_CASE("exports and round trip") {
    ModelParams pr;
    pr.omega = 0.5;
    pr.Delta = 1e-3;
    pr.gamma = 0.01;
    const FourierSolution sol = newton_solve(linear_response_guess(pr, 12), pr);

    std::stringstream js;
    write_solution_json(sol, pr, js);
    const auto [back, pback] = read_solution_json(js);
    CHECK(back.L == sol.L);
    REQUIRE(back.A.size() == sol.A.size());
    for (std::size_t j = 0; j < sol.A.size(); ++j) {
        CHECK(back.A[j] == sol.A[j]);
        CHECK(back.B[j] == sol.B[j]);
    }
    CHECK(pback.Delta == pr.Delta);
    CHECK(pback.gamma == pr.gamma);

    BifurcationBranch branch;
    branch.parameter_name = "gamma";
    branch.points.push_back({0.0, sol, solution_norm(sol), true});
    branch.points.push_back({1e-3, sol, solution_norm(sol), std::nullopt});
    branch.folds.push_back(1e-3);
    std::ostringstream csv;
    write_branch_csv(branch, csv);
    const std::string c = csv.str();
    CHECK(c.rfind("param,norm,stable,fold_flag", 0) == 0);
    CHECK(c.find(",1,0\n") != std::string::npos);      // stable row, no fold
    CHECK(c.find(",unknown,1\n") != std::string::npos); // fold row

    std::ostringstream bj;
    write_branch_json(branch, pr, bj);
    CHECK(bj.str().find("\"parameter_name\": \"gamma\"") != std::string::npos);
}

TEST_CASE("parameter validation") {
    ModelParams pr;
    pr.lambda = 0.5;
    CHECK_THROWS_AS(pr.validate(), std::domain_error);
    pr.lambda = 0.0;
    pr.omega = 0.0;
    CHECK_THROWS_AS(pr.validate(), std::domain_error);
    pr.omega = 1.0;
    pr.p = 0.0;
    CHECK_THROWS_AS(pr.validate(), std::domain_error);
    pr.p = 0.3;
    pr.gamma = -0.1;
    CHECK_THROWS_AS(pr.validate(), std::domain_error);
}
