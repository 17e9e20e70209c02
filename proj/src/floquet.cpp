#include "mmwave/floquet.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace mmwave::floquet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LatticeCoupling build_mass(int N, double lambda) {
    if (N < 3) throw std::domain_error("build_mass: N must be >= 3");
    if (!(std::abs(lambda) < 0.5))
        throw std::domain_error("build_mass: |lambda| must be < 1/2");
    LatticeCoupling c;
    c.N = N;
    c.lambda = lambda;
    c.mass = MatrixXd::Identity(N, N);
    for (int n = 0; n < N; ++n) {
        c.mass(n, (n + 1) % N) = -lambda;
        c.mass(n, (n + N - 1) % N) = -lambda;
    }
    c.mass_inverse = c.mass.partialPivLu().solve(MatrixXd::Identity(N, N));
    return c;
}

namespace {

double log_abs_det(const MatrixXd& m, int& sign) {
    Eigen::PartialPivLU<MatrixXd> lu(m);
    double lad = 0.0;
    sign = lu.permutationP().determinant() > 0 ? 1 : -1;
    for (int i = 0; i < m.rows(); ++i) {
        const double d = lu.matrixLU()(i, i);
        lad += std::log(std::abs(d));
        if (d < 0.0) sign = -sign;
    }
    return lad;
}

// One monodromy integration at the given step count; returns the 2N x 2N map.
MatrixXd integrate_monodromy(const wavesolver::FourierSolution& sol,
                             const wavesolver::ModelParams& pr,
                             const LatticeCoupling& coupling, int steps) {
    const int N = coupling.N;
    const double T = sol.L / pr.omega;
    const double h = T / steps;

    // Wave samples 2 beta U_n(t) - 1 on the half-step grid used by RK4 stages.
    std::vector<VectorXd> coef(2 * steps + 1, VectorXd(N));
    for (int j = 0; j <= 2 * steps; ++j) {
        const double t = 0.5 * j * h;
        for (int n = 0; n < N; ++n)
            coef[j](n) =
                2.0 * pr.beta * wavesolver::evaluate(sol, pr.omega * t + n * pr.p) -
                1.0;
    }

    MatrixXd top = MatrixXd::Identity(2 * N, 2 * N).topRows(N);
    MatrixXd bot = MatrixXd::Identity(2 * N, 2 * N).bottomRows(N);

    auto deriv = [&](const MatrixXd& u, const MatrixXd& v, const VectorXd& c,
                     MatrixXd& du, MatrixXd& dv) {
        du = v;
        dv.noalias() =
            coupling.mass_inverse * (c.asDiagonal() * u - pr.gamma * v);
    };

    MatrixXd k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    for (int s = 0; s < steps; ++s) {
        const VectorXd& c0 = coef[2 * s];
        const VectorXd& cm = coef[2 * s + 1];
        const VectorXd& c1 = coef[2 * s + 2];
        deriv(top, bot, c0, k1u, k1v);
        deriv(top + 0.5 * h * k1u, bot + 0.5 * h * k1v, cm, k2u, k2v);
        deriv(top + 0.5 * h * k2u, bot + 0.5 * h * k2v, cm, k3u, k3v);
        deriv(top + h * k3u, bot + h * k3v, c1, k4u, k4v);
        top += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        bot += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    MatrixXd M(2 * N, 2 * N);
    M.topRows(N) = top;
    M.bottomRows(N) = bot;
    return M;
}

double max_modulus_of(const std::vector<std::complex<double>>& mult) {
    double m = 0.0;
    for (const auto& chi : mult) m = std::max(m, std::abs(chi));
    return m;
}

std::vector<std::complex<double>> eigenvalues(const MatrixXd& M) {
    Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> mult(M.rows());
    for (int i = 0; i < M.rows(); ++i) mult[i] = es.eigenvalues()(i);
    return mult;
}

} // namespace

MonodromyResult monodromy(const wavesolver::FourierSolution& sol,
                          const wavesolver::ModelParams& params, int N,
                          int steps, bool verify_steps) {
    const double pn = params.p * N / (2.0 * M_PI);
    if (std::abs(pn - std::round(pn)) > 1e-9)
        throw std::domain_error(
            "monodromy: p*N must be a multiple of 2 pi for periodic boundaries");
    const LatticeCoupling coupling = build_mass(N, params.lambda);

    MonodromyResult res;
    res.period = sol.L / params.omega;
    res.matrix = integrate_monodromy(sol, params, coupling, steps);
    res.multipliers = eigenvalues(res.matrix);
    res.max_modulus = max_modulus_of(res.multipliers);
    res.tolerance = 1e-6;
    res.stable = res.max_modulus <= 1.0 + res.tolerance;
    res.log_abs_det = log_abs_det(res.matrix, res.det_sign);

    if (verify_steps) {
        const MatrixXd M2 = integrate_monodromy(sol, params, coupling, 2 * steps);
        const double drift = std::abs(max_modulus_of(eigenvalues(M2)) - res.max_modulus);
        if (drift > 1e-6)
            throw std::runtime_error(
                "monodromy: step halving moved the dominant multiplier by > 1e-6");
    }
    return res;
}

StabilityVerdict classify(const MonodromyResult& result, double tol) {
    StabilityVerdict v;
    v.max_modulus = result.max_modulus;
    v.stable = result.max_modulus <= 1.0 + tol;
    v.n_outside = 0;
    v.dominant = {0.0, 0.0};
    for (const auto& chi : result.multipliers) {
        if (std::abs(chi) > 1.0 + tol) ++v.n_outside;
        if (std::abs(chi) > std::abs(v.dominant)) v.dominant = chi;
    }
    if (v.stable) {
        v.type = InstabilityType::None;
    } else if (std::abs(v.dominant.imag()) <=
               1e-3 * std::max(1.0, std::abs(v.dominant))) {
        v.type = v.dominant.real() < 0.0 ? InstabilityType::PeriodDoubling
                                         : InstabilityType::RealPositive;
    } else {
        v.type = InstabilityType::Complex;
    }
    return v;
}

std::vector<StabilitySegment>
stability_along_branch(wavesolver::BifurcationBranch& branch,
                       const wavesolver::ModelParams& params, int N, int steps) {
    for (auto& pt : branch.points) {
        wavesolver::ModelParams pr = params;
        if (branch.parameter_name == "gamma")
            pr.gamma = pt.param;
        else if (branch.parameter_name == "Delta")
            pr.Delta = pt.param;
        try {
            pt.stable = classify(monodromy(pt.solution, pr, N, steps)).stable;
        } catch (const std::exception&) {
            pt.stable.reset();
        }
    }
    std::vector<StabilitySegment> segments;
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        if (!branch.points[i].stable) continue;
        const bool s = *branch.points[i].stable;
        if (!segments.empty() && segments.back().last + 1 == i &&
            segments.back().stable == s)
            segments.back().last = i;
        else
            segments.push_back({i, i, s});
    }
    return segments;
}

void write_multipliers_csv(const MonodromyResult& result, std::ostream& out) {
    out << "re,im,modulus\n";
    char buf[80];
    for (const auto& chi : result.multipliers) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", chi.real(),
                      chi.imag(), std::abs(chi));
        out << buf;
    }
}

void write_verdict_json(const StabilityVerdict& verdict, std::ostream& out) {
    static const char* names[] = {"none", "period_doubling", "real_positive",
                                  "complex"};
    nlohmann::ordered_json j;
    j["max_modulus"] = verdict.max_modulus;
    j["stable"] = verdict.stable;
    j["type"] = names[static_cast<int>(verdict.type)];
    j["n_outside"] = verdict.n_outside;
    out << j.dump(2) << "\n";
}

} // namespace mmwave::floquet
