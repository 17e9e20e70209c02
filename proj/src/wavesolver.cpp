#include "mmwave/wavesolver.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <Eigen/Dense>
#include <json.hpp>

namespace mmwave::wavesolver {

void ModelParams::validate() const {
    if (!(beta > 0.0)) throw std::domain_error("ModelParams: beta must be positive");
    if (!(omega > 0.0)) throw std::domain_error("ModelParams: omega must be positive");
    if (!(std::abs(lambda) < 0.5))
        throw std::domain_error("ModelParams: coupling must satisfy |lambda| < 1/2");
    if (p == 0.0) throw std::domain_error("ModelParams: p must be nonzero");
    if (gamma < 0.0) throw std::domain_error("ModelParams: gamma must be >= 0");
}

double evaluate(const FourierSolution& sol, double z, int derivative) {
    const double kt = sol.wavenumber();
    double v = 0.0;
    const int J = sol.modes();
    for (int j = 0; j < J; ++j) {
        const double wc = j * kt, ws = (j + 1) * kt;
        switch (derivative) {
        case 0:
            v += sol.A[j] * std::cos(wc * z) + sol.B[j] * std::sin(ws * z);
            break;
        case 1:
            v += -sol.A[j] * wc * std::sin(wc * z) + sol.B[j] * ws * std::cos(ws * z);
            break;
        case 2:
            v += -sol.A[j] * wc * wc * std::cos(wc * z) -
                 sol.B[j] * ws * ws * std::sin(ws * z);
            break;
        default:
            throw std::invalid_argument("evaluate: derivative order must be 0, 1 or 2");
        }
    }
    return v;
}

double shift_evaluate(const FourierSolution& sol, double z, double shift,
                      int derivative) {
    return evaluate(sol, z + shift, derivative);
}

std::vector<double> collocation_grid(int J, double L) {
    std::vector<double> z(2 * J);
    for (int i = 0; i < 2 * J; ++i) z[i] = -0.5 * L + (i + 0.5) * L / (2.0 * J);
    return z;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Collocation system: basis values, the linear part of the advance-delay
// operator, and the parameter derivatives needed for continuation.
struct System {
    int J = 0;
    int n = 0; // unknowns: J (even subspace) or 2J
    bool even = false;
    double L = 0.0;
    std::vector<double> grid;
    MatrixXd val;    // basis values
    MatrixXd d1;     // basis first derivatives
    MatrixXd linear; // gamma- and Delta-independent linear part
    VectorXd drive;  // cos(z_i)
};

System build_system(int J, double L, const ModelParams& pr, bool even) {
    System sys;
    sys.J = J;
    sys.even = even;
    sys.L = L;
    sys.n = even ? J : 2 * J;
    const double kt = 2.0 * M_PI / L;
    if (even) {
        sys.grid.resize(J);
        for (int i = 0; i < J; ++i) sys.grid[i] = (i + 0.5) * L / (2.0 * J);
    } else {
        sys.grid = collocation_grid(J, L);
    }
    const int n = sys.n;
    sys.val.resize(n, n);
    sys.d1.resize(n, n);
    sys.linear.resize(n, n);
    sys.drive.resize(n);
    const double w2 = pr.omega * pr.omega;
    for (int i = 0; i < n; ++i) {
        const double z = sys.grid[i];
        sys.drive(i) = std::cos(z);
        for (int c = 0; c < n; ++c) {
            const bool is_sin = !even && c >= J;
            const double nu = is_sin ? (c - J + 1) * kt : c * kt;
            const double s = std::sin(nu * z), co = std::cos(nu * z);
            const double v = is_sin ? s : co;
            const double v1 = is_sin ? nu * co : -nu * s;
            const double v2 = -nu * nu * v;
            sys.val(i, c) = v;
            sys.d1(i, c) = v1;
            // shifted-sum second derivative: 2 cos(nu p) v2 for either parity
            sys.linear(i, c) =
                w2 * v2 + v - pr.lambda * w2 * 2.0 * std::cos(nu * pr.p) * v2;
        }
    }
    return sys;
}

VectorXd pack(const FourierSolution& sol, bool even) {
    const int J = sol.modes();
    VectorXd x(even ? J : 2 * J);
    for (int j = 0; j < J; ++j) x(j) = sol.A[j];
    if (!even)
        for (int j = 0; j < J; ++j) x(J + j) = sol.B[j];
    return x;
}

FourierSolution unpack(const VectorXd& x, int J, double L, bool even) {
    FourierSolution sol;
    sol.L = L;
    sol.A.assign(J, 0.0);
    sol.B.assign(J, 0.0);
    for (int j = 0; j < J; ++j) sol.A[j] = x(j);
    if (!even)
        for (int j = 0; j < J; ++j) sol.B[j] = x(J + j);
    return sol;
}

VectorXd residual_vec(const System& sys, const ModelParams& pr, const VectorXd& x) {
    const VectorXd U = sys.val * x;
    return sys.linear * x + pr.gamma * pr.omega * (sys.d1 * x) -
           pr.beta * U.cwiseProduct(U) - pr.Delta * sys.drive;
}

MatrixXd jacobian(const System& sys, const ModelParams& pr, const VectorXd& x) {
    const VectorXd U = sys.val * x;
    return sys.linear + pr.gamma * pr.omega * sys.d1 -
           2.0 * pr.beta * U.asDiagonal() * sys.val;
}

VectorXd newton_iterate(const System& sys, const ModelParams& pr, VectorXd x,
                        double tol, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const VectorXd r = residual_vec(sys, pr, x);
        if (r.lpNorm<Eigen::Infinity>() < tol) return x;
        Eigen::FullPivLU<MatrixXd> lu(jacobian(sys, pr, x));
        if (!lu.isInvertible())
            throw SingularJacobian("newton_solve: singular Jacobian (fold?)");
        x -= lu.solve(r);
    }
    const double res = residual_vec(sys, pr, x).lpNorm<Eigen::Infinity>();
    if (res < tol) return x;
    throw NonConvergence("newton_solve: no convergence", res);
}

} // namespace

std::vector<double> residual(const FourierSolution& sol, const ModelParams& params) {
    params.validate();
    const System sys = build_system(sol.modes(), sol.L, params, false);
    const VectorXd r = residual_vec(sys, params, pack(sol, false));
    return {r.data(), r.data() + r.size()};
}

FourierSolution newton_solve(const FourierSolution& initial,
                             const ModelParams& params, double tol, int max_iter) {
    params.validate();
    // With gamma = 0 the equation is reversible in z and the drive cos z is
    // even, so phase-locked solutions are even and the solve can be (and for
    // Delta = 0 must be, to remove the translation null vector) restricted to
    // the cosine subspace.
    const bool even = (params.gamma == 0.0);
    const System sys = build_system(initial.modes(), initial.L, params, even);
    const VectorXd x =
        newton_iterate(sys, params, pack(initial, even), tol, max_iter);
    const FourierSolution sol = unpack(x, initial.modes(), initial.L, even);

    // Collocation drives the residual to zero only at the grid nodes.  Verify
    // the tolerance on a refined off-grid set, so an under-resolved truncation
    // is reported as non-convergence instead of silently returned.
    const double w2 = params.omega * params.omega;
    const int m = 8 * initial.modes();
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        const double z = (i + 0.5) * sol.L / m;
        const double u = evaluate(sol, z);
        const double r =
            w2 * evaluate(sol, z, 2) + u - params.beta * u * u -
            params.lambda * w2 *
                (shift_evaluate(sol, z, -params.p, 2) +
                 shift_evaluate(sol, z, params.p, 2)) +
            params.gamma * params.omega * evaluate(sol, z, 1) -
            params.Delta * std::cos(z);
        worst = std::max(worst, std::abs(r));
    }
    if (worst > tol)
        throw NonConvergence("newton_solve: truncation floor above tolerance",
                             worst);
    return sol;
}

FourierSolution linear_response_guess(const ModelParams& params, int J) {
    params.validate();
    const double w2 = params.omega * params.omega;
    const double D = 1.0 - w2 + 2.0 * params.lambda * w2 * std::cos(params.p);
    const double gw = params.gamma * params.omega;
    const double denom = D * D + gw * gw;
    if (denom < 1e-20)
        throw std::domain_error("linear_response_guess: resonant linear operator");
    FourierSolution sol;
    sol.L = 2.0 * M_PI;
    sol.A.assign(J, 0.0);
    sol.B.assign(J, 0.0);
    sol.A[1] = D * params.Delta / denom;
    sol.B[0] = gw * params.Delta / denom;
    return sol;
}

FourierSolution orbit_seed(const orbits::PeriodicOrbit& orbit, double omega, int J) {
    // U(z) = U0(z / omega) on the frame period L = omega * Tbar.  The frame
    // modes cos(j kt z) pull back to cos(2 pi j t / Tbar) on the orbit's own
    // uniform grid, so the trapezoid projection below is spectrally accurate
    // (no interpolation step).
    const int n = static_cast<int>(orbit.u.size());
    if (n < 4 * J)
        throw std::invalid_argument("orbit_seed: orbit sampling too coarse for J modes");
    FourierSolution sol;
    sol.L = omega * orbit.period;
    sol.A.assign(J, 0.0);
    sol.B.assign(J, 0.0);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        for (int j = 0; j < J; ++j) {
            sol.A[j] += orbit.u[i] * std::cos(j * th);
            sol.B[j] += orbit.u[i] * std::sin((j + 1) * th);
        }
    }
    sol.A[0] /= n;
    for (int j = 1; j < J; ++j) sol.A[j] *= 2.0 / n;
    for (int j = 0; j < J; ++j) sol.B[j] *= 2.0 / n;
    return sol;
}

double solution_norm(const FourierSolution& sol) {
    double s = sol.A[0] * sol.A[0];
    for (int j = 1; j < sol.modes(); ++j) s += 0.5 * sol.A[j] * sol.A[j];
    for (int j = 0; j < sol.modes(); ++j) s += 0.5 * sol.B[j] * sol.B[j];
    return std::sqrt(sol.L * s);
}

namespace {

void set_param(ModelParams& pr, ContinuationParameter which, double mu) {
    if (which == ContinuationParameter::Gamma)
        pr.gamma = mu;
    else
        pr.Delta = mu;
}

// gamma continuation passes through gamma < 0 (the loop is symmetric), so
// continuation bypasses ModelParams::validate()'s gamma >= 0 guard by solving
// with the raw value; the residual itself is well defined for any gamma.
VectorXd param_derivative(const System& sys, const ModelParams& pr,
                          ContinuationParameter which, const VectorXd& x) {
    if (which == ContinuationParameter::Gamma) return pr.omega * (sys.d1 * x);
    return -sys.drive;
}

struct ArcPoint {
    VectorXd x;
    double mu;
};

// One pseudo-arclength corrector step.  Returns nullopt on Newton failure.
std::optional<ArcPoint> arc_step(const System& sys, ModelParams pr,
                                 ContinuationParameter which, const ArcPoint& from,
                                 const VectorXd& tx, double tmu, double ds,
                                 double tol, int max_iter) {
    const int n = sys.n;
    VectorXd x = from.x + ds * tx;
    double mu = from.mu + ds * tmu;
    for (int it = 0; it < max_iter; ++it) {
        set_param(pr, which, mu);
        const VectorXd r = residual_vec(sys, pr, x);
        const double c = tx.dot(x - from.x) + tmu * (mu - from.mu) - ds;
        if (r.lpNorm<Eigen::Infinity>() < tol && std::abs(c) < 1e-12)
            return ArcPoint{x, mu};
        MatrixXd Jb(n + 1, n + 1);
        Jb.topLeftCorner(n, n) = jacobian(sys, pr, x);
        Jb.topRightCorner(n, 1) = param_derivative(sys, pr, which, x);
        Jb.bottomLeftCorner(1, n) = tx.transpose();
        Jb(n, n) = tmu;
        VectorXd rhs(n + 1);
        rhs.head(n) = r;
        rhs(n) = c;
        Eigen::FullPivLU<MatrixXd> lu(Jb);
        if (!lu.isInvertible()) return std::nullopt;
        const VectorXd delta = lu.solve(rhs);
        x -= delta.head(n);
        mu -= delta(n);
        if (!x.allFinite() || !std::isfinite(mu)) return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

BifurcationBranch continue_branch(const FourierSolution& start,
                                  const ModelParams& params,
                                  ContinuationParameter parameter,
                                  double range_from, double range_to,
                                  const StepControl& control) {
    const int J = start.modes();
    BifurcationBranch branch;
    branch.parameter_name =
        parameter == ContinuationParameter::Gamma ? "gamma" : "Delta";

    // The branch starts at the parameter value carried in params;
    // [range_from, range_to] is the tracing window.
    const double mu0 = parameter == ContinuationParameter::Gamma
                           ? params.gamma
                           : params.Delta;
    ModelParams pr = params;
    const System sys = build_system(J, start.L, pr, false);

    auto push = [&](const ArcPoint& pt) {
        FourierSolution sol = unpack(pt.x, J, start.L, false);
        branch.points.push_back({pt.mu, sol, solution_norm(sol), std::nullopt});
    };

    // Start point (re-converged with the full basis).
    ArcPoint cur;
    cur.mu = mu0;
    cur.x = newton_iterate(sys, pr, pack(start, false), control.newton_tol,
                           control.max_newton);
    const ArcPoint start_pt = cur;
    push(cur);
    if (range_from == range_to) return branch;

    // Second point by a natural parameter step towards range_to.
    const double dir = range_to >= mu0 ? 1.0 : -1.0;
    double h = control.initial_step;
    ArcPoint prev = cur;
    for (;; h *= 0.5) {
        if (h < control.min_step) {
            branch.step_underflow = true;
            return branch;
        }
        ModelParams p2 = pr;
        set_param(p2, parameter, mu0 + dir * h);
        try {
            cur.x = newton_iterate(sys, p2, prev.x, control.newton_tol,
                                   control.max_newton);
            cur.mu = mu0 + dir * h;
            break;
        } catch (const std::runtime_error&) {
        }
    }
    push(cur);

    VectorXd tx = cur.x - prev.x;
    double tmu = cur.mu - prev.mu;
    double tnorm = std::sqrt(tx.squaredNorm() + tmu * tmu);
    tx /= tnorm;
    tmu /= tnorm;

    const double lo = std::min(range_from, range_to);
    const double hi = std::max(range_from, range_to);
    double ds = control.initial_step;
    int mu_dir = tmu > 0 ? 1 : -1;

    for (int step = 2; step < control.max_steps; ++step) {
        std::optional<ArcPoint> next;
        while (ds >= control.min_step) {
            next = arc_step(sys, pr, parameter, cur, tx, tmu, ds,
                            control.newton_tol, control.max_newton);
            if (next) break;
            ds *= 0.5;
        }
        if (!next) {
            branch.step_underflow = true;
            break;
        }

        const int new_dir = next->mu > cur.mu ? 1 : (next->mu < cur.mu ? -1 : mu_dir);
        if (new_dir != mu_dir && branch.points.size() > 2) {
            // Fold between cur and next: localise the parameter turning point
            // by stepping with shrinking arclength from the pre-fold point.
            ArcPoint fp = cur;
            VectorXd ftx = tx;
            double ftmu = tmu;
            double fds = ds;
            double extremal = mu_dir > 0 ? std::max(cur.mu, next->mu)
                                         : std::min(cur.mu, next->mu);
            for (int it = 0; it < 200 && fds > control.min_step; ++it) {
                auto trial = arc_step(sys, pr, parameter, fp, ftx, ftmu, fds,
                                      control.newton_tol, control.max_newton);
                if (!trial) {
                    fds *= 0.5;
                    continue;
                }
                const double dmu = trial->mu - fp.mu;
                extremal = mu_dir > 0 ? std::max(extremal, trial->mu)
                                      : std::min(extremal, trial->mu);
                if ((mu_dir > 0 && dmu < 0.0) || (mu_dir < 0 && dmu > 0.0)) {
                    if (std::abs(dmu) < control.fold_tol) break;
                    fds *= 0.5; // overshot the fold: do not accept, shrink
                    continue;
                }
                VectorXd ntx = trial->x - fp.x;
                double ntmu = trial->mu - fp.mu;
                const double nn = std::sqrt(ntx.squaredNorm() + ntmu * ntmu);
                ftx = ntx / nn;
                ftmu = ntmu / nn;
                fp = *trial;
                if (std::abs(dmu) < 0.25 * control.fold_tol) break;
            }
            branch.folds.push_back(extremal);
            if (fp.mu != cur.mu) push(fp); // record the localized fold point
            mu_dir = new_dir;
        }

        prev = cur;
        cur = *next;
        push(cur);

        VectorXd ntx = cur.x - prev.x;
        double ntmu = cur.mu - prev.mu;
        const double nn = std::sqrt(ntx.squaredNorm() + ntmu * ntmu);
        tx = ntx / nn;
        tmu = ntmu / nn;
        ds = std::min(ds * 1.3, control.max_step);

        // Closed-loop detection: back at the start point.
        const double dist = std::sqrt((cur.x - start_pt.x).squaredNorm() +
                                      (cur.mu - start_pt.mu) * (cur.mu - start_pt.mu));
        if (step > 20 && dist < ds) {
            branch.closed_loop = true;
            break;
        }
        if (cur.mu < lo - 10.0 * control.fold_tol ||
            cur.mu > hi + 10.0 * control.fold_tol)
            break;
    }
    return branch;
}

void write_branch_csv(const BifurcationBranch& branch, std::ostream& out) {
    out << "param,norm,stable,fold_flag\n";
    char buf[128];
    for (const auto& pt : branch.points) {
        int fold_flag = 0;
        for (double f : branch.folds)
            if (std::abs(pt.param - f) < 1e-5) fold_flag = 1;
        const char* stable = pt.stable ? (*pt.stable ? "1" : "0") : "unknown";
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%d\n", pt.param, pt.norm,
                      stable, fold_flag);
        out << buf;
    }
}

namespace {

nlohmann::ordered_json params_json(const ModelParams& pr) {
    return {{"beta", pr.beta},   {"gamma", pr.gamma}, {"lambda", pr.lambda},
            {"omega", pr.omega}, {"p", pr.p},         {"Delta", pr.Delta}};
}

nlohmann::ordered_json solution_json(const FourierSolution& sol) {
    return {{"L", sol.L}, {"A", sol.A}, {"B", sol.B}};
}

} // namespace

void write_branch_json(const BifurcationBranch& branch, const ModelParams& params,
                       std::ostream& out) {
    nlohmann::ordered_json j;
    j["parameter_name"] = branch.parameter_name;
    j["params"] = params_json(params);
    j["folds"] = branch.folds;
    j["closed_loop"] = branch.closed_loop;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : branch.points) {
        nlohmann::ordered_json pj = solution_json(pt.solution);
        pj["param"] = pt.param;
        pj["norm"] = pt.norm;
        if (pt.stable) pj["stable"] = *pt.stable;
        j["points"].push_back(std::move(pj));
    }
    out << j.dump(2) << "\n";
}

void write_solution_json(const FourierSolution& sol, const ModelParams& params,
                         std::ostream& out) {
    nlohmann::ordered_json j = solution_json(sol);
    j["params"] = params_json(params);
    out << j.dump(2) << "\n";
}

std::pair<FourierSolution, ModelParams> read_solution_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    FourierSolution sol;
    sol.L = j.at("L").get<double>();
    sol.A = j.at("A").get<std::vector<double>>();
    sol.B = j.at("B").get<std::vector<double>>();
    ModelParams pr;
    const auto& pj = j.at("params");
    pr.beta = pj.at("beta").get<double>();
    pr.gamma = pj.at("gamma").get<double>();
    pr.lambda = pj.at("lambda").get<double>();
    pr.omega = pj.at("omega").get<double>();
    pr.p = pj.at("p").get<double>();
    pr.Delta = pj.at("Delta").get<double>();
    return {sol, pr};
}

} // namespace mmwave::wavesolver
