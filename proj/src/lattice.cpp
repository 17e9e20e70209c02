#include "mmwave/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace mmwave::lattice {

using Eigen::VectorXd;

LatticeState seed_from_wave(const wavesolver::FourierSolution& sol,
                            const wavesolver::ModelParams& params, int N) {
    const double pn = params.p * N / (2.0 * M_PI);
    if (std::abs(pn - std::round(pn)) > 1e-9)
        throw std::domain_error(
            "seed_from_wave: p*N must be a multiple of 2 pi for periodic boundaries");
    LatticeState st;
    st.t = 0.0;
    st.q.resize(N);
    st.qdot.resize(N);
    for (int n = 0; n < N; ++n) {
        st.q(n) = wavesolver::evaluate(sol, n * params.p, 0);
        st.qdot(n) = params.omega * wavesolver::evaluate(sol, n * params.p, 1);
    }
    return st;
}

namespace {

VectorXd acceleration(const VectorXd& q, const VectorXd& qdot, double t,
                      const wavesolver::ModelParams& pr,
                      const floquet::LatticeCoupling& coupling) {
    const int N = static_cast<int>(q.size());
    VectorXd f(N);
    for (int n = 0; n < N; ++n)
        f(n) = -pr.gamma * qdot(n) - q(n) + pr.beta * q(n) * q(n) +
               pr.Delta * std::cos(pr.omega * t + pr.p * n);
    return coupling.mass_inverse * f;
}

} // namespace

LatticeState step(const LatticeState& state, const wavesolver::ModelParams& params,
                  const floquet::LatticeCoupling& coupling, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("step: dt must be positive");
    const double t = state.t;
    const VectorXd k1q = state.qdot;
    const VectorXd k1v = acceleration(state.q, state.qdot, t, params, coupling);
    const VectorXd k2q = state.qdot + 0.5 * dt * k1v;
    const VectorXd k2v = acceleration(state.q + 0.5 * dt * k1q,
                                      state.qdot + 0.5 * dt * k1v, t + 0.5 * dt,
                                      params, coupling);
    const VectorXd k3q = state.qdot + 0.5 * dt * k2v;
    const VectorXd k3v = acceleration(state.q + 0.5 * dt * k2q,
                                      state.qdot + 0.5 * dt * k2v, t + 0.5 * dt,
                                      params, coupling);
    const VectorXd k4q = state.qdot + dt * k3v;
    const VectorXd k4v = acceleration(state.q + dt * k3q, state.qdot + dt * k3v,
                                      t + dt, params, coupling);
    LatticeState next;
    next.t = t + dt;
    next.q = state.q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    next.qdot = state.qdot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    return next;
}

SpaceTimeField simulate(const LatticeState& initial,
                        const wavesolver::ModelParams& params,
                        const floquet::LatticeCoupling& coupling, double duration,
                        int sample_every, double dt) {
    if (duration < 0.0) throw std::domain_error("simulate: duration must be >= 0");
    if (sample_every < 1) throw std::domain_error("simulate: sample_every must be >= 1");
    SpaceTimeField field;
    field.times.push_back(initial.t);
    field.frames.push_back(initial.q);
    if (duration == 0.0) return field;

    LatticeState st = initial;
    const long nsteps = std::lround(std::ceil(duration / dt));
    for (long s = 1; s <= nsteps; ++s) {
        st = step(st, params, coupling, dt);
        int worst = 0;
        double amp = 0.0;
        for (int n = 0; n < st.q.size(); ++n) {
            const double a = std::abs(st.q(n));
            if (!(a <= amp)) { // also catches NaN
                amp = std::isfinite(a) ? a : 1e300;
                worst = n;
            }
        }
        const bool blown = amp > 1e6 || !st.q.allFinite() || !st.qdot.allFinite();
        if (s % sample_every == 0 || s == nsteps || blown) {
            field.times.push_back(st.t);
            field.frames.push_back(st.q);
        }
        if (blown) {
            field.blowup = BlowUp{st.t, worst};
            break;
        }
    }
    return field;
}

double energy(const LatticeState& state, const floquet::LatticeCoupling& coupling,
              double beta) {
    double h = 0.5 * state.qdot.dot(coupling.mass * state.qdot);
    for (int n = 0; n < state.q.size(); ++n)
        h += 0.5 * state.q(n) * state.q(n) -
             beta / 3.0 * state.q(n) * state.q(n) * state.q(n);
    return h;
}

void write_field_csv(const SpaceTimeField& field, std::ostream& out) {
    char buf[64];
    out << "t";
    if (!field.frames.empty())
        for (int n = 0; n < field.frames.front().size(); ++n) out << ",q" << n;
    out << "\n";
    for (std::size_t i = 0; i < field.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", field.times[i]);
        out << buf;
        for (int n = 0; n < field.frames[i].size(); ++n) {
            std::snprintf(buf, sizeof buf, ",%.17g", field.frames[i](n));
            out << buf;
        }
        out << "\n";
    }
}

void write_field_json(const SpaceTimeField& field,
                      const wavesolver::ModelParams& params, double dt,
                      std::ostream& out) {
    nlohmann::ordered_json j;
    j["params"] = {{"beta", params.beta},   {"gamma", params.gamma},
                   {"lambda", params.lambda}, {"omega", params.omega},
                   {"p", params.p},         {"Delta", params.Delta}};
    j["dt"] = dt;
    if (field.blowup)
        j["blowup"] = {{"time", field.blowup->time}, {"site", field.blowup->site}};
    else
        j["blowup"] = nullptr;
    out << j.dump(2) << "\n";
}

} // namespace mmwave::lattice
