#include "mmwave/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mmwave::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return d;
}

int to_int(const std::string& v, int line) {
    const double d = to_double(v, line);
    const int i = static_cast<int>(d);
    if (d != i) fail(line, "expected an integer, got '" + v + "'");
    return i;
}

bool to_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line, "expected a boolean, got '" + v + "'");
}

} // namespace

void RunConfig::finalize() {
    if (!p_explicit) model.p = 2.0 * M_PI / disc.N;
    try {
        model.validate();
    } catch (const std::domain_error& e) {
        throw ParseError(std::string("config validation: ") + e.what());
    }
    if (disc.J < 1 || disc.N < 3 || disc.dt_steps_per_period < 16 ||
        disc.n_samples < 64)
        throw ParseError("config validation: discretization out of range "
                         "(J >= 1, N >= 3, dt_steps_per_period >= 16, n_samples >= 64)");
    if (wave.u < 1) throw ParseError("config validation: wave u must be >= 1");
    if (wave.seed != "orbit" && wave.seed != "linear")
        throw ParseError("config validation: wave seed must be 'orbit' or 'linear'");
    if (continuation.parameter != "gamma" && continuation.parameter != "Delta")
        throw ParseError("config validation: continuation parameter must be "
                         "'gamma' or 'Delta'");
    if (!(continuation.step > 0.0))
        throw ParseError("config validation: continuation step must be positive");
    if (melnikov.grid_size < 32)
        throw ParseError("config validation: melnikov grid_size must be >= 32");
    if (melnikov.mode != "homoclinic" && melnikov.mode != "subharmonic")
        throw ParseError("config validation: melnikov mode must be "
                         "'homoclinic' or 'subharmonic'");
    if (simulation.duration_periods < 0.0 || simulation.sample_every < 1)
        throw ParseError("config validation: simulation block out of range");
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string section, raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "discretization" &&
                section != "wave" && section != "continuation" &&
                section != "melnikov" && section != "simulation")
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) fail(lineno, "key '" + key + "' outside any section");

        if (section == "model") {
            if (key == "beta") cfg.model.beta = to_double(val, lineno);
            else if (key == "gamma") cfg.model.gamma = to_double(val, lineno);
            else if (key == "lambda") cfg.model.lambda = to_double(val, lineno);
            else if (key == "omega") cfg.model.omega = to_double(val, lineno);
            else if (key == "p") { cfg.model.p = to_double(val, lineno); cfg.p_explicit = true; }
            else if (key == "Delta" || key == "delta") cfg.model.Delta = to_double(val, lineno);
            else fail(lineno, "unknown key '" + key + "' in [model]");
        } else if (section == "discretization") {
            if (key == "J") cfg.disc.J = to_int(val, lineno);
            else if (key == "N") cfg.disc.N = to_int(val, lineno);
            else if (key == "dt_steps_per_period") cfg.disc.dt_steps_per_period = to_int(val, lineno);
            else if (key == "n_samples") cfg.disc.n_samples = to_int(val, lineno);
            else fail(lineno, "unknown key '" + key + "' in [discretization]");
        } else if (section == "wave") {
            if (key == "u") cfg.wave.u = to_int(val, lineno);
            else if (key == "seed") cfg.wave.seed = val;
            else fail(lineno, "unknown key '" + key + "' in [wave]");
        } else if (section == "continuation") {
            if (key == "parameter") cfg.continuation.parameter = val;
            else if (key == "from") cfg.continuation.from = to_double(val, lineno);
            else if (key == "to") cfg.continuation.to = to_double(val, lineno);
            else if (key == "step") cfg.continuation.step = to_double(val, lineno);
            else if (key == "stability") cfg.continuation.stability = to_bool(val, lineno);
            else fail(lineno, "unknown key '" + key + "' in [continuation]");
        } else if (section == "melnikov") {
            if (key == "grid_size") cfg.melnikov.grid_size = to_int(val, lineno);
            else if (key == "mode") cfg.melnikov.mode = val;
            else fail(lineno, "unknown key '" + key + "' in [melnikov]");
        } else { // simulation
            if (key == "duration_periods") cfg.simulation.duration_periods = to_double(val, lineno);
            else if (key == "sample_every") cfg.simulation.sample_every = to_int(val, lineno);
            else if (key == "perturb") cfg.simulation.perturb = to_bool(val, lineno);
            else fail(lineno, "unknown key '" + key + "' in [simulation]");
        }
    }
    cfg.finalize();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void write_config(const RunConfig& cfg, std::ostream& out) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "[model]\n"
                  "beta = %.17g\ngamma = %.17g\nlambda = %.17g\n"
                  "omega = %.17g\np = %.17g\nDelta = %.17g\n\n"
                  "[discretization]\n"
                  "J = %d\nN = %d\ndt_steps_per_period = %d\nn_samples = %d\n\n",
                  cfg.model.beta, cfg.model.gamma, cfg.model.lambda,
                  cfg.model.omega, cfg.model.p, cfg.model.Delta, cfg.disc.J,
                  cfg.disc.N, cfg.disc.dt_steps_per_period, cfg.disc.n_samples);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "[wave]\nu = %d\nseed = %s\n\n"
                  "[continuation]\n"
                  "parameter = %s\nfrom = %.17g\nto = %.17g\nstep = %.17g\n"
                  "stability = %s\n\n"
                  "[melnikov]\ngrid_size = %d\nmode = %s\n\n"
                  "[simulation]\n"
                  "duration_periods = %.17g\nsample_every = %d\nperturb = %s\n",
                  cfg.wave.u, cfg.wave.seed.c_str(),
                  cfg.continuation.parameter.c_str(), cfg.continuation.from,
                  cfg.continuation.to, cfg.continuation.step,
                  cfg.continuation.stability ? "true" : "false",
                  cfg.melnikov.grid_size, cfg.melnikov.mode.c_str(),
                  cfg.simulation.duration_periods, cfg.simulation.sample_every,
                  cfg.simulation.perturb ? "true" : "false");
    out << buf;
}

} // namespace mmwave::config
