#include "lfk/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lfk {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& text, int line, const std::string& key) {
    try {
        std::size_t idx = 0;
        double v = std::stod(text, &idx);
        while (idx < text.size() && std::isspace(static_cast<unsigned char>(text[idx]))) ++idx;
        if (idx != text.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        fail(line, "invalid number for '" + key + "': " + text);
    }
}

long parse_int(const std::string& text, int line, const std::string& key) {
    double v = parse_real(text, line, key);
    if (v != std::floor(v)) fail(line, "'" + key + "' must be an integer");
    return static_cast<long>(v);
}

// initial_condition value: name(arg[, arg]) with name in
// {gaussian, constant, indicator}.
InitialCondition parse_ic(const std::string& text, int line) {
    std::size_t open = text.find('(');
    std::size_t close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open ||
        trim(text.substr(close + 1)) != "")
        fail(line, "initial_condition must look like gaussian(mass, width), "
                   "constant(c) or indicator(mass, half_width)");
    std::string name = trim(text.substr(0, open));
    std::string inner = text.substr(open + 1, close - open - 1);
    std::vector<double> args;
    std::stringstream ss(inner);
    std::string piece;
    while (std::getline(ss, piece, ','))
        args.push_back(parse_real(trim(piece), line, "initial_condition"));

    InitialCondition ic;
    if (name == "gaussian") {
        if (args.size() != 2) fail(line, "gaussian takes (mass, width)");
        ic.kind = InitialCondition::Kind::gaussian;
    } else if (name == "constant") {
        if (args.size() != 1) fail(line, "constant takes (c)");
        ic.kind = InitialCondition::Kind::constant;
        args.push_back(0.0);
    } else if (name == "indicator") {
        if (args.size() != 2) fail(line, "indicator takes (mass, half_width)");
        ic.kind = InitialCondition::Kind::indicator;
    } else {
        fail(line, "unknown initial condition '" + name + "'");
    }
    ic.a = args[0];
    ic.b = args[1];
    if (!(ic.a > 0.0))
        fail(line, "initial condition amplitude/mass must be positive");
    if (ic.kind != InitialCondition::Kind::constant && !(ic.b > 0.0))
        fail(line, "initial condition width must be positive");
    return ic;
}

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream lines(text);
    std::string raw;
    int line = 0;
    while (std::getline(lines, raw)) {
        ++line;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        std::size_t eq = raw.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        std::string key = trim(raw.substr(0, eq));
        std::string value = trim(raw.substr(eq + 1));
        if (key.empty()) fail(line, "expected 'key = value'");
        if (value.empty()) fail(line, "missing value for '" + key + "'");
        if (!seen.insert(key).second) fail(line, "duplicate key '" + key + "'");

        if (key == "alpha") {
            cfg.alpha = parse_real(value, line, key);
            if (!(cfg.alpha > 0.0 && cfg.alpha <= 2.0))
                fail(line, "alpha must lie in (0,2]");
        } else if (key == "p") {
            cfg.p = parse_real(value, line, key);
            if (!(cfg.p > 1.0)) fail(line, "p must exceed 1");
        } else if (key == "lambda") {
            cfg.lambda = parse_real(value, line, key);
            if (cfg.lambda != -1.0 && cfg.lambda != 1.0)
                fail(line, "lambda must be -1 or +1");
        } else if (key == "dim") {
            long d = parse_int(value, line, key);
            if (d != 1 && d != 2) fail(line, "dim must be 1 or 2");
            cfg.dim = static_cast<int>(d);
        } else if (key == "grid_points") {
            long n = parse_int(value, line, key);
            if (n < 8 || !power_of_two(static_cast<std::size_t>(n)))
                fail(line, "grid_points must be a power of two >= 8");
            cfg.grid_points = static_cast<std::size_t>(n);
        } else if (key == "domain_length") {
            cfg.domain_length = parse_real(value, line, key);
            if (!(cfg.domain_length > 0.0))
                fail(line, "domain_length must be positive");
        } else if (key == "scheme") {
            if (value == "ETD1")
                cfg.scheme = Scheme::ETD1;
            else if (value == "ETD2")
                cfg.scheme = Scheme::ETD2;
            else
                fail(line, "scheme must be ETD1 or ETD2");
        } else if (key == "dt_init") {
            cfg.dt_init = parse_real(value, line, key);
            if (!(cfg.dt_init > 0.0)) fail(line, "dt_init must be positive");
        } else if (key == "dt_min") {
            cfg.dt_min = parse_real(value, line, key);
            if (!(cfg.dt_min > 0.0)) fail(line, "dt_min must be positive");
        } else if (key == "dt_max") {
            cfg.dt_max = parse_real(value, line, key);
            if (!(cfg.dt_max > 0.0)) fail(line, "dt_max must be positive");
        } else if (key == "safety_theta") {
            cfg.safety_theta = parse_real(value, line, key);
            if (!(cfg.safety_theta > 0.0))
                fail(line, "safety_theta must be positive");
        } else if (key == "blowup_threshold") {
            cfg.blowup_threshold = parse_real(value, line, key);
            if (!(cfg.blowup_threshold > 0.0))
                fail(line, "blowup_threshold must be positive");
        } else if (key == "t_end") {
            cfg.t_end = parse_real(value, line, key);
            if (!(cfg.t_end > 0.0)) fail(line, "t_end must be positive");
        } else if (key == "clamp_tol") {
            cfg.clamp_tol = parse_real(value, line, key);
        } else if (key == "initial_condition") {
            cfg.initial_condition = parse_ic(value, line);
        } else if (key == "seed") {
            long s = parse_int(value, line, key);
            if (s < 0) fail(line, "seed must be nonnegative");
            cfg.seed = static_cast<unsigned long>(s);
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (seen.count("dt_min") || seen.count("dt_init") || seen.count("dt_max")) {
        if (!(cfg.dt_min <= cfg.dt_init && cfg.dt_init <= cfg.dt_max))
            throw std::invalid_argument("dt_min <= dt_init <= dt_max required");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "alpha = " << fmt(cfg.alpha) << "\n";
    out << "p = " << fmt(cfg.p) << "\n";
    out << "lambda = " << fmt(cfg.lambda) << "\n";
    out << "dim = " << cfg.dim << "\n";
    out << "grid_points = " << cfg.grid_points << "\n";
    out << "domain_length = " << fmt(cfg.domain_length) << "\n";
    out << "scheme = " << (cfg.scheme == Scheme::ETD1 ? "ETD1" : "ETD2") << "\n";
    out << "dt_init = " << fmt(cfg.dt_init) << "\n";
    out << "dt_min = " << fmt(cfg.dt_min) << "\n";
    out << "dt_max = " << fmt(cfg.dt_max) << "\n";
    out << "safety_theta = " << fmt(cfg.safety_theta) << "\n";
    out << "blowup_threshold = " << fmt(cfg.blowup_threshold) << "\n";
    out << "t_end = " << fmt(cfg.t_end) << "\n";
    out << "clamp_tol = " << fmt(cfg.clamp_tol) << "\n";
    const InitialCondition& ic = cfg.initial_condition;
    out << "initial_condition = ";
    switch (ic.kind) {
        case InitialCondition::Kind::gaussian:
            out << "gaussian(" << fmt(ic.a) << ", " << fmt(ic.b) << ")";
            break;
        case InitialCondition::Kind::constant:
            out << "constant(" << fmt(ic.a) << ")";
            break;
        case InitialCondition::Kind::indicator:
            out << "indicator(" << fmt(ic.a) << ", " << fmt(ic.b) << ")";
            break;
    }
    out << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

Field build_initial_condition(const InitialCondition& ic, const Grid& grid) {
    Field f(grid);
    const std::size_t n = grid.n();
    const int dim = grid.dim();
    // Separable profile per axis; gaussian(mass, width) integrates to `mass`
    // over the line/plane (mass/(w*sqrt(pi))^N * exp(-|x/w|^2)).
    auto axis_value = [&](double x) -> double {
        switch (ic.kind) {
            case InitialCondition::Kind::gaussian:
                return std::exp(-(x / ic.b) * (x / ic.b)) /
                       (ic.b * std::sqrt(M_PI));
            case InitialCondition::Kind::constant:
                return 1.0;
            case InitialCondition::Kind::indicator:
                return std::abs(x) <= ic.b * (1.0 + 1e-12) ? 1.0 / (2.0 * ic.b)
                                                           : 0.0;
        }
        return 0.0;
    };
    if (dim == 1) {
        for (std::size_t i = 0; i < n; ++i)
            f.values[i] = ic.a * axis_value(grid.coordinate(i));
    } else {
        for (std::size_t i0 = 0; i0 < n; ++i0) {
            double v0 = axis_value(grid.coordinate(i0));
            for (std::size_t i1 = 0; i1 < n; ++i1)
                f.values[i0 * n + i1] =
                    ic.a * v0 * axis_value(grid.coordinate(i1));
        }
    }
    return f;
}

MaterializedRun materialize(const RunConfig& cfg, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    Grid grid(cfg.dim, cfg.grid_points, cfg.domain_length);
    Field u0 = build_initial_condition(cfg.initial_condition, grid);
    for (double& v : u0.values) v *= eps;

    SolverConfig solver;
    solver.alpha = cfg.alpha;
    solver.p = cfg.p;
    solver.lambda = cfg.lambda;
    solver.scheme = cfg.scheme;
    solver.dt_init = cfg.dt_init;
    solver.dt_min = cfg.dt_min;
    solver.dt_max = cfg.dt_max;
    solver.safety_theta = cfg.safety_theta;
    solver.blowup_threshold = cfg.blowup_threshold;
    solver.t_end = cfg.t_end;
    solver.clamp_tol = cfg.clamp_tol;
    return MaterializedRun{grid, std::move(u0), solver};
}

}  // namespace lfk
