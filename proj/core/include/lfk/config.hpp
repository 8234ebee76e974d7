#pragma once

#include <map>
#include <string>

#include "lfk/grid.hpp"
#include "lfk/solver.hpp"

namespace lfk {

struct InitialCondition {
    enum class Kind { gaussian, constant, indicator };
    Kind kind = Kind::gaussian;
    // gaussian(mass, width) | constant(c) | indicator(mass, half_width)
    double a = 1.0;
    double b = 1.0;
};

// Parsed contents of a run configuration file: flat "key = value" lines,
// '#' comments, unknown or duplicate keys rejected with the line number.
struct RunConfig {
    double alpha = 1.0;
    double p = 2.0;
    double lambda = -1.0;
    int dim = 1;
    std::size_t grid_points = 256;
    double domain_length = 40.0;
    Scheme scheme = Scheme::ETD2;
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 0.5;
    double safety_theta = 0.1;
    double blowup_threshold = 1e6;
    double t_end = 10.0;
    double clamp_tol = -1.0;  // auto
    InitialCondition initial_condition;
    unsigned long seed = 0;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical "key = value" rendering (15 significant digits) of every key,
// defaults made explicit; written next to run outputs so they can be
// re-interpreted without the original file.
std::string render_config(const RunConfig& cfg);

Field build_initial_condition(const InitialCondition& ic, const Grid& grid);

struct MaterializedRun {
    Grid grid;
    Field u0;
    SolverConfig solver;
};

// Grid, scaled initial data and solver settings for one run; eps multiplies
// the initial condition.
MaterializedRun materialize(const RunConfig& cfg, double eps = 1.0);

}  // namespace lfk
