#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfk/grid.hpp"
#include "lfk/trace.hpp"

namespace lfk {

enum class Scheme { ETD1, ETD2 };

enum class Outcome { completed, blown_up, under_resolved };

struct SolverConfig {
    double alpha = 1.0;
    double p = 2.0;
    double lambda = -1.0;  // -1 absorption, +1 source
    Scheme scheme = Scheme::ETD2;
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 0.5;
    double safety_theta = 0.1;
    double blowup_threshold = 1e6;  // U_max
    double t_end = 10.0;
    std::vector<double> snapshot_times;
    double clamp_tol = -1.0;  // < 0: auto, 1e-10 * ||u0||_inf
    double trace_ratio = 1.1;
};

struct StepState {
    double time = 0.0;
    Field u;
    double absorbed_integral = 0.0;
    double clamped_mass = 0.0;
    bool clamp_flagged = false;

    explicit StepState(Field u0) : u(std::move(u0)) {}
};

struct RunResult {
    Outcome outcome = Outcome::completed;
    MassTrace trace;
    std::optional<double> blowup_time_estimate;
    std::vector<std::pair<double, Field>> snapshots;
    bool clamp_flagged = false;
    std::string diagnostic;
};

// One exponential-time-differencing step of size dt.  The linear flow is
// applied exactly through exp(-dt |xi|^alpha); the nonlinear term u^p is
// formed in physical space (2/3-dealiased first when p is integer) and
// weighted by dt*phi1(-dt |xi|^alpha).  ETD2 adds the standard one-step
// second-order correction dt*phi2*(N(a) - N(u)) where a is the ETD1
// predictor.  absorbed_integral advances by dt*integrate(u^p) (trapezoid
// between predictor and corrector stages for ETD2), which reproduces the
// zero-mode update exactly, so M(t) = M(0) + lambda*absorbed holds to
// roundoff on the torus.
StepState etd_step(const StepState& state, const SolverConfig& cfg, double dt);

enum class DtStatus { ok, hit_min, hit_max };

// dt = clamp(theta / ||u||_inf^{p-1}, dt_min, dt_max).
std::pair<double, DtStatus> adaptive_dt(double linf, const SolverConfig& cfg);

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2 with series
// evaluation for |z| < 1e-4 to avoid cancellation.
double phi1(double z);
double phi2(double z);

struct BlowupVerdict {
    bool blown_up = false;
    std::optional<double> time_estimate;
};

// blown_up iff ||u||_inf exceeded blowup_threshold, or dt hit dt_min while
// ||u||_inf rose by >= 10x over the last ten trace entries.  The blow-up
// time is the zero crossing of a least-squares linear fit to
// y(t) = ||u||_inf^{-(p-1)} over the last ten trace points.
BlowupVerdict detect_blowup(const MassTrace& trace, const SolverConfig& cfg,
                            bool hit_dt_min);

// Exact solution of y' = lambda y^p, y(0) = c >= 0 (spatially constant
// data): y(t) = (c^{1-p} - lambda (p-1) t)^{-1/(p-1)}.  Rejects t at or
// beyond the blow-up time c^{1-p}/(p-1) when lambda = +1.
double ode_reference(double c, double p, double lambda, double t);

// March from u0 at t = 0 until t_end, blow-up, or loss of resolution.
// The trace records t = 0, geometrically spaced times (cfg.trace_ratio),
// every snapshot time, and the final state.  Snapshot times are landed on
// exactly by clipping dt.
RunResult run(const SolverConfig& cfg, const Field& u0);

}  // namespace lfk
