#include "lfk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lfk/operators.hpp"
#include "lfk/transform.hpp"

namespace lfk {

double phi1(double z) {
    if (std::abs(z) < 1e-4)
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-4)
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0));
    return (std::expm1(z) - z) / (z * z);
}

std::pair<double, DtStatus> adaptive_dt(double linf, const SolverConfig& cfg) {
    double raw = linf > 0.0
                     ? cfg.safety_theta / std::pow(linf, cfg.p - 1.0)
                     : cfg.dt_max;
    if (raw < cfg.dt_min) return {cfg.dt_min, DtStatus::hit_min};
    if (raw > cfg.dt_max) return {cfg.dt_max, DtStatus::hit_max};
    return {raw, DtStatus::ok};
}

double ode_reference(double c, double p, double lambda, double t) {
    if (!(c >= 0.0)) throw std::invalid_argument("ode_reference needs c >= 0");
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (lambda != 1.0 && lambda != -1.0)
        throw std::invalid_argument("lambda must be -1 or +1");
    if (c == 0.0) return 0.0;
    double cm = std::pow(c, 1.0 - p);
    if (lambda > 0.0 && t >= cm / (p - 1.0))
        throw std::domain_error("ode_reference: at or beyond blow-up time");
    return std::pow(cm - lambda * (p - 1.0) * t, -1.0 / (p - 1.0));
}

namespace {

bool integer_exponent(double p) {
    return std::abs(p - std::round(p)) < 1e-12;
}

// Per-run scratch: |xi|^alpha once, exponential tables per distinct dt.
struct EtdWorkspace {
    std::vector<double> symbol;   // |xi|^alpha
    std::vector<double> E, f1, f2;
    double cached_dt = -1.0;
    bool dealias = false;
    double volume = 0.0;

    EtdWorkspace(const Grid& grid, const SolverConfig& cfg) {
        std::vector<double> mag = xi_magnitudes(grid);
        symbol.resize(mag.size());
        for (std::size_t i = 0; i < mag.size(); ++i)
            symbol[i] = mag[i] > 0.0 ? std::pow(mag[i], cfg.alpha) : 0.0;
        E.resize(mag.size());
        f1.resize(mag.size());
        f2.resize(mag.size());
        dealias = integer_exponent(cfg.p);
        volume = grid.length();
        for (int d = 1; d < grid.dim(); ++d) volume *= grid.length();
    }

    void tables(double dt, Scheme scheme) {
        if (dt == cached_dt) return;
        for (std::size_t i = 0; i < symbol.size(); ++i) {
            double z = -dt * symbol[i];
            E[i] = std::exp(z);
            f1[i] = dt * phi1(z);
            if (scheme == Scheme::ETD2) f2[i] = dt * phi2(z);
        }
        cached_dt = dt;
    }
};

struct StageResult {
    Spectrum nhat;
    double integral;  // integral of the clamped power, = L^dim * nhat[0]
    double clamped;
    bool flagged;
};

// Nonlinear stage u -> transform of (dealiased, clamped) u^p.
StageResult nonlinear_stage(const Field& u, const Spectrum* uhat,
                            const SolverConfig& cfg, const EtdWorkspace& ws,
                            double clamp_tol) {
    Field base = u;
    if (ws.dealias) {
        if (uhat) {
            Spectrum masked = *uhat;
            const Grid& g = u.grid;
            const long long cut = static_cast<long long>(g.n()) / 3;
            const std::size_t n = g.n();
            if (g.dim() == 1) {
                for (std::size_t k = 0; k < n; ++k)
                    if (std::llabs(g.freq_index(k)) > cut)
                        masked.coeffs[k] = 0.0;
            } else {
                for (std::size_t k0 = 0; k0 < n; ++k0)
                    for (std::size_t k1 = 0; k1 < n; ++k1)
                        if (std::llabs(g.freq_index(k0)) > cut ||
                            std::llabs(g.freq_index(k1)) > cut)
                            masked.coeffs[k0 * n + k1] = 0.0;
            }
            base = inverse_transform(masked);
        } else {
            base = dealias_two_thirds(u);
        }
    }
    PowerResult pw = pointwise_power(base, cfg.p, clamp_tol);
    StageResult r{forward_transform(pw.field), 0.0, pw.clamped_mass,
                  pw.under_resolved};
    r.integral = ws.volume * r.nhat.coeffs[0].real();
    return r;
}

StepState etd_step_impl(const StepState& state, const SolverConfig& cfg,
                        double dt, EtdWorkspace& ws, double clamp_tol) {
    ws.tables(dt, cfg.scheme);
    const Grid& grid = state.u.grid;
    Spectrum uhat = forward_transform(state.u);
    StageResult s1 = nonlinear_stage(state.u, &uhat, cfg, ws, clamp_tol);

    Spectrum ahat(grid);
    for (std::size_t i = 0; i < uhat.coeffs.size(); ++i)
        ahat.coeffs[i] = ws.E[i] * uhat.coeffs[i] +
                         cfg.lambda * ws.f1[i] * s1.nhat.coeffs[i];

    StepState next = state;
    next.time = state.time + dt;
    next.clamped_mass += s1.clamped;
    next.clamp_flagged = state.clamp_flagged || s1.flagged;

    if (cfg.scheme == Scheme::ETD1) {
        next.u = inverse_transform(ahat);
        next.absorbed_integral += dt * s1.integral;
        return next;
    }

    Field a = inverse_transform(ahat);
    StageResult s2 = nonlinear_stage(a, &ahat, cfg, ws, clamp_tol);
    for (std::size_t i = 0; i < ahat.coeffs.size(); ++i)
        ahat.coeffs[i] += cfg.lambda * ws.f2[i] *
                          (s2.nhat.coeffs[i] - s1.nhat.coeffs[i]);
    next.u = inverse_transform(ahat);
    // Trapezoid between the two stages; phi2(0) = 1/2 makes this the exact
    // zero-mode increment, so the discrete mass identity holds to roundoff.
    next.absorbed_integral += 0.5 * dt * (s1.integral + s2.integral);
    next.clamped_mass += s2.clamped;
    next.clamp_flagged = next.clamp_flagged || s2.flagged;
    return next;
}

double resolved_clamp_tol(const SolverConfig& cfg, const Field& u0) {
    if (cfg.clamp_tol >= 0.0) return cfg.clamp_tol;
    double linf = 0.0;
    for (double v : u0.values) linf = std::max(linf, std::abs(v));
    return 1e-10 * linf;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) {
        if (std::isnan(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

StepState etd_step(const StepState& state, const SolverConfig& cfg,
                   double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    EtdWorkspace ws(state.u.grid, cfg);
    return etd_step_impl(state, cfg, dt, ws, resolved_clamp_tol(cfg, state.u));
}

BlowupVerdict detect_blowup(const MassTrace& trace, const SolverConfig& cfg,
                            bool hit_dt_min) {
    BlowupVerdict v;
    if (trace.empty()) return v;
    bool exceeded = false;
    for (const auto& e : trace)
        if (!(e.linf <= cfg.blowup_threshold)) exceeded = true;
    bool growth = false;
    if (hit_dt_min && trace.size() >= 11) {
        double prev = trace[trace.size() - 11].linf;
        growth = prev > 0.0 && trace.back().linf >= 10.0 * prev;
    }
    if (!exceeded && !growth) return v;
    v.blown_up = true;

    // Least-squares zero crossing of y = ||u||_inf^{-(p-1)} over the last
    // ten trace points; y decays linearly near blow-up.
    std::size_t k = std::min<std::size_t>(10, trace.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t count = 0;
    for (std::size_t i = trace.size() - k; i < trace.size(); ++i) {
        if (!(trace[i].linf > 0.0) || !std::isfinite(trace[i].linf)) continue;
        double y = std::pow(trace[i].linf, -(cfg.p - 1.0));
        st += trace[i].t;
        sy += y;
        stt += trace[i].t * trace[i].t;
        sty += trace[i].t * y;
        ++count;
    }
    double t_last = trace.back().t;
    if (count >= 2) {
        double det = count * stt - st * st;
        if (det > 0.0) {
            double b = (count * sty - st * sy) / det;
            double a = (sy * stt - st * sty) / det;
            if (b < 0.0) {
                double T = -a / b;
                v.time_estimate = std::max(T, t_last);
                return v;
            }
        }
    }
    v.time_estimate = t_last;
    return v;
}

RunResult run(const SolverConfig& cfg, const Field& u0) {
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
    if (!(cfg.p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (cfg.lambda != 1.0 && cfg.lambda != -1.0)
        throw std::invalid_argument("lambda must be -1 or +1");
    if (!(cfg.alpha > 0.0) || cfg.alpha > 2.0)
        throw std::invalid_argument("alpha must lie in (0,2]");
    if (!(cfg.dt_min > 0.0) || cfg.dt_min > cfg.dt_max)
        throw std::invalid_argument("need 0 < dt_min <= dt_max");

    const double clamp_tol = resolved_clamp_tol(cfg, u0);
    double mass0 = 0.0, neg_min = 0.0;
    for (double v : u0.values) {
        mass0 += v;
        neg_min = std::min(neg_min, v);
    }
    if (neg_min < -clamp_tol)
        throw std::invalid_argument("u0 must be nonnegative");
    if (!(mass0 > 0.0))
        throw std::invalid_argument("u0 must not be identically zero");

    EtdWorkspace ws(u0.grid, cfg);
    StepState state(u0);
    RunResult result;

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    std::size_t snap_idx = 0;
    auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a),
                                                   std::abs(b)});
    };
    while (snap_idx < snaps.size() && snaps[snap_idx] <= 0.0) {
        if (near(snaps[snap_idx], 0.0))
            result.snapshots.emplace_back(0.0, state.u);
        ++snap_idx;
    }

    double dt_in_effect = cfg.dt_init;
    auto record = [&](double dt_used) {
        result.trace.push_back(TraceEntry{
            state.time, integrate(state.u), max_abs(state.u),
            lp_norm(state.u, 2.0), state.absorbed_integral,
            state.clamped_mass, dt_used});
    };
    record(cfg.dt_init);
    double next_trace = cfg.dt_init;

    bool hit_dt_min = false;
    Outcome outcome = Outcome::completed;
    std::string diagnostic;

    while (state.time < cfg.t_end * (1.0 - 1e-15)) {
        double linf = max_abs(state.u);
        auto [dt, status] = adaptive_dt(linf, cfg);
        if (status == DtStatus::hit_min) {
            hit_dt_min = true;
            record(dt);
            BlowupVerdict v = detect_blowup(result.trace, cfg, true);
            if (v.blown_up) {
                outcome = Outcome::blown_up;
                result.blowup_time_estimate = v.time_estimate;
            } else {
                outcome = Outcome::under_resolved;
                diagnostic = "adaptive dt fell below dt_min without blow-up";
            }
            break;
        }
        dt = std::min(dt, cfg.t_end - state.time);
        while (snap_idx < snaps.size() &&
               snaps[snap_idx] <= state.time && !near(snaps[snap_idx],
                                                      state.time))
            ++snap_idx;  // defensively skip anything already passed
        if (snap_idx < snaps.size()) {
            double gap = snaps[snap_idx] - state.time;
            if (gap > 0.0) dt = std::min(dt, gap);
        }
        state = etd_step_impl(state, cfg, dt, ws, clamp_tol);
        dt_in_effect = dt;

        if (snap_idx < snaps.size() && near(state.time, snaps[snap_idx])) {
            result.snapshots.emplace_back(state.time, state.u);
            ++snap_idx;
        }

        double new_linf = max_abs(state.u);
        if (!(new_linf <= cfg.blowup_threshold)) {
            record(dt);
            BlowupVerdict v = detect_blowup(result.trace, cfg, hit_dt_min);
            outcome = Outcome::blown_up;
            result.blowup_time_estimate = v.time_estimate;
            break;
        }
        if (state.time >= next_trace * (1.0 - 1e-12)) {
            record(dt);
            next_trace = std::max(next_trace, state.time) * cfg.trace_ratio;
        }
    }

    if (outcome == Outcome::completed &&
        (result.trace.empty() || result.trace.back().t < state.time))
        record(dt_in_effect);

    if (outcome == Outcome::completed && state.clamp_flagged) {
        outcome = Outcome::under_resolved;
        diagnostic = "values below -clamp_tol encountered";
    }
    result.outcome = outcome;
    result.clamp_flagged = state.clamp_flagged;
    result.diagnostic = diagnostic;
    return result;
}

}  // namespace lfk
