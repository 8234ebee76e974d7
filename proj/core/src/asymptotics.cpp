#include "lfk/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfk/operators.hpp"

namespace lfk {

double critical_exponent(double alpha, int dim) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::invalid_argument("alpha must lie in (0,2]");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    return 1.0 + alpha / static_cast<double>(dim);
}

double decay_bound_H(double t, double p, const KernelSpec& spec, double mass0,
                     double lp0, double C_emp) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
    double flat = std::pow(lp0, p);
    if (t == 0.0) return flat;
    double kappa = spec.dim * (p - 1.0) / spec.alpha;
    double decaying =
        std::pow(C_emp, p) * std::pow(t, -kappa) * std::pow(mass0, p);
    return std::min(decaying, flat);
}

SmallDataBound small_data_mass_bound(double eps, double p,
                                     const KernelSpec& spec, double mass0,
                                     double lp0, double C_emp) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(mass0 > 0.0) || !(lp0 > 0.0) || !(C_emp > 0.0))
        throw std::invalid_argument("mass0, lp0, C_emp must be positive");
    double kappa = spec.dim * (p - 1.0) / spec.alpha;
    if (!(kappa > 1.0))
        throw std::invalid_argument(
            "small-data bound needs p > 1 + alpha/dim");
    // H switches branch where C^p t^-kappa mass0^p = lp0^p.
    double A = std::pow(C_emp * mass0, p);
    double flat = std::pow(lp0, p);
    double t_star = std::pow(A / flat, 1.0 / kappa);
    double integral =
        flat * t_star + A * std::pow(t_star, 1.0 - kappa) / (kappa - 1.0);
    SmallDataBound out;
    out.H_integral = integral;
    out.crossover_t = t_star;
    out.bound = eps * (mass0 - std::pow(eps, p - 1.0) * integral);
    return out;
}

namespace {

// Least-squares slope of log M against log t over entries with t in
// [t_lo, t_hi]; returns false when fewer than two positive-mass points.
bool loglog_slope(const MassTrace& trace, double t_lo, double t_hi,
                  double* slope) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& e : trace) {
        if (e.t < t_lo || e.t > t_hi || !(e.t > 0.0) || !(e.mass > 0.0))
            continue;
        double x = std::log(e.t), y = std::log(e.mass);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return false;
    double det = n * sxx - sx * sx;
    if (!(det > 0.0)) return false;
    *slope = (n * sxy - sx * sy) / det;
    return true;
}

const TraceEntry* last_in(const MassTrace& trace, double t_lo, double t_hi) {
    const TraceEntry* out = nullptr;
    for (const auto& e : trace)
        if (e.t >= t_lo && e.t <= t_hi) out = &e;
    return out;
}

const TraceEntry* first_in(const MassTrace& trace, double t_lo, double t_hi) {
    for (const auto& e : trace)
        if (e.t >= t_lo && e.t <= t_hi) return &e;
    return nullptr;
}

}  // namespace

DichotomyVerdict estimate_mass_limit(const MassTrace& trace,
                                     const DichotomyOptions& opt) {
    DichotomyVerdict v;
    double t_first = 0.0;
    for (const auto& e : trace)
        if (e.t > 0.0) {
            t_first = e.t;
            break;
        }
    if (trace.empty() || t_first == 0.0) {
        v.diagnostic = "empty or t=0-only trace";
        return v;
    }
    double t_hi = trace.back().t;
    if (t_hi < opt.min_span * t_first) {
        v.diagnostic = "trace spans less than two decades past the transient";
        return v;
    }
    v.fit_t_lo = t_hi / 10.0;
    v.fit_t_hi = t_hi;

    double slope_final = 0.0;
    if (!loglog_slope(trace, v.fit_t_lo, t_hi, &slope_final)) {
        // Mass hit zero (or too few points): decayed out from under the fit.
        const TraceEntry* last = last_in(trace, v.fit_t_lo, t_hi);
        if (last && last->mass <= 0.0) {
            v.regime = Regime::vanishing;
            v.diagnostic = "mass reached zero";
        } else {
            v.diagnostic = "too few trace points in the final decade";
        }
        return v;
    }
    v.plateau_rate = slope_final;

    const TraceEntry* first = first_in(trace, v.fit_t_lo, t_hi);
    const TraceEntry* last = last_in(trace, v.fit_t_lo, t_hi);
    double rel_loss = (first && first->mass > 0.0)
                          ? (first->mass - last->mass) / first->mass
                          : 1.0;

    if (std::abs(slope_final) < opt.slope_tol && rel_loss < opt.loss_tol &&
        last->mass > 0.0) {
        v.regime = Regime::positive_limit;
        v.M_inf_estimate = last->mass;
        return v;
    }

    double slope_prev = 0.0;
    bool have_prev = loglog_slope(trace, t_hi / 100.0, t_hi / 10.0,
                                  &slope_prev);
    if (slope_final <= -opt.slope_floor && have_prev &&
        slope_prev <= -opt.slope_floor) {
        v.regime = Regime::vanishing;
        v.M_inf_estimate = 0.0;
        return v;
    }

    v.diagnostic = "slope neither flat nor steadily decaying";
    return v;
}

double scaled_profile_gap(const Field& u, double M_inf, double t, double q,
                          double alpha) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    KernelSpec spec{alpha, u.grid.dim()};
    Field kernel = kernel_grid(spec, u.grid, t);
    Field diff = u;
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] -= M_inf * kernel.values[i];
    double qinv = std::isinf(q) ? 0.0 : 1.0 / q;
    double pre = std::pow(t, (u.grid.dim() / alpha) * (1.0 - qinv));
    return pre * lp_norm(diff, q);
}

}  // namespace lfk
