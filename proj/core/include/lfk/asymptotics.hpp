#pragma once

#include <string>

#include "lfk/grid.hpp"
#include "lfk/kernel.hpp"
#include "lfk/trace.hpp"

namespace lfk {

enum class Regime { positive_limit, vanishing, inconclusive };

struct DichotomyVerdict {
    Regime regime = Regime::inconclusive;
    double M_inf_estimate = 0.0;
    double plateau_rate = 0.0;  // d log M / d log t over the final decade
    double fit_t_lo = 0.0;
    double fit_t_hi = 0.0;
    std::string diagnostic;
};

struct DichotomyOptions {
    double slope_tol = 0.01;    // |slope| below this counts as flat
    double slope_floor = 0.05;  // decay steeper than this counts as vanishing
    double loss_tol = 0.01;     // max relative mass loss over the final decade
    double min_span = 100.0;    // required t_hi/t_lo after the transient
};

// Fujita exponent p_c = 1 + alpha/dim.
double critical_exponent(double alpha, int dim);

// Pointwise-in-time decay majorant
//   H(t) = min( C_emp^p t^{-dim(p-1)/alpha} mass0^p, lp0^p )
// where lp0 = ||u0||_p and C_emp = ||P_alpha(.,1)||_p.
double decay_bound_H(double t, double p, const KernelSpec& spec, double mass0,
                     double lp0, double C_emp);

struct SmallDataBound {
    double bound;        // certified lower bound on M_infinity for data eps*u0
    double H_integral;   // integral of H over (0, infinity)
    double crossover_t;  // where the two branches of H meet
};

// eps * (mass0 - eps^{p-1} * integral H dt), the closed-form evaluation of
// the small-data mass bound.  Requires p > critical_exponent (the integral
// diverges otherwise).
SmallDataBound small_data_mass_bound(double eps, double p,
                                     const KernelSpec& spec, double mass0,
                                     double lp0, double C_emp);

// Classify the late-time mass behaviour of a trace by log-log slope fits:
// flat final decade with < 1% mass loss is positive_limit, decay steeper
// than slope_floor sustained over the final two decades is vanishing.
DichotomyVerdict estimate_mass_limit(const MassTrace& trace,
                                     const DichotomyOptions& opt = {});

// t^{(dim/alpha)(1-1/q)} * || u - M_inf * P_alpha(., t) ||_q with the kernel
// realized on u's grid (torus-wrapped, same spectral truncation).
double scaled_profile_gap(const Field& u, double M_inf, double t, double q,
                          double alpha);

}  // namespace lfk
