#pragma once

#include <vector>

#include "lfk/grid.hpp"
#include "lfk/solver.hpp"

namespace lfk {

struct TestFunctionConfig {
    double alpha = 1.0;
    double p = 2.0;
    int dim = 1;
    double R = 1.0;  // space-time scaling radius
    double B = 1.0;  // secondary spatial dilation (critical case)
};

// Smooth radial bump partition: 1 on [0,1], 0 on [2,inf),
// g(2-r)/(g(2-r)+g(r-1)) with g(s) = exp(-1/s) in between.  psi(1.5) = 0.5.
// Rejects r < 0.
double psi(double r);
double psi_prime(double r);

// Test-function exponent ell = (2p-1)/(p-1) > 2 for p > 1.
double ell(double p);

// max over grid nodes of Lambda^alpha(phi1^ell) - ell phi1^{ell-1}
// Lambda^alpha(phi1), phi1 = psi(|x|/(B R)); nonpositive in the continuum,
// so the returned violation measures spectral ringing.  Also returns the
// operator peak max|Lambda^alpha phi1| for normalization.  Requires at
// least 16 grid points across the transition annulus (h <= B*R/16) and a
// torus that contains the support (L >= 4*B*R).
struct CompositeCheck {
    double violation;
    double operator_peak;
};
CompositeCheck composite_inequality_violation(const Grid& grid,
                                              const TestFunctionConfig& cfg);

// Rescaled test-function functional of the subcritical machinery:
// for each R, with phi1 = psi(|x|/R) on a torus of side 8R and
// phi2(t) = psi(t/R^alpha) integrated over [0, 2R^alpha] by composite
// midpoint (256 panels),
//   space term  = integral phi1 |Lambda^alpha phi1|^{ell-1} dx
//                 * integral phi2^ell dt
//   time term   = integral phi1^ell dx * integral phi2 |phi2'|^{ell-1} dt.
// The log-log slope of (space+time) against R estimates the scaling
// exponent dim + alpha - alpha(ell - 1), which is <= 0 iff p <= p_c.
struct ScalingRow {
    double R;
    double integral_space_term;
    double integral_time_term;
    double total;
};
struct ScalingFit {
    std::vector<ScalingRow> rows;
    double fitted_exponent;
    double theory_exponent;
};
ScalingFit scaling_law_fit(const TestFunctionConfig& cfg,
                           const std::vector<double>& R_list);

// Critical-case budget table.  For a completed lambda = -1 run at
// p = 1 + alpha/dim with snapshots covering Omega2 = [0, 2R^alpha] and
// Omega3 = [R^alpha, 2R^alpha], evaluates per B (pbar = p/(p-1), all
// integrals by grid/snapshot quadrature, phi = phi1^ell phi2^ell):
//   lhs       = integral u0 phi(.,0) - integral u^p phi - eps*ell*I_p
//   rhs_term1 = ell * I_Omega3^{1/p} * Q_t^{1/pbar}
//   rhs_term2 = ell * C(eps) * Q_x,  C(eps) = (p-1) p^{-p/(p-1)}
//               eps^{-1/(p-1)}  (sharp Young constant)
// where I_p integrates u^p over Omega2 x {|x| <= 2BR}, Q_t carries the
// |phi2'|^pbar weight on Omega3 and Q_x the |Lambda^alpha phi1|^pbar
// weight; rhs_term2 scales like B^{-alpha}.  eps defaults to 1/(2 ell).
struct BudgetRow {
    double B;
    double lhs;
    double rhs_term1;
    double rhs_term2;
};
std::vector<BudgetRow> critical_budget(const RunResult& run,
                                       const SolverConfig& run_cfg,
                                       const Grid& grid, double R, double eps,
                                       const std::vector<double>& B_list);

}  // namespace lfk
