#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "lfk/grid.hpp"

namespace lfk {

struct KernelSpec {
    double alpha;  // stability index, (0, 2]
    int dim;       // 1 or 2
};

// Raised when the oscillatory Fourier inversion fails to reach the requested
// relative agreement between successive panel refinements.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double last, double previous)
        : std::runtime_error(what), last_estimate(last),
          previous_estimate(previous) {}
    double last_estimate;
    double previous_estimate;
};

// Pointwise alpha-stable heat kernel P_alpha(x, t) on R^dim, t > 0.
// Closed forms for alpha = 2 (Gaussian) and alpha = 1 (Cauchy); otherwise
// numerical Fourier inversion (cosine transform for dim 1, Hankel J0 for
// dim 2) truncated where exp(-t xi^alpha) < 1e-16 with panel doubling until
// successive refinements agree to 1e-9 relative.
double kernel_value(const KernelSpec& spec, const std::array<double, 2>& x,
                    double t);

// The quadrature path regardless of alpha, exposed so the closed forms can
// be cross-checked against it.
double kernel_value_quadrature(const KernelSpec& spec,
                               const std::array<double, 2>& x, double t);

// Torus-wrapped kernel sampled on the grid, centered at x = 0: the inverse
// transform of c_k = exp(-t |xi_k|^alpha)/L^dim.  Integrates to 1 by
// construction.  Warns on stderr when the grid cannot resolve the kernel,
// i.e. exp(-t |xi_max|^alpha) >= 1e-14.
Field kernel_grid(const KernelSpec& spec, const Grid& grid, double t);

// The resolution predicate behind the kernel_grid warning.
bool kernel_grid_resolved(const KernelSpec& spec, const Grid& grid, double t);

// ||P_alpha(., 1)||_q on R^dim, memoized per (alpha, dim, q); q = 1 returns
// exactly 1.  Computed once on an internal reference grid; safe for
// concurrent callers.
double kernel_lq_norm(const KernelSpec& spec, double q);

struct DecayCheck {
    double lhs;       // ||P_alpha(t) * u0||_q on the grid
    double rhs;       // C_emp * t^{-dim(1-1/q)/alpha} * ||u0||_1
    double u0_l1;
    double u0_lq;
    bool nonexpansive;  // lhs <= ||u0||_q up to roundoff slack
};

// Young/smoothing bound check: applies the semigroup and evaluates both
// sides of ||P(t)*u0||_q <= C_emp t^{-dim(1-1/q)/alpha} ||u0||_1.
DecayCheck decay_bound_check(const KernelSpec& spec, const Field& u0,
                             double t, double q);

// Domain-size rule: smallest L such that the mass of P_alpha(., t_end)
// outside [-L/4, L/4]^dim stays below tail_budget (a fraction of unit mass).
// Heavy-tail asymptotics for alpha < 2, erfc bisection for alpha = 2; the
// result scales like (t_end/tail_budget)^{1/alpha}.
double recommended_domain_length(const KernelSpec& spec, double t_end,
                                 double tail_budget);

}  // namespace lfk
