#pragma once

#include "lfk/grid.hpp"

namespace lfk {

// Spectral fractional Laplacian Lambda^alpha = (-Delta)^{alpha/2}: multiplies
// c_k by |xi_k|^alpha.  The zero mode is annihilated exactly (|0|^alpha = 0),
// so integrate(fractional_laplacian(f, a)) vanishes to roundoff.
// Requires alpha in (0, 2].
Field fractional_laplacian(const Field& f, double alpha);

// e^{-t Lambda^alpha}: multiplies c_k by exp(-t |xi_k|^alpha).  t = 0 is the
// identity; t < 0 rejected.  Declared here with the other multipliers; the
// kernel-level wrapper lives in kernel.hpp.
Field heat_semigroup_apply(const Field& f, double t, double alpha);

// h^dim * sum of values (exact quadrature for trigonometric polynomials).
double integrate(const Field& f);

// (h^dim * sum |f|^q)^(1/q); q = infinity() gives max|f|.  Requires q >= 1.
double lp_norm(const Field& f, double q);

struct PowerResult {
    Field field;
    // h^dim * sum of |negative part| zeroed before the power was taken.
    double clamped_mass = 0.0;
    // True when some value fell below -clamp_tol: the field is not merely
    // ringing at spectral tolerance and the run should be flagged.
    bool under_resolved = false;
};

// u -> u^p applied pointwise after clamping negatives to zero.  Negative
// values above -clamp_tol are treated as spectral ringing; anything lower
// raises under_resolved.  Required for non-integer p where u^p is undefined
// for u < 0; applied uniformly for all p so the nonlinear term is identical
// across exponents.
PowerResult pointwise_power(const Field& f, double p, double clamp_tol);

// 2/3-rule dealiasing: zero every mode with |freq_index| > n/3 on any axis.
Field dealias_two_thirds(const Field& f);

}  // namespace lfk
