#pragma once

#include "lfk/grid.hpp"

namespace lfk {

// Discrete Fourier transform pair used throughout the library.
//
// Convention (normalize-on-forward):
//
//   c_k = (1/n^dim) * sum_j f(x_j) exp(-i xi_k . x_j)
//   f(x_j) = sum_k c_k exp(+i xi_k . x_j)
//
// with xi_k = 2*pi*k/L per axis and the phases taken at the physical node
// coordinates x_j in [-L/2, L/2).  Consequences used by callers and tests:
//
//   * zero mode:  c_0 = mean(f) = (1/L^dim) * integral of f over the torus
//   * Parseval:   h^dim * sum_j |f_j|^2 = L^dim * sum_k |c_k|^2
//
// Internally FFTW computes the transform relative to index coordinates
// (first sample at j = 0); the shift to x_j = -L/2 + j*h is a per-mode phase
// factor (-1)^{k} per axis which is applied here so that Spectrum entries
// always refer to the physical coordinates.
Spectrum forward_transform(const Field& f);
Field inverse_transform(const Spectrum& s);

// Max norm of the imaginary residue discarded by the last inverse_transform
// of a Hermitian spectrum would be machine-level; inverse_transform simply
// takes the real part.

}  // namespace lfk
