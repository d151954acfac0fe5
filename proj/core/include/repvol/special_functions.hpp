#ifndef REPVOL_SPECIAL_FUNCTIONS_HPP
#define REPVOL_SPECIAL_FUNCTIONS_HPP

#include <complex>

namespace repvol {

// Lobachevsky function L(theta) = -int_0^theta log|2 sin t| dt, summed by its
// Fourier series (1/2) sum_{k>=1} sin(2k theta)/k^2 after reducing theta by
// pi-periodicity and oddness. Kahan-compensated, capped at 1e6 terms; the
// rigorous truncation bound is written to *est_error when supplied.
double lobachevsky(double theta, double* est_error = nullptr);

// Bloch-Wigner dilogarithm D(z) = Im(Li2(z)) + arg(1 - z) log|z|; the signed
// volume of the ideal tetrahedron with vertices (0, 1, inf, z). Degenerate
// inputs (real z, 0, 1, non-finite) return 0.
double bloch_wigner(std::complex<double> z);

// Principal-branch complex dilogarithm.
std::complex<double> dilog(std::complex<double> z);

}  // namespace repvol

#endif
