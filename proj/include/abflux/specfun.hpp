#pragma once

// Special-function kernel: Gamma, Bessel J of arbitrary real order >= 0,
// modified Bessel I, generalized Laguerre polynomials.  Everything the
// closed-form spectra and propagator sums of this library require, with no
// external dependency.  Complex arguments are supported for J and I because
// the damped time contours rotate Bessel arguments off the real axis.

#include <complex>

namespace abflux::specfun {

using cplx = std::complex<double>;

/// Gamma(x) for x > 0.  Relative error <= 1e-12.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Bessel function of the first kind J_order(x), order >= 0, x >= 0.
/// Absolute error <= 1e-12 for x <= 50, order <= 60 (degrades gracefully
/// beyond).
double bessel_j(double order, double x);

/// J_order(z) for complex z, principal branch (cut along the negative real
/// axis; the side of the cut is taken from the sign bit of Im z).
cplx bessel_j(double order, cplx z);

/// Modified Bessel function I_order(z), principal branch.
cplx bessel_i(double order, cplx z);

/// Generalized Laguerre polynomial L^alpha_n(x), alpha > -1, via the
/// three-term recurrence.  Exact for n = 0, 1.
double laguerre(double alpha, int n, double x);

}  // namespace abflux::specfun
