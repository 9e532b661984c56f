#pragma once

// Closed-form physics of the two solvable systems on the (punctured) plane:
// free Bessel scattering modes and the flux-pierced harmonic oscillator
// (spectrum, Laguerre eigenfunctions, spectral flow), plus the plane-wave
// Bessel expansion.

#include <complex>
#include <vector>

#include "abflux/hilbert.hpp"

namespace abflux::models {

using cplx = std::complex<double>;
using hilbert::GridPtr;
using hilbert::HamiltonianParams;
using hilbert::RadialMode;

/// One oscillator level: E = hbar omega (2 n_r + 1 + |alpha|).
struct OscillatorLevel {
    int n_r = 0;  // radial quantum number
    int ell = 0;
    double energy = 0.0;
};

/// Label of a free scattering mode.
struct ScatteringLabel {
    double energy = 0.0;  // >= 0
    int ell = 0;
};

/// |alpha| = sqrt((ell + lambda)^2 + 4 mu^2): the effective Bessel/Laguerre
/// order controlling small-r behaviour and the spectrum.
double alpha_abs(int ell, double lambda, double mu);

/// E_{n_r, ell} = hbar omega (2 n_r + 1 + |alpha|); omega > 0 required.
double oscillator_energy(int n_r, int ell, const HamiltonianParams& params,
                         double lambda);

/// Radial profile of the normalized oscillator eigenfunction at radius r:
/// sqrt(m omega / pi hbar) sqrt(n_r! / Gamma(|alpha|+n_r+1)) u^{-2 i nu}
/// u^{|alpha|} e^{-u^2/2} L^{|alpha|}_{n_r}(u^2),  u = r sqrt(m omega/hbar).
cplx oscillator_radial_at(int n_r, int ell, const HamiltonianParams& params,
                          double lambda, double r);

/// The same profile sampled on a grid; unit norm under the hilbert inner
/// product.  Throws CoverageError when the grid truncates more than 1e-10
/// of the norm.
RadialMode oscillator_wavefunction(int n_r, int ell, const HamiltonianParams& params,
                                   double lambda, const GridPtr& grid);

/// Free mode sqrt(m / 2 pi hbar^2) (k r)^{-2 i nu} J_{|alpha|}(k r) with
/// k = sqrt(2 m E)/hbar, delta(E-E')-normalized.  lambda != 0 extends the
/// construction to the punctured plane (the operator fixes it uniquely).
RadialMode free_wavefunction(const ScatteringLabel& label,
                             const HamiltonianParams& params, double lambda,
                             const GridPtr& grid);
cplx free_radial_at(const ScatteringLabel& label, const HamiltonianParams& params,
                    double lambda, double r);

/// Partial sum of the plane-wave Bessel expansion
/// sum_{|ell| <= ell_max} i^{|ell|} e^{i ell (theta - phi)} J_{|ell|}(r p/hbar);
/// converges to e^{i(x p_x + y p_y)/hbar}.
cplx plane_wave_expansion(double x, double y, double p_x, double p_y, double hbar,
                          int ell_max);

struct FlowRow {
    double lambda;
    int n_r;
    int ell;
    double energy;
};

/// All levels with n_r <= n_r_max, |ell| <= ell_window, for each lambda.
/// Rows ordered by (lambda, energy, ell).
std::vector<FlowRow> spectral_flow(const std::vector<double>& lambda_grid,
                                   const HamiltonianParams& params, int n_r_max,
                                   int ell_window);

/// Sorted energies below hbar omega (ell_window - 1): every level in this
/// range is generated inside the window for any lambda in [0, 1], which
/// makes the flow-periodicity comparison exact.
std::vector<double> interior_spectrum(double lambda, const HamiltonianParams& params,
                                      int n_r_max, int ell_window);

}  // namespace abflux::models
