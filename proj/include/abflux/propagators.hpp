#pragma once

// Two independent routes to <r_f,theta_f| exp(-i dt H_{mu,nu} / hbar)
// |r_i,theta_i> on the punctured plane: spectral summation (Bessel-resummed
// closed form for the oscillator, Gaussian-Bessel integral for the free
// particle) and a time-sliced radial path integral composed numerically,
// plus the elementary closed forms used for cross-validation.
//
// Oscillatory objects are evaluated on damped time contours: euclidean
// (dt -> -i tau) or wick (dt -> dt (1 - i delta)); real-time answers come
// from Richardson extrapolation of the wick damping to zero.

#include <complex>
#include <functional>
#include <vector>

#include <json.hpp>

#include "abflux/hilbert.hpp"

namespace abflux::propagators {

using cplx = std::complex<double>;
using bundle::PolarPoint;
using hilbert::GridPtr;
using hilbert::HamiltonianParams;

// real-time oscillator evaluations refuse |sin(omega dt)| below this margin
constexpr double kCausticMargin = 1e-3;

enum class ContourKind { kReal, kEuclidean, kWick };

struct TimeContour {
    ContourKind kind = ContourKind::kReal;
    double delta = 0.0;  // wick damping angle parameter

    /// dt -> dt, -i dt, or dt (1 - i delta)
    cplx complex_time(double delta_t) const;
    void validate() const;
    const char* name() const;
};

TimeContour real_contour();
TimeContour euclidean_contour();
TimeContour wick_contour(double delta);

struct PropagatorRequest {
    PolarPoint q_i{1.0, 0.0};
    PolarPoint q_f{1.0, 0.0};
    double delta_t = 1.0;  // tau when the contour is euclidean
    HamiltonianParams params;
    double lambda = 0.0;
    TimeContour contour;
    int ell_cutoff = 40;

    void validate() const;
};

struct PropagatorValue {
    cplx value{0.0, 0.0};
    int ell_cutoff = 0;
    double tail_bound = 0.0;  // bound (or estimate) on the dropped sectors
};

/// Oscillator propagator by the Bessel-resummed spectral sum:
///   m omega/(2 i pi hbar sin wT) (u_i/u_f)^{2 i nu}
///   e^{(i/2) cot(wT)(u_f^2+u_i^2)}
///   sum_ell e^{-i pi |alpha|/2} e^{i ell dtheta} J_|alpha|(u_f u_i/sin wT).
/// The tail bound certifies the ell truncation.
PropagatorValue propagator_spectral_oscillator(const PropagatorRequest& req);

/// Same sum at an explicit complex time (used by contour studies and the
/// hermiticity checks).
PropagatorValue spectral_oscillator_at(const PolarPoint& q_f, const PolarPoint& q_i,
                                       cplx complex_time,
                                       const HamiltonianParams& params, double lambda,
                                       int ell_cutoff);

/// Independent oracle: the truncated eigenfunction double sum
/// sum_{n,ell} e^{-i T E/hbar} psi(q_f) conj(psi(q_i)).  Requires a damped
/// contour; the reported tail is the magnitude of the outermost shells.
PropagatorValue propagator_direct_sum_oscillator(const PropagatorRequest& req,
                                                 int n_r_cutoff);

/// Mehler closed form at lambda = 0, (mu,nu) = (0,0).
cplx propagator_closed_oscillator(const PolarPoint& q_f, const PolarPoint& q_i,
                                  double delta_t, const HamiltonianParams& params,
                                  const TimeContour& contour = real_contour());

/// Free propagator by the spectral integral, with the radial p-integral done
/// through the Gaussian-Bessel product identity (complex Gaussian parameter,
/// absolutely convergent on damped contours).
PropagatorValue propagator_spectral_free(const PropagatorRequest& req);

/// Gaussian closed form m/(2 i pi hbar dt) e^{i m d^2/(2 hbar dt)}.
cplx propagator_closed_free(const PolarPoint& q_f, const PolarPoint& q_i,
                            double delta_t, const HamiltonianParams& params,
                            const TimeContour& contour = real_contour());

/// Normalized matrix element h = <p,ell|H|r,theta>/<p,ell|r,theta>:
/// (1/2m)[p^2 + 4 hbar nu p/r + (hbar^2/r^2)((ell+lambda)^2 - 1/4
///        + 4(mu^2+nu^2) - 2 i nu)] + m omega^2 r^2/2.
cplx h_matrix_elements(double p, int ell, double r, const HamiltonianParams& params,
                       double lambda);

/// Spectral-side per-sector radial kernel K_ell(r_f, r_i; T): the assembled
/// propagator is (2 pi sqrt(r_f r_i))^{-1} sum_ell e^{i ell dtheta} K_ell
/// (the e^{i(ell+lambda) dtheta} sum and the e^{-i lambda dtheta} external
/// holonomy combine into the manifestly single-valued integer phases).
cplx spectral_sector_oscillator(const PropagatorRequest& req, int ell);

/// Path-integral per-sector kernel: the one-slice radial kernel
///   sqrt(m/(2 i pi eps hbar)) e^{(i/hbar)[m (r'-r)^2/(2 eps)
///     - eps( m w^2 r^2/2 + (hbar^2/2m)(|alpha|^2 - 1/4 - 2 i nu)/r^2 )]}
///     e^{-2 i nu (r'/r - 1)}
/// composed n_slices times by quadrature over the radial grid (measure dr).
cplx pathint_sector_oscillator(const PropagatorRequest& req, int ell, int n_slices,
                               const GridPtr& grid);

/// Assembled time-sliced propagator; converges to the spectral value as
/// n_slices grows (first order in 1/n_slices).  Sectors with |alpha| < 1/2
/// have a non-integrable slice kernel at the puncture and raise
/// ResolutionError.  A null grid selects a default composition grid.
PropagatorValue propagator_pathintegral(const PropagatorRequest& req, int n_slices,
                                        GridPtr grid = nullptr);

/// Default radial grid for kernel composition.
GridPtr pathint_grid(const PropagatorRequest& req, int n_nodes = 800);

/// Polynomial (Neville) extrapolation of f(delta) to delta = 0; the error
/// estimate is the magnitude of the last correction.
cplx richardson_extrapolate(const std::function<cplx(double)>& f,
                            const std::vector<double>& deltas,
                            double* error_estimate = nullptr);

/// Wick deltas used for real-time answers.
const std::vector<double>& default_wick_deltas();

nlohmann::json request_to_json(const PropagatorRequest& req);
PropagatorRequest request_from_json(const nlohmann::json& j);
nlohmann::json value_to_json(const PropagatorRequest& req, const PropagatorValue& v);

}  // namespace abflux::propagators
