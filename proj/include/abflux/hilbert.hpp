#pragma once

// Configuration-space representation on the (punctured) plane in polar
// coordinates, one angular-momentum sector at a time: sqrt(g)-weighted inner
// products, covariant momentum and Hamiltonian operators, surface terms,
// probability current, quantum correction potential and momentum
// eigenfunctions.
//
// Radial profiles live on a logarithmically spaced grid r_k = exp(t_k) with
// uniform step h in t = log r.  Differentiation uses 4th-order stencils in t
// (d/dr = e^{-t} d/dt); quadrature for int f(r) r dr uses trapezoid weights
// in t, which is spectrally accurate for the profile classes handled here
// (they vanish with all derivatives at both grid ends).

#include <complex>
#include <iosfwd>
#include <memory>
#include <vector>

#include <json.hpp>

#include "abflux/bundle.hpp"

namespace abflux::hilbert {

using cplx = std::complex<double>;
using bundle::FlatConnection;
using bundle::PolarPoint;

struct RadialGrid {
    std::vector<double> nodes;    // r_k, strictly increasing, > 0
    std::vector<double> weights;  // w_k with sum w_k f(r_k) ~ int f(r) r dr
    double log_step = 0.0;        // uniform step in t = log r

    double r_min() const { return nodes.front(); }
    double r_max() const { return nodes.back(); }
    int size() const { return (int)nodes.size(); }

    nlohmann::json descriptor() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// n_nodes log-spaced nodes on [r_min, r_max].
GridPtr make_log_grid(double r_min, double r_max, int n_nodes);
GridPtr grid_from_json(const nlohmann::json& j);

/// One angular-momentum sector psi(r, theta) = f(r) e^{i ell theta} sampled
/// on a radial grid.
struct RadialMode {
    int ell = 0;
    GridPtr grid;
    std::vector<cplx> samples;
};

struct HamiltonianParams {
    double mass = 1.0;
    double omega = 1.0;  // 0 = free particle
    double mu = 0.0;
    double nu = 0.0;
    double hbar = 1.0;

    void validate() const;
    /// oscillator length sqrt(hbar / (m omega)); omega > 0 required
    double length_scale() const;
};

/// Default grid covering the oscillator eigenstates used in practice:
/// r in [u_min, u_max] oscillator lengths.
GridPtr oscillator_grid(const HamiltonianParams& params, int n_nodes = 2000,
                        double u_min = 1e-6, double u_max = 14.0);

/// 2 pi delta_{ell ell'} sum_k w_k conj(psi_k) phi_k   (the sqrt(g) = r
/// weight lives in w_k).  Throws InputError on mismatched grids.
cplx inner_product(const RadialMode& psi, const RadialMode& phi);

double norm(const RadialMode& psi);

/// p_r = -i hbar r^{-1/2} d_r r^{1/2} applied per sector.
RadialMode apply_p_r(const RadialMode& psi, double hbar);

/// p_theta in the lambda gauge: hbar (ell + lambda) psi.  The mode
/// decomposition assumes A_theta = hbar lambda, so a pure-gauge part is
/// rejected.
RadialMode apply_p_theta(const RadialMode& psi, const FlatConnection& conn,
                         double hbar);

/// H_{mu,nu} f = -hbar^2/2m [ f'' + (1+4 i nu) f'/r
///                            - (4(mu^2+nu^2) + (ell+lambda)^2) f/r^2 ]
///               + m omega^2 r^2 f / 2
RadialMode apply_hamiltonian(const HamiltonianParams& params,
                             const FlatConnection& conn, const RadialMode& psi);

/// Delta_{mu,nu} = H_{mu,nu} - H_{0,0} as a differential operator with
/// g = r^2: the algebraic 2 hbar^2 (mu^2+nu^2)/(m r^2) part plus the
/// symmetrized first-order nu term built from apply_p_r.
RadialMode quantum_correction(const HamiltonianParams& params, const RadialMode& psi);

/// boundary values of sqrt(g) |psi|^2 = r |f(r)|^2 at the two grid ends;
/// both must vanish for p_r to be self-adjoint on the state.
std::pair<double, double> surface_term(const RadialMode& psi);

struct CurrentPair {
    RadialMode j_r;      // real-valued profile
    RadialMode j_theta;  // real-valued profile
};

/// U(1)-covariant probability current of the mode, computed through
/// phi = g^{mu + i nu} psi so that stationary sectors give an identically
/// vanishing radial component.
CurrentPair probability_current(const RadialMode& psi, const HamiltonianParams& params,
                                const FlatConnection& conn);

/// (1/sqrt(g)) d_alpha ( sqrt(g) g^{alpha beta} J_beta ) for a sector
/// current (the theta term vanishes by symmetry).
RadialMode covariant_divergence(const CurrentPair& current);

/// <q|p> = (2 pi hbar)^{-1} r^{-1/2} Omega[P(base->q)] e^{i q.p / hbar},
/// with the base-point phase absorbed by the convention
/// e^{i phi(q0,p)} = e^{i q0.p/hbar} and h(p) = 1.
cplx momentum_wavefunction(const PolarPoint& q, double p_x, double p_y,
                           const FlatConnection& conn, const PolarPoint& base,
                           const bundle::DiscretePath& path, double hbar);

/// CSV rows "r,re_f,im_f" (with header).
void write_csv(std::ostream& os, const RadialMode& mode);
nlohmann::json mode_to_json(const RadialMode& mode);
RadialMode mode_from_json(const nlohmann::json& j);

// uniform-grid differentiation in t = log r (exposed for tests)
void differentiate_log(const RadialGrid& grid, const std::vector<cplx>& f,
                       std::vector<cplx>* df_dt, std::vector<cplx>* d2f_dt2);

}  // namespace abflux::hilbert
