#include "abflux/hilbert.hpp"

#include <cmath>
#include <ostream>

#include "abflux/errors.hpp"

namespace abflux::hilbert {

namespace {

constexpr cplx kI(0.0, 1.0);

void require_same_grid(const RadialMode& a, const RadialMode& b, const char* who) {
    if (a.grid == b.grid) return;
    if (!a.grid || !b.grid) throw InputError(std::string(who) + ": mode without grid");
    const RadialGrid& ga = *a.grid;
    const RadialGrid& gb = *b.grid;
    if (ga.size() != gb.size() || ga.r_min() != gb.r_min() || ga.r_max() != gb.r_max())
        throw InputError(std::string(who) + ": mismatched grids");
}

void require_mode(const RadialMode& m, const char* who, int min_nodes = 5) {
    if (!m.grid) throw InputError(std::string(who) + ": mode without grid");
    if (m.grid->size() < min_nodes)
        throw InputError(std::string(who) + ": grid too coarse (< " +
                         std::to_string(min_nodes) + " nodes)");
    if (m.samples.size() != (size_t)m.grid->size())
        throw InputError(std::string(who) + ": sample count does not match grid");
}

// 4th-order first-derivative stencils on a uniform grid (x12 h)
constexpr double kD1Edge0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
constexpr double kD1Edge1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
// 4th-order second-derivative edge stencils (x12 h^2)
constexpr double kD2Edge0[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
constexpr double kD2Edge1[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};

}  // namespace

void differentiate_log(const RadialGrid& grid, const std::vector<cplx>& f,
                       std::vector<cplx>* df_dt, std::vector<cplx>* d2f_dt2) {
    const int n = grid.size();
    const double h = grid.log_step;
    // Stencil sums are accumulated in extended precision before the 1/(12h)
    // scaling: the Hamiltonian multiplies these by 1/r^2, which near the
    // puncture amplifies any cancellation noise by up to twelve orders of
    // magnitude.
    using lcplx = std::complex<long double>;
    auto at = [&f](int k) { return lcplx(f[k].real(), f[k].imag()); };
    auto narrow = [](lcplx v, double s) {
        return cplx((double)(v.real() / s), (double)(v.imag() / s));
    };
    if (df_dt) {
        auto& d = *df_dt;
        d.assign(n, cplx(0));
        for (int k = 2; k < n - 2; ++k)
            d[k] = narrow(at(k - 2) - 8.0L * at(k - 1) + 8.0L * at(k + 1) - at(k + 2),
                          12.0 * h);
        lcplx e0(0), e1(0), e2(0), e3(0);
        for (int j = 0; j < 5; ++j) {
            e0 += (long double)kD1Edge0[j] * at(j);
            e1 += (long double)kD1Edge1[j] * at(j);
            e2 += (long double)kD1Edge0[j] * at(n - 1 - j);
            e3 += (long double)kD1Edge1[j] * at(n - 1 - j);
        }
        d[0] = narrow(e0, 12.0 * h);
        d[1] = narrow(e1, 12.0 * h);
        d[n - 1] = narrow(-e2, 12.0 * h);
        d[n - 2] = narrow(-e3, 12.0 * h);
    }
    if (d2f_dt2) {
        auto& d2 = *d2f_dt2;
        d2.assign(n, cplx(0));
        for (int k = 2; k < n - 2; ++k)
            d2[k] = narrow(-at(k - 2) + 16.0L * at(k - 1) - 30.0L * at(k) +
                               16.0L * at(k + 1) - at(k + 2),
                           12.0 * h * h);
        lcplx e0(0), e1(0), e2(0), e3(0);
        for (int j = 0; j < 6; ++j) {
            e0 += (long double)kD2Edge0[j] * at(j);
            e1 += (long double)kD2Edge1[j] * at(j);
            e2 += (long double)kD2Edge0[j] * at(n - 1 - j);
            e3 += (long double)kD2Edge1[j] * at(n - 1 - j);
        }
        d2[0] = narrow(e0, 12.0 * h * h);
        d2[1] = narrow(e1, 12.0 * h * h);
        d2[n - 1] = narrow(e2, 12.0 * h * h);
        d2[n - 2] = narrow(e3, 12.0 * h * h);
    }
}

GridPtr make_log_grid(double r_min, double r_max, int n_nodes) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw InputError("make_log_grid: need 0 < r_min < r_max");
    if (n_nodes < 6) throw InputError("make_log_grid: need at least 6 nodes");
    auto g = std::make_shared<RadialGrid>();
    const double t0 = std::log(r_min);
    const double h = (std::log(r_max) - t0) / (n_nodes - 1);
    g->log_step = h;
    g->nodes.resize(n_nodes);
    g->weights.resize(n_nodes);
    for (int k = 0; k < n_nodes; ++k) {
        double r = std::exp(t0 + k * h);
        g->nodes[k] = r;
        g->weights[k] = h * r * r;  // int f r dr = int f e^{2t} dt
    }
    g->weights.front() *= 0.5;
    g->weights.back() *= 0.5;
    return g;
}

nlohmann::json RadialGrid::descriptor() const {
    return {{"r_min", r_min()}, {"r_max", r_max()}, {"n_nodes", size()},
            {"spacing", "log"}};
}

GridPtr grid_from_json(const nlohmann::json& j) {
    for (auto& [key, _] : j.items())
        if (key != "r_min" && key != "r_max" && key != "n_nodes" && key != "spacing")
            throw InputError("grid: unknown key '" + key + "'");
    if (j.contains("spacing") && j["spacing"] != "log")
        throw InputError("grid: only log spacing is supported");
    return make_log_grid(j.at("r_min").get<double>(), j.at("r_max").get<double>(),
                         j.at("n_nodes").get<int>());
}

void HamiltonianParams::validate() const {
    if (!(mass > 0.0)) throw InputError("params: mass must be positive");
    if (!(omega >= 0.0)) throw InputError("params: omega must be >= 0");
    if (!(hbar > 0.0)) throw InputError("params: hbar must be positive");
    if (!std::isfinite(mu) || !std::isfinite(nu))
        throw InputError("params: mu, nu must be finite");
}

double HamiltonianParams::length_scale() const {
    if (!(omega > 0.0)) throw DomainError("length_scale: omega must be positive");
    return std::sqrt(hbar / (mass * omega));
}

GridPtr oscillator_grid(const HamiltonianParams& params, int n_nodes, double u_min,
                        double u_max) {
    params.validate();
    double scale = params.length_scale();
    return make_log_grid(u_min * scale, u_max * scale, n_nodes);
}

cplx inner_product(const RadialMode& psi, const RadialMode& phi) {
    require_mode(psi, "inner_product", 2);
    require_mode(phi, "inner_product", 2);
    require_same_grid(psi, phi, "inner_product");
    if (psi.ell != phi.ell) return cplx(0.0);  // angular orthogonality
    const auto& w = psi.grid->weights;
    cplx acc(0.0);
    for (size_t k = 0; k < w.size(); ++k)
        acc += w[k] * std::conj(psi.samples[k]) * phi.samples[k];
    return bundle::kTwoPi * acc;
}

double norm(const RadialMode& psi) { return std::sqrt(std::real(inner_product(psi, psi))); }

RadialMode apply_p_r(const RadialMode& psi, double hbar) {
    require_mode(psi, "apply_p_r", 5);
    std::vector<cplx> df;
    differentiate_log(*psi.grid, psi.samples, &df, nullptr);
    RadialMode out{psi.ell, psi.grid, std::vector<cplx>(psi.samples.size())};
    for (size_t k = 0; k < df.size(); ++k)
        out.samples[k] = -kI * hbar / psi.grid->nodes[k] * (df[k] + 0.5 * psi.samples[k]);
    return out;
}

RadialMode apply_p_theta(const RadialMode& psi, const FlatConnection& conn, double hbar) {
    require_mode(psi, "apply_p_theta", 2);
    if (conn.has_pure_gauge())
        throw UnsupportedRepresentationError(
            "apply_p_theta: mode decomposition requires the lambda gauge "
            "(no pure-gauge part)");
    RadialMode out{psi.ell, psi.grid, psi.samples};
    const double factor = hbar * (psi.ell + conn.lambda);
    for (auto& s : out.samples) s *= factor;
    return out;
}

RadialMode apply_hamiltonian(const HamiltonianParams& params, const FlatConnection& conn,
                             const RadialMode& psi) {
    params.validate();
    require_mode(psi, "apply_hamiltonian", 6);
    if (conn.has_pure_gauge())
        throw UnsupportedRepresentationError(
            "apply_hamiltonian: mode decomposition requires the lambda gauge");
    std::vector<cplx> df, d2f;
    differentiate_log(*psi.grid, psi.samples, &df, &d2f);
    const double m_ell = psi.ell + conn.lambda;
    const double cent = 4.0 * (params.mu * params.mu + params.nu * params.nu) +
                        m_ell * m_ell;
    const cplx four_i_nu = 4.0 * kI * params.nu;
    const double kin = -params.hbar * params.hbar / (2.0 * params.mass);
    const double pot = 0.5 * params.mass * params.omega * params.omega;
    RadialMode out{psi.ell, psi.grid, std::vector<cplx>(psi.samples.size())};
    for (size_t k = 0; k < out.samples.size(); ++k) {
        const double r = psi.grid->nodes[k];
        // f'' + (1+4 i nu) f'/r = e^{-2t} (f_tt + 4 i nu f_t) in t = log r
        out.samples[k] = kin / (r * r) *
                             (d2f[k] + four_i_nu * df[k] - cent * psi.samples[k]) +
                         pot * r * r * psi.samples[k];
    }
    return out;
}

RadialMode quantum_correction(const HamiltonianParams& params, const RadialMode& psi) {
    params.validate();
    require_mode(psi, "quantum_correction", 5);
    // Delta_{mu,nu} with g = r^2:
    //   hbar^2 * 4 mu^2 / (2 m r^2)  (metric-power term)
    // + hbar^2 * 4 nu^2 / (2 m r^2)  (nu^2 gradient term)
    // + (hbar nu / 2m) [ B p_r + p_r B ],  B = 2/r
    // The symmetrized product reduces to 2 B p_r + [p_r, B] with the exact
    // commutator [p_r, B] = -i hbar B' = 2 i hbar / r^2, so only one stencil
    // application of p_r on psi itself is required.
    const double alg = 2.0 * params.hbar * params.hbar *
                       (params.mu * params.mu + params.nu * params.nu) / params.mass;
    RadialMode pr = apply_p_r(psi, params.hbar);
    RadialMode out{psi.ell, psi.grid, std::vector<cplx>(psi.samples.size())};
    const double c_nu = params.hbar * params.nu / (2.0 * params.mass);
    for (size_t k = 0; k < out.samples.size(); ++k) {
        const double r = psi.grid->nodes[k];
        out.samples[k] = alg / (r * r) * psi.samples[k] +
                         c_nu * (4.0 / r * pr.samples[k] +
                                 2.0 * kI * params.hbar / (r * r) * psi.samples[k]);
    }
    return out;
}

std::pair<double, double> surface_term(const RadialMode& psi) {
    require_mode(psi, "surface_term", 2);
    const double r0 = psi.grid->r_min(), r1 = psi.grid->r_max();
    return {r0 * std::norm(psi.samples.front()), r1 * std::norm(psi.samples.back())};
}

CurrentPair probability_current(const RadialMode& psi, const HamiltonianParams& params,
                                const FlatConnection& conn) {
    params.validate();
    require_mode(psi, "probability_current", 5);
    if (conn.has_pure_gauge())
        throw UnsupportedRepresentationError(
            "probability_current: mode decomposition requires the lambda gauge");
    const int n = psi.grid->size();
    // phi = g^{mu + i nu} psi = r^{2 mu} e^{2 i nu log r} f
    std::vector<cplx> phi(n);
    for (int k = 0; k < n; ++k) {
        const double t = std::log(psi.grid->nodes[k]);
        phi[k] = std::exp(cplx(2.0 * params.mu * t, 2.0 * params.nu * t)) *
                 psi.samples[k];
    }
    std::vector<cplx> dphi;
    differentiate_log(*psi.grid, phi, &dphi, nullptr);
    CurrentPair out;
    out.j_r = RadialMode{psi.ell, psi.grid, std::vector<cplx>(n)};
    out.j_theta = RadialMode{psi.ell, psi.grid, std::vector<cplx>(n)};
    const double m_ell = psi.ell + conn.lambda;
    for (int k = 0; k < n; ++k) {
        const double r = psi.grid->nodes[k];
        const double damp = std::pow(r, -4.0 * params.mu);
        const double j_r = params.hbar / params.mass * damp *
                           std::imag(std::conj(phi[k]) * dphi[k] / r);
        const double j_t = params.hbar * m_ell / params.mass * damp * std::norm(phi[k]);
        out.j_r.samples[k] = j_r;
        out.j_theta.samples[k] = j_t;
    }
    return out;
}

RadialMode covariant_divergence(const CurrentPair& current) {
    const RadialMode& jr = current.j_r;
    require_mode(jr, "covariant_divergence", 5);
    const int n = jr.grid->size();
    // (1/r) d_r (r J_r) = e^{-2t} d_t (e^t J_r); the theta component of a
    // sector current is theta-independent and drops out.
    std::vector<cplx> rjr(n);
    for (int k = 0; k < n; ++k) rjr[k] = jr.grid->nodes[k] * jr.samples[k];
    std::vector<cplx> d;
    differentiate_log(*jr.grid, rjr, &d, nullptr);
    RadialMode out{jr.ell, jr.grid, std::vector<cplx>(n)};
    for (int k = 0; k < n; ++k) {
        const double r = jr.grid->nodes[k];
        out.samples[k] = d[k] / (r * r);
    }
    return out;
}

cplx momentum_wavefunction(const PolarPoint& q, double p_x, double p_y,
                           const FlatConnection& conn, const PolarPoint& base,
                           const bundle::DiscretePath& path, double hbar) {
    if (conn.hbar != hbar)
        throw InputError("momentum_wavefunction: hbar disagrees with the connection");
    if (path.vertices.size() < 2)
        throw InputError("momentum_wavefunction: path needs at least two vertices");
    const PolarPoint& front = path.vertices.front();
    const PolarPoint& back = path.vertices.back();
    if (std::abs(front.r - base.r) > 1e-12 * base.r ||
        std::abs(front.theta - base.theta) > 1e-12)
        throw InputError("momentum_wavefunction: path does not start at the base point");
    if (std::abs(back.r - q.r) > 1e-12 * q.r || std::abs(back.theta - q.theta) > 1e-12)
        throw InputError("momentum_wavefunction: path does not end at q");
    const cplx omega = bundle::holonomy(conn, path);
    const double phase = (q.x() * p_x + q.y() * p_y) / hbar;
    return omega / (bundle::kTwoPi * hbar * std::sqrt(q.r)) *
           std::exp(cplx(0.0, phase));
}

void write_csv(std::ostream& os, const RadialMode& mode) {
    os << "r,re_f,im_f\n";
    char line[128];
    for (size_t k = 0; k < mode.samples.size(); ++k) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", mode.grid->nodes[k],
                      mode.samples[k].real(), mode.samples[k].imag());
        os << line;
    }
}

nlohmann::json mode_to_json(const RadialMode& mode) {
    nlohmann::json j;
    j["ell"] = mode.ell;
    j["grid"] = mode.grid->descriptor();
    std::vector<double> re(mode.samples.size()), im(mode.samples.size());
    for (size_t k = 0; k < mode.samples.size(); ++k) {
        re[k] = mode.samples[k].real();
        im[k] = mode.samples[k].imag();
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

RadialMode mode_from_json(const nlohmann::json& j) {
    RadialMode mode;
    mode.ell = j.at("ell").get<int>();
    mode.grid = grid_from_json(j.at("grid"));
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size() || (int)re.size() != mode.grid->size())
        throw InputError("mode: sample arrays do not match the grid");
    mode.samples.resize(re.size());
    for (size_t k = 0; k < re.size(); ++k) mode.samples[k] = cplx(re[k], im[k]);
    return mode;
}

}  // namespace abflux::hilbert
