#include "abflux/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "abflux/errors.hpp"

using namespace abflux;
using models::cplx;
using hilbert::HamiltonianParams;

TEST_CASE("alpha_abs") {
    CHECK(models::alpha_abs(0, 0.0, 0.0) == 0.0);
    CHECK(models::alpha_abs(1, 0.0, 0.0) == 1.0);
    CHECK(models::alpha_abs(0, 0.5, 0.5) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(models::alpha_abs(-3, 0.0, 0.0) == 3.0);
}

TEST_CASE("oscillator energies") {
    HamiltonianParams params;
    CHECK(models::oscillator_energy(0, 0, params, 0.0) == 1.0);
    CHECK(models::oscillator_energy(1, 2, params, 0.0) == 5.0);
    CHECK(models::oscillator_energy(0, 0, params, 0.25) == doctest::Approx(1.25));
    HamiltonianParams freep;
    freep.omega = 0.0;
    CHECK_THROWS_AS(models::oscillator_energy(0, 0, freep, 0.0), DomainError);
}

TEST_CASE("oscillator wavefunctions: ground state, node, normalization") {
    HamiltonianParams params;
    params.mass = 1.3;
    params.omega = 0.9;
    params.hbar = 0.7;
    auto grid = hilbert::oscillator_grid(params);

    hilbert::RadialMode ground = models::oscillator_wavefunction(0, 0, params, 0.0, grid);
    const double c = std::sqrt(params.mass * params.omega / (M_PI * params.hbar));
    for (int k = 0; k < grid->size(); k += 99) {
        double u = grid->nodes[k] / params.length_scale();
        CHECK(std::abs(ground.samples[k] - c * std::exp(-0.5 * u * u)) < 1e-12);
    }

    // L^0_1(u^2) = 1 - u^2: the first excited s-mode changes sign at u = 1
    hilbert::RadialMode excited = models::oscillator_wavefunction(1, 0, params, 0.0, grid);
    double scale = params.length_scale();
    int below = 0, above = 0;
    for (int k = 0; k < grid->size(); ++k) {
        double u = grid->nodes[k] / scale;
        if (u < 0.99) below = k;
        if (u > 1.01 && !above) above = k;
    }
    CHECK(std::real(excited.samples[below]) > 0.0);
    CHECK(std::real(excited.samples[above]) < 0.0);

    struct Pick {
        double mu, nu, lambda;
    };
    for (const Pick& p : {Pick{0.0, 0.0, 0.0}, Pick{0.25, 0.0, 0.3}, Pick{0.2, 0.15, 0.5}}) {
        HamiltonianParams q = params;
        q.mu = p.mu;
        q.nu = p.nu;
        for (auto [n, ell] : {std::pair{0, 0}, {3, 2}, {6, -4}, {2, 6}}) {
            hilbert::RadialMode m = models::oscillator_wavefunction(n, ell, q, p.lambda, grid);
            CHECK(std::abs(hilbert::inner_product(m, m) - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("oscillator orthonormality within a sector") {
    HamiltonianParams params;
    params.mu = 0.2;
    params.nu = 0.15;
    auto grid = hilbert::oscillator_grid(params);
    const double lambda = 0.5;
    std::vector<hilbert::RadialMode> modes;
    for (int n = 0; n <= 6; ++n)
        modes.push_back(models::oscillator_wavefunction(n, 2, params, lambda, grid));
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b) {
            cplx ip = hilbert::inner_product(modes[a], modes[b]);
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("oscillator wavefunction coverage guard") {
    HamiltonianParams params;
    auto narrow = hilbert::make_log_grid(1e-6, 3.0, 400);  // truncates n=6 badly
    CHECK_THROWS_AS(models::oscillator_wavefunction(6, 4, params, 0.0, narrow),
                    CoverageError);
    auto offset = hilbert::make_log_grid(0.5, 14.0, 400);  // misses the small-r mass of s-modes
    CHECK_THROWS_AS(models::oscillator_wavefunction(0, 0, params, 0.0, offset),
                    CoverageError);
}

TEST_CASE("free modes: constants, small-r power, negative energy") {
    HamiltonianParams params;
    params.omega = 0.0;
    auto grid = hilbert::make_log_grid(1e-6, 10.0, 800);

    hilbert::RadialMode zero = models::free_wavefunction({0.0, 0}, params, 0.0, grid);
    const double c = std::sqrt(params.mass / (bundle::kTwoPi * params.hbar * params.hbar));
    for (int k = 0; k < grid->size(); k += 131)
        CHECK(std::abs(zero.samples[k] - c) < 1e-14);

    hilbert::RadialMode pwave = models::free_wavefunction({0.5, 1}, params, 0.0, grid);
    // J_1(kr) ~ kr/2: ratio between the two innermost nodes equals the node ratio
    double ratio = std::abs(pwave.samples[1]) / std::abs(pwave.samples[0]);
    CHECK(ratio == doctest::Approx(grid->nodes[1] / grid->nodes[0]).epsilon(1e-6));

    CHECK_THROWS_AS(models::free_wavefunction({-1.0, 0}, params, 0.0, grid), DomainError);
}

TEST_CASE("plane wave expansion") {
    CHECK(std::abs(models::plane_wave_expansion(0.0, 0.0, 0.3, 0.1, 1.0, 10) - 1.0) <
          1e-14);
    CHECK(std::abs(models::plane_wave_expansion(0.4, -0.2, 0.0, 0.0, 1.0, 10) - 1.0) <
          1e-14);

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uxy(-2.5, 2.5), up(-2.0, 2.0);
    const double hbar = 1.0;
    double worst = 0.0;
    int tested = 0;
    while (tested < 100) {
        double x = uxy(rng), y = uxy(rng), px = up(rng), py = up(rng);
        if (std::hypot(x, y) * std::hypot(px, py) / hbar > 10.0) continue;
        ++tested;
        cplx direct = std::exp(cplx(0.0, (x * px + y * py) / hbar));
        cplx sum = models::plane_wave_expansion(x, y, px, py, hbar, 40);
        worst = std::max(worst, std::abs(sum - direct));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("plane wave expansion error falls monotonically past the Bessel cutoff") {
    const double x = 1.9, y = -1.3, px = 1.7, py = 2.1, hbar = 1.0;
    cplx direct = std::exp(cplx(0.0, (x * px + y * py) / hbar));
    double z = std::hypot(x, y) * std::hypot(px, py) / hbar;
    int cutoff = (int)std::ceil(z) + 2;
    double prev = 1e300;
    for (int lmax = cutoff; lmax <= cutoff + 12; ++lmax) {
        double err = std::abs(models::plane_wave_expansion(x, y, px, py, hbar, lmax) - direct);
        CHECK(err <= prev * (1.0 + 1e-12));
        prev = err;
    }
}

TEST_CASE("spectral flow: degeneracies and periodicity") {
    HamiltonianParams params;

    // lambda = 0, mu = 0: level hbar omega (n+1) has multiplicity n+1
    auto rows = models::spectral_flow({0.0}, params, 12, 12);
    std::map<long, int> mult;
    for (const auto& row : rows) mult[std::lround(row.energy)]++;
    for (int n = 0; n <= 10; ++n) CHECK(mult[n + 1] == n + 1);

    // lambda = 0.5, mu = 0: every interior level is doubly degenerate
    // (ell and -ell-1 pair)
    auto spec_half = models::interior_spectrum(0.5, params, 12, 20);
    REQUIRE(spec_half.size() % 2 == 0);
    for (size_t k = 0; k + 1 < spec_half.size(); k += 2)
        CHECK(spec_half[k + 1] - spec_half[k] < 1e-12);

    for (double lam : {0.17, 0.5, 0.83}) {
        auto a = models::interior_spectrum(lam, params, 12, 20);
        auto b = models::interior_spectrum(lam + 1.0, params, 12, 20);
        REQUIRE(a.size() == b.size());
        for (size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-12);
    }

    CHECK_THROWS_AS(models::spectral_flow({0.0}, params, -1, 5), InputError);
}

TEST_CASE("spectral flow: dE/dlambda = hbar omega sign(ell + lambda) at mu = 0") {
    HamiltonianParams params;
    const double eps = 1e-6;
    for (int ell : {-3, -1, 0, 2}) {
        for (double lam : {0.2, 0.7}) {
            double up = models::oscillator_energy(1, ell, params, lam + eps);
            double dn = models::oscillator_energy(1, ell, params, lam - eps);
            double deriv = (up - dn) / (2.0 * eps);
            double expect = params.hbar * params.omega *
                            ((ell + lam) > 0 ? 1.0 : -1.0);
            CHECK(deriv == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("spectral flow rows are ordered deterministically") {
    HamiltonianParams params;
    auto rows = models::spectral_flow({0.1, 0.3}, params, 3, 3);
    for (size_t k = 0; k + 1 < rows.size(); ++k) {
        if (rows[k].lambda != rows[k + 1].lambda) continue;
        bool ordered = rows[k].energy < rows[k + 1].energy ||
                       (rows[k].energy == rows[k + 1].energy &&
                        rows[k].ell <= rows[k + 1].ell);
        CHECK(ordered);
    }
}
