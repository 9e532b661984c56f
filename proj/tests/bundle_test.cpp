#include "abflux/bundle.hpp"

#include <cmath>
#include <complex>

#include <doctest.h>

#include "abflux/errors.hpp"

using namespace abflux;
using bundle::cplx;
using bundle::DiscretePath;
using bundle::FlatConnection;
using bundle::PolarPoint;
using bundle::RectGrid;

namespace {

PolarPoint polar_from_xy(double x, double y) {
    return PolarPoint(std::hypot(x, y), std::atan2(y, x));
}

RectGrid box_grid(double r0, double r1, int nr, double t0, double t1, int nt) {
    RectGrid g;
    for (int i = 0; i < nr; ++i) g.r_nodes.push_back(r0 + (r1 - r0) * i / (nr - 1));
    for (int j = 0; j < nt; ++j) g.theta_nodes.push_back(t0 + (t1 - t0) * j / (nt - 1));
    return g;
}

}  // namespace

TEST_CASE("PolarPoint wraps theta and validates r") {
    PolarPoint q(2.0, -0.5);
    CHECK(q.theta == doctest::Approx(bundle::kTwoPi - 0.5));
    CHECK(PolarPoint(1.0, bundle::kTwoPi).theta == 0.0);
    CHECK_THROWS_AS(PolarPoint(0.0, 1.0), InputError);
    CHECK_THROWS_AS(PolarPoint(-1.0, 1.0), InputError);
}

TEST_CASE("connection components") {
    PolarPoint q(1.7, 0.9);
    FlatConnection trivial;
    auto [ar0, at0] = bundle::connection_components(trivial, q);
    CHECK(ar0 == 0.0);
    CHECK(at0 == 0.0);

    FlatConnection flux{0.3, 1.0, nullptr};
    auto [ar1, at1] = bundle::connection_components(flux, q);
    CHECK(ar1 == 0.0);
    CHECK(at1 == doctest::Approx(0.3));

    FlatConnection withchi{0.3, 1.0, bundle::parse_scalar("r*cos(theta)")};
    auto [ar2, at2] = bundle::connection_components(withchi, q);
    CHECK(ar2 == doctest::Approx(std::cos(0.9)).epsilon(1e-14));
    CHECK(at2 == doctest::Approx(0.3 - 1.7 * std::sin(0.9)).epsilon(1e-14));
}

TEST_CASE("flatness residual") {
    FlatConnection flux{0.7, 1.0, nullptr};
    RectGrid g = box_grid(0.5, 2.0, 9, 0.0, 1.0, 9);
    CHECK(bundle::flatness_residual(flux, g) == 0.0);

    FlatConnection withchi{0.0, 1.0, bundle::parse_scalar("sin(theta)*pow(r,2)")};
    RectGrid fine = box_grid(1.0, 1.001, 5, 0.2, 0.2001, 5);
    CHECK(bundle::flatness_residual(withchi, fine) < 1e-8);

    // a deliberately non-flat sample field: A_theta = r, A_r = 0 has curl 1
    RectGrid g2 = box_grid(0.5, 1.5, 11, 0.0, 0.5, 11);
    bundle::FieldSamples s;
    s.a_r.assign(11 * 11, 0.0);
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) s.a_theta.push_back(g2.r_nodes[i]);
    CHECK(bundle::flatness_residual(s, g2) == doctest::Approx(1.0).epsilon(1e-12));

    RectGrid degenerate = box_grid(0.5, 1.5, 2, 0.0, 0.5, 5);
    CHECK_THROWS_AS(bundle::flatness_residual(flux, degenerate), InputError);
}

TEST_CASE("flatness residual refines at second order") {
    FlatConnection conn{0.2, 1.0, bundle::parse_scalar("sin(theta)*r + cos(theta)")};
    double res_coarse = bundle::flatness_residual(conn, box_grid(1.0, 2.0, 9, 0.0, 1.0, 9));
    double res_fine = bundle::flatness_residual(conn, box_grid(1.0, 2.0, 17, 0.0, 1.0, 17));
    double order = std::log2(res_coarse / res_fine);
    CHECK(order >= 1.9);
}

TEST_CASE("holonomy around circles") {
    FlatConnection conn{0.3, 1.0, nullptr};
    cplx h1 = bundle::holonomy(conn, bundle::circle_path(1.0, 1));
    CHECK(std::abs(h1 - std::polar(1.0, -bundle::kTwoPi * 0.3)) < 1e-12);
    CHECK(std::abs(std::abs(h1) - 1.0) == 0.0);

    cplx h2 = bundle::holonomy(conn, bundle::circle_path(2.5, 2));
    CHECK(std::abs(h2 - std::polar(1.0, -2.0 * bundle::kTwoPi * 0.3)) < 1e-12);

    // closed square well away from the origin: all dtheta net to zero
    DiscretePath sq;
    sq.closed = true;
    sq.vertices = {polar_from_xy(2.5, 0.0), polar_from_xy(2.0, 0.5),
                   polar_from_xy(1.5, 0.0), polar_from_xy(2.0, -0.5),
                   polar_from_xy(2.5, 0.0)};
    CHECK(std::abs(bundle::holonomy(conn, sq) - 1.0) < 1e-12);
}

TEST_CASE("winding numbers") {
    CHECK(bundle::winding_number(bundle::circle_path(1.0, 1)) == 1);
    CHECK(bundle::winding_number(bundle::circle_path(1.0, -2)) == -2);
    DiscretePath sq;
    sq.closed = true;
    sq.vertices = {polar_from_xy(2.5, 0.0), polar_from_xy(2.0, 0.5),
                   polar_from_xy(1.5, 0.0), polar_from_xy(2.0, -0.5),
                   polar_from_xy(2.5, 0.0)};
    CHECK(bundle::winding_number(sq) == 0);

    DiscretePath open;
    open.vertices = {PolarPoint(1.0, 0.0), PolarPoint(1.0, 1.0)};
    CHECK_THROWS_AS(bundle::winding_number(open), InputError);

    // a segment jumping by ~pi is rejected (origin crossing is ambiguous)
    DiscretePath bad;
    bad.closed = true;
    bad.vertices = {PolarPoint(1.0, 0.0), PolarPoint(1.0, M_PI), PolarPoint(1.0, 0.0)};
    CHECK_THROWS_AS(bundle::holonomy(FlatConnection{}, bad), InputError);
}

TEST_CASE("gauge transformations preserve holonomy") {
    FlatConnection conn{0.3, 1.0, nullptr};
    DiscretePath loop = bundle::circle_path(1.0, 1, 48);

    FlatConnection same = bundle::gauge_transform(conn, nullptr);
    CHECK(std::abs(bundle::holonomy(same, loop) - bundle::holonomy(conn, loop)) == 0.0);

    for (const char* chi : {"sin(theta)", "pow(r,2)", "r*cos(theta) + 0.4*sin(theta)"}) {
        FlatConnection shifted = bundle::gauge_transform(conn, bundle::parse_scalar(chi));
        CHECK(std::abs(bundle::holonomy(shifted, loop) - bundle::holonomy(conn, loop)) <
              1e-12);
        // residual is pure second-order discretization error of the smooth chi
        CHECK(bundle::flatness_residual(shifted, box_grid(0.8, 1.2, 9, 0.1, 0.4, 9)) <
              1e-3);
        CHECK(bundle::flatness_residual(
                  shifted, box_grid(0.8, 0.8004, 5, 0.1, 0.1004, 5)) < 1e-9);
        CHECK(bundle::holonomy_class(shifted) == bundle::holonomy_class(conn));
    }
}

TEST_CASE("holonomy of concatenated paths multiplies") {
    FlatConnection conn{0.41, 1.0, bundle::parse_scalar("0.2*r + sin(theta)")};
    DiscretePath p1, p2, joined;
    for (int k = 0; k <= 10; ++k) p1.vertices.emplace_back(1.0 + 0.05 * k, 0.25 * k);
    for (int k = 10; k <= 20; ++k) p2.vertices.emplace_back(1.5 - 0.02 * (k - 10), 0.25 * k);
    joined.vertices = p1.vertices;
    joined.vertices.insert(joined.vertices.end(), p2.vertices.begin() + 1,
                           p2.vertices.end());
    cplx prod = bundle::holonomy(conn, p1) * bundle::holonomy(conn, p2);
    CHECK(std::abs(bundle::holonomy(conn, joined) - prod) < 1e-13);
}

TEST_CASE("holonomy class") {
    CHECK(bundle::holonomy_class(FlatConnection{0.0, 1.0, nullptr}) == 0.0);
    CHECK(bundle::holonomy_class(FlatConnection{1.25, 1.0, nullptr}) ==
          doctest::Approx(0.25));
    CHECK(bundle::holonomy_class(FlatConnection{-0.3, 1.0, nullptr}) ==
          doctest::Approx(0.7));
}

TEST_CASE("connection json round trip") {
    FlatConnection conn{0.35, 1.0, bundle::parse_scalar("sin(theta)*r")};
    auto j = bundle::to_json(conn);
    CHECK(j["lambda"] == 0.35);
    FlatConnection back = bundle::connection_from_json(j);
    CHECK(back.lambda == conn.lambda);
    PolarPoint q(1.3, 0.7);
    CHECK(bundle::connection_components(back, q).second ==
          doctest::Approx(bundle::connection_components(conn, q).second).epsilon(1e-15));

    CHECK_THROWS_AS(bundle::connection_from_json(nlohmann::json{{"chi", nullptr}}),
                    InputError);
    CHECK_THROWS_AS(
        bundle::connection_from_json(nlohmann::json{{"lambda", 0.1}, {"bogus", 1}}),
        InputError);
    FlatConnection opaque{0.1, 1.0,
                          bundle::make_scalar([](double, double) { return 0.0; },
                                              [](double, double) { return 0.0; },
                                              [](double, double) { return 0.0; })};
    CHECK_THROWS_AS(bundle::to_json(opaque), InputError);
}

TEST_CASE("expression grammar") {
    auto chi = bundle::parse_scalar("pow(r,3)*cos(2*theta) - 1.5/r");
    double dr, dt;
    chi->gradient(2.0, 0.3, &dr, &dt);
    CHECK(dr == doctest::Approx(3.0 * 4.0 * std::cos(0.6) + 1.5 / 4.0).epsilon(1e-14));
    CHECK(dt == doctest::Approx(-8.0 * 2.0 * std::sin(0.6)).epsilon(1e-14));
    CHECK_THROWS_AS(bundle::parse_scalar("r +"), InputError);
    CHECK_THROWS_AS(bundle::parse_scalar("foo(r)"), InputError);
    CHECK_THROWS_AS(bundle::parse_scalar("pow(r, theta)"), InputError);
    CHECK_THROWS_AS(bundle::parse_scalar("r r"), InputError);
}
