#pragma once

// Flat U(1) connections on the punctured plane: component evaluation,
// flatness residuals, line-integral holonomies, gauge transformations and
// topology-class extraction.  Connections are stored structurally as
// (lambda, chi): A = hbar*lambda*dtheta + dchi, so flatness is built in;
// raw component samples are accepted only by flatness_residual for probing
// user-supplied fields.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace abflux::bundle {

using cplx = std::complex<double>;

constexpr double kTwoPi = 6.2831853071795864769;

/// Configuration-space point (r, theta) with r > 0 and theta wrapped to
/// [0, 2*pi).
struct PolarPoint {
    double r;
    double theta;

    PolarPoint(double r_, double theta_);
    double x() const { return r * std::cos(theta); }
    double y() const { return r * std::sin(theta); }
};

/// Smooth single-valued scalar chi(r, theta) with an exact gradient.
class GaugeScalar {
public:
    virtual ~GaugeScalar() = default;
    virtual double value(double r, double theta) const = 0;
    virtual void gradient(double r, double theta, double* d_r, double* d_theta) const = 0;
    /// Expression source when the scalar came from the grammar; nullptr for
    /// opaque callables (those cannot be serialized).
    virtual const std::string* source() const { return nullptr; }
};

using ScalarPtr = std::shared_ptr<const GaugeScalar>;

/// chi from the documented expression grammar (r, theta, + - * /, sin, cos,
/// pow); gradient exact via dual numbers.
ScalarPtr parse_scalar(const std::string& expression);

/// chi from callables (value, d/dr, d/dtheta).
ScalarPtr make_scalar(std::function<double(double, double)> value,
                      std::function<double(double, double)> d_r,
                      std::function<double(double, double)> d_theta);

struct FlatConnection {
    double lambda = 0.0;  // holonomy parameter of A = hbar*lambda*dtheta
    double hbar = 1.0;
    ScalarPtr pure_gauge;  // optional chi

    bool has_pure_gauge() const { return pure_gauge != nullptr; }
};

/// Oriented polygonal path; vertices avoid the origin and every segment has
/// wrapped |dtheta| < pi (unambiguous winding).  Closed paths repeat the
/// first vertex at the end.
struct DiscretePath {
    std::vector<PolarPoint> vertices;
    bool closed = false;
};

/// Circle of given radius traversed |windings| times (sign = orientation),
/// as a closed path with the angular invariant satisfied.
DiscretePath circle_path(double radius, int windings, int segments_per_turn = 64,
                         double start_theta = 0.0);

/// Rectangular (r, theta) sample grid for flatness probing.
struct RectGrid {
    std::vector<double> r_nodes;      // strictly increasing, > 0
    std::vector<double> theta_nodes;  // strictly increasing
};

/// Component samples of a vector field on a RectGrid, row-major
/// [i_r * n_theta + j_theta].
struct FieldSamples {
    std::vector<double> a_r;
    std::vector<double> a_theta;
};

/// (A_r, A_theta) at q: (dchi/dr, hbar*lambda + dchi/dtheta).
std::pair<double, double> connection_components(const FlatConnection& conn,
                                                const PolarPoint& q);

/// max over interior grid nodes of |d_r A_theta - d_theta A_r| by central
/// differences.  Needs at least 3 nodes per axis.
double flatness_residual(const FlatConnection& conn, const RectGrid& grid);
double flatness_residual(const FieldSamples& samples, const RectGrid& grid);

/// exp(-(i/hbar) * int_P A . dq), segment-wise: exact hbar*lambda*dtheta on
/// the flat part, exact chi difference on the gradient part.  Unit modulus
/// by construction.
cplx holonomy(const FlatConnection& conn, const DiscretePath& path);

/// (sum of wrapped dtheta) / (2 pi) rounded to the nearest integer; exact
/// for paths satisfying the |dtheta| < pi invariant.  Closed paths only.
int winding_number(const DiscretePath& path);

/// Shift the connection by a gradient: A -> A + dchi.  Closed-path
/// holonomies are unchanged for single-valued chi.
FlatConnection gauge_transform(const FlatConnection& conn, const ScalarPtr& chi);

/// lambda mod 1 in [0, 1); connections are unitarily equivalent iff their
/// classes match.
double holonomy_class(const FlatConnection& conn);

/// JSON form {"lambda": number, "chi": null | expression-string}; "hbar" is
/// accepted (and emitted when != 1).  Opaque callables cannot be serialized.
nlohmann::json to_json(const FlatConnection& conn);
FlatConnection connection_from_json(const nlohmann::json& j);

}  // namespace abflux::bundle
