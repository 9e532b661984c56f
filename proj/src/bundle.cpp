#include "abflux/bundle.hpp"

#include <cmath>

#include "abflux/errors.hpp"
#include "abflux/expr.hpp"

namespace abflux::bundle {

namespace {

double wrap_to_2pi(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

// difference wrapped to (-pi, pi]
double wrap_delta(double d) {
    d = std::fmod(d, kTwoPi);
    if (d > M_PI) d -= kTwoPi;
    if (d <= -M_PI) d += kTwoPi;
    return d;
}

class ExprScalar final : public GaugeScalar {
public:
    ExprScalar(expr::NodePtr node, std::string src)
        : node_(std::move(node)), src_(std::move(src)) {}
    double value(double r, double theta) const override {
        return expr::eval(node_, r, theta);
    }
    void gradient(double r, double theta, double* d_r, double* d_theta) const override {
        expr::eval_with_gradient(node_, r, theta, nullptr, d_r, d_theta);
    }
    const std::string* source() const override { return &src_; }

private:
    expr::NodePtr node_;
    std::string src_;
};

class CallableScalar final : public GaugeScalar {
public:
    CallableScalar(std::function<double(double, double)> v,
                   std::function<double(double, double)> gr,
                   std::function<double(double, double)> gt)
        : v_(std::move(v)), gr_(std::move(gr)), gt_(std::move(gt)) {}
    double value(double r, double theta) const override { return v_(r, theta); }
    void gradient(double r, double theta, double* d_r, double* d_theta) const override {
        if (d_r) *d_r = gr_(r, theta);
        if (d_theta) *d_theta = gt_(r, theta);
    }

private:
    std::function<double(double, double)> v_, gr_, gt_;
};

class SumScalar final : public GaugeScalar {
public:
    SumScalar(ScalarPtr a, ScalarPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    double value(double r, double theta) const override {
        return a_->value(r, theta) + b_->value(r, theta);
    }
    void gradient(double r, double theta, double* d_r, double* d_theta) const override {
        double ar, at, br, bt;
        a_->gradient(r, theta, &ar, &at);
        b_->gradient(r, theta, &br, &bt);
        if (d_r) *d_r = ar + br;
        if (d_theta) *d_theta = at + bt;
    }

private:
    ScalarPtr a_, b_;
};

void validate_path(const DiscretePath& path) {
    if (path.vertices.size() < 2) throw InputError("path: needs at least two vertices");
    for (size_t k = 0; k + 1 < path.vertices.size(); ++k) {
        double d = wrap_delta(path.vertices[k + 1].theta - path.vertices[k].theta);
        if (std::abs(d) >= M_PI - 1e-12)
            throw InputError("path: segment " + std::to_string(k) +
                             " has |dtheta| >= pi (crosses the origin)");
    }
    if (path.closed) {
        const PolarPoint& a = path.vertices.front();
        const PolarPoint& b = path.vertices.back();
        if (a.r != b.r || a.theta != b.theta)
            throw InputError("path: closed path must repeat its first vertex");
    }
}

void validate_grid(const RectGrid& grid) {
    if (grid.r_nodes.size() < 3 || grid.theta_nodes.size() < 3)
        throw InputError("flatness grid: need at least 3 nodes per axis");
    for (size_t i = 0; i + 1 < grid.r_nodes.size(); ++i)
        if (!(grid.r_nodes[i + 1] > grid.r_nodes[i]))
            throw InputError("flatness grid: r nodes must increase");
    for (size_t i = 0; i + 1 < grid.theta_nodes.size(); ++i)
        if (!(grid.theta_nodes[i + 1] > grid.theta_nodes[i]))
            throw InputError("flatness grid: theta nodes must increase");
    if (grid.r_nodes.front() <= 0.0)
        throw InputError("flatness grid: r nodes must be positive");
}

double curl_residual(const std::vector<double>& ar, const std::vector<double>& at,
                     const RectGrid& grid) {
    const size_t nr = grid.r_nodes.size(), nt = grid.theta_nodes.size();
    double worst = 0.0;
    for (size_t i = 1; i + 1 < nr; ++i) {
        for (size_t j = 1; j + 1 < nt; ++j) {
            double dr = grid.r_nodes[i + 1] - grid.r_nodes[i - 1];
            double dt = grid.theta_nodes[j + 1] - grid.theta_nodes[j - 1];
            double datheta_dr = (at[(i + 1) * nt + j] - at[(i - 1) * nt + j]) / dr;
            double dar_dtheta = (ar[i * nt + j + 1] - ar[i * nt + j - 1]) / dt;
            worst = std::max(worst, std::abs(datheta_dr - dar_dtheta));
        }
    }
    return worst;
}

}  // namespace

PolarPoint::PolarPoint(double r_, double theta_) : r(r_), theta(wrap_to_2pi(theta_)) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw InputError("PolarPoint: r must be positive and finite");
    if (!std::isfinite(theta_)) throw InputError("PolarPoint: theta must be finite");
}

ScalarPtr parse_scalar(const std::string& expression) {
    return std::make_shared<ExprScalar>(expr::parse(expression), expression);
}

ScalarPtr make_scalar(std::function<double(double, double)> value,
                      std::function<double(double, double)> d_r,
                      std::function<double(double, double)> d_theta) {
    return std::make_shared<CallableScalar>(std::move(value), std::move(d_r),
                                            std::move(d_theta));
}

DiscretePath circle_path(double radius, int windings, int segments_per_turn,
                         double start_theta) {
    if (segments_per_turn < 3) throw InputError("circle_path: too few segments");
    DiscretePath p;
    p.closed = true;
    int n = std::abs(windings) * segments_per_turn;
    if (windings == 0) n = segments_per_turn;  // a closed loop staying put in angle class
    double dir = windings < 0 ? -1.0 : 1.0;
    double span = (windings == 0) ? 0.0 : dir * kTwoPi / segments_per_turn;
    p.vertices.reserve(n + 1);
    for (int k = 0; k < n; ++k)
        p.vertices.emplace_back(radius, start_theta + span * k);
    p.vertices.push_back(p.vertices.front());
    return p;
}

std::pair<double, double> connection_components(const FlatConnection& conn,
                                                const PolarPoint& q) {
    double a_r = 0.0, a_theta = conn.hbar * conn.lambda;
    if (conn.has_pure_gauge()) {
        double gr, gt;
        conn.pure_gauge->gradient(q.r, q.theta, &gr, &gt);
        a_r += gr;
        a_theta += gt;
    }
    return {a_r, a_theta};
}

double flatness_residual(const FlatConnection& conn, const RectGrid& grid) {
    validate_grid(grid);
    const size_t nr = grid.r_nodes.size(), nt = grid.theta_nodes.size();
    std::vector<double> ar(nr * nt), at(nr * nt);
    for (size_t i = 0; i < nr; ++i) {
        for (size_t j = 0; j < nt; ++j) {
            PolarPoint q(grid.r_nodes[i], grid.theta_nodes[j]);
            auto [vr, vt] = connection_components(conn, q);
            // components sampled at the unwrapped angle: chi is single-valued,
            // so the wrap in PolarPoint is immaterial for the gradient
            ar[i * nt + j] = vr;
            at[i * nt + j] = vt;
        }
    }
    return curl_residual(ar, at, grid);
}

double flatness_residual(const FieldSamples& samples, const RectGrid& grid) {
    validate_grid(grid);
    const size_t n = grid.r_nodes.size() * grid.theta_nodes.size();
    if (samples.a_r.size() != n || samples.a_theta.size() != n)
        throw InputError("flatness: sample count does not match grid");
    return curl_residual(samples.a_r, samples.a_theta, grid);
}

cplx holonomy(const FlatConnection& conn, const DiscretePath& path) {
    validate_path(path);
    double flat_part = 0.0;   // sum of lambda * hbar * dtheta
    double gauge_part = 0.0;  // sum of chi differences
    for (size_t k = 0; k + 1 < path.vertices.size(); ++k) {
        const PolarPoint& a = path.vertices[k];
        const PolarPoint& b = path.vertices[k + 1];
        flat_part += conn.hbar * conn.lambda * wrap_delta(b.theta - a.theta);
        if (conn.has_pure_gauge())
            gauge_part += conn.pure_gauge->value(b.r, b.theta) -
                          conn.pure_gauge->value(a.r, a.theta);
    }
    return std::polar(1.0, -(flat_part + gauge_part) / conn.hbar);
}

int winding_number(const DiscretePath& path) {
    validate_path(path);
    if (!path.closed) throw InputError("winding_number: path must be closed");
    double total = 0.0;
    for (size_t k = 0; k + 1 < path.vertices.size(); ++k)
        total += wrap_delta(path.vertices[k + 1].theta - path.vertices[k].theta);
    return (int)std::llround(total / kTwoPi);
}

FlatConnection gauge_transform(const FlatConnection& conn, const ScalarPtr& chi) {
    FlatConnection out = conn;
    if (!chi) return out;
    out.pure_gauge = conn.has_pure_gauge()
                         ? ScalarPtr(std::make_shared<SumScalar>(conn.pure_gauge, chi))
                         : chi;
    return out;
}

double holonomy_class(const FlatConnection& conn) {
    double c = std::fmod(conn.lambda, 1.0);
    if (c < 0.0) c += 1.0;
    if (c >= 1.0) c = 0.0;
    return c;
}

nlohmann::json to_json(const FlatConnection& conn) {
    nlohmann::json j;
    j["lambda"] = conn.lambda;
    if (conn.has_pure_gauge()) {
        const std::string* src = conn.pure_gauge->source();
        if (!src)
            throw InputError("to_json: connection holds an opaque gauge scalar");
        j["chi"] = *src;
    } else {
        j["chi"] = nullptr;
    }
    if (conn.hbar != 1.0) j["hbar"] = conn.hbar;
    return j;
}

FlatConnection connection_from_json(const nlohmann::json& j) {
    FlatConnection conn;
    if (!j.contains("lambda") || !j["lambda"].is_number())
        throw InputError("connection: missing numeric 'lambda'");
    conn.lambda = j["lambda"].get<double>();
    if (j.contains("hbar")) {
        conn.hbar = j["hbar"].get<double>();
        if (!(conn.hbar > 0.0)) throw InputError("connection: hbar must be positive");
    }
    if (j.contains("chi") && !j["chi"].is_null())
        conn.pure_gauge = parse_scalar(j["chi"].get<std::string>());
    for (auto& [key, _] : j.items())
        if (key != "lambda" && key != "chi" && key != "hbar")
            throw InputError("connection: unknown key '" + key + "'");
    return conn;
}

}  // namespace abflux::bundle
