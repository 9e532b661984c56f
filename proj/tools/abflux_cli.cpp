// abflux command line: spectra, spectral-flow scans, wavefunction dumps,
// propagator evaluations, path-integral convergence studies, and the full
// invariant-check suite.  Outputs are CSV or JSON (chosen by the --out
// extension), floats carry 17 significant digits, and identical configs
// produce byte-identical output.
//
// Exit codes: 0 ok, 1 invariant failure, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "abflux/checks.hpp"
#include "abflux/errors.hpp"
#include "abflux/models.hpp"
#include "abflux/propagators.hpp"

using nlohmann::json;
using namespace abflux;
using cplx = std::complex<double>;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& what) {
    for (auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : keys) ok = ok || key == k;
        if (!ok) throw InputError(what + ": unknown key '" + key + "'");
    }
}

const std::initializer_list<const char*> kTopLevelKeys = {
    "params", "lambda", "grid", "seed",     "spectrum", "flow",
    "wavefn", "propagate", "pathint", "check"};

hilbert::HamiltonianParams params_from(const json& cfg) {
    hilbert::HamiltonianParams p;
    if (cfg.contains("params")) {
        const json& j = cfg["params"];
        reject_unknown(j, {"mass", "omega", "mu", "nu", "hbar"}, "params");
        if (j.contains("mass")) p.mass = j["mass"].get<double>();
        if (j.contains("omega")) p.omega = j["omega"].get<double>();
        if (j.contains("mu")) p.mu = j["mu"].get<double>();
        if (j.contains("nu")) p.nu = j["nu"].get<double>();
        if (j.contains("hbar")) p.hbar = j["hbar"].get<double>();
    }
    p.validate();
    return p;
}

double lambda_from(const json& cfg) {
    return cfg.contains("lambda") ? cfg["lambda"].get<double>() : 0.0;
}

hilbert::GridPtr grid_from(const json& cfg, const hilbert::HamiltonianParams& params) {
    if (cfg.contains("grid")) return hilbert::grid_from_json(cfg["grid"]);
    if (!(params.omega > 0.0))
        throw InputError("config: a 'grid' section is required when omega = 0");
    return hilbert::oscillator_grid(params);
}

propagators::TimeContour contour_from(const json& j) {
    propagators::TimeContour contour;
    if (!j.contains("contour")) return contour;
    const json& c = j["contour"];
    reject_unknown(c, {"kind", "delta"}, "contour");
    std::string kind = c.at("kind").get<std::string>();
    if (kind == "real")
        contour.kind = propagators::ContourKind::kReal;
    else if (kind == "euclidean")
        contour.kind = propagators::ContourKind::kEuclidean;
    else if (kind == "wick")
        contour.kind = propagators::ContourKind::kWick;
    else
        throw InputError("contour: unknown kind '" + kind + "'");
    if (c.contains("delta")) contour.delta = c["delta"].get<double>();
    return contour;
}

bundle::PolarPoint point_from(const json& j, const std::string& what) {
    reject_unknown(j, {"r", "theta"}, what);
    return bundle::PolarPoint(j.at("r").get<double>(), j.at("theta").get<double>());
}

propagators::PropagatorRequest request_from(const json& cfg, const json& section) {
    propagators::PropagatorRequest req;
    req.params = params_from(cfg);
    req.lambda = lambda_from(cfg);
    req.q_i = point_from(section.at("q_i"), "q_i");
    req.q_f = point_from(section.at("q_f"), "q_f");
    req.delta_t = section.at("delta_t").get<double>();
    req.contour = contour_from(section);
    if (section.contains("ell_cutoff")) req.ell_cutoff = section["ell_cutoff"].get<int>();
    req.validate();
    return req;
}

// CSV text for spectral rows, ordered (lambda, energy, ell)
std::string flow_csv(const std::vector<models::FlowRow>& rows) {
    std::string out = "lambda,n_r,ell,energy\n";
    for (const auto& r : rows)
        out += fmt17(r.lambda) + "," + std::to_string(r.n_r) + "," +
               std::to_string(r.ell) + "," + fmt17(r.energy) + "\n";
    return out;
}

json flow_json(const std::vector<models::FlowRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"lambda", r.lambda},
                       {"n_r", r.n_r},
                       {"ell", r.ell},
                       {"energy", r.energy}});
    return arr;
}

bool wants_json(const std::string& out_path, bool default_json) {
    if (out_path.empty()) return default_json;
    auto dot = out_path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : out_path.substr(dot);
    if (ext == ".json" || ext == ".jsonl") return true;
    if (ext == ".csv") return false;
    return default_json;
}

// all output is assembled in memory first so that failures never leave a
// partial file behind
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError("cannot open output file '" + out_path + "'");
    f << text;
}

json cfg_section(const json& cfg, const char* name) {
    return cfg.contains(name) ? cfg[name] : json::object();
}

int cmd_spectrum(const json& cfg, const std::string& out_path) {
    const json section = cfg_section(cfg, "spectrum");
    reject_unknown(section, {"n_r_max", "ell_window"}, "spectrum");
    int n_r_max = section.value("n_r_max", 12);
    int ell_window = section.value("ell_window", 20);
    auto rows = models::spectral_flow({lambda_from(cfg)}, params_from(cfg), n_r_max,
                                      ell_window);
    if (wants_json(out_path, false))
        emit(out_path, flow_json(rows).dump(2) + "\n");
    else
        emit(out_path, flow_csv(rows));
    return 0;
}

int cmd_flow(const json& cfg, const std::string& out_path) {
    const json section = cfg_section(cfg, "flow");
    reject_unknown(section, {"lambda_min", "lambda_max", "lambda_steps", "n_r_max",
                             "ell_window"},
                   "flow");
    double lo = section.value("lambda_min", 0.0);
    double hi = section.value("lambda_max", 2.0);
    int steps = section.value("lambda_steps", 41);
    if (steps < 1) throw InputError("flow: lambda_steps must be >= 1");
    int n_r_max = section.value("n_r_max", 12);
    int ell_window = section.value("ell_window", 20);
    std::vector<double> lambdas;
    for (int k = 0; k < steps; ++k)
        lambdas.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
    auto rows = models::spectral_flow(lambdas, params_from(cfg), n_r_max, ell_window);
    if (wants_json(out_path, false))
        emit(out_path, flow_json(rows).dump(2) + "\n");
    else
        emit(out_path, flow_csv(rows));
    return 0;
}

int cmd_wavefn(const json& cfg, const std::string& out_path) {
    const json section = cfg_section(cfg, "wavefn");
    reject_unknown(section, {"kind", "n_r", "ell", "energy"}, "wavefn");
    auto params = params_from(cfg);
    auto grid = grid_from(cfg, params);
    std::string kind = section.value("kind", "oscillator");
    hilbert::RadialMode mode;
    if (kind == "oscillator") {
        mode = models::oscillator_wavefunction(section.value("n_r", 0),
                                               section.value("ell", 0), params,
                                               lambda_from(cfg), grid);
    } else if (kind == "free") {
        models::ScatteringLabel label{section.value("energy", 1.0),
                                      section.value("ell", 0)};
        mode = models::free_wavefunction(label, params, lambda_from(cfg), grid);
    } else {
        throw InputError("wavefn: unknown kind '" + kind + "'");
    }
    if (wants_json(out_path, false)) {
        emit(out_path, hilbert::mode_to_json(mode).dump(2) + "\n");
    } else {
        std::ostringstream os;
        hilbert::write_csv(os, mode);
        emit(out_path, os.str());
    }
    return 0;
}

json run_methods(const json& cfg, const json& section,
                 const propagators::PropagatorRequest& req) {
    std::vector<std::string> methods =
        section.contains("methods")
            ? section["methods"].get<std::vector<std::string>>()
            : std::vector<std::string>{"spectral"};
    json results = json::object();
    propagators::PropagatorValue spectral;
    bool have_spectral = false;
    for (const std::string& m : methods) {
        if (m == "spectral") {
            spectral = req.params.omega > 0.0
                           ? propagators::propagator_spectral_oscillator(req)
                           : propagators::propagator_spectral_free(req);
            have_spectral = true;
            results["spectral"] = propagators::value_to_json(req, spectral);
        } else if (m == "closed") {
            cplx v = req.params.omega > 0.0
                         ? propagators::propagator_closed_oscillator(
                               req.q_f, req.q_i, req.delta_t, req.params, req.contour)
                         : propagators::propagator_closed_free(
                               req.q_f, req.q_i, req.delta_t, req.params, req.contour);
            results["closed"] = {{"value_re", v.real()}, {"value_im", v.imag()}};
        } else if (m == "direct") {
            auto v = propagators::propagator_direct_sum_oscillator(
                req, section.value("n_r_cutoff", 40));
            results["direct"] = propagators::value_to_json(req, v);
            results["direct"]["n_r_cutoff"] = section.value("n_r_cutoff", 40);
        } else if (m == "pathint") {
            auto grid = propagators::pathint_grid(req, section.value("pathint_nodes", 800));
            auto v = propagators::propagator_pathintegral(
                req, section.value("n_slices", 16), grid);
            results["pathint"] = propagators::value_to_json(req, v);
            results["pathint"]["n_slices"] = section.value("n_slices", 16);
        } else {
            throw InputError("propagate: unknown method '" + m + "'");
        }
    }
    json differences = json::object();
    auto diff_against_spectral = [&](const char* name) {
        if (!have_spectral || !results.contains(name)) return;
        cplx v(results[name]["value_re"].get<double>(),
               results[name]["value_im"].get<double>());
        differences[std::string(name) + "_vs_spectral"] = std::abs(v - spectral.value);
    };
    diff_against_spectral("closed");
    diff_against_spectral("direct");
    diff_against_spectral("pathint");
    (void)cfg;
    return {{"request", propagators::request_to_json(req)},
            {"results", results},
            {"differences", differences}};
}

int cmd_propagate(const json& cfg, const std::string& out_path,
                  const std::string& batch_path) {
    const json section = cfg_section(cfg, "propagate");
    reject_unknown(section,
                   {"q_i", "q_f", "delta_t", "contour", "ell_cutoff", "methods",
                    "n_r_cutoff", "n_slices", "pathint_nodes"},
                   "propagate");
    if (!batch_path.empty()) {
        std::ifstream in(batch_path);
        if (!in) throw InputError("cannot open batch file '" + batch_path + "'");
        std::string line, out;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto req = propagators::request_from_json(json::parse(line));
            auto v = req.params.omega > 0.0
                         ? propagators::propagator_spectral_oscillator(req)
                         : propagators::propagator_spectral_free(req);
            out += propagators::value_to_json(req, v).dump() + "\n";
        }
        emit(out_path, out);
        return 0;
    }
    auto req = request_from(cfg, section);
    emit(out_path, run_methods(cfg, section, req).dump(2) + "\n");
    return 0;
}

int cmd_pathint(const json& cfg, const std::string& out_path) {
    const json section = cfg_section(cfg, "pathint");
    reject_unknown(section,
                   {"q_i", "q_f", "delta_t", "contour", "ell_cutoff", "n_slices_list",
                    "pathint_nodes"},
                   "pathint");
    auto req = request_from(cfg, section);
    std::vector<int> sweep = section.contains("n_slices_list")
                                 ? section["n_slices_list"].get<std::vector<int>>()
                                 : std::vector<int>{4, 8, 16, 32};
    auto grid = propagators::pathint_grid(req, section.value("pathint_nodes", 800));
    auto spectral = propagators::propagator_spectral_oscillator(req);
    if (wants_json(out_path, false)) {
        json arr = json::array();
        for (int n : sweep) {
            auto v = propagators::propagator_pathintegral(req, n, grid);
            arr.push_back({{"n_slices", n},
                           {"value_re", v.value.real()},
                           {"value_im", v.value.imag()},
                           {"abs_diff_vs_spectral", std::abs(v.value - spectral.value)}});
        }
        emit(out_path,
             json{{"request", propagators::request_to_json(req)},
                  {"spectral_re", spectral.value.real()},
                  {"spectral_im", spectral.value.imag()},
                  {"sweep", arr}}
                     .dump(2) +
                 "\n");
    } else {
        std::string out = "n_slices,value_re,value_im,abs_diff_vs_spectral\n";
        for (int n : sweep) {
            auto v = propagators::propagator_pathintegral(req, n, grid);
            out += std::to_string(n) + "," + fmt17(v.value.real()) + "," +
                   fmt17(v.value.imag()) + "," +
                   fmt17(std::abs(v.value - spectral.value)) + "\n";
        }
        emit(out_path, out);
    }
    return 0;
}

int cmd_check(const json& cfg, const std::string& out_path) {
    const json section = cfg_section(cfg, "check");
    reject_unknown(section, {"tolerance_scale", "fault"}, "check");
    checks::CheckOptions options;
    if (cfg.contains("seed")) options.seed = cfg["seed"].get<unsigned>();
    options.tolerance_scale = section.value("tolerance_scale", 1.0);
    options.fault = section.value("fault", "");
    auto results = checks::run_all_checks(options);
    emit(out_path, checks::report_to_json(results, options).dump(2) + "\n");
    for (const auto& r : results)
        if (!r.passed) return 1;
    return 0;
}

void apply_override(json& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw InputError("--set expects key=value, got '" + assignment + "'");
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json* node = &cfg;
    size_t begin = 0;
    while (true) {
        auto dot = path.find('.', begin);
        std::string key = path.substr(begin, dot - begin);
        if (key.empty()) throw InputError("--set: empty key in '" + assignment + "'");
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::exception&) {
                parsed = value;  // bare strings are allowed unquoted
            }
            (*node)[key] = parsed;
            return;
        }
        node = &(*node)[key];
        begin = dot + 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum mechanics on the flux-pierced plane"};
    app.require_subcommand(1);

    std::string config_path, out_path, batch_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--set", overrides, "override config entries (key.path=value)");
    app.add_option("--out", out_path, "output file (.csv or .json)");

    auto* sub_spectrum = app.add_subcommand("spectrum", "energy levels at one lambda");
    auto* sub_flow = app.add_subcommand("flow", "spectral flow over a lambda scan");
    auto* sub_wavefn = app.add_subcommand("wavefn", "sample a radial eigenfunction");
    auto* sub_prop = app.add_subcommand("propagate", "evaluate propagators");
    sub_prop->add_option("--batch", batch_path, "JSON-lines request file");
    auto* sub_pathint =
        app.add_subcommand("pathint", "path-integral convergence sweep");
    auto* sub_check = app.add_subcommand("check", "run the invariant suite");
    for (CLI::App* sub : {sub_spectrum, sub_flow, sub_wavefn, sub_prop, sub_pathint,
                          sub_check})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (app.exit(e) == 0) return 0;
        json err = {{"error", {{"type", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw InputError("cannot open config file '" + config_path + "'");
            cfg = json::parse(f);
        }
        for (const auto& o : overrides) apply_override(cfg, o);
        reject_unknown(cfg, kTopLevelKeys, "config");

        if (sub_spectrum->parsed()) return cmd_spectrum(cfg, out_path);
        if (sub_flow->parsed()) return cmd_flow(cfg, out_path);
        if (sub_wavefn->parsed()) return cmd_wavefn(cfg, out_path);
        if (sub_prop->parsed()) return cmd_propagate(cfg, out_path, batch_path);
        if (sub_pathint->parsed()) return cmd_pathint(cfg, out_path);
        if (sub_check->parsed()) return cmd_check(cfg, out_path);
        return 2;
    } catch (const json::exception& e) {
        json err = {{"error", {{"type", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        json err = {{"error", {{"type", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const CoverageError& e) {
        json err = {{"error", {{"type", "coverage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const ResolutionError& e) {
        json err = {{"error", {{"type", "resolution"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
