// Integration tests driving the installed CLI binary end to end.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#ifndef ABFLUX_CLI_PATH
#error "ABFLUX_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "abflux_cli_test";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    fs::path dir = scratch_dir();
    fs::path out = dir / "stdout.txt";
    fs::path err = dir / "stderr.txt";
    std::string cmd = std::string(ABFLUX_CLI_PATH) + " " + args + " > " +
                      out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_file(const char* name, const std::string& body) {
    fs::path p = scratch_dir() / name;
    std::ofstream f(p, std::ios::binary);
    f << body;
    return p;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("cli: spectrum emits ordered rows, deterministically") {
    auto a = run_cli("spectrum --set spectrum.n_r_max=3 --set spectrum.ell_window=3");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.substr(0, 21) == "lambda,n_r,ell,energy");
    // ground row: lambda=0, n_r=0, ell=0, energy = hbar omega = 1
    CHECK(a.out.find("\n0,0,0,1\n") != std::string::npos);
    CHECK(count_lines(a.out) == 1 + 4 * 7);

    auto b = run_cli("spectrum --set spectrum.n_r_max=3 --set spectrum.ell_window=3");
    CHECK(a.out == b.out);  // byte-identical output for identical config
}

TEST_CASE("cli: flow scan produces one block per lambda") {
    auto r = run_cli(
        "flow --set flow.lambda_steps=5 --set flow.n_r_max=2 --set flow.ell_window=2");
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 1 + 5 * 3 * 5);
    CHECK(r.out.find("\n0.5,") != std::string::npos);
    CHECK(r.out.find("\n2,") != std::string::npos);
}

TEST_CASE("cli: config errors are machine-readable and exit 2") {
    auto bad = write_file("bad.json", "{ not json");
    auto r = run_cli("spectrum --config " + bad.string());
    CHECK(r.exit_code == 2);
    auto j = json::parse(r.err);
    CHECK(j["error"]["type"] == "config");

    auto unknown = write_file("unknown.json", R"({"spectrm": {}})");
    auto r2 = run_cli("spectrum --config " + unknown.string());
    CHECK(r2.exit_code == 2);
    CHECK(json::parse(r2.err)["error"]["message"].get<std::string>().find("spectrm") !=
          std::string::npos);

    auto r3 = run_cli("propagate --set propagate.q_i='{\"r\":1.0,\"theta\":0}' "
                      "--set propagate.q_f='{\"r\":1.0,\"theta\":0}' "
                      "--set propagate.delta_t=1.0 --set params.omega=0.0");
    CHECK(r3.exit_code == 2);  // omega = 0 on the real contour: contour error
    CHECK(json::parse(r3.err)["error"]["type"] == "config");
}

TEST_CASE("cli: propagate emits both routes and their difference") {
    auto cfg = write_file("prop.json", R"({
      "lambda": 0.0,
      "propagate": {
        "q_i": {"r": 0.9, "theta": 0.1},
        "q_f": {"r": 1.2, "theta": 0.9},
        "delta_t": 0.8,
        "contour": {"kind": "euclidean"},
        "ell_cutoff": 40,
        "methods": ["spectral", "closed", "direct"]
      }
    })");
    auto r = run_cli("propagate --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["results"]["spectral"].contains("tail_bound"));
    CHECK(j["results"]["spectral"]["contour"] == "euclidean");
    // at lambda = 0, (mu,nu) = (0,0) the spectral sum reproduces the closed form
    CHECK(j["differences"]["closed_vs_spectral"].get<double>() < 1e-10);
    CHECK(j["differences"]["direct_vs_spectral"].get<double>() < 1e-10);
}

TEST_CASE("cli: propagate batch mode emits one record per request line") {
    json req = {{"q_i", {{"r", 0.9}, {"theta", 0.0}}},
                {"q_f", {{"r", 1.1}, {"theta", 0.4}}},
                {"delta_t", 0.7},
                {"contour", {{"kind", "euclidean"}, {"delta", 0.0}}},
                {"ell_cutoff", 25}};
    json req2 = req;
    req2["delta_t"] = 1.3;
    auto batch = write_file("requests.jsonl", req.dump() + "\n" + req2.dump() + "\n");
    auto r = run_cli("propagate --batch " + batch.string());
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 2);
    auto first = json::parse(r.out.substr(0, r.out.find('\n')));
    CHECK(first.contains("value_re"));
    CHECK(first["request"]["delta_t"] == 0.7);
}

TEST_CASE("cli: pathint sweep table shrinks toward the spectral value") {
    auto cfg = write_file("pathint.json", R"({
      "lambda": 0.4,
      "params": {"mu": 0.2, "nu": 0.1},
      "pathint": {
        "q_i": {"r": 0.9, "theta": 0.0},
        "q_f": {"r": 1.1, "theta": 0.3},
        "delta_t": 0.1,
        "contour": {"kind": "euclidean"},
        "ell_cutoff": 10,
        "n_slices_list": [4, 8, 16],
        "pathint_nodes": 400
      }
    })");
    auto r = run_cli("pathint --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n_slices,value_re,value_im,abs_diff_vs_spectral");
    double prev = 1e300;
    int rows = 0;
    for (std::string line; std::getline(lines, line);) {
        auto last = line.rfind(',');
        double diff = std::stod(line.substr(last + 1));
        CHECK(diff < prev);
        prev = diff;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("cli: wavefn dump") {
    auto r = run_cli("wavefn --set wavefn.n_r=1 --set wavefn.ell=2 "
                     "--set grid='{\"r_min\":1e-6,\"r_max\":14.0,\"n_nodes\":64}'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.substr(0, 11) == "r,re_f,im_f");
    CHECK(count_lines(r.out) == 65);
}

TEST_CASE("cli: check command reports, injects faults, honors tolerance override") {
    auto r = run_cli("check");
    REQUIRE(r.exit_code == 0);
    auto report = json::parse(r.out);
    CHECK(report["passed"] == true);
    CHECK(report["checks"].size() >= 20);

    auto f = run_cli("check --set check.fault=flip-lambda-sign");
    CHECK(f.exit_code == 1);
    auto freport = json::parse(f.out);
    CHECK(freport["passed"] == false);
    bool named = false;
    for (const auto& c : freport["checks"])
        if (c["name"] == "10-holonomy-flatness-gauge" && c["passed"] == false)
            named = true;
    CHECK(named);

    auto z = run_cli("check --set check.tolerance_scale=0.0");
    CHECK(z.exit_code == 1);

    auto u = run_cli("check --set check.fault=no-such-fault");
    CHECK(u.exit_code == 2);
}
