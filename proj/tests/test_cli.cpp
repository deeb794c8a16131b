// End-to-end tests of the command-line tool: artifact layout, determinism,
// exit codes, and config round-tripping.  The binary path is injected by the
// build system.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include <nlohmann/json.hpp>

#include "centroflow/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kBinary = CENTROFLOW_CLI_PATH;

int run_cli(const std::string& args) {
    const std::string cmd = kBinary + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("centroflow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("run subcommand writes the full artifact set and is deterministic") {
    const auto dir = fresh_dir("run");
    const auto cfg = dir / "cfg.json";
    write_text(cfg, R"({
      "grid_n": 64,
      "flow": {"family": "contracting", "p": 1.0, "area_floor": 0.31415},
      "body": {"builtin": "circle"},
      "checks": ["ratio", "area", "santalo"],
      "plots": true,
      "out_dir": ")" + (dir / "out1").string() + R"("
    })");

    CHECK(run_cli("run --config " + cfg.string()) == 0);
    for (const char* name : {"trajectory.csv", "report.json", "plot_area.svg",
                             "plot_santalo.svg", "plot_hausdorff_t.svg"})
        CHECK(fs::exists(dir / "out1" / name));

    // Version line first, then the pinned header.
    std::istringstream csv(read_text(dir / "out1" / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "# centroflow 1.0");
    std::getline(csv, line);
    CHECK(line.rfind("t,tau,dt,A,A_dual,L,omega_p,omega_1,k0_min,k0_max,", 0) == 0);

    // Same config, fresh output directory: byte-identical CSV.
    CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir / "out2").string()) == 0);
    CHECK(read_text(dir / "out1" / "trajectory.csv") ==
          read_text(dir / "out2" / "trajectory.csv"));

    // Report carries the checks and the circle's extinction estimate.
    const auto report = json::parse(read_text(dir / "out1" / "report.json"));
    CHECK(report.at("passed").get<bool>());
    CHECK(report.at("termination").get<std::string>() == "extinction");
    CHECK(report.at("extinction_estimate").get<double>() == doctest::Approx(0.75).epsilon(1e-3));
    CHECK(report.at("checks").size() == 3);

    // Body snapshots are re-loadable convex bodies.
    bool found_body = false;
    for (const auto& entry : fs::directory_iterator(dir / "out1")) {
        const auto name = entry.path().filename().string();
        if (name.rfind("body_", 0) != 0) continue;
        found_body = true;
        const auto body = centroflow::io::body_from_json(json::parse(read_text(entry.path())));
        CHECK(centroflow::radius_of_curvature(body).min() > 0.0);
    }
    CHECK(found_body);
}

TEST_CASE("config round trips through the report") {
    const auto dir = fresh_dir("roundtrip");
    const auto cfg = dir / "cfg.json";
    write_text(cfg, R"({
      "grid_n": 64,
      "flow": {"family": "contracting", "p": 2.0, "area_floor": 0.6},
      "body": {"random": {"seed": 9}},
      "checks": ["ratio"],
      "plots": false,
      "out_dir": ")" + (dir / "out1").string() + R"("
    })");
    CHECK(run_cli("verify --config " + cfg.string()) == 0);
    const auto rep1 = json::parse(read_text(dir / "out1" / "report.json"));

    // Feed the serialized config back in; the re-serialized form must be
    // identical (up to the output directory we point elsewhere).
    auto cfg2 = rep1.at("config");
    cfg2["out_dir"] = (dir / "out2").string();
    write_text(dir / "cfg2.json", cfg2.dump());
    CHECK(run_cli("verify --config " + (dir / "cfg2.json").string()) == 0);
    auto rep2 = json::parse(read_text(dir / "out2" / "report.json"));
    auto echoed = rep2.at("config");
    echoed["out_dir"] = rep1.at("config").at("out_dir");
    CHECK(echoed == rep1.at("config"));
}

TEST_CASE("verify exit code reflects check outcomes") {
    const auto dir = fresh_dir("verify");
    const auto cfg = dir / "cfg.json";
    // Contracting flow from an ellipse: the ratio and the Santalo product
    // stay constant (monotone with zero margin) and duality holds in closed
    // form.  n = 128: the Santalo quadrature noise on a 4:1 ellipse at n = 64
    // exceeds the 1e-8 per-step monotonicity tolerance.
    write_text(cfg, R"({
      "grid_n": 128,
      "flow": {"family": "contracting", "p": 1.5, "area_floor": 0.9},
      "body": {"builtin": "ellipse:2:0.5"},
      "checks": ["ratio", "santalo", "duality"],
      "duality_horizon": 0.2,
      "out_dir": ")" + (dir / "out").string() + R"("
    })");
    CHECK(run_cli("verify --config " + cfg.string()) == 0);
    const auto rep = json::parse(read_text(dir / "out" / "report.json"));
    for (const auto& c : rep.at("checks")) CHECK(c.at("passed").get<bool>());
}

TEST_CASE("sweep writes one row per cell") {
    const auto dir = fresh_dir("sweep");
    const auto cfg = dir / "cfg.json";
    write_text(cfg, R"({
      "grid_n": 64,
      "flow": {"family": "contracting", "p": 1.0, "area_floor": 1.0},
      "checks": ["santalo"],
      "plots": false,
      "out_dir": ")" + (dir / "out").string() + R"(",
      "sweep": {"p_values": [1.0, 2.0], "seeds": [3, 4], "workers": 2}
    })");
    CHECK(run_cli("sweep --config " + cfg.string()) == 0);
    std::istringstream csv(read_text(dir / "out" / "sweep.csv"));
    std::string line;
    std::getline(csv, line);  // version
    std::getline(csv, line);  // header
    CHECK(line.rfind("p,seed,status,", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    // Determinism across repeated sweeps.
    CHECK(run_cli("sweep --config " + cfg.string() + " --out " + (dir / "out2").string()) == 0);
    CHECK(read_text(dir / "out" / "sweep.csv") == read_text(dir / "out2" / "sweep.csv"));
}

TEST_CASE("usage and config errors exit with code 2") {
    const auto dir = fresh_dir("errors");
    CHECK(run_cli("run") == 2);                                // missing --config
    CHECK(run_cli("run --config /nonexistent/cfg.json") == 2); // unreadable config
    CHECK(run_cli("frobnicate --config x.json") == 2);         // unknown subcommand

    const auto bad_check = dir / "bad_check.json";
    write_text(bad_check, R"({"grid_n": 64, "body": {"builtin": "circle"},
                              "checks": ["no_such_check"],
                              "out_dir": ")" + (dir / "o1").string() + R"("})");
    CHECK(run_cli("verify --config " + bad_check.string()) == 2);

    const auto bad_body = dir / "bad_body.json";
    write_text(bad_body, R"({"grid_n": 64, "body": {"builtin": "dodecahedron"},
                             "out_dir": ")" + (dir / "o2").string() + R"("})");
    CHECK(run_cli("run --config " + bad_body.string()) == 2);

    const auto two_sources = dir / "two_sources.json";
    write_text(two_sources, R"({"grid_n": 64,
                                "body": {"builtin": "circle", "random": {"seed": 1}},
                                "out_dir": ")" + (dir / "o3").string() + R"("})");
    CHECK(run_cli("run --config " + two_sources.string()) == 2);
}

TEST_CASE("numeric failures exit with code 3") {
    const auto dir = fresh_dir("numeric");
    const auto cfg = dir / "cfg.json";
    // Random-body generation with absurd amplitudes exhausts rejection
    // sampling and raises a numeric error.
    write_text(cfg, R"({
      "grid_n": 64,
      "body": {"random": {"seed": 1, "amplitude": 50.0, "decay": 1.0}},
      "out_dir": ")" + (dir / "out").string() + R"("
    })");
    CHECK(run_cli("run --config " + cfg.string()) == 3);
}

TEST_CASE("seed override changes the body, same seed reproduces it") {
    const auto dir = fresh_dir("seed");
    const auto cfg = dir / "cfg.json";
    write_text(cfg, R"({
      "grid_n": 64,
      "flow": {"family": "contracting", "p": 1.0, "area_floor": 1.5},
      "body": {"random": {"seed": 5}},
      "plots": false,
      "out_dir": ")" + (dir / "o1").string() + R"("
    })");
    CHECK(run_cli("run --config " + cfg.string()) == 0);
    CHECK(run_cli("run --config " + cfg.string() + " --seed 5 --out " +
                  (dir / "o2").string()) == 0);
    CHECK(run_cli("run --config " + cfg.string() + " --seed 6 --out " +
                  (dir / "o3").string()) == 0);
    CHECK(read_text(dir / "o1" / "trajectory.csv") == read_text(dir / "o2" / "trajectory.csv"));
    CHECK(read_text(dir / "o1" / "trajectory.csv") != read_text(dir / "o3" / "trajectory.csv"));
}
