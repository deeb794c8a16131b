// centroflow: run, verify, and sweep p-centro-affine curvature flows on
// centrally symmetric convex planar curves.
//
// Subcommands:
//   run    --config cfg.json [--out dir] [--seed N]
//   verify --config cfg.json [--out dir] [--seed N]
//   sweep  --config cfg.json [--out dir] [--seed N]
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numeric
// failure.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "centroflow/affine_frame.hpp"
#include "centroflow/io.hpp"
#include "centroflow/random_body.hpp"
#include "centroflow/svg.hpp"
#include "centroflow/verifier.hpp"

namespace cf = centroflow;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersionLine = "# centroflow 1.0";

struct BodySource {
    // Exactly one of the three is active.
    std::string builtin;              // "circle[:R]", "ellipse:a:b[:phi]", "fourier:c2:s2:..."
    std::string file;                 // path to a body JSON
    std::optional<cf::RandomBodySpec> random;
};

struct SweepConfig {
    std::vector<double> p_values;
    std::vector<std::uint64_t> seeds;
    unsigned workers = 4;
};

struct ExperimentConfig {
    std::size_t grid_n = 256;
    cf::FlowSpec flow;
    BodySource body;
    std::string out_dir = "out";
    std::vector<std::string> checks;  // empty means none; ["all"] expands
    bool plots = true;
    long body_every = 0;              // snapshot JSON cadence in records; 0 = first/last
    double duality_horizon = 0.3;
    long convergence_max_steps = 400'000;
    std::optional<SweepConfig> sweep;
};

const std::vector<std::string> kAllChecks = {
    "ratio",   "min_speed", "area",    "omega",       "sigma",
    "santalo", "decay",     "duality", "convergence", "strong_isoperimetric"};

std::string family_name(cf::FlowFamily f) {
    switch (f) {
        case cf::FlowFamily::contracting: return "contracting";
        case cf::FlowFamily::expanding: return "expanding";
        case cf::FlowFamily::normalized: return "normalized";
    }
    return "?";
}

cf::FlowFamily family_from_name(const std::string& name) {
    if (name == "contracting") return cf::FlowFamily::contracting;
    if (name == "expanding") return cf::FlowFamily::expanding;
    if (name == "normalized") return cf::FlowFamily::normalized;
    throw cf::ArgumentError("unknown flow family: " + name);
}

std::string termination_name(cf::Termination t) {
    switch (t) {
        case cf::Termination::running: return "running";
        case cf::Termination::extinction: return "extinction";
        case cf::Termination::blowup: return "blowup";
        case cf::Termination::max_steps: return "max_steps";
        case cf::Termination::convexity_failure: return "convexity_failure";
    }
    return "?";
}

ojson to_json(const ExperimentConfig& c) {
    ojson j;
    j["grid_n"] = c.grid_n;
    ojson flow;
    flow["family"] = family_name(c.flow.family);
    flow["p"] = c.flow.p;
    flow["dt_safety"] = c.flow.dt_safety;
    flow["area_floor"] = c.flow.area_floor;
    flow["area_ceiling"] = c.flow.area_ceiling;
    flow["max_steps"] = c.flow.max_steps;
    flow["record_every"] = c.flow.record_every;
    flow["convexity_floor"] = c.flow.convexity_floor;
    flow["q_watch"] = c.flow.q_watch;
    j["flow"] = flow;
    ojson body;
    if (!c.body.builtin.empty()) body["builtin"] = c.body.builtin;
    if (!c.body.file.empty()) body["file"] = c.body.file;
    if (c.body.random) {
        ojson r;
        r["seed"] = c.body.random->seed;
        r["k_max"] = c.body.random->k_max;
        r["amplitude"] = c.body.random->amplitude;
        r["decay"] = c.body.random->decay;
        r["convexity_margin"] = c.body.random->convexity_margin;
        body["random"] = r;
    }
    j["body"] = body;
    j["out_dir"] = c.out_dir;
    j["checks"] = c.checks;
    j["plots"] = c.plots;
    j["body_every"] = c.body_every;
    j["duality_horizon"] = c.duality_horizon;
    j["convergence_max_steps"] = c.convergence_max_steps;
    if (c.sweep) {
        ojson s;
        s["p_values"] = c.sweep->p_values;
        s["seeds"] = c.sweep->seeds;
        s["workers"] = c.sweep->workers;
        j["sweep"] = s;
    }
    return j;
}

ExperimentConfig config_from_json(const ojson& j) {
    ExperimentConfig c;
    c.grid_n = j.value("grid_n", c.grid_n);
    if (j.contains("flow")) {
        const auto& f = j.at("flow");
        c.flow.family = family_from_name(f.value("family", std::string("contracting")));
        c.flow.p = f.value("p", c.flow.p);
        c.flow.dt_safety = f.value("dt_safety", c.flow.dt_safety);
        c.flow.area_floor = f.value("area_floor", c.flow.area_floor);
        c.flow.area_ceiling = f.value("area_ceiling", c.flow.area_ceiling);
        c.flow.max_steps = f.value("max_steps", c.flow.max_steps);
        c.flow.record_every = f.value("record_every", c.flow.record_every);
        c.flow.convexity_floor = f.value("convexity_floor", c.flow.convexity_floor);
        c.flow.q_watch = f.value("q_watch", c.flow.q_watch);
    }
    if (j.contains("body")) {
        const auto& b = j.at("body");
        c.body.builtin = b.value("builtin", std::string());
        c.body.file = b.value("file", std::string());
        if (b.contains("random")) {
            const auto& r = b.at("random");
            cf::RandomBodySpec rs;
            rs.seed = r.value("seed", rs.seed);
            rs.k_max = r.value("k_max", rs.k_max);
            rs.amplitude = r.value("amplitude", rs.amplitude);
            rs.decay = r.value("decay", rs.decay);
            rs.convexity_margin = r.value("convexity_margin", rs.convexity_margin);
            c.body.random = rs;
        }
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.checks = j.value("checks", c.checks);
    c.plots = j.value("plots", c.plots);
    c.body_every = j.value("body_every", c.body_every);
    c.duality_horizon = j.value("duality_horizon", c.duality_horizon);
    c.convergence_max_steps = j.value("convergence_max_steps", c.convergence_max_steps);
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepConfig sw;
        sw.p_values = s.value("p_values", sw.p_values);
        sw.seeds = s.value("seeds", sw.seeds);
        sw.workers = s.value("workers", sw.workers);
        c.sweep = sw;
    }
    const int sources = int(!c.body.builtin.empty()) + int(!c.body.file.empty()) +
                        int(c.body.random.has_value());
    if (sources > 1)
        throw cf::ArgumentError("config: body must name exactly one of builtin/file/random");
    return c;
}

std::vector<double> split_params(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) out.push_back(std::stod(part));
    return out;
}

cf::SupportBody builtin_body(const std::string& name, const cf::AngularGrid& grid) {
    const auto colon = name.find(':');
    const std::string kind = name.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : name.substr(colon + 1);
    if (kind == "circle") {
        const double radius = rest.empty() ? 1.0 : std::stod(rest);
        if (radius <= 0.0) throw cf::ArgumentError("circle radius must be positive");
        return cf::SupportBody(cf::PeriodicField::constant(grid, radius));
    }
    if (kind == "ellipse") {
        const auto v = split_params(rest);
        if (v.size() != 2 && v.size() != 3)
            throw cf::ArgumentError("ellipse builtin needs a:b[:phi]");
        return cf::ellipse_body({v[0], v[1], v.size() == 3 ? v[2] : 0.0}, grid);
    }
    if (kind == "fourier") {
        // Even-harmonic coefficient list c2:s2:c4:s4:... around the unit circle.
        const auto v = split_params(rest);
        if (v.empty() || v.size() % 2 != 0)
            throw cf::ArgumentError("fourier builtin needs pairs c2:s2:c4:s4:...");
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            double s = 1.0;
            for (std::size_t k = 0; k + 1 < v.size(); k += 2) {
                const double w = 2.0 * double(k / 2 + 1);
                s += v[k] * std::cos(w * t) + v[k + 1] * std::sin(w * t);
            }
            values[i] = s;
        }
        return cf::SupportBody(cf::PeriodicField(grid, std::move(values), true));
    }
    throw cf::ArgumentError("unknown builtin body: " + name);
}

cf::SupportBody make_body(const ExperimentConfig& c, const cf::AngularGrid& grid) {
    if (!c.body.builtin.empty()) return builtin_body(c.body.builtin, grid);
    if (!c.body.file.empty()) {
        std::ifstream in(c.body.file);
        if (!in) throw cf::ArgumentError("cannot open body file: " + c.body.file);
        return cf::io::body_from_json(cf::io::json::parse(in));
    }
    if (c.body.random) return cf::generate_random_body(*c.body.random, grid);
    throw cf::ArgumentError("config: no body source given");
}

std::vector<std::string> expand_checks(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.insert(out.end(), kAllChecks.begin(), kAllChecks.end());
            continue;
        }
        if (std::find(kAllChecks.begin(), kAllChecks.end(), n) == kAllChecks.end())
            throw cf::ArgumentError("unknown check name: " + n);
        out.push_back(n);
    }
    return out;
}

/// Runs one named check family; trajectory-based checks reuse traj,
/// duality/convergence start their own flows from the initial body.
std::vector<cf::CheckReport> run_check(const std::string& name, const cf::Trajectory& traj,
                                       const cf::SupportBody& initial,
                                       const ExperimentConfig& cfg) {
    const double p = cfg.flow.p;
    if (name == "ratio") return {cf::check_monotone_ratio(traj)};
    if (name == "min_speed") {
        std::vector<cf::CheckReport> out;
        for (double q : cfg.flow.effective_q_watch())
            out.push_back(cf::check_min_speed_monotone(traj, q));
        return out;
    }
    if (name == "area") return {cf::check_area_identity(traj)};
    if (name == "omega")
        return {cf::check_omega_evolution(traj, p),
                cf::check_omega_evolution(traj, cfg.flow.l_watch())};
    if (name == "sigma") return {cf::check_sigma_evolution(traj)};
    if (name == "santalo") return {cf::check_santalo_monotone(traj)};
    if (name == "decay") return {cf::check_decay_diagnostics(traj)};
    if (name == "strong_isoperimetric") return {cf::check_strong_isoperimetric(traj)};
    if (name == "duality") return {cf::check_duality(initial, p, cfg.duality_horizon)};
    if (name == "convergence")
        return {cf::check_convergence(initial, p, cfg.convergence_max_steps)};
    throw cf::ArgumentError("unknown check name: " + name);
}

void write_plots(const std::filesystem::path& dir, const cf::Trajectory& traj) {
    const auto& recs = traj.records;
    auto col = [&](auto get) {
        std::vector<double> v(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) v[i] = get(recs[i]);
        return v;
    };
    const auto t = col([](const cf::FunctionalRecord& r) { return r.t; });
    const auto tau = col([](const cf::FunctionalRecord& r) { return r.tau; });
    auto plot = [&](const std::string& name, const std::string& title,
                    std::vector<cf::svg::Series> series) {
        std::ofstream out(dir / ("plot_" + name + ".svg"));
        cf::svg::write_line_plot(out, title, series);
    };
    plot("area", "enclosed area", {{"A(t)", t, col([](auto& r) { return r.area; })}});
    plot("omega_p", "p-affine length", {{"Omega_p(t)", t, col([](auto& r) { return r.omega_p; })}});
    plot("ratio", "affine isoperimetric ratio",
         {{"ratio(t)", t, col([](auto& r) { return r.p_ratio; })}});
    plot("santalo", "Santalo product", {{"A*A_dual(t)", t, col([](auto& r) { return r.santalo; })}});

    // Hausdorff distance to the unit circle after area normalization and
    // SL(2) min-length alignment, against both clocks.
    std::vector<double> st, stau, dist;
    const cf::SupportBody circle(
        cf::PeriodicField::constant(traj.snapshots.front().body.grid(), 1.0));
    for (const auto& snap : traj.snapshots) {
        const auto aligned = cf::min_length_normalize(cf::normalize_body(snap.body)).second;
        st.push_back(snap.t);
        stau.push_back(snap.tau);
        dist.push_back(cf::hausdorff_distance(aligned, circle));
    }
    plot("hausdorff_t", "Hausdorff distance to the round point (vs t)",
         {{"d_H(t)", st, dist}});
    plot("hausdorff_tau", "Hausdorff distance to the round point (vs tau)",
         {{"d_H(tau)", stau, dist}});
}

void write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                       const cf::Trajectory& traj, const std::vector<cf::CheckReport>& reports,
                       bool all_passed) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "trajectory.csv");
        cf::io::write_trajectory_csv(out, traj, kVersionLine);
    }
    auto write_body = [&](const cf::FlowState& state) {
        std::ostringstream name;
        name << "body_" << state.step_count << ".json";
        std::ofstream out(dir / name.str());
        out << cf::io::to_json(state.body).dump(2) << '\n';
    };
    if (!traj.snapshots.empty()) {
        if (cfg.body_every > 0) {
            for (std::size_t k = 0; k < traj.snapshots.size();
                 k += std::size_t(cfg.body_every))
                write_body(traj.snapshots[k]);
        } else {
            write_body(traj.snapshots.front());
        }
        write_body(traj.snapshots.back());
    }
    ojson rep;
    rep["config"] = to_json(cfg);
    rep["termination"] = termination_name(traj.termination);
    if (traj.extinction_estimate) rep["extinction_estimate"] = *traj.extinction_estimate;
    rep["records"] = traj.records.size();
    if (!traj.records.empty()) {
        rep["final"] = {{"t", traj.records.back().t},
                        {"area", traj.records.back().area},
                        {"santalo", traj.records.back().santalo},
                        {"p_ratio", traj.records.back().p_ratio}};
    }
    ojson checks = ojson::array();
    for (const auto& r : reports) checks.push_back(ojson(cf::io::to_json(r)));
    rep["checks"] = checks;
    rep["passed"] = all_passed;
    std::ofstream out(dir / "report.json");
    out << rep.dump(2) << '\n';
    if (cfg.plots && !traj.records.empty()) write_plots(dir, traj);
}

int cmd_run(const ExperimentConfig& cfg, bool verify_only) {
    cfg.flow.validate();
    const cf::AngularGrid grid(cfg.grid_n);
    const auto initial = make_body(cfg, grid);
    const auto traj = cf::run(initial, cfg.flow);

    std::vector<cf::CheckReport> reports;
    bool all_passed = true;
    for (const auto& name : expand_checks(cfg.checks)) {
        for (auto& rep : run_check(name, traj, initial, cfg)) {
            all_passed = all_passed && rep.passed;
            std::cout << (rep.passed ? "PASS " : "FAIL ") << rep.name
                      << "  worst_margin=" << rep.worst_margin << '\n';
            reports.push_back(std::move(rep));
        }
    }
    if (!verify_only) {
        write_run_outputs(cfg.out_dir, cfg, traj, reports, all_passed);
    } else {
        std::filesystem::create_directories(cfg.out_dir);
        ojson rep;
        rep["config"] = to_json(cfg);
        ojson checks = ojson::array();
        for (const auto& r : reports) checks.push_back(ojson(cf::io::to_json(r)));
        rep["checks"] = checks;
        rep["passed"] = all_passed;
        std::ofstream out(std::filesystem::path(cfg.out_dir) / "report.json");
        out << rep.dump(2) << '\n';
    }
    std::cout << "termination: " << termination_name(traj.termination);
    if (traj.extinction_estimate)
        std::cout << "  extinction_estimate: " << *traj.extinction_estimate;
    std::cout << '\n';
    return all_passed ? 0 : 1;
}

struct SweepCell {
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::string termination;
    double final_area = 0.0, final_santalo = 0.0, final_ratio = 0.0;
    double extinction = std::numeric_limits<double>::quiet_NaN();
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string worst_check;
    bool checks_passed = true;
};

int cmd_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep || cfg.sweep->p_values.empty() || cfg.sweep->seeds.empty())
        throw cf::ArgumentError("sweep requires sweep.p_values and sweep.seeds");
    const auto& sw = *cfg.sweep;
    const auto check_names = expand_checks(cfg.checks);

    std::vector<SweepCell> cells;
    for (double p : sw.p_values)
        for (std::uint64_t seed : sw.seeds) cells.push_back({p, seed});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            SweepCell& cell = cells[i];
            try {
                ExperimentConfig local = cfg;
                local.flow.p = cell.p;
                cf::RandomBodySpec rs = cfg.body.random.value_or(cf::RandomBodySpec{});
                rs.seed = cell.seed;
                local.body = BodySource{};
                local.body.random = rs;
                local.flow.validate();
                const cf::AngularGrid grid(local.grid_n);
                const auto initial = make_body(local, grid);
                const auto traj = cf::run(initial, local.flow);
                cell.termination = termination_name(traj.termination);
                if (!traj.records.empty()) {
                    cell.final_area = traj.records.back().area;
                    cell.final_santalo = traj.records.back().santalo;
                    cell.final_ratio = traj.records.back().p_ratio;
                }
                if (traj.extinction_estimate) cell.extinction = *traj.extinction_estimate;
                for (const auto& name : check_names) {
                    for (const auto& rep : run_check(name, traj, initial, local)) {
                        cell.checks_passed = cell.checks_passed && rep.passed;
                        if (rep.worst_margin < cell.worst_margin) {
                            cell.worst_margin = rep.worst_margin;
                            cell.worst_check = rep.name;
                        }
                    }
                }
            } catch (const std::exception& e) {
                cell.status = std::string("error: ") + e.what();
            }
        }
    };
    const unsigned nw = std::max(1u, std::min<unsigned>(sw.workers, unsigned(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    out << kVersionLine << '\n'
        << "p,seed,status,termination,final_area,final_santalo,final_ratio,"
           "extinction_estimate,worst_check,worst_margin,checks_passed\n";
    out << std::setprecision(17);
    bool any_error = false, all_passed = true;
    for (const auto& c : cells) {
        any_error = any_error || c.status != "ok";
        all_passed = all_passed && c.checks_passed;
        out << c.p << ',' << c.seed << ',' << '"' << c.status << '"' << ',' << c.termination
            << ',' << c.final_area << ',' << c.final_santalo << ',' << c.final_ratio << ','
            << c.extinction << ',' << c.worst_check << ',' << c.worst_margin << ','
            << (c.checks_passed ? 1 : 0) << '\n';
    }
    std::cout << "sweep: " << cells.size() << " cells, "
              << (any_error ? "with errors" : all_passed ? "all passed" : "check failures")
              << '\n';
    if (any_error) return 1;
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for p-centro-affine curvature flows"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    std::optional<std::uint64_t> seed_override;
    for (auto* name : {"run", "verify", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config JSON")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed_override, "random body seed override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << '\n';
            return 2;
        }
        ExperimentConfig cfg = config_from_json(ojson::parse(in));
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override) {
            cf::RandomBodySpec rs = cfg.body.random.value_or(cf::RandomBodySpec{});
            rs.seed = *seed_override;
            cfg.body = BodySource{};
            cfg.body.random = rs;
        }
        if (app.got_subcommand("run")) return cmd_run(cfg, false);
        if (app.got_subcommand("verify")) return cmd_run(cfg, true);
        return cmd_sweep(cfg);
    } catch (const cf::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ojson::exception& e) {
        std::cerr << "config parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    }
}
