#pragma once

// JSON / CSV serialization for bodies, trajectories, ellipses, maps, and
// check reports.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "centroflow/affine_frame.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/verifier.hpp"

namespace centroflow::io {

using json = nlohmann::json;

inline json to_json(const PeriodicField& f) {
    return json{{"n", f.size()}, {"symmetric", f.symmetric()}, {"values", f.values()}};
}

inline json to_json(const SupportBody& b) { return to_json(b.support()); }

inline PeriodicField field_from_json(const json& j) {
    const std::size_t n = j.at("n").get<std::size_t>();
    auto values = j.at("values").get<std::vector<double>>();
    return {AngularGrid(n), std::move(values), j.at("symmetric").get<bool>()};
}

inline SupportBody body_from_json(const json& j) { return SupportBody(field_from_json(j)); }

inline json to_json(const CenteredEllipse& e) {
    return json{{"a", e.a}, {"b", e.b}, {"phi", e.phi}};
}

inline CenteredEllipse ellipse_from_json(const json& j) {
    return {j.at("a").get<double>(), j.at("b").get<double>(), j.at("phi").get<double>()};
}

inline json to_json(const Mat2& m) {
    return json::array({json::array({m.m11, m.m12}), json::array({m.m21, m.m22})});
}

inline json to_json(const CheckReport& rep) {
    return json{{"name", rep.name},
                {"passed", rep.passed},
                {"worst_margin", rep.worst_margin},
                {"location", rep.location},
                {"tolerance", rep.tolerance},
                {"note", rep.note}};
}

inline std::string csv_header(const FlowSpec& spec) {
    std::string h =
        "t,tau,dt,A,A_dual,L,omega_p,omega_1,k0_min,k0_max,sigma_min,sigma_max,santalo,"
        "p_ratio,kappa_max,omega_l";
    for (double q : spec.effective_q_watch()) {
        std::ostringstream os;
        os << ",minq_" << q;
        h += os.str();
    }
    return h;
}

inline std::string csv_row(const FunctionalRecord& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << r.t << ',' << r.tau << ',' << r.dt << ',' << r.area << ',' << r.dual_area << ','
       << r.length << ',' << r.omega_p << ',' << r.omega_1 << ',' << r.k0_min << ','
       << r.k0_max << ',' << r.sigma_min << ',' << r.sigma_max << ',' << r.santalo << ','
       << r.p_ratio << ',' << r.kappa_max << ',' << r.omega_l;
    for (double v : r.min_q) os << ',' << v;
    return os.str();
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const std::string& version_line = "# centroflow 1.0") {
    out << version_line << '\n' << csv_header(traj.spec) << '\n';
    for (const auto& rec : traj.records) out << csv_row(rec) << '\n';
}

inline BodySummary summary_from_record(const FunctionalRecord& r) {
    return {r.area,   r.dual_area, r.length,    r.omega_p,
            r.k0_min, r.k0_max,    r.sigma_min, r.sigma_max};
}

inline std::string summary_csv_row(const BodySummary& s) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << s.area << ',' << s.dual_area << ',' << s.length << ',' << s.omega_p << ','
       << s.k0_min << ',' << s.k0_max << ',' << s.sigma_min << ',' << s.sigma_max;
    return os.str();
}

}  // namespace centroflow::io
