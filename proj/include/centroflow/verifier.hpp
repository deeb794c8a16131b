#pragma once

// Executable checks for the evolution identities, monotone functionals,
// inequalities, duality, and convergence statements, evaluated over
// recorded trajectories.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "centroflow/affine_frame.hpp"
#include "centroflow/flow.hpp"

namespace centroflow {

struct CheckReport {
    std::string name;
    bool passed = false;
    double worst_margin = 0.0;  // signed; passing means >= -tolerance
    double location = 0.0;      // t (or theta) of the worst case
    double tolerance = 0.0;
    std::string note;
};

namespace detail {

inline CheckReport finish(std::string name, double worst, double location, double tol,
                          std::string note = {}) {
    CheckReport rep;
    rep.name = std::move(name);
    rep.worst_margin = worst;
    rep.location = location;
    rep.tolerance = tol;
    rep.passed = worst >= -tol;
    rep.note = std::move(note);
    return rep;
}

/// Derivative at t1 of the quadratic through (t0,y0),(t1,y1),(t2,y2).
inline double central_derivative(double t0, double y0, double t1, double y1, double t2,
                                 double y2) {
    return y0 * (t1 - t2) / ((t0 - t1) * (t0 - t2)) +
           y1 * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
           y2 * (t1 - t0) / ((t2 - t0) * (t2 - t1));
}

/// Track the minimum margin and where it occurs.
struct WorstTracker {
    double margin = std::numeric_limits<double>::infinity();
    double location = 0.0;
    void update(double m, double loc) {
        if (m < margin) {
            margin = m;
            location = loc;
        }
    }
};

struct AffineIntegrals {
    double sigma_power = 0.0;        // \int sigma^{e1} ds
    double sigma_grad_power = 0.0;   // \int sigma^{e2} sigma_s^2 ds
};

/// \int sigma^{e1} ds and \int sigma^{e2} sigma_s^2 ds over the boundary.
inline AffineIntegrals affine_integrals(const SupportBody& b, double e1, double e2) {
    const auto g = affine_arclength_density(b);
    const auto sigma = affine_support(b);
    const auto sigma_s = affine_derivative(sigma, g);
    AffineIntegrals out;
    out.sigma_power = integrate(sigma.pow(e1) * g);
    out.sigma_grad_power = integrate(sigma.pow(e2) * (sigma_s * sigma_s) * g);
    return out;
}

/// Right side of the general Omega_l evolution under the p-flow.
inline double omega_l_rate(const SupportBody& b, double p, double l) {
    const double bp = 3.0 * p / (p + 2.0);
    const double bl = 3.0 * l / (l + 2.0);
    const auto ints = affine_integrals(b, 1.0 - bp - bl, -bp - bl);
    return 2.0 * (l - 2.0) / (l + 2.0) * ints.sigma_power +
           18.0 * p * l / ((l + 2.0) * (l + 2.0) * (p + 2.0)) * ints.sigma_grad_power;
}

}  // namespace detail

/// Omega_p^{2+p} / A^{2-p} nondecreasing along a contracting run.
inline CheckReport check_monotone_ratio(const Trajectory& traj) {
    constexpr double tol = 1e-8;
    detail::WorstTracker worst;
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
        const double prev = traj.records[k - 1].p_ratio;
        const double cur = traj.records[k].p_ratio;
        worst.update((cur - prev) / std::abs(prev), traj.records[k].t);
    }
    return detail::finish("monotone_ratio", worst.margin, worst.location, tol);
}

/// min_theta s^q kappa_0^{p/(p+2)} nondecreasing, for q = 0 or
/// 1 <= q <= 2p/(p+1).
inline CheckReport check_min_speed_monotone(const Trajectory& traj, double q) {
    const double p = traj.spec.p;
    if (!(q == 0.0 || (q >= 1.0 && q <= 2.0 * p / (p + 1.0) + 1e-12)))
        throw ArgumentError("check_min_speed_monotone: q outside the admissible set");
    constexpr double tol = 1e-7;
    const double beta = traj.spec.beta();
    detail::WorstTracker worst;
    double prev = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const SupportBody& b = traj.snapshots[k].body;
        const auto k0 = centro_affine_curvature(b);
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < b.size(); ++i)
            mn = std::min(mn, std::pow(b.support()[i], q) * std::pow(k0[i], beta));
        if (k > 0) worst.update((mn - prev) / std::abs(prev), traj.snapshots[k].t);
        prev = mn;
    }
    return detail::finish("min_speed_monotone(q=" + std::to_string(q) + ")", worst.margin,
                          worst.location, tol);
}

/// dA/dt = -Omega_p, by central differences of the recorded areas.
inline CheckReport check_area_identity(const Trajectory& traj) {
    if (traj.records.size() < 5) throw ArgumentError("check_area_identity: too few records");
    constexpr double tol = 1e-4;
    detail::WorstTracker worst;
    const double a0 = traj.records.front().area;
    for (std::size_t k = 1; k + 1 < traj.records.size(); ++k) {
        const auto &r0 = traj.records[k - 1], &r1 = traj.records[k], &r2 = traj.records[k + 1];
        if (r1.area < 0.02 * a0) continue;  // stay away from the extinction singularity
        const double dadt =
            detail::central_derivative(r0.t, r0.area, r1.t, r1.area, r2.t, r2.area);
        const double rel = std::abs(dadt + r1.omega_p) / r1.omega_p;
        worst.update(tol - rel, r1.t);
    }
    return detail::finish("area_identity", worst.margin, worst.location, tol);
}

/// dOmega_l/dt against the general evolution equation, on snapshots.
inline CheckReport check_omega_evolution(const Trajectory& traj, double l) {
    if (l < 1.0) throw ArgumentError("check_omega_evolution: l must be >= 1");
    if (traj.snapshots.size() < 3)
        throw ArgumentError("check_omega_evolution: too few snapshots");
    constexpr double tol = 1e-3;
    detail::WorstTracker worst;
    const double a0 = traj.records.front().area;
    std::vector<double> omega(traj.snapshots.size());
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
        omega[k] = p_affine_length(traj.snapshots[k].body, l);
    for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
        if (traj.records[k].area < 0.02 * a0) continue;
        const double lhs = detail::central_derivative(
            traj.snapshots[k - 1].t, omega[k - 1], traj.snapshots[k].t, omega[k],
            traj.snapshots[k + 1].t, omega[k + 1]);
        const double rhs = detail::omega_l_rate(traj.snapshots[k].body, traj.spec.p, l);
        // The rate can pass through zero; near such times measure the error
        // relative to the functional itself rather than the vanishing rate.
        const double scale = std::max({std::abs(lhs), std::abs(rhs), std::abs(omega[k]), 1e-6});
        worst.update(tol - std::abs(lhs - rhs) / scale, traj.snapshots[k].t);
    }
    return detail::finish("omega_evolution(l=" + std::to_string(l) + ")", worst.margin,
                          worst.location, tol);
}

/// Nodewise d(sigma)/dt against the sigma evolution equation.
inline CheckReport check_sigma_evolution(const Trajectory& traj) {
    if (traj.snapshots.size() < 3)
        throw ArgumentError("check_sigma_evolution: too few snapshots");
    constexpr double tol = 1e-2;
    const double p = traj.spec.p;
    const double beta = traj.spec.beta();
    detail::WorstTracker worst;
    const double a0 = traj.records.front().area;
    for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
        if (traj.records[k].area < 0.02 * a0) continue;
        const SupportBody& b = traj.snapshots[k].body;
        const auto g = affine_arclength_density(b);
        const auto sigma = affine_support(b);
        const auto sigma_s = affine_derivative(sigma, g);
        const auto sigma_ss = affine_derivative(sigma_s, g);
        const auto sig0 = affine_support(traj.snapshots[k - 1].body);
        const auto sig2 = affine_support(traj.snapshots[k + 1].body);
        double sup_rhs = 0.0;
        double sup_err = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double lhs = detail::central_derivative(
                traj.snapshots[k - 1].t, sig0[i], traj.snapshots[k].t, sigma[i],
                traj.snapshots[k + 1].t, sig2[i]);
            // Snapshots track sigma at a fixed outward normal angle.  In this
            // gauge the gradient-squared coefficient is beta*(1-3beta); a
            // parametrization moving along the affine normal picks up an
            // extra tangential transport term (1-3beta)*sigma_s^2/sigma.
            const double rhs =
                std::pow(sigma[i], 1.0 - 3.0 * beta) *
                (-4.0 / 3.0 +
                 beta * (1.0 - 3.0 * beta) * sigma_s[i] * sigma_s[i] / sigma[i] +
                 beta * sigma_ss[i]);
            sup_rhs = std::max(sup_rhs, std::abs(rhs));
            sup_err = std::max(sup_err, std::abs(lhs - rhs));
        }
        worst.update(tol - sup_err / sup_rhs, traj.snapshots[k].t);
        (void)p;
    }
    return detail::finish("sigma_evolution", worst.margin, worst.location, tol);
}

/// Strong affine isoperimetric inequality along the flow; for p = 1 the
/// affine-normal-flow variants for Omega_l are checked as well.
inline CheckReport check_strong_isoperimetric(const Trajectory& traj) {
    if (traj.snapshots.size() < 3)
        throw ArgumentError("check_strong_isoperimetric: too few snapshots");
    constexpr double tol = 1e-4;
    const double p = traj.spec.p;
    detail::WorstTracker worst;
    const double a0 = traj.records.front().area;

    std::vector<double> omega_p(traj.snapshots.size());
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
        omega_p[k] = p_affine_length(traj.snapshots[k].body, p);

    const double cp = p <= 2.0 ? 18.0 * (p - 1.0) * p * p / std::pow(p + 2.0, 3)
                               : 18.0 * p * p / std::pow(p + 2.0, 3);
    for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
        if (traj.records[k].area < 0.02 * a0) continue;
        const SupportBody& b = traj.snapshots[k].body;
        const double lhs = detail::central_derivative(
            traj.snapshots[k - 1].t, omega_p[k - 1], traj.snapshots[k].t, omega_p[k],
            traj.snapshots[k + 1].t, omega_p[k + 1]);
        const double bp = 6.0 * p / (p + 2.0);
        const auto ints = detail::affine_integrals(b, 1.0 - bp, -bp);
        const double A = traj.records[k].area;
        const double rhs = (p - 2.0) / (p + 2.0) * omega_p[k] * omega_p[k] / A +
                           cp * ints.sigma_grad_power;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst.update((lhs - rhs) / scale, traj.snapshots[k].t);

        if (p == 1.0) {
            // Affine-normal-flow variants: d/dt Omega_l >= (l-2)/(l+2) *
            // Omega_l Omega_1 / A + c(l) \int sigma^{-1-3l/(l+2)} sigma_s^2 ds.
            for (double l : {traj.spec.l_watch(), 3.0}) {
                const double cl = l <= 2.0
                                      ? 2.0 * (l - 1.0) * (4.0 * l * l + 3.0 * l + 2.0) /
                                            std::pow(l + 2.0, 3)
                                      : 6.0 * l / ((l + 2.0) * (l + 2.0));
                const double om_l0 = p_affine_length(traj.snapshots[k - 1].body, l);
                const double om_l1 = p_affine_length(b, l);
                const double om_l2 = p_affine_length(traj.snapshots[k + 1].body, l);
                const double lhs_l = detail::central_derivative(
                    traj.snapshots[k - 1].t, om_l0, traj.snapshots[k].t, om_l1,
                    traj.snapshots[k + 1].t, om_l2);
                const auto ints_l =
                    detail::affine_integrals(b, 0.0, -1.0 - 3.0 * l / (l + 2.0));
                const double om1 = p_affine_length(b, 1.0);
                const double rhs_l = (l - 2.0) / (l + 2.0) * om_l1 * om1 / A +
                                     cl * ints_l.sigma_grad_power;
                const double scale_l = std::max({1.0, std::abs(lhs_l), std::abs(rhs_l)});
                worst.update((lhs_l - rhs_l) / scale_l, traj.snapshots[k].t);
            }
        }
    }
    return detail::finish("strong_isoperimetric", worst.margin, worst.location, tol);
}

/// Dual-flow consistency: the polar dual of the contracting trajectory
/// matches the expanding trajectory started from the dual initial body.
inline CheckReport check_duality(const SupportBody& initial, double p, double horizon) {
    constexpr double tol = 1e-4;
    FlowSpec contracting;
    contracting.family = FlowFamily::contracting;
    contracting.p = p;
    FlowSpec expanding = contracting;
    expanding.family = FlowFamily::expanding;

    std::vector<double> times;
    constexpr int kSamples = 9;
    for (int i = 1; i <= kSamples; ++i)
        times.push_back(horizon * static_cast<double>(i) / kSamples);

    const auto primal = snapshots_at(initial, contracting, times);
    const auto dual = snapshots_at(polar_dual(initial), expanding, times);
    const std::size_t shared = std::min(primal.size(), dual.size());

    detail::WorstTracker worst;
    for (std::size_t k = 0; k < shared; ++k)
        worst.update(tol - hausdorff_distance(polar_dual(primal[k]), dual[k]), times[k]);
    std::string note;
    if (shared < times.size())
        note = "window shortened to t <= " + std::to_string(shared ? times[shared - 1] : 0.0);
    if (shared == 0) return detail::finish("duality", -1.0, 0.0, tol, note);
    return detail::finish("duality", worst.margin, worst.location, tol, std::move(note));
}

struct ConvergenceMetrics {
    double hausdorff = 0.0;    // to S^1 after min-length SL(2) normalization
    double sigma_error = 0.0;  // max |sigma - 1|
    double santalo_gap = 0.0;  // pi^2 - A * A_dual
    long steps = 0;
};

/// Run the normalized flow and test convergence to the unit circle modulo
/// SL(2): Hausdorff <= 1e-3, max|sigma-1| <= 1e-2, pi^2 - A A° <= 1e-4.
inline CheckReport check_convergence(const SupportBody& initial, double p,
                                     long max_steps = 400000,
                                     ConvergenceMetrics* metrics_out = nullptr) {
    if (p <= 1.0) throw ArgumentError("check_convergence: requires p > 1");
    constexpr double haus_tol = 1e-3, sigma_tol = 1e-2, santalo_tol = 1e-4;

    FlowSpec spec;
    spec.family = FlowFamily::normalized;
    spec.p = p;
    FlowState state{normalize_body(initial), 0.0, 0.0, 0};

    const SupportBody circle = SupportBody(PeriodicField::constant(initial.grid(), 1.0));
    ConvergenceMetrics metrics;
    const long probe_every = 256;
    bool converged = false;
    while (state.step_count < max_steps) {
        for (long i = 0; i < probe_every && state.step_count < max_steps; ++i)
            state = step(state, spec);
        const auto sigma = affine_support(state.body);
        metrics.sigma_error = std::max(std::abs(sigma.min() - 1.0), std::abs(sigma.max() - 1.0));
        metrics.santalo_gap =
            std::numbers::pi * std::numbers::pi - area(state.body) * dual_area(state.body);
        metrics.steps = state.step_count;
        if (metrics.sigma_error <= 0.5 * sigma_tol && metrics.santalo_gap <= 0.5 * santalo_tol) {
            metrics.hausdorff =
                hausdorff_distance(min_length_normalize(state.body).second, circle);
            if (metrics.hausdorff <= 0.5 * haus_tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged)
        metrics.hausdorff = hausdorff_distance(min_length_normalize(state.body).second, circle);
    if (metrics_out) *metrics_out = metrics;

    // Margin: the worst threshold deficit, each metric normalized by its tolerance.
    const double margin = std::min({1.0 - metrics.hausdorff / haus_tol,
                                    1.0 - metrics.sigma_error / sigma_tol,
                                    1.0 - metrics.santalo_gap / santalo_tol});
    CheckReport rep = detail::finish("convergence(p=" + std::to_string(p) + ")", margin,
                                     state.tau, 0.0);
    rep.note = "hausdorff=" + std::to_string(metrics.hausdorff) +
               " sigma_err=" + std::to_string(metrics.sigma_error) +
               " santalo_gap=" + std::to_string(metrics.santalo_gap) +
               " steps=" + std::to_string(metrics.steps);
    return rep;
}

/// Santalo product nondecreasing and bounded by pi^2.
inline CheckReport check_santalo_monotone(const Trajectory& traj) {
    constexpr double tol = 1e-8;
    detail::WorstTracker worst;
    const double cap = std::numbers::pi * std::numbers::pi;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const double cur = traj.records[k].santalo;
        if (k > 0) {
            const double prev = traj.records[k - 1].santalo;
            worst.update((cur - prev) / std::abs(prev), traj.records[k].t);
        }
        worst.update((cap - cur) / cap, traj.records[k].t);
    }
    return detail::finish("santalo_monotone", worst.margin, worst.location, tol);
}

/// End-of-run decay of L and Omega_l, plus the speed-bound monitor on
/// max kappa while the inradius proxy min s stays above half its start.
inline CheckReport check_decay_diagnostics(const Trajectory& traj) {
    if (traj.records.size() < 2 || traj.snapshots.empty())
        throw ArgumentError("check_decay_diagnostics: trajectory too short");
    constexpr double tol = 0.0;
    detail::WorstTracker worst;
    const auto& first = traj.records.front();
    const auto& last = traj.records.back();
    worst.update(0.05 - last.length / first.length, last.t);
    worst.update(0.05 - last.omega_l / first.omega_l, last.t);

    const double rho = traj.snapshots.front().body.support().min() / 2.0;
    const double kappa_cap = 4.0 / rho * (1.0 + 1e-2);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        if (traj.snapshots[k].body.support().min() < rho) break;
        worst.update((kappa_cap - traj.records[k].kappa_max) / kappa_cap,
                     traj.snapshots[k].t);
    }
    return detail::finish("decay_diagnostics", worst.margin, worst.location, tol);
}

}  // namespace centroflow
