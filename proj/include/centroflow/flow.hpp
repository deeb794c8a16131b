#pragma once

// Time integration of the contracting, expanding, and normalized
// p-centro-affine flows on support functions, with adaptive explicit
// stepping, convexity guards, and trajectory recording.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "centroflow/convex_body.hpp"

namespace centroflow {

enum class FlowFamily { contracting, expanding, normalized };

enum class Termination { running, extinction, blowup, max_steps, convexity_failure };

struct FlowSpec {
    FlowFamily family = FlowFamily::contracting;
    double p = 1.0;
    double dt_safety = 0.4;                          // in (0, 1]
    double area_floor = 1e-4 * std::numbers::pi;     // contracting stop
    double area_ceiling = 1e4 * std::numbers::pi;    // expanding stop
    long max_steps = 2'000'000;
    long record_every = 16;
    double convexity_floor = 1e-10;  // min admissible r along a run
    std::vector<double> q_watch;     // exponents for min_theta s^q k0^{p/(p+2)}

    double beta() const { return p / (p + 2.0); }
    /// The distinguished diagnostic exponent l = (2p+2)/(p+3).
    double l_watch() const { return (2.0 * p + 2.0) / (p + 3.0); }
    /// Default watch list: q = 0, q = 1, and the endpoint q = 2p/(p+1).
    std::vector<double> effective_q_watch() const {
        if (!q_watch.empty()) return q_watch;
        return {0.0, 1.0, 2.0 * p / (p + 1.0)};
    }

    void validate() const {
        if (p < 1.0) throw ArgumentError("FlowSpec: p must be >= 1");
        if (!(dt_safety > 0.0 && dt_safety <= 1.0))
            throw ArgumentError("FlowSpec: dt_safety must be in (0, 1]");
    }
};

struct FlowState {
    SupportBody body;
    double t = 0.0;
    double tau = 0.0;
    long step_count = 0;
};

struct FunctionalRecord {
    double t = 0.0, tau = 0.0, dt = 0.0;
    double area = 0.0, dual_area = 0.0, length = 0.0;
    double omega_p = 0.0, omega_1 = 0.0;
    double k0_min = 0.0, k0_max = 0.0;
    double sigma_min = 0.0, sigma_max = 0.0;
    double santalo = 0.0;   // A * A_dual
    double p_ratio = 0.0;   // Omega_p^{2+p} / A^{2-p}
    double kappa_max = 0.0;
    double omega_l = 0.0;   // Omega_l at the spec's watch exponent
    std::vector<double> min_q;  // min_theta s^q k0^{p/(p+2)}, per q_watch
};

struct Trajectory {
    FlowSpec spec;
    std::vector<FunctionalRecord> records;
    std::vector<FlowState> snapshots;  // at the same cadence as records
    Termination termination = Termination::running;
    std::optional<double> extinction_estimate;
};

/// Pointwise speed magnitude of the contracting flow:
/// s^{1-3p/(p+2)} r^{-p/(p+2)} (the stepper applies the minus sign).
inline PeriodicField speed_contracting(const SupportBody& b, double p) {
    if (p < 1.0) throw ArgumentError("speed_contracting: p must be >= 1");
    const double beta = p / (p + 2.0);
    const auto r = radius_of_curvature(b);
    return b.support().binary(r, [beta](double s, double rv) {
        return std::pow(s, 1.0 - 3.0 * beta) * std::pow(rv, -beta);
    });
}

/// Pointwise outward speed of the expanding flow: s^{1+3p/(p+2)} r^{p/(p+2)}.
inline PeriodicField speed_expanding(const SupportBody& b, double p) {
    if (p < 1.0) throw ArgumentError("speed_expanding: p must be >= 1");
    const double beta = p / (p + 2.0);
    const auto r = radius_of_curvature(b);
    return b.support().binary(r, [beta](double s, double rv) {
        return std::pow(s, 1.0 + 3.0 * beta) * std::pow(rv, beta);
    });
}

/// Rescale to enclosed area pi: s -> sqrt(pi/A) s.
inline SupportBody normalize_body(const SupportBody& b) {
    return b.scaled(std::sqrt(std::numbers::pi / area(b)));
}

/// Signed speed of the normalized flow in tau:
/// -s k0^{p/(p+2)} + s Omega_p / (2 pi).  Requires area == pi.
inline PeriodicField speed_normalized(const SupportBody& b, double p) {
    if (p < 1.0) throw ArgumentError("speed_normalized: p must be >= 1");
    const double A = area(b);
    if (std::abs(A - std::numbers::pi) > 1e-8 * std::numbers::pi)
        throw ArgumentError("speed_normalized: body must be normalized to area pi");
    const double beta = p / (p + 2.0);
    const double omega = p_affine_length(b, p);
    const auto k0 = centro_affine_curvature(b);
    return b.support().binary(k0, [beta, omega](double s, double k) {
        return -s * std::pow(k, beta) + s * omega / kTwoPi;
    });
}

namespace detail {

/// r = s_thth + s from raw node values; throws below the convexity floor.
inline std::vector<double> curvature_radius_values(const std::vector<double>& s, double floor) {
    const auto coeffs = fourier::coefficients(s);
    auto d2 = coeffs;
    const std::size_t n = s.size();
    for (std::size_t k = 0; k < n; ++k) {
        const long kw = fourier::signed_wavenumber(k, n);
        d2[k] *= -static_cast<double>(kw) * static_cast<double>(kw);
    }
    auto r = fourier::synthesize(d2);
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] += s[i];
        if (!(r[i] > floor)) bad.push_back(i);
    }
    if (!bad.empty()) throw ConvexityViolation("flow step: curvature radius below floor", bad);
    return r;
}

/// Time derivative of the support values under the given family.
inline std::vector<double> flow_rhs(const std::vector<double>& s, const FlowSpec& spec) {
    const double beta = spec.beta();
    const auto r = curvature_radius_values(s, spec.convexity_floor);
    const std::size_t n = s.size();
    std::vector<double> ds(n);
    switch (spec.family) {
        case FlowFamily::contracting:
            for (std::size_t i = 0; i < n; ++i)
                ds[i] = -std::pow(s[i], 1.0 - 3.0 * beta) * std::pow(r[i], -beta);
            break;
        case FlowFamily::expanding:
            for (std::size_t i = 0; i < n; ++i)
                ds[i] = std::pow(s[i], 1.0 + 3.0 * beta) * std::pow(r[i], beta);
            break;
        case FlowFamily::normalized: {
            double omega = 0.0;
            std::vector<double> k0b(n);
            for (std::size_t i = 0; i < n; ++i) {
                k0b[i] = std::pow(r[i] * s[i] * s[i] * s[i], -beta);
                omega += s[i] * r[i] * k0b[i];
            }
            omega *= kTwoPi / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                ds[i] = -s[i] * k0b[i] + s[i] * omega / kTwoPi;
            break;
        }
    }
    return ds;
}

}  // namespace detail

/// Explicit stability bound dt = safety * 2 / (D_max * (n/2)^2) from the
/// linearized diffusion coefficient of the speed in r.
inline double stable_dt(const SupportBody& b, const FlowSpec& spec) {
    const double beta = spec.beta();
    const auto r = radius_of_curvature(b);
    const auto& s = b.support();
    double dmax = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d;
        if (spec.family == FlowFamily::expanding)
            d = beta * std::pow(s[i], 1.0 + 3.0 * beta) * std::pow(r[i], beta - 1.0);
        else
            d = beta * std::pow(s[i], 1.0 - 3.0 * beta) * std::pow(r[i], -beta - 1.0);
        dmax = std::max(dmax, d);
    }
    const double kmax = static_cast<double>(b.size()) / 2.0;
    return spec.dt_safety * 2.0 / (dmax * kmax * kmax);
}

/// One classical 4-stage explicit step, with rejection (dt halving, down to
/// stable_dt * 2^-10) on convexity violation.  Symmetry is re-enforced after
/// every step; the normalized family is rescaled back to area pi.
/// If dt_cap is positive, the step size is additionally capped by it.
inline FlowState step(const FlowState& state, const FlowSpec& spec, double dt_cap = 0.0) {
    spec.validate();
    const double dt0 = stable_dt(state.body, spec);
    double dt = dt_cap > 0.0 ? std::min(dt0, dt_cap) : dt0;
    const double dt_min = dt0 * std::pow(2.0, -10);

    const std::vector<double>& s0 = state.body.support().values();
    const std::size_t n = s0.size();
    const double area_old = area(state.body);

    while (true) {
        try {
            const auto k1 = detail::flow_rhs(s0, spec);
            std::vector<double> tmp(n);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = s0[i] + 0.5 * dt * k1[i];
            const auto k2 = detail::flow_rhs(tmp, spec);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = s0[i] + 0.5 * dt * k2[i];
            const auto k3 = detail::flow_rhs(tmp, spec);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = s0[i] + dt * k3[i];
            const auto k4 = detail::flow_rhs(tmp, spec);
            std::vector<double> s1(n);
            for (std::size_t i = 0; i < n; ++i)
                s1[i] = s0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

            auto field = symmetrize(PeriodicField(state.body.grid(), std::move(s1), true));
            SupportBody body = SupportBody::from_symmetric(std::move(field));

            FlowState next{std::move(body), state.t, state.tau, state.step_count + 1};
            if (spec.family == FlowFamily::normalized) {
                next.body = normalize_body(next.body);
                next.tau += dt;
                next.t += dt;  // the normalized stepper integrates directly in tau
            } else {
                next.t += dt;
                // tau accumulated by the trapezoid rule in t.
                const double e = 2.0 * spec.beta();
                const double area_new = area(next.body);
                next.tau += 0.5 * dt *
                            (std::pow(std::numbers::pi / area_old, e) +
                             std::pow(std::numbers::pi / area_new, e));
            }
            return next;
        } catch (const ConvexityViolation&) {
            dt *= 0.5;
            if (dt < dt_min) throw;
        }
    }
}

/// Scalar functionals of the current state, as stored in trajectory records.
inline FunctionalRecord make_record(const FlowState& state, const FlowSpec& spec, double dt) {
    FunctionalRecord rec;
    rec.t = state.t;
    rec.tau = state.tau;
    rec.dt = dt;
    const SupportBody& b = state.body;
    const auto r = radius_of_curvature(b);
    const auto& s = b.support();
    const auto k0 = centro_affine_curvature(b);
    rec.area = 0.5 * integrate(s * r);
    rec.dual_area = dual_area(b);
    rec.length = integrate(r);
    rec.omega_p = p_affine_length(b, spec.p);
    rec.omega_1 = p_affine_length(b, 1.0);
    rec.omega_l = p_affine_length(b, spec.l_watch());
    rec.k0_min = k0.min();
    rec.k0_max = k0.max();
    rec.sigma_min = std::pow(rec.k0_max, -1.0 / 3.0);
    rec.sigma_max = std::pow(rec.k0_min, -1.0 / 3.0);
    rec.santalo = rec.area * rec.dual_area;
    rec.p_ratio = std::pow(rec.omega_p, 2.0 + spec.p) / std::pow(rec.area, 2.0 - spec.p);
    rec.kappa_max = 1.0 / r.min();
    const double beta = spec.beta();
    for (double q : spec.effective_q_watch()) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.size(); ++i)
            mn = std::min(mn, std::pow(s[i], q) * std::pow(k0[i], beta));
        rec.min_q.push_back(mn);
    }
    return rec;
}

namespace detail {

/// Extinction-time estimate from the closed-form-motivated fit:
/// A^{2p/(p+2)} is (asymptotically) linear in t, so extrapolate the tail
/// records to its root.
inline std::optional<double> estimate_extinction(const std::vector<FunctionalRecord>& recs,
                                                 double p) {
    if (recs.size() < 3) return std::nullopt;
    const double e = 2.0 * p / (p + 2.0);
    const std::size_t m = std::min<std::size_t>(6, recs.size());
    double st = 0.0, sb = 0.0, stt = 0.0, stb = 0.0;
    for (std::size_t i = recs.size() - m; i < recs.size(); ++i) {
        const double t = recs[i].t;
        const double bval = std::pow(recs[i].area, e);
        st += t;
        sb += bval;
        stt += t * t;
        stb += t * bval;
    }
    const double k = static_cast<double>(m);
    const double slope = (k * stb - st * sb) / (k * stt - st * st);
    const double intercept = (sb - slope * st) / k;
    if (!(slope < 0.0)) return std::nullopt;
    return -intercept / slope;
}

}  // namespace detail

/// Advance until extinction/blow-up/budget, recording functionals and body
/// snapshots every record_every steps and at termination.
inline Trajectory run(const SupportBody& initial, const FlowSpec& spec) {
    spec.validate();
    Trajectory traj;
    traj.spec = spec;
    FlowState state{spec.family == FlowFamily::normalized ? normalize_body(initial) : initial,
                    0.0, 0.0, 0};
    double last_dt = stable_dt(state.body, spec);

    const auto record = [&] {
        traj.records.push_back(make_record(state, spec, last_dt));
        traj.snapshots.push_back(state);
    };
    record();

    while (true) {
        const double A = traj.records.back().area;
        if (spec.family == FlowFamily::contracting && A < spec.area_floor) {
            traj.termination = Termination::extinction;
            break;
        }
        if (spec.family == FlowFamily::expanding && A > spec.area_ceiling) {
            traj.termination = Termination::blowup;
            break;
        }
        if (state.step_count >= spec.max_steps) {
            traj.termination = Termination::max_steps;
            break;
        }
        bool recorded_here = false;
        try {
            for (long i = 0; i < spec.record_every && state.step_count < spec.max_steps; ++i) {
                const double t_before = state.t;
                state = step(state, spec);
                last_dt = state.t - t_before;
                if (spec.family == FlowFamily::contracting) {
                    // Check the floor mid-batch so the final record is near it.
                    if (i + 1 < spec.record_every && area(state.body) < spec.area_floor) break;
                }
            }
        } catch (const ConvexityViolation&) {
            traj.termination = Termination::convexity_failure;
            record();
            recorded_here = true;
        }
        if (traj.termination != Termination::running) {
            if (!recorded_here) record();
            break;
        }
        record();
    }
    if (spec.family == FlowFamily::contracting)
        traj.extinction_estimate = detail::estimate_extinction(traj.records, spec.p);
    return traj;
}

/// Advance a flow and capture the body exactly at the given (sorted,
/// nonnegative) times; used by duality and containment comparisons.
/// Stops early (returning fewer bodies) if the flow terminates first.
inline std::vector<SupportBody> snapshots_at(const SupportBody& initial, const FlowSpec& spec,
                                             const std::vector<double>& times) {
    spec.validate();
    std::vector<SupportBody> out;
    FlowState state{spec.family == FlowFamily::normalized ? normalize_body(initial) : initial,
                    0.0, 0.0, 0};
    for (double target : times) {
        bool reached = true;
        while (state.t < target - 1e-15) {
            const double A = area(state.body);
            if ((spec.family == FlowFamily::contracting && A < spec.area_floor) ||
                (spec.family == FlowFamily::expanding && A > spec.area_ceiling) ||
                state.step_count >= spec.max_steps) {
                reached = false;
                break;
            }
            try {
                state = step(state, spec, target - state.t);
            } catch (const ConvexityViolation&) {
                reached = false;
                break;
            }
        }
        if (!reached) break;
        out.push_back(state.body);
    }
    return out;
}

}  // namespace centroflow
