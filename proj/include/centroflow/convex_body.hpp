#pragma once

// Support-function representation of origin-symmetric strictly convex
// planar bodies, and the geometric quantities derived from it.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "centroflow/circle_field.hpp"
#include "centroflow/errors.hpp"

namespace centroflow {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Strictly convex body in K_sym, held as its support function s(theta).
/// Validity: s > 0 everywhere (origin interior) and r = s_thth + s > 0
/// everywhere (strict convexity).
class SupportBody {
public:
    explicit SupportBody(PeriodicField s) : s_(symmetrize(s)) { validate(); }

    /// Construct without re-symmetrizing; caller guarantees the flag.
    static SupportBody from_symmetric(PeriodicField s) {
        return SupportBody(std::move(s), PrivateTag{});
    }

    const PeriodicField& support() const { return s_; }
    const AngularGrid& grid() const { return s_.grid(); }
    std::size_t size() const { return s_.size(); }

    SupportBody scaled(double c) const {
        if (c <= 0.0) throw ArgumentError("SupportBody::scaled: factor must be positive");
        return SupportBody(s_.scaled(c), PrivateTag{});
    }

private:
    struct PrivateTag {};
    SupportBody(PeriodicField s, PrivateTag) : s_(std::move(s)) { validate(); }

    void validate() const {
        if (!s_.symmetric()) throw ArgumentError("SupportBody: field must be symmetric");
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i < s_.size(); ++i)
            if (!(s_[i] > 0.0)) bad.push_back(i);
        if (!bad.empty())
            throw ConvexityViolation("SupportBody: support function not positive", bad);
        const auto r = differentiate(s_, 2) + s_;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (!(r[i] > 0.0)) bad.push_back(i);
        if (!bad.empty())
            throw ConvexityViolation("SupportBody: radius of curvature not positive", bad);
    }

    PeriodicField s_;
};

/// r = s_thth + s.  Throws ConvexityViolation if any node value <= 0.
inline PeriodicField radius_of_curvature(const SupportBody& b) {
    auto r = differentiate(b.support(), 2) + b.support();
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!(r[i] > 0.0)) bad.push_back(i);
    if (!bad.empty()) throw ConvexityViolation("radius_of_curvature: r <= 0", bad);
    return r;
}

/// kappa_0 = kappa / s^3 = 1 / (r s^3); SL(2)-invariant, constant exactly
/// on centered ellipses where it equals 1/(ab)^2.
inline PeriodicField centro_affine_curvature(const SupportBody& b) {
    const auto r = radius_of_curvature(b);
    const auto& s = b.support();
    return r.binary(s, [](double rv, double sv) { return 1.0 / (rv * sv * sv * sv); });
}

inline double area(const SupportBody& b) {
    return 0.5 * integrate(b.support() * radius_of_curvature(b));
}

/// Area of the polar body: A(K°) = (1/2) \int s^{-2} dtheta.
inline double dual_area(const SupportBody& b) {
    return 0.5 * integrate(b.support().pow(-2.0));
}

inline double euclid_length(const SupportBody& b) { return integrate(radius_of_curvature(b)); }

/// Omega_p = \int (s/kappa) (kappa/s^3)^{p/(p+2)} dtheta.
inline double p_affine_length(const SupportBody& b, double p) {
    if (p < 1.0) throw ArgumentError("p_affine_length: p must be >= 1");
    const double beta = p / (p + 2.0);
    const auto r = radius_of_curvature(b);
    const auto integrand = b.support().binary(r, [beta](double sv, double rv) {
        return sv * rv * std::pow(1.0 / (rv * sv * sv * sv), beta);
    });
    return integrate(integrand);
}

/// Mixed volume V[s,h] = \int s (h_thth + h) dtheta; symmetric in its
/// arguments by integration by parts.  h need not be a support function.
inline double mixed_volume(const PeriodicField& s, const PeriodicField& h) {
    s.require_same_grid(h);
    return integrate(s * (differentiate(h, 2) + h));
}

/// Affine support function sigma = kappa_0^{-1/3}.
inline PeriodicField affine_support(const SupportBody& b) {
    return centro_affine_curvature(b).pow(-1.0 / 3.0);
}

/// Affine arclength density g = r^{2/3} (d\mathfrak{s} = g dtheta).
inline PeriodicField affine_arclength_density(const SupportBody& b) {
    return radius_of_curvature(b).pow(2.0 / 3.0);
}

/// First affine derivative of a field: f_s = f_theta / g.
inline PeriodicField affine_derivative(const PeriodicField& f, const PeriodicField& g) {
    return differentiate(f, 1).binary(g, [](double ft, double gv) { return ft / gv; });
}

/// Affine curvature mu recovered from sigma_ss + sigma*mu = 1.
inline PeriodicField affine_curvature(const SupportBody& b) {
    const auto g = affine_arclength_density(b);
    const auto sigma = affine_support(b);
    const auto sigma_ss = affine_derivative(affine_derivative(sigma, g), g);
    return sigma_ss.binary(sigma, [](double ss, double sv) { return (1.0 - ss) / sv; });
}

/// Boundary point gamma(theta) = s z + s_theta z_perp via the interpolated
/// support function.
inline Point2 boundary_point(const SupportBody& b, double theta) {
    fourier::TrigInterpolant interp(b.support().values());
    const double s = interp.evaluate(theta, 0);
    const double st = interp.evaluate(theta, 1);
    const double c = std::cos(theta), sn = std::sin(theta);
    return {s * c - st * sn, s * sn + st * c};
}

/// Hausdorff distance via the support-function sup-norm identity.
inline double hausdorff_distance(const SupportBody& b1, const SupportBody& b2) {
    if (!(b1.grid() == b2.grid())) throw ArgumentError("hausdorff_distance: grid mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < b1.size(); ++i)
        d = std::max(d, std::abs(b1.support()[i] - b2.support()[i]));
    return d;
}

/// Scalar functionals of a single body, evaluated together.
struct BodySummary {
    double area = 0.0;
    double dual_area = 0.0;
    double length = 0.0;
    double omega_p = 0.0;
    double k0_min = 0.0;
    double k0_max = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

inline BodySummary summarize(const SupportBody& b, double p) {
    BodySummary out;
    out.area = area(b);
    out.dual_area = dual_area(b);
    out.length = euclid_length(b);
    out.omega_p = p_affine_length(b, p);
    const auto k0 = centro_affine_curvature(b);
    out.k0_min = k0.min();
    out.k0_max = k0.max();
    out.sigma_min = std::pow(out.k0_max, -1.0 / 3.0);
    out.sigma_max = std::pow(out.k0_min, -1.0 / 3.0);
    return out;
}

namespace detail {

/// Golden-section maximization of a unimodal objective on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, int iters = 60) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

}  // namespace detail

/// Polar dual K° on the same grid.  Uses s_{K°}(u) = max_theta
/// cos(theta - theta_u) / s(theta): the maximum is located over a 4x
/// refined angle set and then polished by golden-section search on the
/// interpolated objective.
inline SupportBody polar_dual(const SupportBody& b) {
    const std::size_t n = b.size();
    const AngularGrid& grid = b.grid();
    fourier::TrigInterpolant interp(b.support().values());
    const auto objective = [&](double theta, double theta_u) {
        return std::cos(theta - theta_u) / interp(theta);
    };

    const std::size_t m = 4 * n;
    const double dphi = kTwoPi / static_cast<double>(m);
    std::vector<double> sref(m);
    for (std::size_t j = 0; j < m; ++j) sref[j] = interp(dphi * static_cast<double>(j));

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tu = grid.node(i);
        double best = -1.0;
        std::size_t bestj = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double val = std::cos(dphi * static_cast<double>(j) - tu) / sref[j];
            if (val > best) {
                best = val;
                bestj = j;
            }
        }
        const double center = dphi * static_cast<double>(bestj);
        const double theta = detail::golden_max(
            [&](double t) { return objective(t, tu); }, center - dphi, center + dphi);
        out[i] = std::max(objective(theta, tu), best);
    }
    return SupportBody(PeriodicField(grid, std::move(out)));
}

}  // namespace centroflow
