#pragma once

// GL(2)/SL(2) action on support bodies, centered-ellipse toolkit,
// Loewner-John fitting, the ellipse sandwich, and the Euclidean-length
// minimizing SL(2) normalization.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "centroflow/convex_body.hpp"

namespace centroflow {

/// Origin-centered ellipse with semi-axes a >= b > 0 and axis angle phi.
struct CenteredEllipse {
    double a = 1.0;
    double b = 1.0;
    double phi = 0.0;  // in [0, pi)

    double support(double theta) const {
        const double c = std::cos(theta - phi), s = std::sin(theta - phi);
        return std::sqrt(a * a * c * c + b * b * s * s);
    }
    double area() const { return std::numbers::pi * a * b; }
    double centro_affine_curvature() const { return 1.0 / (a * b * a * b); }

    CenteredEllipse scaled(double c) const { return {a * c, b * c, phi}; }
    CenteredEllipse polar() const {
        // Dual of a centered ellipse: reciprocal axes, swapped so a >= b.
        return {1.0 / b, 1.0 / a, std::fmod(phi + std::numbers::pi / 2.0, std::numbers::pi)};
    }
};

/// 2x2 linear map; the SL(2) members carry |det - 1| <= 1e-10.
struct Mat2 {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    double det() const { return m11 * m22 - m12 * m21; }
    Mat2 transpose() const { return {m11, m21, m12, m22}; }
    Mat2 inverse() const {
        const double d = det();
        if (d == 0.0) throw ArgumentError("Mat2::inverse: singular map");
        return {m22 / d, -m12 / d, -m21 / d, m11 / d};
    }
    Point2 apply(Point2 v) const { return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y}; }

    static Mat2 rotation(double ang) {
        const double c = std::cos(ang), s = std::sin(ang);
        return {c, -s, s, c};
    }
    static Mat2 diagonal(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

/// R(phi) diag(e^lambda, e^-lambda) R(-phi): the symmetric positive-definite
/// unimodular maps used by the length normalization.
inline Mat2 unimodular_stretch(double lambda, double phi) {
    return Mat2::rotation(phi) * Mat2::diagonal(std::exp(lambda), std::exp(-lambda)) *
           Mat2::rotation(-phi);
}

inline SupportBody ellipse_body(const CenteredEllipse& e, const AngularGrid& grid) {
    return SupportBody(
        PeriodicField::sample(grid, [&](double t) { return e.support(t); }, true));
}

/// Image body under an invertible map: s_{MK}(u) = |M^T u| s_K(M^T u / |M^T u|).
inline SupportBody apply_map(const SupportBody& b, const Mat2& m) {
    if (std::abs(m.det()) < 1e-14) throw ArgumentError("apply_map: singular map");
    const Mat2 mt = m.transpose();
    fourier::TrigInterpolant interp(b.support().values());
    std::vector<double> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double t = b.grid().node(i);
        const Point2 v = mt.apply({std::cos(t), std::sin(t)});
        const double norm = std::hypot(v.x, v.y);
        out[i] = norm * interp(std::atan2(v.y, v.x));
    }
    return SupportBody(PeriodicField(b.grid(), std::move(out)));
}

namespace detail {

/// Minimum-area origin-centered ellipse containing a symmetric point cloud:
/// maximize log det Q subject to x_i^T Q x_i <= 1, a 3-variable convex
/// program with linear constraints, solved by a log-barrier Newton method.
/// (First-order multiplicative-weights schemes stall on smooth clouds where
/// the whole boundary is nearly active.)  Returns the quadratic form of
/// {x : x^T Q x <= 1}; eps is the bound on the duality gap per constraint.
inline std::array<double, 3> central_mvee_form(const std::vector<Point2>& pts, double eps,
                                               int max_rounds) {
    const std::size_t m = pts.size();
    if (m < 2) throw NumericError("lowner_ellipse: degenerate point cloud");
    // Constraint gradients a_i with x^T Q x = a_i . q for q = (q11, q12, q22).
    std::vector<std::array<double, 3>> a(m);
    double rmax2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = pts[i].x, y = pts[i].y;
        a[i] = {x * x, 2.0 * x * y, y * y};
        rmax2 = std::max(rmax2, x * x + y * y);
    }
    if (rmax2 <= 0.0) throw NumericError("lowner_ellipse: degenerate point cloud");
    // Strictly feasible start: circle just containing the cloud.
    std::array<double, 3> q{1.0 / (rmax2 * (1.0 + 1e-3)), 0.0, 1.0 / (rmax2 * (1.0 + 1e-3))};

    const auto barrier_value = [&](const std::array<double, 3>& qq, double t,
                                   bool& feasible) -> double {
        const double det = qq[0] * qq[2] - qq[1] * qq[1];
        feasible = det > 0.0 && qq[0] > 0.0;
        if (!feasible) return 0.0;
        double val = -t * std::log(det);
        for (const auto& ai : a) {
            const double slack = 1.0 - (ai[0] * qq[0] + ai[1] * qq[1] + ai[2] * qq[2]);
            if (slack <= 0.0) {
                feasible = false;
                return 0.0;
            }
            val -= std::log(slack);
        }
        return val;
    };

    int rounds = 0;
    for (double t = 8.0;; t *= 20.0) {
        // Newton converges quadratically once close; 60 steps per barrier
        // stage is generous, and the cap stops roundoff-floor dithering of
        // the decrement at large t.
        for (int inner = 0; inner < 60; ++inner) {
            if (++rounds > max_rounds)
                throw NumericError("lowner_ellipse: barrier iteration did not converge");
            const double det = q[0] * q[2] - q[1] * q[1];
            const double g11 = q[2] / det, g12 = -q[1] / det, g22 = q[0] / det;
            // grad/Hess of -t log det Q in the (q11, q12, q22) coordinates.
            std::array<double, 3> grad{-t * g11, -2.0 * t * g12, -t * g22};
            std::array<std::array<double, 3>, 3> hess{{
                {t * g11 * g11, 2.0 * t * g11 * g12, t * g12 * g12},
                {2.0 * t * g11 * g12, 2.0 * t * (g11 * g22 + g12 * g12), 2.0 * t * g12 * g22},
                {t * g12 * g12, 2.0 * t * g12 * g22, t * g22 * g22},
            }};
            for (const auto& ai : a) {
                const double slack = 1.0 - (ai[0] * q[0] + ai[1] * q[1] + ai[2] * q[2]);
                const double inv = 1.0 / slack;
                for (int r = 0; r < 3; ++r) {
                    grad[r] += ai[r] * inv;
                    for (int c = 0; c < 3; ++c) hess[r][c] += ai[r] * ai[c] * inv * inv;
                }
            }
            // Solve hess * d = -grad (3x3, Gaussian elimination with pivoting).
            std::array<std::array<double, 4>, 3> aug{};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) aug[r][c] = hess[r][c];
                aug[r][3] = -grad[r];
            }
            for (int col = 0; col < 3; ++col) {
                int piv = col;
                for (int r = col + 1; r < 3; ++r)
                    if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
                std::swap(aug[col], aug[piv]);
                if (aug[col][col] == 0.0)
                    throw NumericError("lowner_ellipse: singular Newton system");
                for (int r = 0; r < 3; ++r) {
                    if (r == col) continue;
                    const double f = aug[r][col] / aug[col][col];
                    for (int c = col; c < 4; ++c) aug[r][c] -= f * aug[col][c];
                }
            }
            const std::array<double, 3> d{aug[0][3] / aug[0][0], aug[1][3] / aug[1][1],
                                          aug[2][3] / aug[2][2]};
            const double decrement = -(grad[0] * d[0] + grad[1] * d[1] + grad[2] * d[2]);
            if (decrement <= 1e-10) break;
            // Backtracking line search keeping Q positive and slacks positive.
            bool ok = false;
            double f0;
            {
                bool feas;
                f0 = barrier_value(q, t, feas);
            }
            for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
                const std::array<double, 3> cand{q[0] + alpha * d[0], q[1] + alpha * d[1],
                                                 q[2] + alpha * d[2]};
                bool feas = false;
                const double f1 = barrier_value(cand, t, feas);
                if (feas && f1 <= f0 - 0.25 * alpha * decrement) {
                    q = cand;
                    ok = true;
                    break;
                }
            }
            if (!ok) break;  // at numerical precision for this t
        }
        if (static_cast<double>(m) / t <= eps) break;
    }
    return {q[0], q[1], q[2]};
}

inline CenteredEllipse ellipse_from_form(double q11, double q12, double q22) {
    // Eigen-decomposition of the symmetric form Q; axes are 1/sqrt(eigenvalue).
    const double tr = q11 + q22;
    const double det = q11 * q22 - q12 * q12;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double l1 = tr / 2.0 + disc;  // larger eigenvalue -> minor axis
    const double l2 = tr / 2.0 - disc;
    if (l2 <= 0.0) throw NumericError("ellipse_from_form: form not positive definite");
    double phi;
    if (std::abs(q12) < 1e-14 && q11 <= q22) {
        phi = 0.0;  // major axis along x
    } else if (std::abs(q12) < 1e-14) {
        phi = std::numbers::pi / 2.0;
    } else {
        // Eigenvector of the smaller eigenvalue l2 (major axis direction).
        phi = std::atan2(l2 - q11, q12);
    }
    phi = std::fmod(phi + std::numbers::pi, std::numbers::pi);
    return {1.0 / std::sqrt(l2), 1.0 / std::sqrt(l1), phi};
}

}  // namespace detail

/// Minimal-area centered ellipse containing b (the Loewner ellipse of the
/// symmetric class).  Fitted over a dense boundary cloud and then inflated
/// so every sample point is inside.
inline CenteredEllipse lowner_ellipse(const SupportBody& b) {
    const std::size_t n = b.size();
    const std::size_t m = 4 * n;
    fourier::TrigInterpolant interp(b.support().values());
    std::vector<Point2> pts(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
        const double s = interp.evaluate(t, 0), st = interp.evaluate(t, 1);
        const double c = std::cos(t), sn = std::sin(t);
        pts[j] = {s * c - st * sn, s * sn + st * c};
    }
    auto [q11, q12, q22] = detail::central_mvee_form(pts, 1e-8, 100000);
    // Exact containment of the cloud: scale the form by the worst residual.
    double worst = 0.0;
    for (const auto& p : pts)
        worst = std::max(worst, q11 * p.x * p.x + 2.0 * q12 * p.x * p.y + q22 * p.y * p.y);
    if (worst > 1.0) {
        q11 /= worst;
        q12 /= worst;
        q22 /= worst;
    }
    return detail::ellipse_from_form(q11, q12, q22);
}

/// Maximal-area inscribed centered ellipse, via duality with the Loewner
/// ellipse of the polar body.  The numerically computed polar carries
/// interpolation error, so the result is deflated to exact nodewise
/// inclusion (the counterpart of the inflation in lowner_ellipse).
inline CenteredEllipse john_ellipse(const SupportBody& b) {
    CenteredEllipse e = lowner_ellipse(polar_dual(b)).polar();
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i)
        c = std::min(c, b.support()[i] / e.support(b.grid().node(i)));
    if (c < 1.0) e = e.scaled(c);
    return e;
}

/// The inner/outer ellipse pair with centro-affine curvature pinned to
/// max kappa_0 and min kappa_0 of b via the quartic scaling law
/// kappa_0(cE) = c^-4 kappa_0(E).  Inclusions are verified nodewise.
inline std::pair<CenteredEllipse, CenteredEllipse> ellipse_sandwich(const SupportBody& b) {
    const auto k0 = centro_affine_curvature(b);
    const double m = k0.min(), M = k0.max();

    CenteredEllipse inner = john_ellipse(b);
    inner = inner.scaled(std::pow(inner.centro_affine_curvature() / M, 0.25));
    CenteredEllipse outer = lowner_ellipse(b);
    outer = outer.scaled(std::pow(outer.centro_affine_curvature() / m, 0.25));

    constexpr double tol = 1e-7;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double t = b.grid().node(i);
        const double s = b.support()[i];
        if (inner.support(t) > s + tol || s > outer.support(t) + tol)
            throw NumericError("ellipse_sandwich: inclusion failed (under-resolved body?)");
    }
    return {inner, outer};
}

namespace detail {

/// Nelder-Mead on R^2, tuned for the smooth length objective.
template <typename F>
std::array<double, 2> nelder_mead2(F&& f, std::array<double, 2> start, double scale,
                                   double rel_tol, int max_iter) {
    std::array<std::array<double, 2>, 3> x{{start,
                                            {start[0] + scale, start[1]},
                                            {start[0], start[1] + scale}}};
    std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
    for (int it = 0; it < max_iter; ++it) {
        std::array<int, 3> ord{0, 1, 2};
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        const auto &best = x[ord[0]], &worst = x[ord[2]];
        if (std::abs(fx[ord[2]] - fx[ord[0]]) <=
            rel_tol * (std::abs(fx[ord[0]]) + 1e-300))
            break;
        const std::array<double, 2> centroid{(best[0] + x[ord[1]][0]) / 2.0,
                                             (best[1] + x[ord[1]][1]) / 2.0};
        const auto point = [&](double t) {
            return std::array<double, 2>{centroid[0] + t * (centroid[0] - worst[0]),
                                         centroid[1] + t * (centroid[1] - worst[1])};
        };
        const auto xr = point(1.0);
        const double fr = f(xr);
        if (fr < fx[ord[0]]) {
            const auto xe = point(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                x[ord[2]] = xe;
                fx[ord[2]] = fe;
            } else {
                x[ord[2]] = xr;
                fx[ord[2]] = fr;
            }
        } else if (fr < fx[ord[1]]) {
            x[ord[2]] = xr;
            fx[ord[2]] = fr;
        } else {
            const auto xc = point(-0.5);
            const double fc = f(xc);
            if (fc < fx[ord[2]]) {
                x[ord[2]] = xc;
                fx[ord[2]] = fc;
            } else {
                for (int i : {1, 2}) {
                    for (int d = 0; d < 2; ++d)
                        x[ord[i]][d] = best[d] + 0.5 * (x[ord[i]][d] - best[d]);
                    fx[ord[i]] = f(x[ord[i]]);
                }
            }
        }
    }
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    return x[ord[0]];
}

}  // namespace detail

/// SL(2) map of the form R(phi) diag(e^l, e^-l) R(-phi) minimizing the
/// Euclidean length of the image, together with the normalized body.
/// Rotations do not change length, so this 2-parameter family suffices.
inline std::pair<Mat2, SupportBody> min_length_normalize(const SupportBody& b) {
    fourier::TrigInterpolant interp(b.support().values());
    const std::size_t n = b.size();
    // L(MK) = \int s_MK dtheta; evaluated without body validation for speed.
    const auto length_of = [&](double lambda, double phi) {
        const Mat2 mt = unimodular_stretch(lambda, phi).transpose();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
            const Point2 v = mt.apply({std::cos(t), std::sin(t)});
            const double norm = std::hypot(v.x, v.y);
            acc += norm * interp(std::atan2(v.y, v.x));
        }
        return acc * kTwoPi / static_cast<double>(n);
    };

    // Multistart over phi; the objective in lambda is convex-like around
    // each orientation but phi has period pi/2 structure for near-ellipses.
    std::array<double, 2> best{0.0, 0.0};
    double best_len = length_of(0.0, 0.0);
    for (double phi0 : {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0,
                        3.0 * std::numbers::pi / 4.0}) {
        const auto cand = detail::nelder_mead2(
            [&](std::array<double, 2> x) {
                const double lam = std::clamp(x[0], -3.0, 3.0);
                return length_of(lam, x[1]);
            },
            {0.0, phi0}, 0.2, 1e-12, 400);
        const double lam = std::clamp(cand[0], -3.0, 3.0);
        const double len = length_of(lam, cand[1]);
        if (len < best_len - 1e-14 ||
            (std::abs(len - best_len) <= 1e-12 && std::abs(lam) < std::abs(best[0]))) {
            best = {lam, cand[1]};
            best_len = len;
        }
    }
    if (!std::isfinite(best_len)) throw NumericError("min_length_normalize: non-finite length");
    const Mat2 map = unimodular_stretch(best[0], best[1]);
    return {map, apply_map(b, map)};
}

}  // namespace centroflow
