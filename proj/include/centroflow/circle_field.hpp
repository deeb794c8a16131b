#pragma once

// Spectral calculus for 2*pi-periodic scalar fields sampled on a uniform
// angular grid, with exact enforcement of antipodal (pi-periodic) symmetry.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "centroflow/errors.hpp"
#include "centroflow/fourier.hpp"

namespace centroflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform grid of n angles theta_i = 2*pi*i/n.  n must be even and >= 16
/// so that the antipodal pairing i <-> i + n/2 is exact.
class AngularGrid {
public:
    explicit AngularGrid(std::size_t n) : n_(n) {
        if (n < 16 || n % 2 != 0)
            throw ArgumentError("AngularGrid: n must be even and >= 16");
    }

    std::size_t size() const { return n_; }
    double spacing() const { return kTwoPi / static_cast<double>(n_); }
    double node(std::size_t i) const { return spacing() * static_cast<double>(i); }

    friend bool operator==(const AngularGrid& a, const AngularGrid& b) { return a.n_ == b.n_; }

private:
    std::size_t n_;
};

/// Sampled 2*pi-periodic scalar field.  Immutable after construction; the
/// symmetric flag records that values[i] == values[i + n/2] bitwise.
class PeriodicField {
public:
    PeriodicField(AngularGrid grid, std::vector<double> values, bool symmetric = false)
        : grid_(grid), values_(std::move(values)), symmetric_(symmetric) {
        if (values_.size() != grid_.size())
            throw ArgumentError("PeriodicField: value count does not match grid");
    }

    static PeriodicField sample(AngularGrid grid, const std::function<double(double)>& f,
                                bool symmetric = false) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
        return {grid, std::move(v), symmetric};
    }

    static PeriodicField constant(AngularGrid grid, double c) {
        return {grid, std::vector<double>(grid.size(), c), true};
    }

    const AngularGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    bool symmetric() const { return symmetric_; }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    std::size_t argmin() const {
        return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) -
                                        values_.begin());
    }
    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) -
                                        values_.begin());
    }

    /// Nodewise map; the result keeps the symmetric flag (a pointwise map of
    /// an antipodally equal field is antipodally equal).
    PeriodicField map(const std::function<double(double)>& f) const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
        return {grid_, std::move(v), symmetric_};
    }

    PeriodicField binary(const PeriodicField& other,
                         const std::function<double(double, double)>& f) const {
        require_same_grid(other);
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i], other.values_[i]);
        return {grid_, std::move(v), symmetric_ && other.symmetric_};
    }

    PeriodicField operator+(const PeriodicField& o) const {
        return binary(o, [](double a, double b) { return a + b; });
    }
    PeriodicField operator-(const PeriodicField& o) const {
        return binary(o, [](double a, double b) { return a - b; });
    }
    PeriodicField operator*(const PeriodicField& o) const {
        return binary(o, [](double a, double b) { return a * b; });
    }
    PeriodicField scaled(double c) const {
        return map([c](double x) { return c * x; });
    }
    PeriodicField pow(double e) const {
        return map([e](double x) { return std::pow(x, e); });
    }

    void require_same_grid(const PeriodicField& other) const {
        if (!(grid_ == other.grid_)) throw ArgumentError("PeriodicField: grid mismatch");
    }

private:
    AngularGrid grid_;
    std::vector<double> values_;
    bool symmetric_;
};

/// Spectral derivative of the given order; exact for band-limited input.
/// The Nyquist mode is dropped for odd orders.
inline PeriodicField differentiate(const PeriodicField& f, unsigned order) {
    if (order == 0) throw ArgumentError("differentiate: order must be positive");
    const std::size_t n = f.size();
    auto coeffs = fourier::coefficients(f.values());
    for (std::size_t k = 0; k < n; ++k) {
        const long kw = fourier::signed_wavenumber(k, n);
        if (static_cast<std::size_t>(std::labs(kw)) == n / 2 && order % 2 == 1) {
            coeffs[k] = 0.0;
            continue;
        }
        fourier::cplx mul(1.0);
        for (unsigned d = 0; d < order; ++d) mul *= fourier::cplx(0.0, static_cast<double>(kw));
        coeffs[k] *= mul;
    }
    return {f.grid(), fourier::synthesize(coeffs), f.symmetric()};
}

/// Circle integral by the uniform-node rule (spectrally exact).
inline double integrate(const PeriodicField& f) {
    double acc = 0.0;
    for (double v : f.values()) acc += v;
    return acc * f.grid().spacing();
}

/// Trigonometric interpolation at an arbitrary angle.
inline double interpolate(const PeriodicField& f, double theta) {
    return fourier::TrigInterpolant(f.values())(theta);
}

/// Project onto the antipodally symmetric part: values[i] and values[i+n/2]
/// are both replaced by their average, so the invariant holds bitwise.
inline PeriodicField symmetrize(const PeriodicField& f) {
    const std::size_t n = f.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double avg = 0.5 * (f[i] + f[i + n / 2]);
        v[i] = avg;
        v[i + n / 2] = avg;
    }
    return {f.grid(), std::move(v), true};
}

/// Fraction of spectral energy carried by the top third of wavenumbers.
/// Used as a resolution monitor for pointwise nonlinear expressions.
inline double spectral_tail_fraction(const PeriodicField& f) {
    const std::size_t n = f.size();
    const auto coeffs = fourier::coefficients(f.values());
    double total = 0.0, tail = 0.0;
    const long cutoff = static_cast<long>(n) / 3;
    for (std::size_t k = 1; k < n; ++k) {
        const double e = std::norm(coeffs[k]);
        total += e;
        if (std::labs(fourier::signed_wavenumber(k, n)) >= cutoff) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace centroflow
