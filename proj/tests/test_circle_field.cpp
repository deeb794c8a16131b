#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "centroflow/circle_field.hpp"

using namespace centroflow;

namespace {
constexpr double pi = std::numbers::pi;

PeriodicField cos_field(const AngularGrid& g, double k, double amp = 1.0) {
    return PeriodicField::sample(g, [k, amp](double t) { return amp * std::cos(k * t); });
}

double max_abs_diff(const PeriodicField& a, const PeriodicField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(AngularGrid(15), ArgumentError);
    CHECK_THROWS_AS(AngularGrid(17), ArgumentError);
    CHECK_THROWS_AS(AngularGrid(8), ArgumentError);
    const AngularGrid g(64);
    CHECK(g.spacing() == doctest::Approx(2.0 * pi / 64));
    CHECK(g.node(16) == doctest::Approx(pi / 2));
}

TEST_CASE("differentiate: eigenfunctions and constants") {
    const AngularGrid g(64);
    const auto f = cos_field(g, 2.0);
    const auto d2 = differentiate(f, 2);
    CHECK(max_abs_diff(d2, cos_field(g, 2.0, -4.0)) < 1e-12);

    const auto c = PeriodicField::constant(g, 1.0);
    for (unsigned order : {1u, 2u, 3u}) {
        const auto d = differentiate(c, order);
        CHECK(std::abs(d.min()) < 1e-13);
        CHECK(std::abs(d.max()) < 1e-13);
    }

    const auto s4 = PeriodicField::sample(g, [](double t) { return std::sin(4.0 * t); });
    const auto d1 = differentiate(s4, 1);
    const auto expect = cos_field(g, 4.0, 4.0);
    CHECK(max_abs_diff(d1, expect) < 1e-12);

    CHECK_THROWS_AS(differentiate(f, 0), ArgumentError);
}

TEST_CASE("differentiate: composition and symmetry flag") {
    const AngularGrid g(64);
    const auto f = PeriodicField::sample(
        g, [](double t) { return 1.0 + 0.3 * std::cos(2.0 * t) + 0.1 * std::sin(6.0 * t); },
        true);
    const auto twice = differentiate(differentiate(f, 1), 1);
    const auto once = differentiate(f, 2);
    double scale = std::max(std::abs(once.min()), std::abs(once.max()));
    CHECK(max_abs_diff(twice, once) / scale < 1e-11);
    CHECK(once.symmetric());
}

TEST_CASE("integrate") {
    const AngularGrid g(64);
    CHECK(integrate(PeriodicField::constant(g, 1.0)) == doctest::Approx(2.0 * pi));
    for (double k : {1.0, 5.0, 17.0, 31.0})
        CHECK(std::abs(integrate(cos_field(g, k))) < 1e-12);
    const auto f = PeriodicField::sample(
        g, [](double t) { return 2.0 + std::cos(6.0 * t); });
    CHECK(integrate(f) == doctest::Approx(4.0 * pi).epsilon(1e-12));
}

TEST_CASE("integrate of derivative vanishes") {
    const AngularGrid g(64);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(64);
    for (auto& x : v) x = u(rng);
    const PeriodicField f(g, v);
    CHECK(std::abs(integrate(differentiate(f, 1))) < 1e-12);
}

TEST_CASE("interpolate") {
    const AngularGrid g(64);
    const auto f = cos_field(g, 2.0);
    CHECK(interpolate(f, pi / 8.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    for (std::size_t i : {0u, 13u, 40u})
        CHECK(interpolate(f, g.node(i)) == doctest::Approx(f[i]).epsilon(1e-13));

    // Closed-form ellipse support reproduced off-grid.
    const AngularGrid g2(256);
    const auto se = PeriodicField::sample(g2, [](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return std::sqrt(4.0 * c * c + 0.25 * s * s);
    });
    const double expect = std::sqrt(4.0 * 0.25 + 0.25 * 0.75);
    CHECK(interpolate(se, pi / 3.0) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("symmetrize") {
    const AngularGrid g(64);
    const auto f = PeriodicField::sample(
        g, [](double t) { return 1.0 + std::cos(t) + std::cos(2.0 * t); });
    const auto sym = symmetrize(f);
    CHECK(sym.symmetric());
    // Projection onto even wavenumbers: 1 + cos 2t.
    const auto expect =
        PeriodicField::sample(g, [](double t) { return 1.0 + std::cos(2.0 * t); });
    CHECK(max_abs_diff(sym, expect) < 1e-14);

    // Idempotence, bitwise.
    const auto twice = symmetrize(sym);
    for (std::size_t i = 0; i < sym.size(); ++i) CHECK(twice[i] == sym[i]);

    // Antipodal invariant exact.
    for (std::size_t i = 0; i < 32; ++i) CHECK(sym[i] == sym[i + 32]);

    // cos(theta) annihilated.
    const auto odd = symmetrize(cos_field(g, 1.0));
    CHECK(std::abs(odd.min()) < 1e-15);
    CHECK(std::abs(odd.max()) < 1e-15);

    // Odd Fourier coefficients vanish after symmetrization.
    const auto coeffs = fourier::coefficients(sym.values());
    for (std::size_t k = 1; k < sym.size(); k += 2) CHECK(std::abs(coeffs[k]) < 1e-12);
}

TEST_CASE("Parseval consistency") {
    const AngularGrid g(64);
    const auto f = PeriodicField::sample(g, [](double t) {
        return 0.7 + 0.4 * std::cos(3.0 * t) - 0.2 * std::sin(8.0 * t);
    });
    const double lhs = integrate(f * f);
    const auto coeffs = fourier::coefficients(f.values());
    double rhs = 0.0;
    for (const auto& c : coeffs) rhs += std::norm(c);
    rhs *= 2.0 * pi;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("spectral tail diagnostic") {
    const AngularGrid g(64);
    CHECK(spectral_tail_fraction(cos_field(g, 2.0)) < 1e-12);
    CHECK(spectral_tail_fraction(cos_field(g, 30.0)) > 0.99);
}

TEST_CASE("non-power-of-two grids use the direct transform") {
    const AngularGrid g(48);
    const auto f = cos_field(g, 3.0);
    const auto d2 = differentiate(f, 2);
    CHECK(max_abs_diff(d2, cos_field(g, 3.0, -9.0)) < 1e-11);
    CHECK(std::abs(integrate(f)) < 1e-11);
}
