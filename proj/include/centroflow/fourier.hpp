#pragma once

// Discrete Fourier machinery for real samples on a uniform circle grid.
// Power-of-two sizes go through an iterative radix-2 FFT; other (even)
// sizes fall back to the direct O(n^2) transform, which is fine for the
// sizes this project uses off the hot path.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace centroflow::fourier {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline std::vector<cplx> dft_naive(std::span<const cplx> in, bool inverse) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sgn * 2.0 * std::numbers::pi *
                               static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += in[j] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace detail

/// Forward transform of real samples; returns normalized coefficients
/// c_k = (1/n) sum_j f_j exp(-i k theta_j), k = 0..n-1.
inline std::vector<cplx> coefficients(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<cplx> a(values.begin(), values.end());
    if (is_power_of_two(n)) {
        detail::fft_radix2(a, false);
    } else {
        a = detail::dft_naive(a, false);
    }
    for (auto& c : a) c /= static_cast<double>(n);
    return a;
}

/// Inverse of coefficients(); returns the real parts of the synthesized samples.
inline std::vector<double> synthesize(std::span<const cplx> coeffs) {
    const std::size_t n = coeffs.size();
    std::vector<cplx> a(coeffs.begin(), coeffs.end());
    if (is_power_of_two(n)) {
        detail::fft_radix2(a, true);
    } else {
        a = detail::dft_naive(a, true);
    }
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

/// Signed wavenumber of coefficient index k (Nyquist mapped to +n/2).
inline long signed_wavenumber(std::size_t k, std::size_t n) {
    return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

/// Trigonometric interpolant of real periodic samples; evaluates the
/// band-limited extension at arbitrary angles.  Reproduces node values
/// exactly and supports termwise differentiation.
class TrigInterpolant {
public:
    explicit TrigInterpolant(std::span<const double> values)
        : n_(values.size()), coeffs_(coefficients(values)) {}

    double operator()(double theta) const { return evaluate(theta, 0); }

    /// Evaluate the order-th derivative of the interpolant (order >= 0).
    double evaluate(double theta, unsigned order) const {
        // Real form: c0 + sum_{0<k<n/2} 2 Re(c_k e^{ik theta}) + Re(c_{n/2}) cos(n/2 theta).
        double acc = 0.0;
        const std::size_t half = n_ / 2;
        if (order == 0) acc += coeffs_[0].real();
        for (std::size_t k = 1; k < half; ++k) {
            const double kk = static_cast<double>(k);
            double re = coeffs_[k].real();
            double im = coeffs_[k].imag();
            // d/dtheta rotates the phasor by i*k.
            for (unsigned d = 0; d < order; ++d) {
                const double nre = -kk * im;
                const double nim = kk * re;
                re = nre;
                im = nim;
            }
            acc += 2.0 * (re * std::cos(kk * theta) - im * std::sin(kk * theta));
        }
        if (half >= 1) {
            // Nyquist term kept as a pure cosine; odd derivatives of it are
            // dropped, matching the spectral-derivative convention.
            const double kk = static_cast<double>(half);
            const double cN = coeffs_[half].real();
            if (order % 2 == 0) {
                double factor = 1.0;
                for (unsigned d = 0; d < order; d += 2) factor *= -kk * kk;
                acc += cN * factor * std::cos(kk * theta);
            }
        }
        return acc;
    }

    std::size_t size() const { return n_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

private:
    std::size_t n_;
    std::vector<cplx> coeffs_;
};

}  // namespace centroflow::fourier
