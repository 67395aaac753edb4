#include "radact/fft.hpp"

#include <cmath>

#include "radact/errors.hpp"

namespace radact {

namespace {
bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
    if (n_ == 0) throw LengthError("FftPlan: size must be positive");
    if (!pow2_) return;

    bitrev_.resize(n_);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n_) ++log2n;
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        bitrev_[i] = r;
    }

    twiddle_.resize(n_ / 2);
    for (std::size_t k = 0; k < n_ / 2; ++k) {
        const double a = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_);
        twiddle_[k] = {std::cos(a), std::sin(a)};
    }
}

void FftPlan::forward(std::complex<double>* x) const {
    if (!pow2_) {
        // Direct summation fallback for non power-of-two sizes.
        std::vector<std::complex<double>> out(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t n = 0; n < n_; ++n) {
                const double a = -2.0 * M_PI * static_cast<double>(k) *
                                 static_cast<double>(n) / static_cast<double>(n_);
                acc += x[n] * std::complex<double>(std::cos(a), std::sin(a));
            }
            out[k] = acc;
        }
        for (std::size_t k = 0; k < n_; ++k) x[k] = out[k];
        return;
    }

    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::complex<double> w = twiddle_[k * step];
                const std::complex<double> u = x[start + k];
                const std::complex<double> v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
    }
}

void FftPlan::forward(std::vector<std::complex<double>>& x) const {
    if (x.size() != n_) throw LengthError("FftPlan::forward: size mismatch");
    forward(x.data());
}

} // namespace radact
