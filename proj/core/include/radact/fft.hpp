#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace radact {

/// Forward DFT plan: X(k) = sum_n x(n) exp(-j 2 pi k n / N).
/// Radix-2 with precomputed twiddles for power-of-two sizes, direct
/// summation otherwise (small sizes only on that path).
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const { return n_; }

    // In-place forward transform; x must hold size() elements.
    void forward(std::complex<double>* x) const;
    void forward(std::vector<std::complex<double>>& x) const;

private:
    std::size_t n_ = 0;
    bool pow2_ = false;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_; // exp(-2 pi i k / n), k < n/2
};

} // namespace radact
