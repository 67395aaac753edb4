#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "radact/matrix.hpp"
#include "radact/sigsim.hpp"

namespace radact::rangedoppler {

/// Range bins x slow time. Complex values are retained so that Doppler
/// survives the later range-bin summation; magnitudes() exposes the image.
struct RangeMap {
    ComplexMatrix data; // N rows (range bins) x M columns (PRIs)
    double bin_resolution_m = 0.0;
    double pri_s = 0.0;

    std::size_t num_bins() const { return data.rows(); }
    std::size_t num_pri() const { return data.cols(); }
    double magnitude(std::size_t p, std::size_t m) const { return std::abs(data(p, m)); }
    RealMatrix magnitudes() const;
    double duration_s() const { return static_cast<double>(data.cols()) * pri_s; }
};

struct StftConfig {
    std::uint32_t window_len = 128; // L
    std::uint32_t hop = 8;          // D

    double overlap() const {
        return 1.0 - static_cast<double>(hop) / static_cast<double>(window_len);
    }
    // Full windows only, no zero padding.
    std::size_t frame_count(std::size_t signal_len) const {
        if (signal_len < window_len) return 0;
        return (signal_len - window_len) / hop + 1;
    }
    void validate() const;
};

struct MicroDopplerImage {
    RealMatrix data; // magnitude-squared, window_len rows x frame columns
    std::vector<double> doppler_axis_hz; // per row, -PRF/2 at row 0, 0 centred
    std::vector<double> time_axis_s;     // per column, window-centre times
};

/// Per-PRI normalized DFT stacked over slow time:
/// R(p,m) = (1/N) sum_n s(n,m) exp(-j 2 pi p n / N).
RangeMap compute_rangemap(const sigsim::ComplexBaseband& s);

/// Complex sum over a closed bin interval: V(m) = sum_{r=r1..r2} R(r,m).
std::vector<std::complex<double>> sum_range_bins(const RangeMap& R, std::size_t r1,
                                                 std::size_t r2);

/// Sliding Hanning-windowed DFT of V, magnitude squared, hop cfg.hop.
/// Rows are reordered so zero Doppler sits at row L/2.
MicroDopplerImage spectrogram(const std::vector<std::complex<double>>& v,
                              const StftConfig& cfg, double pri_s);

/// Symmetric Hanning window of length n.
std::vector<double> hanning(std::size_t n);

/// Bilinear resize with corner alignment; identity when dims are unchanged.
RealMatrix resize_image(const RealMatrix& img, std::size_t rows, std::size_t cols);

} // namespace radact::rangedoppler
