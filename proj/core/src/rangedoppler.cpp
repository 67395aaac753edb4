#include "radact/rangedoppler.hpp"

#include <cmath>

#include "radact/errors.hpp"
#include "radact/fft.hpp"

namespace radact::rangedoppler {

RealMatrix RangeMap::magnitudes() const {
    RealMatrix out(data.rows(), data.cols());
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t c = 0; c < data.cols(); ++c)
            out(r, c) = std::abs(data(r, c));
    return out;
}

void StftConfig::validate() const {
    if (window_len < 2) throw ConfigError("stft: window_len must be at least 2");
    if (hop < 1 || hop > window_len)
        throw ConfigError("stft: hop must be in [1, window_len]");
}

RangeMap compute_rangemap(const sigsim::ComplexBaseband& s) {
    const std::size_t n = s.config.samples_per_pri;
    const std::size_t m = s.config.num_pri;
    if (s.data.rows() != n || s.data.cols() != m)
        throw ShapeError("baseband matrix does not match its radar config");

    RangeMap out;
    out.bin_resolution_m = s.config.range_resolution_m();
    out.pri_s = s.config.pri_s;
    out.data = ComplexMatrix(n, m);

    const FftPlan plan(n);
    std::vector<std::complex<double>> col(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = s.data(r, c);
        plan.forward(col);
        for (std::size_t r = 0; r < n; ++r) out.data(r, c) = col[r] * scale;
    }
    return out;
}

std::vector<std::complex<double>> sum_range_bins(const RangeMap& R, std::size_t r1,
                                                 std::size_t r2) {
    if (r1 > r2) throw RangeError("sum_range_bins: r1 > r2");
    if (r2 >= R.num_bins())
        throw RangeError("sum_range_bins: r2 exceeds range bin count");
    std::vector<std::complex<double>> v(R.num_pri(), {0.0, 0.0});
    for (std::size_t r = r1; r <= r2; ++r)
        for (std::size_t m = 0; m < R.num_pri(); ++m) v[m] += R.data(r, m);
    return v;
}

std::vector<double> hanning(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
    return w;
}

MicroDopplerImage spectrogram(const std::vector<std::complex<double>>& v,
                              const StftConfig& cfg, double pri_s) {
    cfg.validate();
    if (pri_s <= 0) throw ConfigError("spectrogram: pri_s must be positive");
    const std::size_t L = cfg.window_len;
    if (v.size() < L)
        throw LengthError("spectrogram: sequence shorter than the window");

    const std::size_t frames = cfg.frame_count(v.size());
    const double prf = 1.0 / pri_s;

    MicroDopplerImage md;
    md.data = RealMatrix(L, frames);
    md.doppler_axis_hz.resize(L);
    md.time_axis_s.resize(frames);
    for (std::size_t r = 0; r < L; ++r)
        md.doppler_axis_hz[r] =
            (static_cast<double>(r) - static_cast<double>(L / 2)) * prf /
            static_cast<double>(L);

    const std::vector<double> w = hanning(L);
    const FftPlan plan(L);
    std::vector<std::complex<double>> frame(L);

    // The window looks backward from slow-time index n = L-1 + j*hop, so a
    // tone exp(j 2 pi f m pri) lands in DFT bin -f*pri*L (mod L); rows are
    // permuted to put frequency (r - L/2)*prf/L at row r.
    for (std::size_t j = 0; j < frames; ++j) {
        const std::size_t n = L - 1 + j * cfg.hop;
        for (std::size_t m = 0; m < L; ++m) frame[m] = w[m] * v[n - m];
        plan.forward(frame);
        for (std::size_t r = 0; r < L; ++r) {
            const std::size_t k = (L + L / 2 - r) % L;
            md.data(r, j) = std::norm(frame[k]);
        }
        md.time_axis_s[j] =
            (static_cast<double>(n) - static_cast<double>(L - 1) / 2.0) * pri_s;
    }
    return md;
}

RealMatrix resize_image(const RealMatrix& img, std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1) throw ShapeError("resize_image: target dims must be >= 1");
    if (img.rows() == 0 || img.cols() == 0)
        throw ShapeError("resize_image: empty source image");
    if (rows == img.rows() && cols == img.cols()) return img;

    RealMatrix out(rows, cols);
    const double rscale = rows > 1 ? static_cast<double>(img.rows() - 1) /
                                         static_cast<double>(rows - 1)
                                   : 0.0;
    const double cscale = cols > 1 ? static_cast<double>(img.cols() - 1) /
                                         static_cast<double>(cols - 1)
                                   : 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double sr = static_cast<double>(r) * rscale;
        const auto r0 = static_cast<std::size_t>(sr);
        const std::size_t r1 = std::min(r0 + 1, img.rows() - 1);
        const double fr = sr - static_cast<double>(r0);
        for (std::size_t c = 0; c < cols; ++c) {
            const double sc = static_cast<double>(c) * cscale;
            const auto c0 = static_cast<std::size_t>(sc);
            const std::size_t c1 = std::min(c0 + 1, img.cols() - 1);
            const double fc = sc - static_cast<double>(c0);
            out(r, c) = (1 - fr) * ((1 - fc) * img(r0, c0) + fc * img(r0, c1)) +
                        fr * ((1 - fc) * img(r1, c0) + fc * img(r1, c1));
        }
    }
    return out;
}

} // namespace radact::rangedoppler
