#include <doctest.h>

#include <cmath>
#include <complex>

#include "radact/rangedoppler.hpp"
#include "radact/rng.hpp"
#include "oracles.hpp"

using namespace radact;
using namespace radact::rangedoppler;
using Complex = std::complex<double>;

namespace {

sigsim::ComplexBaseband make_baseband(std::size_t n, std::size_t m) {
    sigsim::ComplexBaseband bb;
    bb.config.samples_per_pri = static_cast<std::uint32_t>(n);
    bb.config.num_pri = static_cast<std::uint32_t>(m);
    bb.data = ComplexMatrix(n, m, {0.0, 0.0});
    return bb;
}

} // namespace

TEST_CASE("range map of a DC column concentrates in bin zero") {
    auto bb = make_baseband(32, 5);
    bb.data.fill({1.0, 0.0});
    const RangeMap rm = compute_rangemap(bb);
    for (std::size_t m = 0; m < 5; ++m) {
        CHECK(rm.magnitude(0, m) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t p = 1; p < 32; ++p) CHECK(rm.magnitude(p, m) < 1e-12);
    }
}

TEST_CASE("range map matches the direct transform on a pure tone") {
    auto bb = make_baseband(512, 3);
    for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t n = 0; n < 512; ++n) {
            const double a = 2.0 * M_PI * 40.0 * static_cast<double>(n) / 512.0;
            bb.data(n, m) = {std::cos(a), std::sin(a)};
        }
    const RangeMap rm = compute_rangemap(bb);
    CHECK(rm.magnitude(40, 1) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t p = 0; p < 512; ++p)
        if (p != 40) CHECK(rm.magnitude(p, 1) < 1e-9);

    std::vector<Complex> col(512);
    for (std::size_t n = 0; n < 512; ++n) col[n] = bb.data(n, 2);
    const auto want = oracles::naive_dft_norm(col);
    for (std::size_t p = 0; p < 512; ++p)
        CHECK(std::abs(rm.data(p, 2) - want[p]) < 1e-9);
}

TEST_CASE("fft path equals direct summation on random input, any length") {
    Rng rng(20260809);
    for (std::size_t n : {17u, 64u, 100u, 256u}) {
        auto bb = make_baseband(n, 2);
        for (auto& v : bb.data) v = {rng.gaussian(), rng.gaussian()};
        const RangeMap rm = compute_rangemap(bb);
        for (std::size_t m = 0; m < 2; ++m) {
            std::vector<Complex> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = bb.data(i, m);
            const auto want = oracles::naive_dft_norm(col);
            double scale = 0.0;
            for (const auto& w : want) scale = std::max(scale, std::abs(w));
            for (std::size_t p = 0; p < n; ++p)
                CHECK(std::abs(rm.data(p, m) - want[p]) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("per-column energy is preserved through the range transform") {
    Rng rng(7);
    auto bb = make_baseband(256, 4);
    for (auto& v : bb.data) v = {rng.gaussian(), rng.gaussian()};
    const RangeMap rm = compute_rangemap(bb);
    for (std::size_t m = 0; m < 4; ++m) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t p = 0; p < 256; ++p) lhs += std::norm(rm.data(p, m));
        for (std::size_t n = 0; n < 256; ++n) rhs += std::norm(bb.data(n, m));
        rhs /= 256.0;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
    }
}

TEST_CASE("range bin summation is complex and windowed") {
    auto bb = make_baseband(64, 6);
    Rng rng(99);
    for (auto& v : bb.data) v = {rng.gaussian(), rng.gaussian()};
    const RangeMap rm = compute_rangemap(bb);

    // Single-bin window returns that bin's sequence.
    const auto single = sum_range_bins(rm, 13, 13);
    for (std::size_t m = 0; m < 6; ++m)
        CHECK(std::abs(single[m] - rm.data(13, m)) < 1e-15);

    // Direct summation oracle over a wider window.
    const auto v = sum_range_bins(rm, 5, 40);
    for (std::size_t m = 0; m < 6; ++m) {
        Complex want{0.0, 0.0};
        for (std::size_t r = 5; r <= 40; ++r) want += rm.data(r, m);
        CHECK(std::abs(v[m] - want) < 1e-12);
    }

    CHECK_THROWS_AS(sum_range_bins(rm, 10, 5), RangeError);
    CHECK_THROWS_AS(sum_range_bins(rm, 0, 64), RangeError);
}

TEST_CASE("stock swath bins cover 0.75 m to 9.6 m") {
    sigsim::RadarConfig cfg;
    CHECK(10 * cfg.range_resolution_m() == doctest::Approx(0.75));
    CHECK(128 * cfg.range_resolution_m() == doctest::Approx(9.6));
}

TEST_CASE("stft framing: 94 percent overlap and the exact frame count") {
    StftConfig cfg;
    CHECK(cfg.window_len == 128);
    CHECK(cfg.hop == 8);
    CHECK(cfg.overlap() == doctest::Approx(0.9375));
    CHECK(cfg.frame_count(8000) == (8000 - 128) / 8 + 1);
    CHECK(cfg.frame_count(128) == 1);
    CHECK(cfg.frame_count(127) == 0);

    StftConfig bad;
    bad.hop = 256;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("spectrogram of silence is zero") {
    std::vector<Complex> v(400, {0.0, 0.0});
    const auto md = spectrogram(v, StftConfig{}, 1e-3);
    CHECK(md.data.rows() == 128);
    CHECK(md.data.cols() == (400 - 128) / 8 + 1);
    for (double x : md.data) CHECK(x == 0.0);
}

TEST_CASE("a 125 Hz tone rides the +125 Hz row across all frames") {
    StftConfig cfg;
    const double pri = 1e-3;
    std::vector<Complex> v(1000);
    for (std::size_t m = 0; m < v.size(); ++m) {
        const double a = 2.0 * M_PI * 125.0 * static_cast<double>(m) * pri;
        v[m] = {std::cos(a), std::sin(a)};
    }
    const auto md = spectrogram(v, cfg, pri);

    std::size_t row_125 = 0;
    for (std::size_t r = 0; r < md.doppler_axis_hz.size(); ++r)
        if (md.doppler_axis_hz[r] == doctest::Approx(125.0)) row_125 = r;
    CHECK(md.doppler_axis_hz[row_125] == doctest::Approx(125.0));
    CHECK(md.doppler_axis_hz[64] == doctest::Approx(0.0));

    for (std::size_t j = 0; j < md.data.cols(); ++j) {
        std::size_t peak = 0;
        for (std::size_t r = 1; r < md.data.rows(); ++r)
            if (md.data(r, j) > md.data(peak, j)) peak = r;
        CHECK(peak == row_125);
    }
    // Constant over frames.
    for (std::size_t j = 1; j < md.data.cols(); ++j)
        CHECK(md.data(row_125, j) ==
              doctest::Approx(md.data(row_125, 0)).epsilon(1e-9));
}

TEST_CASE("spectrogram equals the frame-by-frame direct evaluation") {
    Rng rng(5150);
    std::vector<Complex> v(420);
    for (auto& x : v) x = {rng.gaussian(), rng.gaussian()};
    StftConfig cfg;
    cfg.window_len = 64;
    cfg.hop = 8;
    const auto md = spectrogram(v, cfg, 1e-3);
    const auto bins =
        oracles::naive_spectrogram_bins(v, hanning(64), 64, 8);

    double scale = 0.0;
    for (double x : bins) scale = std::max(scale, x);
    for (std::size_t r = 0; r < 64; ++r) {
        const std::size_t k = (64 + 32 - r) % 64;
        for (std::size_t j = 0; j < md.data.cols(); ++j)
            CHECK(std::abs(md.data(r, j) - bins(k, j)) <= 1e-6 * scale);
    }
}

TEST_CASE("delaying the input by one hop shifts the spectrogram one frame") {
    Rng rng(31337);
    std::vector<Complex> v(300);
    for (auto& x : v) x = {rng.gaussian(), rng.gaussian()};
    StftConfig cfg;
    cfg.window_len = 32;
    cfg.hop = 4;

    std::vector<Complex> delayed(v.size() + cfg.hop, {0.0, 0.0});
    std::copy(v.begin(), v.end(), delayed.begin() + cfg.hop);

    const auto a = spectrogram(v, cfg, 1e-3);
    const auto b = spectrogram(delayed, cfg, 1e-3);
    for (std::size_t r = 0; r < a.data.rows(); ++r)
        for (std::size_t j = 0; j < a.data.cols(); ++j)
            CHECK(b.data(r, j + 1) == doctest::Approx(a.data(r, j)).epsilon(1e-12));
}

TEST_CASE("short sequences are rejected") {
    std::vector<Complex> v(100);
    CHECK_THROWS_AS(spectrogram(v, StftConfig{}, 1e-3), LengthError);
}

TEST_CASE("resize identity and the linear midpoint") {
    RealMatrix m{{0.0, 0.0}, {2.0, 2.0}};
    const RealMatrix same = resize_image(m, 2, 2);
    CHECK(same(0, 0) == 0.0);
    CHECK(same(1, 1) == 2.0);

    const RealMatrix up = resize_image(m, 3, 2);
    CHECK(up(1, 0) == doctest::Approx(1.0));
    CHECK(up(1, 1) == doctest::Approx(1.0));
    CHECK(up(0, 0) == doctest::Approx(0.0));
    CHECK(up(2, 1) == doctest::Approx(2.0));
}

TEST_CASE("resized columns stay inside the source value range") {
    Rng rng(8);
    RealMatrix img(128, 200);
    for (auto& v : img) v = rng.uniform();
    const RealMatrix out = resize_image(img, 128, 64);

    double lo = 1e300, hi = -1e300;
    for (double v : img) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : out) {
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }

    // Spot-check against independent interpolation at a few pixels.
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{10, 10},
                              {64, 33}, {127, 63}, {0, 0}}) {
        const double sc = static_cast<double>(c) * 199.0 / 63.0;
        const auto c0 = static_cast<std::size_t>(sc);
        const double fc = sc - static_cast<double>(c0);
        const std::size_t c1 = std::min<std::size_t>(c0 + 1, 199);
        const double want = (1 - fc) * img(r, c0) + fc * img(r, c1);
        CHECK(out(r, c) == doctest::Approx(want).epsilon(1e-12));
    }
}
