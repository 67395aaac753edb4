#include <doctest.h>

#include <cmath>

#include "radact/rng.hpp"
#include "radact/segmentation.hpp"
#include "radact/sigsim.hpp"
#include "oracles.hpp"

using namespace radact;
using namespace radact::segmentation;

namespace {

rangedoppler::RangeMap map_from_mags(const RealMatrix& mags, double pri = 1e-3,
                                     double res = 0.075) {
    rangedoppler::RangeMap rm;
    rm.pri_s = pri;
    rm.bin_resolution_m = res;
    rm.data = ComplexMatrix(mags.rows(), mags.cols());
    for (std::size_t i = 0; i < mags.size(); ++i)
        rm.data.data()[i] = {mags.data()[i], 0.0};
    return rm;
}

// Image with one straight bright line of the given slope (rows per column)
// through (col0, row0).
RealMatrix line_image(std::size_t rows, std::size_t cols, double row0, double col0,
                      double slope, double value = 1.0) {
    RealMatrix img(rows, cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        const double y = row0 + slope * (static_cast<double>(c) - col0);
        const long yi = std::lround(y);
        if (yi >= 0 && yi < static_cast<long>(rows))
            img(static_cast<std::size_t>(yi), c) = value;
    }
    return img;
}

rangedoppler::MicroDopplerImage tone_spectrogram(double freq_hz, double amp,
                                                 std::size_t frames) {
    rangedoppler::MicroDopplerImage md;
    const std::size_t L = 128;
    md.data = RealMatrix(L, frames, 0.0);
    md.doppler_axis_hz.resize(L);
    md.time_axis_s.resize(frames);
    for (std::size_t r = 0; r < L; ++r)
        md.doppler_axis_hz[r] = (static_cast<double>(r) - 64.0) * 1000.0 / 128.0;
    for (std::size_t j = 0; j < frames; ++j) md.time_axis_s[j] = 0.008 * static_cast<double>(j);
    std::size_t row = 0;
    for (std::size_t r = 0; r < L; ++r)
        if (std::abs(md.doppler_axis_hz[r] - freq_hz) <
            std::abs(md.doppler_axis_hz[row] - freq_hz))
            row = r;
    for (std::size_t j = 0; j < frames; ++j) md.data(row, j) = amp;
    return md;
}

} // namespace

TEST_CASE("preprocess keeps a constant map constant and at full headroom") {
    RealMatrix mags(64, 500, 3.5);
    const auto img = preprocess_rangemap(map_from_mags(mags));
    CHECK(img.data.rows() == 64);
    CHECK(img.data.cols() == 384);
    for (double v : img.data) CHECK(v == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("reference dimensions: 256 x 12000 becomes 128 x 384") {
    RealMatrix mags(256, 12000, 1.0);
    const auto img = preprocess_rangemap(map_from_mags(mags));
    CHECK(img.data.rows() == 128);
    CHECK(img.data.cols() == 384);
    CHECK(img.meters_per_row == doctest::Approx(0.075 * 2));
    CHECK(img.duration_s == doctest::Approx(12.0));
}

TEST_CASE("an isolated bright pixel smears into a 3x3 plateau") {
    RealMatrix mags(128, 384, 1.0);
    mags(40, 100) = 1000.0;
    const auto img = preprocess_rangemap(map_from_mags(mags));

    // Direct convolution oracle over the dB image reproduces the plateau.
    RealMatrix db(128, 384);
    for (std::size_t i = 0; i < mags.size(); ++i)
        db.data()[i] = 20.0 * std::log10(mags.data()[i] + 1e-300);
    RealMatrix want_raw = oracles::conv3x3_sum(db);
    for (auto& v : want_raw) v /= 9.0;
    const double peak = max_value(want_raw);
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{40, 100},
                              {39, 99}, {41, 101}, {40, 101}, {44, 100}}) {
        const double want = std::max(want_raw(r, c) - peak, -40.0) + 40.0;
        CHECK(img.data(r, c) == doctest::Approx(want).epsilon(1e-9));
    }
    // All nine neighbours saturate at the same plateau value.
    const double center = img.data(40, 100);
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
            CHECK(img.data(40 + dr, 100 + dc) == doctest::Approx(center).epsilon(1e-9));
    CHECK(img.data(60, 300) < center);
}

TEST_CASE("radon of a zero image is zero") {
    const RealMatrix img(32, 48, 0.0);
    const auto sino = radon(img, default_radon_angles(1.0));
    CHECK(sino.data.rows() == 180);
    for (double v : sino.data) CHECK(v == 0.0);
}

TEST_CASE("a bright horizontal row peaks at 90 degrees at its own offset") {
    // Odd height keeps the row aligned with the integer offset grid.
    RealMatrix img(65, 97, 0.0);
    for (std::size_t c = 0; c < 97; ++c) img(20, c) = 2.0;
    const auto sino = radon(img, default_radon_angles(0.5));

    std::size_t ba = 0, bo = 0;
    for (std::size_t a = 0; a < sino.data.rows(); ++a)
        for (std::size_t o = 0; o < sino.data.cols(); ++o)
            if (sino.data(a, o) > sino.data(ba, bo)) {
                ba = a;
                bo = o;
            }
    CHECK(sino.angles_deg[ba] == doctest::Approx(90.0));
    CHECK(sino.offsets_px[bo] == doctest::Approx(20.0 - 32.0));

    // Independent point-sampled integral agrees on where the mass is.
    const double on = oracles::line_integral(img, 90.0, 20.0 - 32.0);
    const double off = oracles::line_integral(img, 90.0, 5.0);
    CHECK(on > 10.0 * std::max(off, 1e-9));
}

TEST_CASE("uniform image integrals scale with chord length") {
    RealMatrix img(60, 80, 1.0);
    const auto sino = radon(img, {30.0, 90.0, 145.0});
    for (std::size_t a = 0; a < 3; ++a) {
        for (double off : {-10.0, 0.0, 14.0}) {
            std::size_t oi = 0;
            for (std::size_t o = 0; o < sino.offsets_px.size(); ++o)
                if (std::abs(sino.offsets_px[o] - off) < 1e-9) oi = o;
            const double chord =
                oracles::chord_length(80, 60, sino.angles_deg[a], off);
            CHECK(sino.data(a, oi) == doctest::Approx(chord).epsilon(0.06));
        }
    }
}

TEST_CASE("radon is linear in the image") {
    Rng rng(11);
    RealMatrix a(24, 36), b(24, 36);
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    RealMatrix combo(24, 36);
    for (std::size_t i = 0; i < a.size(); ++i)
        combo.data()[i] = 2.5 * a.data()[i] + b.data()[i];

    const auto angles = default_radon_angles(5.0);
    const auto sa = radon(a, angles);
    const auto sb = radon(b, angles);
    const auto sc = radon(combo, angles);
    double scale = max_abs(sc.data);
    for (std::size_t i = 0; i < sc.data.size(); ++i)
        CHECK(std::abs(sc.data.data()[i] - 2.5 * sa.data.data()[i] - sb.data.data()[i]) <=
              1e-9 * scale);
}

TEST_CASE("detect_lines finds a single ridge within a degree and a pixel") {
    const RealMatrix img = line_image(64, 96, 30.0, 47.5, 0.15, 3.0);
    const auto sino = radon(img, default_radon_angles(0.5));
    const auto lines = detect_lines(sino, 3);
    REQUIRE(lines.size() >= 1);

    const double want_angle = 90.0 + std::atan(0.15) * 180.0 / M_PI;
    CHECK(std::abs(lines[0].angle_deg - want_angle) <= 1.0);
    // Offset of the line through (47.5, 30) in centred coordinates.
    const double rad = want_angle * M_PI / 180.0;
    const double want_off = (30.0 - 31.5) * std::sin(rad);
    CHECK(std::abs(lines[0].offset_px - want_off) <= 1.0);

    // Exhaustive argmax oracle agrees with the greedy pick.
    std::size_t ba = 0, bo = 0;
    for (std::size_t a = 0; a < sino.data.rows(); ++a)
        for (std::size_t o = 0; o < sino.data.cols(); ++o)
            if (sino.data(a, o) > sino.data(ba, bo)) {
                ba = a;
                bo = o;
            }
    CHECK(lines[0].angle_deg == doctest::Approx(sino.angles_deg[ba]));
    CHECK(lines[0].offset_px == doctest::Approx(sino.offsets_px[bo]));
}

TEST_CASE("detect_lines returns nothing for an empty sinogram") {
    const RealMatrix img(32, 32, 0.0);
    const auto sino = radon(img, default_radon_angles(2.0));
    CHECK(detect_lines(sino, 4).empty());
}

TEST_CASE("rotating a line rotates the detected angle with it") {
    for (double slope : {0.10, 0.22}) {
        const RealMatrix img = line_image(96, 128, 48.0, 63.5, slope, 2.0);
        const auto lines = detect_lines(radon(img, default_radon_angles(0.5)), 1);
        REQUIRE(!lines.empty());
        const double want = 90.0 + std::atan(slope) * 180.0 / M_PI;
        CHECK(std::abs(lines[0].angle_deg - want) <= 1.0);
    }
}

TEST_CASE("refine_line sharpens the angle estimate below grid resolution") {
    const double slope = 0.137;
    const RealMatrix img = line_image(96, 256, 40.0, 127.5, slope, 2.0);
    const auto coarse = detect_lines(radon(img, default_radon_angles(0.5)), 1);
    REQUIRE(!coarse.empty());
    const auto fine = refine_line(img, coarse[0]);
    const double want = 90.0 + std::atan(slope) * 180.0 / M_PI;
    CHECK(std::abs(fine.angle_deg - want) < 0.15);
}

TEST_CASE("breakpoints come from sloped-by-horizontal intersections") {
    // Horizontal plateau at row 40 after column 192, sloped approach before.
    const std::size_t rows = 128, cols = 384;
    RealMatrix img(rows, cols, 0.0);
    for (std::size_t c = 0; c < 192; ++c) {
        const double y = 40.0 - 0.5 * (static_cast<double>(c) - 192.0);
        const long yi = std::lround(y);
        if (yi >= 0 && yi < static_cast<long>(rows))
            img(static_cast<std::size_t>(yi), c) = 2.0;
    }
    for (std::size_t c = 192; c < cols; ++c) img(40, c) = 2.0;

    PreprocessedRangeImage pre;
    pre.data = img;
    pre.duration_s = 8.0;
    pre.meters_per_row = 0.075;

    const auto lines = detect_lines(radon(img, default_radon_angles(0.5)), 3);
    REQUIRE(lines.size() >= 2);
    const auto bps = find_breakpoints(lines, pre);
    REQUIRE(bps.size() >= 1);
    const double want_t = pre.col_to_time(192.0);
    CHECK(std::abs(bps[0].slow_time_s - want_t) < 0.15);
    CHECK(bps[0].kind == Breakpoint::Kind::TranslationToInPlace);
}

TEST_CASE("parallel horizontal lines produce no breakpoints") {
    PreprocessedRangeImage pre;
    pre.data = RealMatrix(64, 96, 0.0);
    pre.duration_s = 4.0;
    pre.meters_per_row = 0.075;
    std::vector<LineParam> lines = {{90.0, -10.0, 5.0}, {90.0, 12.0, 4.0}};
    CHECK(find_breakpoints(lines, pre).empty());
    CHECK(find_breakpoints({lines[0]}, pre).empty());
}

TEST_CASE("a simulated walk-then-sit scene localizes its breakpoint") {
    sigsim::MotionScenario sc;
    sc.segments = {{sigsim::SegmentKind::Walk, 3.5, 1.0},
                   {sigsim::SegmentKind::Sit, 4.5}};
    sc.start_range_m = 7.5;
    sc.sway_amp_m = 0.004;

    sigsim::RadarConfig radar;
    radar.samples_per_pri = 128;
    const auto truth = sc.validate();
    radar.num_pri = static_cast<std::uint32_t>(std::llround(truth.duration_s / radar.pri_s));

    const auto trajs = sigsim::gen_trajectory(sc, radar);
    const auto bb = sigsim::synth_baseband(trajs, radar, 0.5, 1234);
    const auto rm = rangedoppler::compute_rangemap(bb);
    const auto img = preprocess_rangemap(rm);

    auto lines = detect_lines(radon(img, default_radon_angles(0.5)), 6);
    for (auto& l : lines) l = refine_line(img.data, l);
    lines = filter_lines(img.data, lines);
    REQUIRE(lines.size() == 2);
    bool has_sloped = false, has_horizontal = false;
    for (const auto& l : lines) {
        if (l.horizontal()) has_horizontal = true;
        else has_sloped = true;
    }
    CHECK(has_sloped);
    CHECK(has_horizontal);

    const auto bps = find_breakpoints(lines, img);
    REQUIRE(bps.size() == 1);
    REQUIRE(!truth.breakpoints.empty());
    CHECK(std::abs(bps[0].slow_time_s - truth.breakpoints[0].t) <= 0.25);
}

TEST_CASE("pbc of a silent spectrogram is identically zero") {
    const auto md = tone_spectrogram(100.0, 0.0, 50);
    const auto pc = compute_pbc(md, PbcConfig{});
    CHECK(pc.size() == 50);
    for (double v : pc) CHECK(v == 0.0);
}

TEST_CASE("energy inside +-10 Hz stays outside the burst bands") {
    auto md = tone_spectrogram(0.0, 0.0, 40);
    for (std::size_t r = 0; r < md.doppler_axis_hz.size(); ++r)
        if (std::abs(md.doppler_axis_hz[r]) <= 10.0)
            for (std::size_t j = 0; j < md.data.cols(); ++j) md.data(r, j) = 5.0;
    const auto pc = compute_pbc(md, PbcConfig{});
    for (double v : pc) CHECK(v == 0.0);
}

TEST_CASE("a +100 Hz tone contributes its band sum") {
    const auto md = tone_spectrogram(100.0, 2.5, 32);
    const auto pc = compute_pbc(md, PbcConfig{});

    // Direct double-sum oracle over the band rows.
    const PbcConfig cfg;
    for (std::size_t j = 0; j < md.data.cols(); ++j) {
        double want = 0.0;
        for (std::size_t r = 0; r < md.data.rows(); ++r) {
            const double f = md.doppler_axis_hz[r];
            const bool in_pos = f >= cfg.pos_band_lo_hz && f <= cfg.pos_band_hi_hz;
            const bool in_neg = f >= cfg.neg_band_lo_hz && f <= cfg.neg_band_hi_hz;
            if (in_pos || in_neg) want += md.data(r, j);
        }
        CHECK(pc[j] == doctest::Approx(want));
        CHECK(pc[j] == doctest::Approx(2.5));
    }
}

TEST_CASE("bands beyond the axis raise BandError") {
    rangedoppler::MicroDopplerImage md = tone_spectrogram(50.0, 1.0, 16);
    for (auto& f : md.doppler_axis_hz) f *= 0.25; // axis now +-125 Hz
    CHECK_THROWS_AS(compute_pbc(md, PbcConfig{}), BandError);
}

TEST_CASE("threshold formula: 3 percent over the minima") {
    // Smoothed extremes 2 and 102 put the threshold at exactly 5.
    std::vector<double> pc(200, 2.0);
    for (std::size_t i = 80; i < 120; ++i) pc[i] = 102.0;
    const auto f = moving_average(pc, 5);
    double lo = f[0], hi = f[0];
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo + 0.03 * (hi - lo) == doctest::Approx(5.0));

    const auto events = detect_events(pc, PbcConfig{}, 125.0);
    REQUIRE(events.size() == 1);
}

TEST_CASE("rectangular pulses are localized within the smoothing extent") {
    std::vector<double> pc(400, 0.0);
    for (std::size_t i = 100; i <= 200; ++i) pc[i] = 10.0;
    const PbcConfig cfg;
    const auto events = detect_events(pc, cfg, 1.0); // 1 frame per second
    REQUIRE(events.size() == 1);
    CHECK(std::abs(events[0].onset_s - 100.0) <= cfg.smooth_len);
    CHECK(std::abs(events[0].offset_s - 200.0) <= cfg.smooth_len);

    // Exhaustive threshold-crossing oracle on the smoothed curve.
    const auto f = moving_average(pc, cfg.smooth_len);
    double lo = f[0], hi = f[0];
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double thr = lo + cfg.threshold_frac * (hi - lo);
    std::size_t first = 0, last = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > thr) {
            if (!first) first = i;
            last = i;
        }
    CHECK(events[0].onset_s == doctest::Approx(static_cast<double>(first)));
    CHECK(events[0].offset_s == doctest::Approx(static_cast<double>(last)));
}

TEST_CASE("flat curves yield no events") {
    std::vector<double> pc(100, 7.25);
    CHECK(detect_events(pc, PbcConfig{}, 125.0).empty());
}

TEST_CASE("event detection is invariant to positive affine scaling") {
    Rng rng(77);
    std::vector<double> pc(300);
    for (std::size_t i = 0; i < pc.size(); ++i) {
        pc[i] = 0.2 * rng.uniform();
        if (i > 120 && i < 190)
            pc[i] += 8.0 * std::sin(M_PI * static_cast<double>(i - 120) / 70.0);
    }
    std::vector<double> scaled(pc.size());
    for (std::size_t i = 0; i < pc.size(); ++i) scaled[i] = 3.7 * pc[i] + 11.0;

    const auto a = detect_events(pc, PbcConfig{}, 125.0);
    const auto b = detect_events(scaled, PbcConfig{}, 125.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].onset_s == doctest::Approx(b[i].onset_s));
        CHECK(a[i].offset_s == doctest::Approx(b[i].offset_s));
    }
}
