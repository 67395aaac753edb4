#include "radact/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "radact/errors.hpp"

namespace radact::segmentation {

void PbcConfig::validate() const {
    if (!(pos_band_lo_hz < pos_band_hi_hz))
        throw ConfigError("pbc: positive band bounds out of order");
    if (!(neg_band_lo_hz < neg_band_hi_hz) || neg_band_hi_hz >= 0.0)
        throw ConfigError("pbc: negative band must lie below zero");
    if (pos_band_lo_hz <= 0.0)
        throw ConfigError("pbc: positive band must lie above zero");
    if (smooth_len < 1) throw ConfigError("pbc: smooth_len must be >= 1");
    if (!(threshold_frac > 0.0 && threshold_frac < 1.0))
        throw ConfigError("pbc: threshold_frac must be in (0, 1)");
}

PreprocessedRangeImage preprocess_rangemap(const rangedoppler::RangeMap& R,
                                           double floor_db) {
    if (R.num_bins() == 0 || R.num_pri() == 0)
        throw ShapeError("preprocess_rangemap: empty range map");

    const std::size_t out_rows = std::min<std::size_t>(128, R.num_bins());
    const std::size_t out_cols = std::min<std::size_t>(384, R.num_pri());
    const std::size_t row_step = R.num_bins() / out_rows;

    // dB of magnitude at uniformly sub-sampled pixels.
    RealMatrix img(out_rows, out_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        const std::size_t src_r = r * R.num_bins() / out_rows;
        for (std::size_t c = 0; c < out_cols; ++c) {
            const std::size_t src_c = c * R.num_pri() / out_cols;
            img(r, c) = 20.0 * std::log10(R.magnitude(src_r, src_c) + 1e-300);
        }
    }

    // 3x3 unit-coefficient smoothing with replicated edges, normalized by
    // the kernel mass so values stay on the per-pixel dB scale.
    RealMatrix smooth(out_rows, out_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const auto rr = static_cast<std::size_t>(std::clamp<long>(
                        static_cast<long>(r) + dr, 0, static_cast<long>(out_rows) - 1));
                    const auto cc = static_cast<std::size_t>(std::clamp<long>(
                        static_cast<long>(c) + dc, 0, static_cast<long>(out_cols) - 1));
                    acc += img(rr, cc);
                }
            }
            smooth(r, c) = acc / 9.0;
        }
    }

    // Normalize to the image max and clamp to the floor; shift so the floor
    // maps to zero.
    const double peak = max_value(smooth);
    PreprocessedRangeImage out;
    out.floor_db = floor_db;
    out.duration_s = R.duration_s();
    out.meters_per_row = R.bin_resolution_m * static_cast<double>(row_step);
    out.data = RealMatrix(out_rows, out_cols);
    for (std::size_t r = 0; r < out_rows; ++r)
        for (std::size_t c = 0; c < out_cols; ++c)
            out.data(r, c) = std::max(smooth(r, c) - peak, -floor_db) + floor_db;
    return out;
}

std::vector<double> default_radon_angles(double step_deg) {
    std::vector<double> angles;
    for (double a = 0.0; a < 180.0; a += step_deg) angles.push_back(a);
    return angles;
}

Sinogram radon(const RealMatrix& img, const std::vector<double>& angles_deg) {
    if (angles_deg.empty()) throw ConfigError("radon: angle list is empty");
    if (img.rows() == 0 || img.cols() == 0) throw ShapeError("radon: empty image");

    const double cx = (static_cast<double>(img.cols()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.rows()) - 1.0) / 2.0;
    const auto r0 = static_cast<long>(
        std::ceil(std::hypot(static_cast<double>(img.cols()),
                             static_cast<double>(img.rows())) / 2.0));
    const std::size_t n_off = static_cast<std::size_t>(2 * r0 + 1);

    Sinogram sino;
    sino.angles_deg = angles_deg;
    sino.offsets_px.resize(n_off);
    for (std::size_t i = 0; i < n_off; ++i)
        sino.offsets_px[i] = static_cast<double>(static_cast<long>(i) - r0);
    sino.data = RealMatrix(angles_deg.size(), n_off, 0.0);

    // Pixel-driven accumulation: each pixel splats its value linearly onto
    // the two nearest offset bins of every angle. Linear in the image and
    // equivalent to unit-width strip integrals.
    for (std::size_t a = 0; a < angles_deg.size(); ++a) {
        const double rad = angles_deg[a] * M_PI / 180.0;
        const double cth = std::cos(rad);
        const double sth = std::sin(rad);
        double* row = sino.data.row(a);
        for (std::size_t y = 0; y < img.rows(); ++y) {
            const double yc = (static_cast<double>(y) - cy) * sth;
            const double* irow = img.row(y);
            for (std::size_t x = 0; x < img.cols(); ++x) {
                const double v = irow[x];
                if (v == 0.0) continue;
                const double rho = (static_cast<double>(x) - cx) * cth + yc +
                                   static_cast<double>(r0);
                const auto i0 = static_cast<std::size_t>(rho);
                const double w1 = rho - static_cast<double>(i0);
                row[i0] += v * (1.0 - w1);
                if (i0 + 1 < n_off) row[i0 + 1] += v * w1;
            }
        }
    }
    return sino;
}

Sinogram radon(const PreprocessedRangeImage& img, const std::vector<double>& angles_deg) {
    return radon(img.data, angles_deg);
}

namespace {

double wrapped_angle_dist(double a, double b) {
    double d = std::abs(a - b);
    while (d >= 180.0) d -= 180.0;
    return std::min(d, 180.0 - d);
}

} // namespace

std::vector<LineParam> detect_lines(const Sinogram& sino, std::size_t max_lines,
                                    double nms_angle_deg, double nms_offset_px,
                                    double floor_frac) {
    if (max_lines < 1) throw ConfigError("detect_lines: max_lines must be >= 1");
    std::vector<LineParam> out;
    const std::size_t na = sino.data.rows();
    const std::size_t no = sino.data.cols();
    if (na == 0 || no == 0) return out;

    double global_max = 0.0;
    for (double v : sino.data) global_max = std::max(global_max, v);
    if (global_max <= 0.0) return out;
    const double floor = floor_frac * global_max;

    std::vector<char> suppressed(na * no, 0);
    for (std::size_t pick = 0; pick < max_lines; ++pick) {
        double best = 0.0;
        std::size_t ba = 0, bo = 0;
        bool found = false;
        for (std::size_t a = 0; a < na; ++a) {
            for (std::size_t o = 0; o < no; ++o) {
                if (suppressed[a * no + o]) continue;
                const double v = sino.data(a, o);
                if (v > best) {
                    best = v;
                    ba = a;
                    bo = o;
                    found = true;
                }
            }
        }
        if (!found || best < floor) break;
        out.push_back({sino.angles_deg[ba], sino.offsets_px[bo], best});

        for (std::size_t a = 0; a < na; ++a) {
            const double da = wrapped_angle_dist(sino.angles_deg[a], sino.angles_deg[ba]);
            if (da > nms_angle_deg) continue;
            // Crossing the 0/180 wrap mirrors the offset sign.
            const bool wrapped = std::abs(sino.angles_deg[a] - sino.angles_deg[ba]) > 90.0;
            const double target = wrapped ? -sino.offsets_px[bo] : sino.offsets_px[bo];
            for (std::size_t o = 0; o < no; ++o) {
                if (std::abs(sino.offsets_px[o] - target) <= nms_offset_px)
                    suppressed[a * no + o] = 1;
            }
        }
    }
    return out;
}

namespace {

double bilinear_at(const RealMatrix& img, double y, double x) {
    if (x < 0 || y < 0 || x > static_cast<double>(img.cols() - 1) ||
        y > static_cast<double>(img.rows() - 1))
        return 0.0;
    const auto x0 = static_cast<std::size_t>(x);
    const auto y0 = static_cast<std::size_t>(y);
    const std::size_t x1 = std::min(x0 + 1, img.cols() - 1);
    const std::size_t y1 = std::min(y0 + 1, img.rows() - 1);
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    return (1 - fy) * ((1 - fx) * img(y0, x0) + fx * img(y0, x1)) +
           fy * ((1 - fx) * img(y1, x0) + fx * img(y1, x1));
}

// Row of the line at column x, or NaN for near-vertical lines.
double line_row_at(const RealMatrix& img, const LineParam& line, double x) {
    const double rad = line.angle_deg * M_PI / 180.0;
    const double sth = std::sin(rad);
    if (std::abs(sth) < 0.5) return std::nan("");
    const double cx = (static_cast<double>(img.cols()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.rows()) - 1.0) / 2.0;
    return cy + (line.offset_px - (x - cx) * std::cos(rad)) / sth;
}

} // namespace

SupportRun line_support_run(const RealMatrix& img, const LineParam& line,
                            double bright_frac, int max_gap_px, double reference) {
    SupportRun best;
    const long cols = static_cast<long>(img.cols());
    std::vector<double> profile(img.cols(), 0.0);
    double peak = 0.0; // replaced by the caller's reference when given
    for (long x = 0; x < cols; ++x) {
        const double y = line_row_at(img, line, static_cast<double>(x));
        if (std::isnan(y)) return best;
        profile[static_cast<std::size_t>(x)] = bilinear_at(img, y, static_cast<double>(x));
        peak = std::max(peak, profile[static_cast<std::size_t>(x)]);
    }
    if (reference > 0.0) peak = reference;
    if (peak <= 0.0) return best;
    const double threshold = bright_frac * peak;

    SupportRun current;
    current.x1 = -1;
    long gap = 0;
    double mass = 0.0;
    for (long x = 0; x < cols; ++x) {
        if (profile[static_cast<std::size_t>(x)] >= threshold) {
            if (!current.valid()) {
                current.x0 = x;
                mass = 0.0;
            }
            current.x1 = x;
            mass += profile[static_cast<std::size_t>(x)];
            gap = 0;
        } else if (current.valid()) {
            if (++gap > max_gap_px) {
                current.mean_intensity = mass / static_cast<double>(current.length());
                if (current.length() > best.length()) best = current;
                current = SupportRun{};
                current.x1 = -1;
            }
        }
    }
    if (current.valid()) {
        current.mean_intensity = mass / static_cast<double>(current.length());
        if (current.length() > best.length()) best = current;
    }
    return best;
}

std::vector<LineParam> filter_lines(const RealMatrix& img, std::vector<LineParam> lines,
                                    long min_run_px, double mask_halfwidth_px) {
    std::stable_sort(lines.begin(), lines.end(), [](const LineParam& a, const LineParam& b) {
        return a.score > b.score;
    });

    // Greedy explain-away: commit the strongest line, erase its band, and
    // require every later candidate to be supported by what is left. Shadow
    // peaks that merely graze committed lines lose their support.
    RealMatrix masked = img;
    const double reference = max_value(img);
    std::vector<LineParam> out;
    for (const LineParam& l : lines) {
        const SupportRun run = line_support_run(masked, l, 0.6, 4, reference);
        if (run.length() < min_run_px) continue;
        out.push_back(l);
        for (long x = 0; x < static_cast<long>(masked.cols()); ++x) {
            const double y = line_row_at(masked, l, static_cast<double>(x));
            if (std::isnan(y)) break;
            const long lo = static_cast<long>(std::floor(y - mask_halfwidth_px));
            const long hi = static_cast<long>(std::ceil(y + mask_halfwidth_px));
            for (long r = lo; r <= hi; ++r) {
                if (r < 0 || r >= static_cast<long>(masked.rows())) continue;
                masked(static_cast<std::size_t>(r), static_cast<std::size_t>(x)) = 0.0;
            }
        }
    }
    return out;
}

namespace {

struct TrackedPoint {
    double x, y, w;
};

struct LineFit {
    double slope = 0.0, xm = 0.0, ym = 0.0;
    bool ok = false;
};

LineFit weighted_fit(const std::vector<TrackedPoint>& pts) {
    LineFit fit;
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        sw += p.w;
        sx += p.w * p.x;
        sy += p.w * p.y;
        sxx += p.w * p.x * p.x;
        sxy += p.w * p.x * p.y;
    }
    if (sw <= 0.0) return fit;
    const double denom = sw * sxx - sx * sx;
    if (std::abs(denom) < 1e-9) return fit;
    fit.slope = (sw * sxy - sx * sy) / denom;
    fit.xm = sx / sw;
    fit.ym = sy / sw;
    fit.ok = true;
    return fit;
}

} // namespace

LineParam refine_line(const RealMatrix& img, const LineParam& coarse,
                      double track_halfwidth_px) {
    SupportRun run = line_support_run(img, coarse);
    if (!run.valid() || run.length() < 8) return coarse;

    // Run ends carry the transition ramps and the neighbouring segment's
    // glow around intersections; fit the interior only.
    const long shrink = std::max<long>(4, run.length() / 12);
    if (run.length() > 2 * shrink + 12) {
        run.x0 += shrink;
        run.x1 -= shrink;
    }

    // Intensity centroids around the predicted row, column by column.
    auto track = [&](const LineParam& guide) {
        std::vector<TrackedPoint> pts;
        for (long x = run.x0; x <= run.x1; ++x) {
            const double y_pred = line_row_at(img, guide, static_cast<double>(x));
            if (std::isnan(y_pred)) return pts;
            double w = 0.0, wy = 0.0;
            for (double dy = -track_halfwidth_px; dy <= track_halfwidth_px; dy += 0.5) {
                const double v = bilinear_at(img, y_pred + dy, static_cast<double>(x));
                w += v;
                wy += v * (y_pred + dy);
            }
            if (w > 0.0) pts.push_back({static_cast<double>(x), wy / w, w});
        }
        return pts;
    };

    auto as_line = [&](const LineFit& fit) {
        LineParam out = coarse;
        out.angle_deg = 90.0 + std::atan(fit.slope) * 180.0 / M_PI;
        const double rad = out.angle_deg * M_PI / 180.0;
        const double cx = (static_cast<double>(img.cols()) - 1.0) / 2.0;
        const double cy = (static_cast<double>(img.rows()) - 1.0) / 2.0;
        out.offset_px = (fit.xm - cx) * std::cos(rad) + (fit.ym - cy) * std::sin(rad);
        return out;
    };

    std::vector<TrackedPoint> pts = track(coarse);
    LineFit fit = weighted_fit(pts);
    if (!fit.ok) return coarse;

    // Re-track around the first fit, then iteratively trim columns that the
    // neighbouring segment or entry/exit ramps pull off the line.
    pts = track(as_line(fit));
    fit = weighted_fit(pts);
    if (!fit.ok) return coarse;
    for (double tol : {1.2, 0.8, 0.6}) {
        std::vector<TrackedPoint> trimmed;
        for (const auto& p : pts) {
            const double resid = p.y - (fit.ym + fit.slope * (p.x - fit.xm));
            if (std::abs(resid) <= tol) trimmed.push_back(p);
        }
        if (trimmed.size() < 8) break;
        const LineFit refit = weighted_fit(trimmed);
        if (!refit.ok) break;
        fit = refit;
        pts = std::move(trimmed);
    }
    return as_line(fit);
}

double line_support(const RealMatrix& img, const LineParam& line, double c0, double c1) {
    const double cx = (static_cast<double>(img.cols()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.rows()) - 1.0) / 2.0;
    const double rad = line.angle_deg * M_PI / 180.0;
    const double sth = std::sin(rad);
    const double cth = std::cos(rad);
    if (std::abs(sth) < 1e-6) return 0.0; // vertical line: no column extent

    double acc = 0.0;
    std::size_t count = 0;
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(c0)));
    const auto hi = static_cast<std::size_t>(
        std::min(static_cast<double>(img.cols()), std::ceil(c1)));
    for (std::size_t x = lo; x < hi; ++x) {
        const double y = cy + (line.offset_px - (static_cast<double>(x) - cx) * cth) / sth;
        const long yi = std::lround(y);
        ++count;
        if (yi < 0 || yi >= static_cast<long>(img.rows())) continue;
        acc += img(static_cast<std::size_t>(yi), static_cast<std::size_t>(x));
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

std::vector<Breakpoint> find_breakpoints(const std::vector<LineParam>& lines,
                                         const PreprocessedRangeImage& img) {
    std::vector<Breakpoint> out;
    if (lines.size() < 2) return out;

    const double cx = (static_cast<double>(img.data.cols()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(img.data.rows()) - 1.0) / 2.0;
    const double cols = static_cast<double>(img.data.cols());

    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const LineParam& a = lines[i];
            const LineParam& b = lines[j];
            // Breakpoints live where a sloped line meets a horizontal one.
            if (a.horizontal() == b.horizontal()) continue;
            const double ra = a.angle_deg * M_PI / 180.0;
            const double rb = b.angle_deg * M_PI / 180.0;
            const double det = std::cos(ra) * std::sin(rb) - std::sin(ra) * std::cos(rb);
            if (std::abs(det) < 1e-9) continue;
            const double x =
                (a.offset_px * std::sin(rb) - b.offset_px * std::sin(ra)) / det + cx;
            const double y =
                (std::cos(ra) * b.offset_px - std::cos(rb) * a.offset_px) / det + cy;
            if (x < 0.0 || x >= cols || y < -2.0 ||
                y >= static_cast<double>(img.data.rows()) + 2.0)
                continue;

            const LineParam& sloped = a.horizontal() ? b : a;
            const double before = line_support(img.data, sloped, 0.0, x);
            const double after = line_support(img.data, sloped, x, cols);
            Breakpoint bp;
            bp.slow_time_s = img.col_to_time(x);
            bp.kind = before >= after ? Breakpoint::Kind::TranslationToInPlace
                                      : Breakpoint::Kind::InPlaceToTranslation;
            out.push_back(bp);
        }
    }
    std::sort(out.begin(), out.end(), [](const Breakpoint& a, const Breakpoint& b) {
        return a.slow_time_s < b.slow_time_s;
    });
    return out;
}

bool starts_with_translation(const std::vector<LineParam>& lines,
                             const PreprocessedRangeImage& img) {
    const double head = static_cast<double>(img.data.cols()) * 0.15;
    double best_support = -1.0;
    bool sloped = false;
    for (const LineParam& l : lines) {
        const double s = line_support(img.data, l, 0.0, head);
        if (s > best_support) {
            best_support = s;
            sloped = !l.horizontal();
        }
    }
    return sloped;
}

std::vector<double> compute_pbc(const rangedoppler::MicroDopplerImage& md,
                                const PbcConfig& cfg) {
    cfg.validate();
    const auto& axis = md.doppler_axis_hz;
    if (axis.empty()) throw ShapeError("compute_pbc: spectrogram has no rows");
    const double axis_lo = axis.front();
    const double axis_hi = axis.back();
    if (cfg.neg_band_lo_hz < axis_lo || cfg.pos_band_hi_hz > axis_hi)
        throw BandError("pbc bands exceed the Doppler axis of the spectrogram");

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < axis.size(); ++r) {
        const double f = axis[r];
        const bool pos = f >= cfg.pos_band_lo_hz && f <= cfg.pos_band_hi_hz;
        const bool neg = f >= cfg.neg_band_lo_hz && f <= cfg.neg_band_hi_hz;
        if (pos || neg) rows.push_back(r);
    }

    std::vector<double> pc(md.data.cols(), 0.0);
    for (std::size_t n = 0; n < md.data.cols(); ++n) {
        double acc = 0.0;
        for (std::size_t r : rows) {
            const double v = md.data(r, n);
            acc += cfg.square_again ? v * v : v;
        }
        pc[n] = acc;
    }
    return pc;
}

std::vector<double> moving_average(const std::vector<double>& x, int w) {
    if (w <= 1 || x.empty()) return x;
    std::vector<double> out(x.size());
    const int n = static_cast<int>(x.size());
    const int half = w / 2;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i - half + w - 1);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<EventInterval> detect_events(const std::vector<double>& pc,
                                         const PbcConfig& cfg, double frame_rate_hz) {
    cfg.validate();
    if (frame_rate_hz <= 0) throw ConfigError("detect_events: frame rate must be positive");
    if (pc.size() < static_cast<std::size_t>(cfg.smooth_len))
        throw LengthError("detect_events: curve shorter than the smoothing window");

    const std::vector<double> f = moving_average(pc, cfg.smooth_len);
    double lo = f[0], hi = f[0];
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo <= 1e-12 * std::max(std::abs(hi), 1e-300)) return {};

    const double threshold = lo + cfg.threshold_frac * (hi - lo);
    std::vector<EventInterval> out;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i <= f.size(); ++i) {
        const bool above = i < f.size() && f[i] > threshold;
        if (above && !in_run) {
            in_run = true;
            run_start = i;
        } else if (!above && in_run) {
            in_run = false;
            out.push_back({static_cast<double>(run_start) / frame_rate_hz,
                           static_cast<double>(i - 1) / frame_rate_hz});
        }
    }
    return out;
}

} // namespace radact::segmentation
