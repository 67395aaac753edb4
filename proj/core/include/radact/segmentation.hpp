#pragma once

#include <cstdint>
#include <vector>

#include "radact/matrix.hpp"
#include "radact/rangedoppler.hpp"

namespace radact::segmentation {

/// dB-magnitude range image, sub-sampled, smoothed and floor-clamped.
/// Values are shifted so the floor sits at exactly 0 (empty regions then
/// contribute nothing to Radon line integrals).
struct PreprocessedRangeImage {
    RealMatrix data;             // target 128 rows x 384 columns
    double floor_db = 40.0;      // dynamic range kept below the image max
    double duration_s = 0.0;     // slow-time extent of the source map
    double meters_per_row = 0.0; // range scale after row sub-sampling

    double col_to_time(double col) const {
        return (col + 0.5) * duration_s / static_cast<double>(data.cols());
    }
};

struct LineParam {
    double angle_deg = 0.0;  // [0, 180); 90 is a horizontal image line
    double offset_px = 0.0;  // signed distance from the image centre
    double score = 0.0;      // Radon peak magnitude

    bool horizontal(double tol_deg = 3.0) const {
        return std::abs(angle_deg - 90.0) < tol_deg;
    }
};

struct Sinogram {
    RealMatrix data;                 // rows = angles, cols = offsets
    std::vector<double> angles_deg;
    std::vector<double> offsets_px;  // integer grid, centred on 0
};

struct Breakpoint {
    enum class Kind { TranslationToInPlace, InPlaceToTranslation };
    double slow_time_s = 0.0;
    Kind kind = Kind::TranslationToInPlace;
};

struct PbcConfig {
    double pos_band_lo_hz = 20.0;    // K_P1
    double pos_band_hi_hz = 270.0;   // K_P2
    double neg_band_lo_hz = -270.0;  // K_N1
    double neg_band_hi_hz = -20.0;   // K_N2
    int smooth_len = 5;              // moving-average extent w
    double threshold_frac = 0.03;    // fraction over the minima
    bool square_again = false;       // square spectrogram values once more

    void validate() const;
};

struct EventInterval {
    double onset_s = 0.0;
    double offset_s = 0.0;
};

/// dB conversion, uniform sub-sampling to <=128 rows x 384 columns, 3x3
/// unit-coefficient smoothing (replicated edges), max-normalization and
/// floor clamping.
PreprocessedRangeImage preprocess_rangemap(const rangedoppler::RangeMap& R,
                                           double floor_db = 40.0);

std::vector<double> default_radon_angles(double step_deg = 0.5);

/// Line-integral transform over the given angle list. A line is
/// (x-cx)cos(a) + (y-cy)sin(a) = offset in pixel coordinates.
Sinogram radon(const RealMatrix& img, const std::vector<double>& angles_deg);
Sinogram radon(const PreprocessedRangeImage& img, const std::vector<double>& angles_deg);

/// Greedy peak picking with non-maximum suppression; up to max_lines peaks
/// sorted by score. Peaks below floor_frac of the global max are ignored.
std::vector<LineParam> detect_lines(const Sinogram& sino, std::size_t max_lines,
                                    double nms_angle_deg = 5.0, double nms_offset_px = 9.0,
                                    double floor_frac = 0.25);

/// Contiguous bright stretch of the image along a line, in columns.
struct SupportRun {
    long x0 = 0;
    long x1 = -1;
    double mean_intensity = 0.0;

    bool valid() const { return x1 >= x0; }
    long length() const { return valid() ? x1 - x0 + 1 : 0; }
};

/// Longest run of columns where the image stays bright along the line
/// (small gaps tolerated). Shadow peaks that only graze a genuine line
/// near an intersection have short runs.
SupportRun line_support_run(const RealMatrix& img, const LineParam& line,
                            double bright_frac = 0.6, int max_gap_px = 4,
                            double reference = -1.0);

/// Greedy explain-away validation: strongest line first, its band erased,
/// later candidates must hold a long support run on the residual image.
std::vector<LineParam> filter_lines(const RealMatrix& img, std::vector<LineParam> lines,
                                    long min_run_px = 48, double mask_halfwidth_px = 5.0);

/// Sharpens a coarse peak by tracking the intensity centroid column by
/// column over the line's support and refitting slope and offset by
/// weighted least squares; survey-grid quantization is far too coarse for
/// slope estimates.
LineParam refine_line(const RealMatrix& img, const LineParam& coarse,
                      double track_halfwidth_px = 4.0);

/// Pairwise sloped-by-horizontal intersections mapped to slow time.
/// Ordering (translation first or last) is decided from where each line
/// has its image support.
std::vector<Breakpoint> find_breakpoints(const std::vector<LineParam>& lines,
                                         const PreprocessedRangeImage& img);

/// Mean image intensity along a line restricted to columns [c0, c1).
double line_support(const RealMatrix& img, const LineParam& line, double c0, double c1);

/// True when the earliest part of the image is explained best by a sloped
/// (translation) line.
bool starts_with_translation(const std::vector<LineParam>& lines,
                             const PreprocessedRangeImage& img);

/// Band-limited spectrogram energy per frame (positive plus negative band).
std::vector<double> compute_pbc(const rangedoppler::MicroDopplerImage& md,
                                const PbcConfig& cfg);

std::vector<double> moving_average(const std::vector<double>& x, int w);

/// Threshold at min + frac*(max-min) of the smoothed curve; maximal runs
/// above the threshold become events. Times are frame_index / frame_rate.
std::vector<EventInterval> detect_events(const std::vector<double>& pc,
                                         const PbcConfig& cfg, double frame_rate_hz);

} // namespace radact::segmentation
