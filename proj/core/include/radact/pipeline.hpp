#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "radact/classify.hpp"
#include "radact/config.hpp"
#include "radact/features.hpp"
#include "radact/rangedoppler.hpp"
#include "radact/segmentation.hpp"
#include "radact/sigsim.hpp"
#include "radact/twoway.hpp"

namespace radact::pipeline {

struct PcaSettings {
    std::size_t image_rows = 128;
    std::size_t image_cols = 64; // 2 s windows at 32 columns per second
    std::size_t d_md = 14;
    std::size_t d_rm = 4;
};

struct KnnSettings {
    std::uint32_t k = 5;
    double test_fraction = 0.30;
};

struct SegmentationSettings {
    double angle_step_deg = 0.5;
    std::size_t max_lines = 6;
    double nms_angle_deg = 5.0;
    double nms_offset_px = 9.0;
    double line_floor_frac = 0.25;
    double db_floor = 40.0;
    bool dump_sinogram = false;
};

struct CorpusSettings {
    states::ClassSet classes; // empty means all toward-group classes
    std::size_t trials = 50;
    double noise_power = 1.0;
    double speed_mps = 1.1;
    double speed_jitter = 0.15;
    double scale_jitter = 0.15;
    double sway_amp_m = 0.004;
};

struct ScenarioSpec {
    std::string name;
    sigsim::MotionScenario scenario;
    double noise_power = 1.0;
};

struct PipelineConfig {
    sigsim::RadarConfig radar;
    rangedoppler::StftConfig stft;
    segmentation::PbcConfig pbc;
    std::size_t swath_bin_lo = 10;
    std::size_t swath_bin_hi = 128;
    PcaSettings pca;
    KnnSettings knn;
    bool fusion_zscore = true;
    SegmentationSettings seg;
    states::TwoWayConfig twoway;
    CorpusSettings corpus;
    std::vector<ScenarioSpec> scenarios;
    std::uint64_t seed = 0;
    int jobs = 0; // 0 picks hardware concurrency

    std::string config_text;
    std::string config_hash_hex;

    static PipelineConfig from_text(const std::string& text);
    static PipelineConfig load(const std::string& path);
    void validate() const;
};

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// ---- window feature extraction --------------------------------------------

/// dB conversion relative to the image max, clamped floor_db below it and
/// shifted so the floor maps to 0. `power` selects 10log10 over 20log10.
RealMatrix db_normalize(const RealMatrix& img, double floor_db, bool power);

RealMatrix md_window_image(const rangedoppler::MicroDopplerImage& md, double t0, double t1,
                           std::size_t rows, std::size_t cols);
RealMatrix rm_window_image(const RealMatrix& magnitudes, double pri_s, double t0, double t1,
                           std::size_t rows, std::size_t cols);

// ---- corpus and training ---------------------------------------------------

struct CorpusSample {
    states::ActionClass label;
    RealMatrix md_img;
    RealMatrix rm_img;
};

/// Seeded synthetic training corpus: one canonical capture per class and
/// trial, with jittered kinematics.
std::vector<CorpusSample> build_corpus(const PipelineConfig& cfg, int jobs);

struct TrainedModel {
    features::PcaBasis md_basis;
    features::PcaBasis rm_basis;
    features::FusionStats stats;
    classify::KnnModel knn;
    states::ClassSet class_set;
    std::vector<double> recall; // holdout recall aligned with class_set
};

struct EvalSummary {
    classify::ConfusionMatrix all_class;
    std::vector<std::pair<std::string, classify::ConfusionMatrix>> restricted;
    double fused_accuracy = 0.0;
    double md_accuracy = 0.0;
    double rm_accuracy = 0.0;
    double fall_miss_restricted = -1.0;
    double fall_miss_all = -1.0;
};

struct TrainResult {
    TrainedModel model;
    EvalSummary eval;
};

TrainResult train_from_corpus(const std::vector<CorpusSample>& corpus,
                              const PipelineConfig& cfg);

features::FeatureVector sample_features(const TrainedModel& model, const RealMatrix& md_img,
                                        const RealMatrix& rm_img);

// ---- stage commands --------------------------------------------------------

void cmd_simulate(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
void cmd_rangemap(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0,
                  bool csv_export = false);
void cmd_spectrogram(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
void cmd_segment(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
TrainResult cmd_train(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
void cmd_classify(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
void cmd_pipeline(const PipelineConfig& cfg, const std::string& out_dir, int jobs = 0);
std::string cmd_report(const std::string& out_dir);

// Minimal structural JSON-schema check (type/required/properties/items).
bool validate_json_schema(const std::string& json_text, const std::string& schema_text,
                          std::string* error = nullptr);

} // namespace radact::pipeline
