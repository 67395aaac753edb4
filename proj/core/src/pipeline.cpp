#include "radact/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "radact/errors.hpp"
#include "radact/io.hpp"
#include "radact/rng.hpp"
#include "radact/version.hpp"

namespace radact::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using states::ActionClass;
using states::ActionKind;
using states::ClassSet;
using states::Group;
using states::StateKind;

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

namespace {

sigsim::MotionScenario parse_scenario(const config::Section& sec) {
    sigsim::MotionScenario sc;
    sc.direction_group = states::group_from_string(sec.get_or("group", "toward"));
    sc.start_range_m = sec.get_double("start_range", sc.start_range_m);
    sc.default_speed_mps = sec.get_double("speed", sc.default_speed_mps);
    sc.sway_amp_m = sec.get_double("sway_amp", sc.sway_amp_m);
    sc.stride_freq_hz = sec.get_double("stride_freq", sc.stride_freq_hz);
    sc.limb_amp_m = sec.get_double("limb_amp", sc.limb_amp_m);
    sc.num_limbs = static_cast<int>(sec.get_int("num_limbs", sc.num_limbs));

    for (const std::string& line : sec.get_all("segment")) {
        const auto toks = config::split_ws(line);
        if (toks.size() < 2)
            throw ConfigError("scenario segment needs '<kind> <duration_s>': " + line);
        sigsim::ScenarioSegment seg;
        seg.kind = sigsim::segment_kind_from_string(toks[0]);
        seg.duration_s = std::stod(toks[1]);
        for (std::size_t i = 2; i < toks.size(); ++i) {
            const auto eq = toks[i].find('=');
            if (eq == std::string::npos)
                throw ConfigError("scenario segment option must be key=value: " + toks[i]);
            const std::string key = toks[i].substr(0, eq);
            const double val = std::stod(toks[i].substr(eq + 1));
            if (key == "speed") seg.speed_mps = val;
            else if (key == "scale") seg.scale = val;
            else throw ConfigError("unknown scenario segment option: " + key);
        }
        sc.segments.push_back(seg);
    }
    if (sc.segments.empty())
        throw ConfigError("scenario [" + sec.name + "] has no segment lines");
    return sc;
}

std::string hash_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(io::fnv1a_hash(text)));
    return buf;
}

} // namespace

PipelineConfig PipelineConfig::from_text(const std::string& text) {
    const config::ParsedConfig parsed = config::parse_config_text(text);
    PipelineConfig cfg;
    cfg.config_text = text;
    cfg.config_hash_hex = hash_hex(text);

    const config::Section* pl = parsed.find("pipeline");
    if (!pl || !pl->has("seed"))
        throw ConfigError("config needs a [pipeline] section with a seed");
    cfg.seed = pl->get_u64("seed", 0);
    cfg.jobs = static_cast<int>(pl->get_int("jobs", 0));

    if (const auto* s = parsed.find("radar")) {
        cfg.radar.center_frequency_hz = s->get_double("center_frequency_hz", cfg.radar.center_frequency_hz);
        cfg.radar.bandwidth_hz = s->get_double("bandwidth_hz", cfg.radar.bandwidth_hz);
        cfg.radar.pri_s = s->get_double("pri_s", cfg.radar.pri_s);
        cfg.radar.samples_per_pri = static_cast<std::uint32_t>(
            s->get_int("samples_per_pri", cfg.radar.samples_per_pri));
        cfg.radar.num_pri =
            static_cast<std::uint32_t>(s->get_int("num_pri", cfg.radar.num_pri));
        cfg.radar.tx_amplitude = s->get_double("tx_amplitude", cfg.radar.tx_amplitude);
    }
    if (const auto* s = parsed.find("stft")) {
        cfg.stft.window_len =
            static_cast<std::uint32_t>(s->get_int("window_len", cfg.stft.window_len));
        cfg.stft.hop = static_cast<std::uint32_t>(s->get_int("hop", cfg.stft.hop));
    }
    if (const auto* s = parsed.find("swath")) {
        cfg.swath_bin_lo = static_cast<std::size_t>(s->get_int("bin_lo", 10));
        cfg.swath_bin_hi = static_cast<std::size_t>(s->get_int("bin_hi", 128));
    }
    if (const auto* s = parsed.find("pbc")) {
        if (s->has("pos_band_hz")) {
            const auto t = config::split_ws(s->get("pos_band_hz"));
            if (t.size() != 2) throw ConfigError("pbc pos_band_hz needs two values");
            cfg.pbc.pos_band_lo_hz = std::stod(t[0]);
            cfg.pbc.pos_band_hi_hz = std::stod(t[1]);
        }
        if (s->has("neg_band_hz")) {
            const auto t = config::split_ws(s->get("neg_band_hz"));
            if (t.size() != 2) throw ConfigError("pbc neg_band_hz needs two values");
            cfg.pbc.neg_band_lo_hz = std::stod(t[0]);
            cfg.pbc.neg_band_hi_hz = std::stod(t[1]);
        }
        cfg.pbc.smooth_len = static_cast<int>(s->get_int("smooth_len", cfg.pbc.smooth_len));
        cfg.pbc.threshold_frac = s->get_double("threshold_frac", cfg.pbc.threshold_frac);
        cfg.pbc.square_again = s->get_bool("square_again", cfg.pbc.square_again);
    }
    if (const auto* s = parsed.find("segmentation")) {
        cfg.seg.angle_step_deg = s->get_double("angle_step_deg", cfg.seg.angle_step_deg);
        cfg.seg.max_lines = static_cast<std::size_t>(s->get_int("max_lines", 6));
        cfg.seg.nms_angle_deg = s->get_double("nms_angle_deg", cfg.seg.nms_angle_deg);
        cfg.seg.nms_offset_px = s->get_double("nms_offset_px", cfg.seg.nms_offset_px);
        cfg.seg.line_floor_frac = s->get_double("line_floor_frac", cfg.seg.line_floor_frac);
        cfg.seg.db_floor = s->get_double("db_floor", cfg.seg.db_floor);
        cfg.seg.dump_sinogram = s->get_bool("dump_sinogram", false);
    }
    if (const auto* s = parsed.find("pca")) {
        cfg.pca.image_rows = static_cast<std::size_t>(s->get_int("image_rows", 128));
        cfg.pca.image_cols = static_cast<std::size_t>(s->get_int("image_cols", 64));
        cfg.pca.d_md = static_cast<std::size_t>(s->get_int("d_md", 14));
        cfg.pca.d_rm = static_cast<std::size_t>(s->get_int("d_rm", 4));
    }
    if (const auto* s = parsed.find("knn")) {
        cfg.knn.k = static_cast<std::uint32_t>(s->get_int("k", 5));
        cfg.knn.test_fraction = s->get_double("test_fraction", 0.30);
    }
    if (const auto* s = parsed.find("fusion"))
        cfg.fusion_zscore = s->get_bool("zscore", true);
    if (const auto* s = parsed.find("twoway")) {
        cfg.twoway.pre_breakpoint_s = s->get_double("pre_breakpoint_s", 1.5);
        cfg.twoway.post_breakpoint_s = s->get_double("post_breakpoint_s", 0.5);
        cfg.twoway.reentry_window_s = s->get_double("reentry_window_s", 3.0);
        cfg.twoway.reverse_trigger_share = s->get_double("reverse_trigger_share", 0.5);
    }
    if (const auto* s = parsed.find("corpus")) {
        cfg.corpus.trials = static_cast<std::size_t>(s->get_int("trials", 50));
        cfg.corpus.noise_power = s->get_double("noise_power", 1.0);
        cfg.corpus.speed_mps = s->get_double("speed", 1.1);
        cfg.corpus.speed_jitter = s->get_double("speed_jitter", 0.15);
        cfg.corpus.scale_jitter = s->get_double("scale_jitter", 0.15);
        cfg.corpus.sway_amp_m = s->get_double("sway_amp", 0.004);
        const std::string classes = s->get_or("classes", "all-toward");
        if (classes == "all-toward") {
            cfg.corpus.classes = states::all_actions(Group::Toward);
        } else if (classes == "all") {
            cfg.corpus.classes = states::all_actions();
        } else {
            for (const std::string& name : config::split_ws(classes))
                cfg.corpus.classes.push_back(states::action_from_string(name));
        }
    } else {
        cfg.corpus.classes = states::all_actions(Group::Toward);
    }
    if (cfg.corpus.classes.empty())
        cfg.corpus.classes = states::all_actions(Group::Toward);

    for (const config::Section* sec : parsed.find_prefixed("scenario")) {
        ScenarioSpec spec;
        spec.name = sec->name.substr(std::string("scenario.").size());
        spec.scenario = parse_scenario(*sec);
        spec.noise_power = sec->get_double("noise_power", 1.0);
        cfg.scenarios.push_back(std::move(spec));
    }

    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    return from_text(io::read_text_file(path));
}

void PipelineConfig::validate() const {
    sigsim::RadarConfig r = radar;
    if (r.num_pri == 0) r.num_pri = 1; // zero means derive per scenario
    r.validate();
    stft.validate();
    pbc.validate();
    if (swath_bin_lo > swath_bin_hi)
        throw ConfigError("swath: bin_lo must not exceed bin_hi");
    if (pca.d_md < 1 || pca.d_md > pca.image_cols || pca.d_rm < 1 ||
        pca.d_rm > pca.image_cols)
        throw ConfigError("pca: retained dimensions must be in [1, image_cols]");
    if (knn.k < 1) throw ConfigError("knn: k must be at least 1");
    if (!(knn.test_fraction > 0.0 && knn.test_fraction < 1.0))
        throw ConfigError("knn: test_fraction must be in (0, 1)");
    if (corpus.trials < 2)
        throw ConfigError("corpus: trials must be at least 2 for a holdout split");
    for (const auto& spec : scenarios) spec.scenario.validate();
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min({workers, n, std::size_t{16}});
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// window feature extraction
// ---------------------------------------------------------------------------

RealMatrix db_normalize(const RealMatrix& img, double floor_db, bool power) {
    RealMatrix out(img.rows(), img.cols());
    const double k = power ? 10.0 : 20.0;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data()[i] = k * std::log10(std::abs(img.data()[i]) + 1e-300);
        peak = std::max(peak, out.data()[i]);
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::max(out.data()[i] - peak, -floor_db) + floor_db;
    return out;
}

RealMatrix md_window_image(const rangedoppler::MicroDopplerImage& md, double t0, double t1,
                           std::size_t rows, std::size_t cols) {
    if (md.time_axis_s.empty()) throw ShapeError("md window: empty spectrogram");
    long lo = 0, hi = -1;
    for (std::size_t j = 0; j < md.time_axis_s.size(); ++j) {
        if (md.time_axis_s[j] < t0) lo = static_cast<long>(j) + 1;
        if (md.time_axis_s[j] <= t1) hi = static_cast<long>(j);
    }
    // Guarantee a handful of frames even for clipped windows.
    const long n = static_cast<long>(md.time_axis_s.size());
    while (hi - lo + 1 < 4) {
        if (lo > 0) --lo;
        if (hi < n - 1) ++hi;
        if (lo == 0 && hi == n - 1) break;
    }
    lo = std::clamp<long>(lo, 0, n - 1);
    hi = std::clamp<long>(hi, lo, n - 1);

    RealMatrix window(md.data.rows(), static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t r = 0; r < md.data.rows(); ++r)
        for (long j = lo; j <= hi; ++j)
            window(r, static_cast<std::size_t>(j - lo)) =
                md.data(r, static_cast<std::size_t>(j));
    return rangedoppler::resize_image(db_normalize(window, 40.0, true), rows, cols);
}

RealMatrix rm_window_image(const RealMatrix& magnitudes, double pri_s, double t0, double t1,
                           std::size_t rows, std::size_t cols) {
    if (magnitudes.cols() == 0) throw ShapeError("rm window: empty range map");
    const long n = static_cast<long>(magnitudes.cols());
    long lo = std::clamp<long>(static_cast<long>(std::floor(t0 / pri_s)), 0, n - 1);
    long hi = std::clamp<long>(static_cast<long>(std::ceil(t1 / pri_s)), lo, n - 1);
    while (hi - lo + 1 < 4) {
        if (lo > 0) --lo;
        if (hi < n - 1) ++hi;
        if (lo == 0 && hi == n - 1) break;
    }
    RealMatrix window(magnitudes.rows(), static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t r = 0; r < magnitudes.rows(); ++r)
        for (long c = lo; c <= hi; ++c)
            window(r, static_cast<std::size_t>(c - lo)) =
                magnitudes(r, static_cast<std::size_t>(c));
    return rangedoppler::resize_image(db_normalize(window, 40.0, false), rows, cols);
}

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

namespace {

struct CorpusItem {
    sigsim::MotionScenario scenario;
    enum class Window { MergeBp, ReentryBp, Event, ActionCenter } window;
};

CorpusItem corpus_item(const ActionClass& cls, const CorpusSettings& cs, Rng& rng) {
    const double speed =
        cs.speed_mps * (1.0 + rng.uniform(-cs.speed_jitter, cs.speed_jitter));
    const double scale = 1.0 + rng.uniform(-cs.scale_jitter, cs.scale_jitter);
    auto jitter = [&](double base) { return base * (1.0 + rng.uniform(-0.1, 0.1)); };

    const bool toward = cls.group == Group::Toward;
    const bool translation_class =
        cls.kind == ActionKind::WalkingStop || cls.kind == ActionKind::WalkingBend ||
        cls.kind == ActionKind::WalkingFall || cls.kind == ActionKind::StartWalking ||
        cls.kind == ActionKind::StandingUpWalking;

    CorpusItem item;
    sigsim::MotionScenario& sc = item.scenario;
    sc.direction_group = cls.group;
    sc.default_speed_mps = speed;
    sc.sway_amp_m = cs.sway_amp_m;
    if (translation_class)
        sc.start_range_m = toward ? rng.uniform(7.0, 8.8) : rng.uniform(2.2, 4.0);
    else
        sc.start_range_m = rng.uniform(2.5, 7.5);

    using K = sigsim::SegmentKind;
    auto seg = [&](K kind, double dur, double sp = 0.0) {
        sc.segments.push_back({kind, dur, sp, scale});
    };

    switch (cls.kind) {
        case ActionKind::WalkingStop:
            seg(K::Walk, jitter(2.6), speed);
            seg(K::Stand, 2.2);
            item.window = CorpusItem::Window::MergeBp;
            break;
        case ActionKind::WalkingBend:
            seg(K::Walk, jitter(2.0), speed);
            seg(K::Bend, jitter(1.6));
            seg(K::Walk, 1.6, speed);
            item.window = CorpusItem::Window::ActionCenter;
            break;
        case ActionKind::WalkingFall:
            seg(K::Walk, jitter(2.3), speed);
            seg(K::Lay, 2.6);
            item.window = CorpusItem::Window::MergeBp;
            break;
        case ActionKind::SittingDown:
            seg(K::Stand, jitter(1.2));
            seg(K::Sit, 2.4);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::BendingWhileStanding:
            seg(K::Stand, jitter(1.2));
            seg(K::Bend, jitter(1.4));
            seg(K::Stand, 1.2);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::FallingFromStanding:
            seg(K::Stand, jitter(1.3));
            seg(K::Lay, 2.6);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::StandingFromFalling:
            seg(K::Lay, jitter(1.5));
            seg(K::Stand, 2.4);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::StandingFromSitting:
            seg(K::Sit, jitter(1.3));
            seg(K::Stand, 2.4);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::BendingFromSitting:
            seg(K::Sit, jitter(1.2));
            seg(K::Bend, jitter(1.2));
            seg(K::Sit, 1.2);
            item.window = CorpusItem::Window::Event;
            break;
        case ActionKind::StandingUpWalking:
            seg(K::Sit, jitter(1.4));
            seg(K::Walk, 3.4, speed);
            item.window = CorpusItem::Window::ReentryBp;
            break;
        case ActionKind::StartWalking:
            seg(K::Stand, jitter(1.4));
            seg(K::Walk, 3.4, speed);
            item.window = CorpusItem::Window::ReentryBp;
            break;
    }
    return item;
}

std::pair<double, double> corpus_window_span(const CorpusItem& item,
                                             const sigsim::ScenarioTruth& truth,
                                             const states::TwoWayConfig& tw,
                                             const ActionClass& cls) {
    switch (item.window) {
        case CorpusItem::Window::MergeBp: {
            for (const auto& bp : truth.breakpoints)
                if (bp.translation_to_inplace)
                    return {bp.t - tw.pre_breakpoint_s, bp.t + tw.post_breakpoint_s};
            break;
        }
        case CorpusItem::Window::ReentryBp: {
            for (const auto& bp : truth.breakpoints)
                if (!bp.translation_to_inplace) return {bp.t, bp.t + tw.reentry_window_s};
            break;
        }
        case CorpusItem::Window::Event: {
            if (!truth.inplace_events.empty()) {
                const auto [a, b] = truth.inplace_events.front();
                return {a - 0.25, b + 0.25};
            }
            break;
        }
        case CorpusItem::Window::ActionCenter: {
            for (const auto& ae : truth.actions)
                if (ae.action == cls) {
                    const double mid = 0.5 * (ae.t0 + ae.t1);
                    return {mid - 1.0, mid + 1.0};
                }
            break;
        }
    }
    throw InternalError("corpus scenario produced no capture window for " +
                        states::to_string(cls));
}

struct RecordingView {
    rangedoppler::RangeMap rm;
    RealMatrix mags;
    rangedoppler::MicroDopplerImage md;
};

RecordingView process_baseband(const sigsim::ComplexBaseband& bb, const PipelineConfig& cfg) {
    RecordingView view;
    view.rm = rangedoppler::compute_rangemap(bb);
    view.mags = view.rm.magnitudes();
    const std::size_t hi = std::min<std::size_t>(cfg.swath_bin_hi, view.rm.num_bins() - 1);
    const std::size_t lo = std::min<std::size_t>(cfg.swath_bin_lo, hi);
    const auto v = rangedoppler::sum_range_bins(view.rm, lo, hi);
    view.md = rangedoppler::spectrogram(v, cfg.stft, cfg.radar.pri_s);
    return view;
}

} // namespace

std::vector<CorpusSample> build_corpus(const PipelineConfig& cfg, int jobs) {
    const auto& cs = cfg.corpus;
    const std::size_t total = cs.classes.size() * cs.trials;
    std::vector<CorpusSample> out(total);

    parallel_for(total, jobs ? jobs : cfg.jobs, [&](std::size_t idx) {
        const std::size_t class_idx = idx / cs.trials;
        const std::size_t trial = idx % cs.trials;
        const ActionClass cls = cs.classes[class_idx];
        Rng rng(Rng::derive(cfg.seed, 0xC0 + class_idx * 10007 + trial));

        const CorpusItem item = corpus_item(cls, cs, rng);
        const sigsim::ScenarioTruth truth = item.scenario.validate();

        sigsim::RadarConfig radar = cfg.radar;
        radar.num_pri = static_cast<std::uint32_t>(
            std::llround(truth.duration_s / radar.pri_s));
        const auto trajs = sigsim::gen_trajectory(item.scenario, radar);
        const auto bb = sigsim::synth_baseband(trajs, radar, cs.noise_power, rng.next_u64());
        const RecordingView view = process_baseband(bb, cfg);

        auto [t0, t1] = corpus_window_span(item, truth, cfg.twoway, cls);
        t0 = std::max(0.0, t0);
        t1 = std::min(truth.duration_s, t1);

        CorpusSample sample;
        sample.label = cls;
        sample.md_img = md_window_image(view.md, t0, t1, cfg.pca.image_rows, cfg.pca.image_cols);
        sample.rm_img = rm_window_image(view.mags, radar.pri_s, t0, t1, cfg.pca.image_rows,
                                        cfg.pca.image_cols);
        out[idx] = std::move(sample);
    });
    return out;
}

// ---------------------------------------------------------------------------
// training and evaluation
// ---------------------------------------------------------------------------

namespace {

json cm_json(const classify::ConfusionMatrix& cm) {
    return json::parse(classify::to_json(cm));
}

struct SplitCorpus {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
};

SplitCorpus stratified_split(const std::vector<CorpusSample>& corpus, const ClassSet& classes,
                             double test_fraction, std::uint64_t seed) {
    SplitCorpus split;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (corpus[i].label == classes[c]) idx.push_back(i);
        if (idx.size() < 2)
            throw ConfigError("corpus class " + states::to_string(classes[c]) +
                              " needs at least 2 trials");
        Rng rng(Rng::derive(seed, 0x51u + c));
        rng.shuffle(idx.begin(), idx.end());
        auto n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_test ? split.test_idx : split.train_idx).push_back(idx[i]);
    }
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    return split;
}

ClassSet intersect(const ClassSet& a, const ClassSet& b) {
    ClassSet out;
    for (const auto& x : a)
        if (states::contains(b, x)) out.push_back(x);
    return out;
}

} // namespace

features::FeatureVector sample_features(const TrainedModel& model, const RealMatrix& md_img,
                                        const RealMatrix& rm_img) {
    return features::fuse(features::project(md_img, model.md_basis),
                          features::project(rm_img, model.rm_basis), model.stats);
}

TrainResult train_from_corpus(const std::vector<CorpusSample>& corpus,
                              const PipelineConfig& cfg) {
    if (corpus.empty()) throw ConfigError("training corpus is empty");

    ClassSet classes;
    for (const auto& s : corpus)
        if (!states::contains(classes, s.label)) classes.push_back(s.label);

    const SplitCorpus split =
        stratified_split(corpus, classes, cfg.knn.test_fraction, cfg.seed);

    std::vector<RealMatrix> md_train, rm_train;
    for (std::size_t i : split.train_idx) {
        md_train.push_back(corpus[i].md_img);
        rm_train.push_back(corpus[i].rm_img);
    }

    TrainResult result;
    TrainedModel& model = result.model;
    model.class_set = classes;
    model.md_basis = features::fit_2dpca(md_train, cfg.pca.d_md);
    model.rm_basis = features::fit_2dpca(rm_train, cfg.pca.d_rm);

    // Normalization statistics come from the raw training projections.
    std::vector<std::vector<double>> md_parts, rm_parts;
    for (std::size_t i : split.train_idx) {
        md_parts.push_back(features::vectorize_colmajor(
            features::project(corpus[i].md_img, model.md_basis)));
        rm_parts.push_back(features::vectorize_colmajor(
            features::project(corpus[i].rm_img, model.rm_basis)));
    }
    if (cfg.fusion_zscore)
        model.stats = features::FusionStats::fit(md_parts, rm_parts);

    std::vector<std::pair<features::FeatureVector, ActionClass>> train_samples;
    for (std::size_t i : split.train_idx)
        train_samples.emplace_back(
            sample_features(model, corpus[i].md_img, corpus[i].rm_img), corpus[i].label);
    model.knn = classify::knn_train(train_samples, cfg.knn.k);

    // Modality-only models reuse the same exemplars, block-sliced.
    std::vector<std::pair<std::vector<double>, ActionClass>> md_only, rm_only;
    for (const auto& [fv, label] : train_samples) {
        md_only.emplace_back(fv.md_part, label);
        rm_only.emplace_back(fv.rm_part, label);
    }
    const classify::KnnModel knn_md = classify::knn_train(md_only, cfg.knn.k);
    const classify::KnnModel knn_rm = classify::knn_train(rm_only, cfg.knn.k);

    // Holdout evaluation.
    std::vector<features::FeatureVector> probes;
    std::vector<ActionClass> truths;
    for (std::size_t i : split.test_idx) {
        probes.push_back(sample_features(model, corpus[i].md_img, corpus[i].rm_img));
        truths.push_back(corpus[i].label);
    }

    std::vector<ActionClass> pred_all, pred_md, pred_rm;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        pred_all.push_back(classify::knn_predict(model.knn, probes[i].fused, classes).label);
        pred_md.push_back(classify::knn_predict(knn_md, probes[i].md_part, classes).label);
        pred_rm.push_back(classify::knn_predict(knn_rm, probes[i].rm_part, classes).label);
    }

    EvalSummary& eval = result.eval;
    eval.all_class = classify::confusion_matrix(pred_all, truths, classes);
    eval.fused_accuracy = eval.all_class.accuracy();
    eval.md_accuracy = classify::confusion_matrix(pred_md, truths, classes).accuracy();
    eval.rm_accuracy = classify::confusion_matrix(pred_rm, truths, classes).accuracy();

    model.recall.resize(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c)
        model.recall[c] = eval.all_class.rates(c, c);

    // Restricted class-set evaluations on the same probe features.
    const std::vector<Group> groups = [&] {
        std::vector<Group> g{Group::Toward};
        for (const auto& c : classes)
            if (c.group == Group::Away) {
                g.push_back(Group::Away);
                break;
            }
        return g;
    }();

    for (Group g : groups) {
        const std::string suffix = g == Group::Away ? "_away" : "";
        std::vector<std::pair<std::string, ClassSet>> sets;
        sets.emplace_back("post_walking" + suffix,
                          states::allowed_forward({StateKind::Walking, g}));
        sets.emplace_back("inplace_forward" + suffix,
                          ClassSet{{ActionKind::SittingDown, g},
                                   {ActionKind::BendingWhileStanding, g},
                                   {ActionKind::FallingFromStanding, g},
                                   {ActionKind::StandingFromFalling, g}});
        sets.emplace_back("inplace_reverse" + suffix,
                          ClassSet{{ActionKind::StandingFromSitting, g},
                                   {ActionKind::BendingWhileStanding, g},
                                   {ActionKind::StandingFromFalling, g}});
        sets.emplace_back("walking_reentry" + suffix,
                          ClassSet{{ActionKind::StartWalking, g},
                                   {ActionKind::StandingUpWalking, g}});

        for (auto& [name, wanted] : sets) {
            const ClassSet set = intersect(wanted, classes);
            if (set.size() < 2) continue;
            std::vector<ActionClass> preds, ts;
            for (std::size_t i = 0; i < probes.size(); ++i) {
                if (!states::contains(set, truths[i])) continue;
                preds.push_back(
                    classify::knn_predict(model.knn, probes[i].fused, set).label);
                ts.push_back(truths[i]);
            }
            if (ts.empty()) continue;
            eval.restricted.emplace_back(name, classify::confusion_matrix(preds, ts, set));

            if (name == "post_walking") {
                const ActionClass fall{ActionKind::WalkingFall, Group::Toward};
                for (std::size_t c = 0; c < set.size(); ++c)
                    if (set[c] == fall) eval.fall_miss_restricted =
                        eval.restricted.back().second.miss(c);
                for (std::size_t c = 0; c < classes.size(); ++c)
                    if (classes[c] == fall) eval.fall_miss_all = eval.all_class.miss(c);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// stage commands
// ---------------------------------------------------------------------------

namespace {

fs::path ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory " + p.string());
    return p;
}

std::string join_semicolon(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ';';
        out += parts[i];
    }
    return out;
}

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", t);
    return buf;
}

std::vector<std::string> manifest_files(const std::string& out_dir) {
    const fs::path manifest = fs::path(out_dir) / "baseband" / "manifest.csv";
    if (!fs::exists(manifest)) return {};
    std::vector<std::string> names;
    for (const auto& row : io::read_csv(manifest.string()).rows)
        if (!row.empty()) names.push_back(row[0]);
    return names;
}

std::string stem_of(const std::string& file) {
    return fs::path(file).stem().string();
}

} // namespace

void cmd_simulate(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    const fs::path base = ensure_dir(fs::path(out_dir) / "baseband");

    struct Row {
        std::string file, classes, bps, seed;
    };
    std::vector<Row> rows(cfg.scenarios.size());

    parallel_for(cfg.scenarios.size(), jobs ? jobs : cfg.jobs, [&](std::size_t i) {
        const ScenarioSpec& spec = cfg.scenarios[i];
        const std::uint64_t seed = Rng::derive(cfg.seed, i);
        const sigsim::ScenarioTruth truth = spec.scenario.validate();

        sigsim::RadarConfig radar = cfg.radar;
        radar.num_pri =
            static_cast<std::uint32_t>(std::llround(truth.duration_s / radar.pri_s));
        const auto trajs = sigsim::gen_trajectory(spec.scenario, radar);
        const auto bb = sigsim::synth_baseband(trajs, radar, spec.noise_power, seed);

        const std::string file = spec.name + ".rdcb";
        io::write_baseband(bb, (base / file).string());

        std::vector<std::string> classes, bps;
        for (const auto& a : truth.actions) classes.push_back(states::to_string(a.action));
        for (const auto& b : truth.breakpoints) bps.push_back(format_time(b.t));
        rows[i] = {file, join_semicolon(classes), join_semicolon(bps),
                   std::to_string(seed)};
    });

    io::CsvTable manifest;
    manifest.header = {"file", "classes", "breakpoints_s", "seed"};
    for (const auto& r : rows) manifest.rows.push_back({r.file, r.classes, r.bps, r.seed});
    io::write_csv(manifest, (base / "manifest.csv").string());
}

void cmd_rangemap(const PipelineConfig& cfg, const std::string& out_dir, int jobs,
                  bool csv_export) {
    const auto files = manifest_files(out_dir);
    const fs::path dir = ensure_dir(fs::path(out_dir) / "rangemap");
    parallel_for(files.size(), jobs ? jobs : cfg.jobs, [&](std::size_t i) {
        const fs::path in = fs::path(out_dir) / "baseband" / files[i];
        const auto bb = io::read_baseband(in.string(), cfg.radar);
        const auto rm = rangedoppler::compute_rangemap(bb);
        const RealMatrix mags = rm.magnitudes();
        const std::string stem = stem_of(files[i]);
        io::write_real_matrix(mags, "RDM1", (dir / (stem + ".rdm1")).string());
        if (csv_export) io::write_matrix_csv(mags, (dir / (stem + ".csv")).string());
    });
}

void cmd_spectrogram(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    const auto files = manifest_files(out_dir);
    const fs::path dir = ensure_dir(fs::path(out_dir) / "micro_doppler");
    parallel_for(files.size(), jobs ? jobs : cfg.jobs, [&](std::size_t i) {
        const fs::path in = fs::path(out_dir) / "baseband" / files[i];
        const auto bb = io::read_baseband(in.string(), cfg.radar);
        const RecordingView view = process_baseband(bb, cfg);
        io::write_real_matrix(view.md.data, "RMD1",
                              (dir / (stem_of(files[i]) + ".rmd1")).string());
    });
}

namespace {

rangedoppler::MicroDopplerImage md_from_artifact(const RealMatrix& data,
                                                 const PipelineConfig& cfg) {
    rangedoppler::MicroDopplerImage md;
    md.data = data;
    const std::size_t L = data.rows();
    const double prf = cfg.radar.prf_hz();
    md.doppler_axis_hz.resize(L);
    for (std::size_t r = 0; r < L; ++r)
        md.doppler_axis_hz[r] =
            (static_cast<double>(r) - static_cast<double>(L / 2)) * prf /
            static_cast<double>(L);
    md.time_axis_s.resize(data.cols());
    for (std::size_t j = 0; j < data.cols(); ++j)
        md.time_axis_s[j] = (static_cast<double>(L - 1) / 2.0 +
                             static_cast<double>(j) * cfg.stft.hop) *
                            cfg.radar.pri_s;
    return md;
}

segmentation::PreprocessedRangeImage preprocess_artifact(const RealMatrix& mags,
                                                         const PipelineConfig& cfg) {
    rangedoppler::RangeMap rm;
    rm.bin_resolution_m = cfg.radar.range_resolution_m();
    rm.pri_s = cfg.radar.pri_s;
    rm.data = ComplexMatrix(mags.rows(), mags.cols());
    for (std::size_t i = 0; i < mags.size(); ++i)
        rm.data.data()[i] = {mags.data()[i], 0.0};
    return segmentation::preprocess_rangemap(rm, cfg.seg.db_floor);
}

std::pair<double, double> line_span(const segmentation::PreprocessedRangeImage& img,
                                    const segmentation::LineParam& line) {
    const std::size_t cols = img.data.cols();
    std::vector<double> mass(cols, 0.0);
    double total = 0.0;
    for (std::size_t x = 0; x < cols; ++x) {
        mass[x] = segmentation::line_support(img.data, line, static_cast<double>(x),
                                             static_cast<double>(x + 1));
        total += mass[x];
    }
    if (total <= 0.0) return {0.0, 0.0};
    double cum = 0.0;
    std::size_t lo = 0, hi = cols - 1;
    for (std::size_t x = 0; x < cols; ++x) {
        cum += mass[x];
        if (cum >= 0.02 * total) {
            lo = x;
            break;
        }
    }
    cum = 0.0;
    for (std::size_t x = cols; x-- > 0;) {
        cum += mass[x];
        if (cum >= 0.02 * total) {
            hi = x;
            break;
        }
    }
    return {img.col_to_time(static_cast<double>(lo)),
            img.col_to_time(static_cast<double>(hi))};
}

} // namespace

void cmd_segment(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    const auto files = manifest_files(out_dir);
    const fs::path dir = ensure_dir(fs::path(out_dir) / "segments");
    const auto angles = segmentation::default_radon_angles(cfg.seg.angle_step_deg);

    parallel_for(files.size(), jobs ? jobs : cfg.jobs, [&](std::size_t i) {
        const std::string stem = stem_of(files[i]);
        const RealMatrix mags = io::read_real_matrix(
            "RDM1", (fs::path(out_dir) / "rangemap" / (stem + ".rdm1")).string());
        const auto img = preprocess_artifact(mags, cfg);

        const auto sino = segmentation::radon(img, angles);
        if (cfg.seg.dump_sinogram)
            io::write_real_matrix(sino.data, "RDM1",
                                  (dir / (stem + ".sinogram.rdm1")).string());
        auto lines = segmentation::detect_lines(sino, cfg.seg.max_lines,
                                                cfg.seg.nms_angle_deg, cfg.seg.nms_offset_px,
                                                cfg.seg.line_floor_frac);
        for (auto& l : lines) l = segmentation::refine_line(img.data, l);
        lines = segmentation::filter_lines(img.data, lines);
        const auto breakpoints = segmentation::find_breakpoints(lines, img);

        const RealMatrix md_data = io::read_real_matrix(
            "RMD1", (fs::path(out_dir) / "micro_doppler" / (stem + ".rmd1")).string());
        const auto md = md_from_artifact(md_data, cfg);
        const auto pc = segmentation::compute_pbc(md, cfg.pbc);
        const double frame_rate = cfg.radar.prf_hz() / cfg.stft.hop;
        auto events = segmentation::detect_events(pc, cfg.pbc, frame_rate);
        for (auto& ev : events) {
            ev.onset_s += md.time_axis_s.front();
            ev.offset_s += md.time_axis_s.front();
        }

        io::CsvTable csv;
        csv.header = {"kind", "start_s", "end_s", "angle_deg", "score"};
        for (const auto& l : lines) {
            const auto [a, b] = line_span(img, l);
            csv.rows.push_back({l.horizontal() ? "in-place" : "translation",
                                format_time(a), format_time(b), format_time(l.angle_deg),
                                format_time(l.score)});
        }
        for (const auto& bp : breakpoints) {
            const bool ti = bp.kind == segmentation::Breakpoint::Kind::TranslationToInPlace;
            csv.rows.push_back({ti ? "breakpoint-ti" : "breakpoint-it",
                                format_time(bp.slow_time_s), format_time(bp.slow_time_s),
                                "0", "0"});
        }
        for (const auto& ev : events)
            csv.rows.push_back(
                {"event", format_time(ev.onset_s), format_time(ev.offset_s), "0", "0"});
        io::write_csv(csv, (dir / (stem + ".csv")).string());
    });
}

namespace {

json fusion_stats_json(const TrainedModel& model, bool zscore) {
    json j;
    j["zscore"] = zscore;
    j["md_mean"] = model.stats.md_mean;
    j["md_scale"] = model.stats.md_scale;
    j["rm_mean"] = model.stats.rm_mean;
    j["rm_scale"] = model.stats.rm_scale;
    return j;
}

json eval_json(const TrainResult& result) {
    json j;
    j["classes"] = json::array();
    for (const auto& c : result.model.class_set)
        j["classes"].push_back(states::to_string(c));
    j["recall"] = result.model.recall;
    j["all_class"] = cm_json(result.eval.all_class);
    j["restricted"] = json::object();
    for (const auto& [name, cm] : result.eval.restricted) j["restricted"][name] = cm_json(cm);
    j["modalities"] = {{"fused_accuracy", result.eval.fused_accuracy},
                       {"micro_doppler_accuracy", result.eval.md_accuracy},
                       {"range_map_accuracy", result.eval.rm_accuracy}};
    j["fall_analysis"] = {{"restricted_miss", result.eval.fall_miss_restricted},
                          {"all_class_miss", result.eval.fall_miss_all}};
    return j;
}

} // namespace

TrainResult cmd_train(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    const fs::path dir = ensure_dir(fs::path(out_dir) / "model");
    const auto corpus = build_corpus(cfg, jobs);
    TrainResult result = train_from_corpus(corpus, cfg);

    io::write_pca_basis(result.model.md_basis, (dir / "md.pca2").string());
    io::write_pca_basis(result.model.rm_basis, (dir / "rm.pca2").string());
    classify::save_knn(result.model.knn, (dir / "knn.bin").string());
    io::write_text_file((dir / "fusion.json").string(),
                        fusion_stats_json(result.model, cfg.fusion_zscore).dump(2));
    io::write_text_file((dir / "validation.json").string(), eval_json(result).dump(2));
    return result;
}

namespace {

TrainedModel load_model(const std::string& out_dir) {
    const fs::path dir = fs::path(out_dir) / "model";
    if (!fs::exists(dir / "knn.bin"))
        throw IoError("model artifacts missing under " + dir.string() +
                      " (run the train stage first)");
    TrainedModel model;
    model.md_basis = io::read_pca_basis((dir / "md.pca2").string());
    model.rm_basis = io::read_pca_basis((dir / "rm.pca2").string());
    model.knn = classify::load_knn((dir / "knn.bin").string());
    model.class_set = model.knn.class_set;

    const json fusion = json::parse(io::read_text_file((dir / "fusion.json").string()));
    if (fusion.value("zscore", false)) {
        model.stats.md_mean = fusion["md_mean"].get<std::vector<double>>();
        model.stats.md_scale = fusion["md_scale"].get<std::vector<double>>();
        model.stats.rm_mean = fusion["rm_mean"].get<std::vector<double>>();
        model.stats.rm_scale = fusion["rm_scale"].get<std::vector<double>>();
    }

    const json val = json::parse(io::read_text_file((dir / "validation.json").string()));
    model.recall.assign(model.class_set.size(), 0.0);
    const auto names = val["classes"].get<std::vector<std::string>>();
    const auto recall = val["recall"].get<std::vector<double>>();
    for (std::size_t i = 0; i < names.size() && i < recall.size(); ++i) {
        const ActionClass a = states::action_from_string(names[i]);
        for (std::size_t c = 0; c < model.class_set.size(); ++c)
            if (model.class_set[c] == a) model.recall[c] = recall[i];
    }
    return model;
}

struct ParsedSegments {
    states::SegmentTimeline timeline;
};

ParsedSegments parse_segments_csv(const std::string& path, double duration_s, Group group) {
    ParsedSegments out;
    out.timeline.duration_s = duration_s;
    out.timeline.group = group;

    double earliest_line = std::numeric_limits<double>::infinity();
    bool earliest_is_translation = true;
    for (const auto& row : io::read_csv(path).rows) {
        if (row.size() < 5) continue;
        const std::string& kind = row[0];
        const double a = std::stod(row[1]);
        const double b = std::stod(row[2]);
        if (kind == "translation" || kind == "in-place") {
            if (a < earliest_line) {
                earliest_line = a;
                earliest_is_translation = kind == "translation";
            }
        } else if (kind == "breakpoint-ti" || kind == "breakpoint-it") {
            segmentation::Breakpoint bp;
            bp.slow_time_s = a;
            bp.kind = kind == "breakpoint-ti"
                          ? segmentation::Breakpoint::Kind::TranslationToInPlace
                          : segmentation::Breakpoint::Kind::InPlaceToTranslation;
            out.timeline.breakpoints.push_back(bp);
        } else if (kind == "event") {
            out.timeline.events.push_back({a, b});
        }
    }
    std::sort(out.timeline.breakpoints.begin(), out.timeline.breakpoints.end(),
              [](const auto& x, const auto& y) { return x.slow_time_s < y.slow_time_s; });
    std::sort(out.timeline.events.begin(), out.timeline.events.end(),
              [](const auto& x, const auto& y) { return x.onset_s < y.onset_s; });
    out.timeline.starts_translation = earliest_is_translation;
    return out;
}

json schema_json() {
    return json::parse(R"({
  "type": "object",
  "required": ["tool", "config", "corpus_eval", "recordings"],
  "properties": {
    "tool": {
      "type": "object",
      "required": ["name", "version"],
      "properties": {"name": {"type": "string"}, "version": {"type": "string"}}
    },
    "config": {
      "type": "object",
      "required": ["echo", "hash"],
      "properties": {"echo": {"type": "string"}, "hash": {"type": "string"}}
    },
    "corpus_eval": {
      "type": "object",
      "required": ["classes", "recall", "all_class", "restricted", "modalities", "fall_analysis"],
      "properties": {
        "classes": {"type": "array", "items": {"type": "string"}},
        "recall": {"type": "array", "items": {"type": "number"}},
        "all_class": {"type": "object"},
        "restricted": {"type": "object"},
        "modalities": {"type": "object"},
        "fall_analysis": {"type": "object"}
      }
    },
    "recordings": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "truth_actions", "decided_actions", "timeline"],
        "properties": {
          "name": {"type": "string"},
          "truth_actions": {"type": "array", "items": {"type": "string"}},
          "decided_actions": {"type": "array", "items": {"type": "string"}},
          "timeline": {"type": "object"}
        }
      }
    }
  }
})");
}

} // namespace

void cmd_classify(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    const TrainedModel model = load_model(out_dir);
    const fs::path reports = ensure_dir(fs::path(out_dir) / "reports");
    const auto files = manifest_files(out_dir);

    states::TwoWayConfig tw = cfg.twoway;
    tw.recall_classes = model.class_set;
    tw.recall = model.recall;

    // Truth action sequences from the manifest, keyed by stem.
    std::vector<std::vector<std::string>> truth_actions(files.size());
    {
        const auto manifest =
            io::read_csv((fs::path(out_dir) / "baseband" / "manifest.csv").string());
        for (std::size_t i = 0; i < manifest.rows.size() && i < files.size(); ++i) {
            const std::string& cell = manifest.rows[i].size() > 1 ? manifest.rows[i][1] : "";
            std::string token;
            for (char c : cell) {
                if (c == ';') {
                    if (!token.empty()) truth_actions[i].push_back(token);
                    token.clear();
                } else {
                    token += c;
                }
            }
            if (!token.empty()) truth_actions[i].push_back(token);
        }
    }

    std::vector<json> recording_entries(files.size());
    parallel_for(files.size(), jobs ? jobs : cfg.jobs, [&](std::size_t i) {
        const std::string stem = stem_of(files[i]);
        const RealMatrix mags = io::read_real_matrix(
            "RDM1", (fs::path(out_dir) / "rangemap" / (stem + ".rdm1")).string());
        const RealMatrix md_data = io::read_real_matrix(
            "RMD1", (fs::path(out_dir) / "micro_doppler" / (stem + ".rmd1")).string());
        const auto md = md_from_artifact(md_data, cfg);
        const double duration = static_cast<double>(mags.cols()) * cfg.radar.pri_s;

        Group group = Group::Toward;
        for (const auto& spec : cfg.scenarios)
            if (spec.name == stem) group = spec.scenario.direction_group;

        auto parsed = parse_segments_csv(
            (fs::path(out_dir) / "segments" / (stem + ".csv")).string(), duration, group);
        states::SegmentTimeline& timeline = parsed.timeline;

        states::DecisionFeatures feats;
        for (const auto& bp : timeline.breakpoints) {
            double t0, t1;
            if (bp.kind == segmentation::Breakpoint::Kind::TranslationToInPlace) {
                t0 = bp.slow_time_s - tw.pre_breakpoint_s;
                t1 = bp.slow_time_s + tw.post_breakpoint_s;
            } else {
                t0 = bp.slow_time_s;
                t1 = bp.slow_time_s + tw.reentry_window_s;
            }
            t0 = std::max(0.0, t0);
            t1 = std::min(duration, t1);
            const auto md_img =
                md_window_image(md, t0, t1, cfg.pca.image_rows, cfg.pca.image_cols);
            const auto rm_img = rm_window_image(mags, cfg.radar.pri_s, t0, t1,
                                                cfg.pca.image_rows, cfg.pca.image_cols);
            feats.breakpoint_windows.push_back(sample_features(model, md_img, rm_img).fused);
        }
        for (const auto& ev : timeline.events) {
            const double t0 = std::max(0.0, ev.onset_s - 0.2);
            const double t1 = std::min(duration, ev.offset_s + 0.2);
            const auto md_img =
                md_window_image(md, t0, t1, cfg.pca.image_rows, cfg.pca.image_cols);
            const auto rm_img = rm_window_image(mags, cfg.radar.pri_s, t0, t1,
                                                cfg.pca.image_rows, cfg.pca.image_cols);
            feats.event_windows.push_back(sample_features(model, md_img, rm_img).fused);
        }

        const states::StateTimeline decided =
            states::two_way_decide(timeline, model.knn, model.knn, feats, tw);
        io::write_text_file((reports / (stem + ".timeline.json")).string(),
                            states::to_json(decided, stem));

        json entry;
        entry["name"] = stem;
        entry["truth_actions"] = truth_actions[i];
        entry["decided_actions"] = json::array();
        for (const auto& e : decided.entries)
            if (e.action_in)
                entry["decided_actions"].push_back(states::to_string(*e.action_in));
        entry["match"] = entry["truth_actions"] == entry["decided_actions"];
        entry["breakpoints"] = json::array();
        for (const auto& bp : timeline.breakpoints)
            entry["breakpoints"].push_back(
                {{"t", bp.slow_time_s},
                 {"kind", bp.kind == segmentation::Breakpoint::Kind::TranslationToInPlace
                              ? "translation-to-inplace"
                              : "inplace-to-translation"}});
        entry["events"] = json::array();
        for (const auto& ev : timeline.events)
            entry["events"].push_back({{"onset", ev.onset_s}, {"offset", ev.offset_s}});
        entry["timeline"] = json::parse(states::to_json(decided, stem));
        recording_entries[i] = std::move(entry);
    });

    json report;
    report["tool"] = {{"name", kToolName}, {"version", kVersion}};
    report["config"] = {{"echo", cfg.config_text}, {"hash", cfg.config_hash_hex}};
    report["corpus_eval"] =
        json::parse(io::read_text_file((fs::path(out_dir) / "model" / "validation.json").string()));
    report["recordings"] = json::array();
    for (auto& e : recording_entries) report["recordings"].push_back(std::move(e));

    io::write_text_file((fs::path(out_dir) / "report.json").string(), report.dump(2));
    io::write_text_file((fs::path(out_dir) / "report.schema.json").string(),
                        schema_json().dump(2));
}

void cmd_pipeline(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    ensure_dir(out_dir);
    io::write_text_file((fs::path(out_dir) / "config.echo.cfg").string(), cfg.config_text);

    json timings;
    timings["stages"] = json::array();
    auto timed = [&](const char* name, const std::function<void()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        timings["stages"].push_back({{"name", name}, {"seconds", dt.count()}});
    };

    timed("simulate", [&] { cmd_simulate(cfg, out_dir, jobs); });
    timed("rangemap", [&] { cmd_rangemap(cfg, out_dir, jobs); });
    timed("spectrogram", [&] { cmd_spectrogram(cfg, out_dir, jobs); });
    timed("segment", [&] { cmd_segment(cfg, out_dir, jobs); });
    timed("train", [&] { cmd_train(cfg, out_dir, jobs); });
    timed("classify", [&] { cmd_classify(cfg, out_dir, jobs); });

    // Timings stay out of report.json so reruns are byte-identical.
    io::write_text_file((fs::path(out_dir) / "timings.json").string(), timings.dump(2));
}

bool validate_json_schema(const std::string& json_text, const std::string& schema_text,
                          std::string* error) {
    json doc, schema;
    try {
        doc = json::parse(json_text);
        schema = json::parse(schema_text);
    } catch (const std::exception& e) {
        if (error) *error = e.what();
        return false;
    }

    std::function<bool(const json&, const json&, const std::string&)> check =
        [&](const json& node, const json& sch, const std::string& path) -> bool {
        if (sch.contains("type")) {
            const std::string type = sch["type"].get<std::string>();
            const bool ok = (type == "object" && node.is_object()) ||
                            (type == "array" && node.is_array()) ||
                            (type == "string" && node.is_string()) ||
                            (type == "number" && node.is_number()) ||
                            (type == "integer" && node.is_number_integer()) ||
                            (type == "boolean" && node.is_boolean()) ||
                            (type == "null" && node.is_null());
            if (!ok) {
                if (error) *error = path + ": expected " + type;
                return false;
            }
        }
        if (sch.contains("required")) {
            for (const auto& key : sch["required"]) {
                if (!node.contains(key.get<std::string>())) {
                    if (error) *error = path + ": missing " + key.get<std::string>();
                    return false;
                }
            }
        }
        if (sch.contains("properties") && node.is_object()) {
            for (auto it = sch["properties"].begin(); it != sch["properties"].end(); ++it) {
                if (node.contains(it.key())) {
                    if (!check(node[it.key()], it.value(), path + "/" + it.key()))
                        return false;
                }
            }
        }
        if (sch.contains("items") && node.is_array()) {
            for (std::size_t i = 0; i < node.size(); ++i) {
                if (!check(node[i], sch["items"], path + "[" + std::to_string(i) + "]"))
                    return false;
            }
        }
        return true;
    };
    return check(doc, schema, "");
}

std::string cmd_report(const std::string& out_dir) {
    const fs::path report_path = fs::path(out_dir) / "report.json";
    if (!fs::exists(report_path))
        throw IoError("no report.json under " + out_dir + " (run classify or pipeline)");
    const std::string report_text = io::read_text_file(report_path.string());

    const fs::path schema_path = fs::path(out_dir) / "report.schema.json";
    if (fs::exists(schema_path)) {
        std::string why;
        if (!validate_json_schema(report_text, io::read_text_file(schema_path.string()), &why))
            throw InternalError("report.json does not match its schema: " + why);
    }

    const json report = json::parse(report_text);
    std::ostringstream os;
    os << report["tool"]["name"].get<std::string>() << " "
       << report["tool"]["version"].get<std::string>() << " run report\n";
    os << "config hash: " << report["config"]["hash"].get<std::string>() << "\n\n";

    auto render_cm = [&](const json& cm, const std::string& title) {
        classify::ConfusionMatrix m;
        for (const auto& name : cm["classes"])
            m.class_set.push_back(states::action_from_string(name.get<std::string>()));
        const std::size_t n = m.class_set.size();
        m.counts = Matrix<std::int64_t>(n, n, 0);
        m.rates = RealMatrix(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                m.counts(i, j) = cm["counts"][i][j].get<std::int64_t>();
                m.rates(i, j) = cm["rates"][i][j].get<double>();
            }
        os << classify::render_text(m, title) << "\n";
    };

    const json& eval = report["corpus_eval"];
    render_cm(eval["all_class"], "all-class fusion confusion");
    for (auto it = eval["restricted"].begin(); it != eval["restricted"].end(); ++it)
        render_cm(it.value(), "restricted: " + it.key());

    os << "modalities: fused " << eval["modalities"]["fused_accuracy"].get<double>()
       << ", micro-doppler " << eval["modalities"]["micro_doppler_accuracy"].get<double>()
       << ", range-map " << eval["modalities"]["range_map_accuracy"].get<double>() << "\n";
    os << "fall miss: restricted " << eval["fall_analysis"]["restricted_miss"].get<double>()
       << ", all-class " << eval["fall_analysis"]["all_class_miss"].get<double>() << "\n\n";

    os << "recordings:\n";
    for (const auto& rec : report["recordings"]) {
        os << "  " << rec["name"].get<std::string>() << ": ";
        for (const auto& a : rec["decided_actions"]) os << a.get<std::string>() << " ";
        os << (rec["match"].get<bool>() ? "(matches truth)" : "(differs from truth)") << "\n";
    }

    const std::string text = os.str();
    ensure_dir(fs::path(out_dir) / "reports");
    io::write_text_file((fs::path(out_dir) / "reports" / "tables.txt").string(), text);
    return text;
}

} // namespace radact::pipeline
