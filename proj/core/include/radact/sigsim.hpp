#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radact/errors.hpp"
#include "radact/matrix.hpp"
#include "radact/states.hpp"
#include "radact/version.hpp"

namespace radact::sigsim {

/// FMCW front-end parameters of the dechirped (stretch-processed) model.
struct RadarConfig {
    double center_frequency_hz = 25e9;
    double bandwidth_hz = 2e9;
    double pri_s = 1e-3;
    std::uint32_t samples_per_pri = 512; // N, fast-time samples = range bins
    std::uint32_t num_pri = 8000;        // M, slow-time extent
    double tx_amplitude = 1.0;

    double chirp_rate() const { return bandwidth_hz / pri_s; }
    double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
    double prf_hz() const { return 1.0 / pri_s; }
    double max_range_m() const { return samples_per_pri * range_resolution_m(); }

    void validate() const;
};

struct TrajectorySample {
    double time_s = 0.0;
    double range_m = 0.0;
    double radial_velocity_mps = 0.0; // dr/dt, positive when receding
    double reflectivity = 1.0;
};

/// Point-scatterer track sampled once per PRI.
struct ScattererTrajectory {
    std::vector<TrajectorySample> samples;

    void validate(const RadarConfig& cfg) const;
};

/// Scenario vocabulary: state holds plus explicit transition actions.
/// Consecutive holds of different states are bridged by the canonical
/// action burst (walk->sit inserts the stop+sit-down merge, etc.).
enum class SegmentKind {
    Walk,
    Stand,
    Sit,
    Lay,
    Stop,
    Start,
    Fall,
    SitDown,
    StandUp,
    StandUpFall,
    Bend,
    Turn,
};

std::string to_string(SegmentKind k);
SegmentKind segment_kind_from_string(const std::string& name);

struct ScenarioSegment {
    SegmentKind kind = SegmentKind::Stand;
    double duration_s = 1.0;
    double speed_mps = 0.0; // translation speed; 0 picks the scenario default
    double scale = 1.0;     // burst amplitude multiplier
};

struct ActionEvent {
    states::ActionClass action;
    double t0 = 0.0;
    double t1 = 0.0;
    bool in_place = false; // burst separable from translation by an energy detector
};

struct BreakpointTruth {
    double t = 0.0;
    bool translation_to_inplace = false;
};

/// Ground truth emitted alongside a compiled scenario: the action sequence,
/// the line-intersection times a range-map tracker should recover, and the
/// in-place burst intervals an energy detector should recover.
struct ScenarioTruth {
    double duration_s = 0.0;
    std::vector<ActionEvent> actions;
    std::vector<BreakpointTruth> breakpoints;
    std::vector<std::pair<double, double>> inplace_events;
    std::vector<std::pair<double, states::MotionState>> state_timeline;

    std::vector<states::ActionClass> action_sequence() const;
};

struct MotionScenario {
    std::vector<ScenarioSegment> segments;
    states::Group direction_group = states::Group::Toward;
    double start_range_m = 8.0;
    double default_speed_mps = 1.1;

    // Texture knobs; zero defaults keep templates exactly piecewise-analytic.
    double sway_amp_m = 0.0;
    double sway_freq_hz = 0.35;
    double stride_freq_hz = 1.8;
    double limb_amp_m = 0.13;
    int num_limbs = 2;
    double limb_reflectivity = 0.38;

    double total_duration_s() const;

    // Checks segment legality against the motion state machine and returns
    // the ground truth. Throws SequenceError naming the violation.
    ScenarioTruth validate() const;
};

/// Dechirped complex baseband matrix: fast time x slow time.
struct ComplexBaseband {
    ComplexMatrix data; // N rows x M columns
    RadarConfig config;
};

std::vector<ScattererTrajectory> gen_trajectory(const MotionScenario& scenario,
                                                const RadarConfig& cfg);

/// Superposition of per-scatterer dechirped returns plus circular complex
/// white noise of the given power. All randomness flows from `seed`.
ComplexBaseband synth_baseband(const std::vector<ScattererTrajectory>& trajectories,
                               const RadarConfig& cfg, double noise_power,
                               std::uint64_t seed = 0);

} // namespace radact::sigsim
