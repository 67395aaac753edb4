#include "radact/sigsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "radact/rng.hpp"

namespace radact::sigsim {

using states::ActionClass;
using states::ActionKind;
using states::Group;
using states::MotionState;
using states::StateKind;

void RadarConfig::validate() const {
    if (center_frequency_hz <= 0 || bandwidth_hz <= 0 || pri_s <= 0)
        throw ConfigError("radar: frequencies and PRI must be positive");
    if (samples_per_pri < 2)
        throw ConfigError("radar: samples_per_pri must be at least 2");
    if (num_pri < 1)
        throw ConfigError("radar: num_pri must be at least 1");
}

void ScattererTrajectory::validate(const RadarConfig& cfg) const {
    const double pri = cfg.pri_s;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].range_m <= 0.0)
            throw ConfigError("trajectory: range must stay positive");
        if (i == 0) continue;
        const double dt = samples[i].time_s - samples[i - 1].time_s;
        if (!(dt > 0.0) || std::abs(dt - pri) > 1e-9 * pri)
            throw ConfigError("trajectory: samples must advance by one PRI");
    }
}

std::string to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::Walk: return "walk";
        case SegmentKind::Stand: return "stand";
        case SegmentKind::Sit: return "sit";
        case SegmentKind::Lay: return "lay";
        case SegmentKind::Stop: return "stop";
        case SegmentKind::Start: return "start";
        case SegmentKind::Fall: return "fall";
        case SegmentKind::SitDown: return "sit_down";
        case SegmentKind::StandUp: return "stand_up";
        case SegmentKind::StandUpFall: return "stand_up_fall";
        case SegmentKind::Bend: return "bend";
        case SegmentKind::Turn: return "turn";
    }
    return "?";
}

SegmentKind segment_kind_from_string(const std::string& name) {
    static const std::pair<const char*, SegmentKind> table[] = {
        {"walk", SegmentKind::Walk},        {"stand", SegmentKind::Stand},
        {"sit", SegmentKind::Sit},          {"lay", SegmentKind::Lay},
        {"stop", SegmentKind::Stop},        {"start", SegmentKind::Start},
        {"fall", SegmentKind::Fall},        {"sit_down", SegmentKind::SitDown},
        {"stand_up", SegmentKind::StandUp}, {"stand_up_fall", SegmentKind::StandUpFall},
        {"bend", SegmentKind::Bend},        {"turn", SegmentKind::Turn},
    };
    for (const auto& [n, k] : table)
        if (name == n) return k;
    throw ConfigError("unknown scenario segment kind: " + name);
}

double MotionScenario::total_duration_s() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration_s;
    return d;
}

std::vector<states::ActionClass> ScenarioTruth::action_sequence() const {
    std::vector<states::ActionClass> out;
    out.reserve(actions.size());
    for (const auto& a : actions) out.push_back(a.action);
    return out;
}

namespace {

// Canonical burst amplitudes (m/s) and durations (s), toward-convention:
// translation and falls shrink range (negative dr/dt), sitting back is
// positive. kFallPeak keeps the Doppler burst below PRF/2 at 25 GHz.
constexpr double kSitPeak = 0.70;
constexpr double kStandUpPeak = 0.70;
constexpr double kBendPeak = 0.85;
constexpr double kBendSitPeak = 0.50;
constexpr double kFallPeak = 2.30;
constexpr double kGetUpPeakA = 1.60;
constexpr double kGetUpPeakB = 0.75;
constexpr double kTurnPeak = 0.22;

constexpr double kStopRampS = 0.55;
constexpr double kStartRampS = 0.65;
constexpr double kSitBurstS = 1.05;
constexpr double kStandUpBurstS = 1.00;
constexpr double kFallBurstS = 0.90;
constexpr double kGetUpBurstS = 1.50;

double lobe(double t, double len, double amp) {
    const double s = std::sin(M_PI * t / len);
    return amp * s * s;
}

// Piecewise-analytic torso radial velocity assembled segment by segment,
// with ground-truth bookkeeping along the way.
class ProfileBuilder {
public:
    explicit ProfileBuilder(const MotionScenario& scenario)
        : sc_(scenario), sign_(scenario.direction_group == Group::Toward ? 1.0 : -1.0),
          group_(scenario.direction_group) {
        build();
    }

    const ScenarioTruth& truth() const { return truth_; }

    ScenarioTruth finalize_truth() {
        resolve_breakpoints();
        return truth_;
    }

    std::vector<ScattererTrajectory> sample_trajectories(const RadarConfig& cfg);

private:
    struct Piece {
        double t0, t1;
        std::function<double(double)> vel; // local time -> dr/dt
    };
    struct StrideSpan {
        double t0, t1;
        double speed_abs;
    };
    struct PendingBp {
        double t_anchor;  // a time on the translation line
        double t_plateau; // a time safely inside the neighbouring stillness
        double v_signed;
        bool end_of_translation;
    };

    const MotionScenario& sc_;
    double cursor_ = 0.0;
    double sign_; // +1 toward, -1 away; flipped by turning around
    double cur_speed_ = 0.0;
    StateKind state_ = StateKind::Standing;
    Group group_;
    ScenarioTruth truth_;
    std::vector<Piece> pieces_;
    std::vector<StrideSpan> stride_spans_;
    std::vector<PendingBp> pending_;

    MotionState motion_state() const { return {state_, group_}; }

    void emit(double len, std::function<double(double)> vel) {
        if (len <= 0) return;
        pieces_.push_back({cursor_, cursor_ + len, std::move(vel)});
        cursor_ += len;
    }
    void emit_still(double len) {
        emit(len, [](double) { return 0.0; });
    }
    void emit_const(double len, double v) {
        const double t0 = cursor_;
        emit(len, [v](double) { return v; });
        stride_spans_.push_back({t0, cursor_, std::abs(v)});
    }
    void emit_ramp(double len, double v0, double v1) {
        emit(len, [=](double t) {
            return v0 + (v1 - v0) * 0.5 * (1.0 - std::cos(M_PI * t / len));
        });
    }
    void emit_lobe(double len, double amp) {
        emit(len, [=](double t) { return lobe(t, len, amp); });
    }

    void record_action(ActionKind kind, double t0, double t1, bool in_place) {
        const ActionClass a{kind, group_};
        if (!states::transition_legal(motion_state(), a))
            throw InternalError("scenario compiler emitted illegal action " +
                                states::to_string(a));
        truth_.actions.push_back({a, t0, t1, in_place});
        if (in_place) truth_.inplace_events.emplace_back(t0, t1);
        state_ = a.to_state().kind;
        truth_.state_timeline.emplace_back(t1, motion_state());
    }

    [[noreturn]] void fail(std::size_t idx, SegmentKind kind, const std::string& why) const {
        throw SequenceError("segment " + std::to_string(idx + 1) + " (" +
                            to_string(kind) + "): " + why + "; current state is " +
                            states::to_string(motion_state()));
    }

    double signed_speed(const ScenarioSegment& seg) const {
        const double v = seg.speed_mps > 0 ? seg.speed_mps : sc_.default_speed_mps;
        return -sign_ * v;
    }

    void need(std::size_t idx, const ScenarioSegment& seg, double min_s) const {
        if (seg.duration_s < min_s)
            fail(idx, seg.kind,
                 "duration too short for the entry transition (needs >= " +
                     std::to_string(min_s) + " s)");
    }

    void mark_end(double t_on_line, double v_signed, double t_still) {
        pending_.push_back({t_on_line, t_still, v_signed, true});
    }
    void mark_start(double t_on_line, double v_signed, double t_plateau) {
        pending_.push_back({t_on_line, t_plateau, v_signed, false});
    }

    void build();

    // --- sampling helpers -------------------------------------------------

    double piece_velocity(double t) const {
        // Pieces tile [0, duration); linear scan with a cursor would do,
        // callers sweep t monotonically so cache the last hit.
        if (pieces_.empty()) return 0.0;
        std::size_t i = last_piece_;
        while (i + 1 < pieces_.size() && t >= pieces_[i].t1) ++i;
        while (i > 0 && t < pieces_[i].t0) --i;
        last_piece_ = i;
        const Piece& p = pieces_[i];
        return p.vel(std::clamp(t - p.t0, 0.0, p.t1 - p.t0));
    }
    mutable std::size_t last_piece_ = 0;

    struct Sampled {
        std::vector<double> v, r;
        double dt = 0.0;
        double at(double t) const {
            if (r.empty()) return 0.0;
            const auto i = static_cast<std::size_t>(
                std::clamp(std::llround(t / dt), static_cast<long long>(0),
                           static_cast<long long>(r.size() - 1)));
            return r[i];
        }
    };

    Sampled integrate(double dt, bool with_sway) const {
        Sampled s;
        s.dt = dt;
        const auto count = static_cast<std::size_t>(std::llround(truth_.duration_s / dt));
        s.v.resize(std::max<std::size_t>(count, 1));
        s.r.resize(s.v.size());
        last_piece_ = 0;
        const double sway_w = 2.0 * M_PI * sc_.sway_freq_hz;
        for (std::size_t m = 0; m < s.v.size(); ++m) {
            const double t = static_cast<double>(m) * dt;
            double v = piece_velocity(t);
            if (with_sway && sc_.sway_amp_m > 0)
                v += sc_.sway_amp_m * sway_w * std::cos(sway_w * t);
            s.v[m] = v;
        }
        s.r[0] = sc_.start_range_m;
        for (std::size_t m = 1; m < s.r.size(); ++m)
            s.r[m] = s.r[m - 1] + 0.5 * (s.v[m - 1] + s.v[m]) * dt;
        return s;
    }

    void resolve_breakpoints() {
        if (pending_.empty()) return;
        const Sampled s = integrate(1e-3, false);
        for (const PendingBp& p : pending_) {
            if (std::abs(p.v_signed) < 1e-9) continue;
            const double t =
                p.t_anchor + (s.at(p.t_plateau) - s.at(p.t_anchor)) / p.v_signed;
            if (t < 0.0 || t > truth_.duration_s) continue;
            truth_.breakpoints.push_back({t, p.end_of_translation});
        }
        std::sort(truth_.breakpoints.begin(), truth_.breakpoints.end(),
                  [](const BreakpointTruth& a, const BreakpointTruth& b) { return a.t < b.t; });
        pending_.clear();
    }
};

void ProfileBuilder::build() {
    if (sc_.segments.empty()) throw SequenceError("scenario has no segments");
    for (const auto& seg : sc_.segments)
        if (!(seg.duration_s > 0))
            throw ConfigError("scenario segment durations must be positive");

    switch (sc_.segments.front().kind) {
        case SegmentKind::Walk: state_ = StateKind::Walking; break;
        case SegmentKind::Stand: state_ = StateKind::Standing; break;
        case SegmentKind::Sit: state_ = StateKind::Sitting; break;
        case SegmentKind::Lay: state_ = StateKind::Laying; break;
        default:
            throw SequenceError(
                "scenario must open with a hold segment (walk/stand/sit/lay)");
    }
    truth_.state_timeline.emplace_back(0.0, motion_state());

    for (std::size_t i = 0; i < sc_.segments.size(); ++i) {
        const ScenarioSegment& seg = sc_.segments[i];
        const double t0 = cursor_;
        const double dur = seg.duration_s;

        switch (seg.kind) {
            case SegmentKind::Walk: {
                const double v = signed_speed(seg);
                if (state_ == StateKind::Walking) {
                    emit_const(dur, v);
                } else if (state_ == StateKind::Standing) {
                    need(i, seg, kStartRampS + 0.2);
                    emit_ramp(kStartRampS, 0.0, v);
                    record_action(ActionKind::StartWalking, t0, t0 + kStartRampS, false);
                    emit_const(dur - kStartRampS, v);
                    mark_start(t0 + kStartRampS, v, t0 - 0.05);
                } else if (state_ == StateKind::Sitting) {
                    // Stand-up merged directly into gait, no standing dwell.
                    const double burst = kStandUpBurstS * 0.85;
                    need(i, seg, burst + kStartRampS + 0.2);
                    emit_lobe(burst, -sign_ * kStandUpPeak * seg.scale);
                    emit_ramp(kStartRampS, 0.0, v);
                    record_action(ActionKind::StandingUpWalking, t0,
                                  t0 + burst + kStartRampS, false);
                    emit_const(dur - burst - kStartRampS, v);
                    mark_start(t0 + burst + kStartRampS, v, t0 - 0.05);
                } else {
                    fail(i, seg.kind, "walking cannot start from Laying without standing up");
                }
                cur_speed_ = v;
                break;
            }
            case SegmentKind::Stand:
            case SegmentKind::Sit:
            case SegmentKind::Lay: {
                const StateKind target = seg.kind == SegmentKind::Stand ? StateKind::Standing
                                         : seg.kind == SegmentKind::Sit
                                             ? StateKind::Sitting
                                             : StateKind::Laying;
                if (state_ == target) {
                    emit_still(dur);
                    break;
                }
                if (state_ == StateKind::Walking) {
                    const double v = cur_speed_;
                    if (target == StateKind::Standing) {
                        need(i, seg, kStopRampS + 0.1);
                        emit_ramp(kStopRampS, v, 0.0);
                        record_action(ActionKind::WalkingStop, t0, t0 + kStopRampS, false);
                        emit_still(dur - kStopRampS);
                        mark_end(t0, v, t0 + kStopRampS + 0.08);
                    } else if (target == StateKind::Sitting) {
                        need(i, seg, kStopRampS + kSitBurstS + 0.1);
                        emit_ramp(kStopRampS, v, 0.0);
                        record_action(ActionKind::WalkingStop, t0, t0 + kStopRampS, false);
                        const double s0 = cursor_;
                        emit_lobe(kSitBurstS, sign_ * kSitPeak * seg.scale);
                        record_action(ActionKind::SittingDown, s0, s0 + kSitBurstS, true);
                        emit_still(dur - kStopRampS - kSitBurstS);
                        mark_end(t0, v, t0 + kStopRampS + kSitBurstS + 0.05);
                    } else { // Laying: fall merged with the tail of the gait
                        need(i, seg, kFallBurstS + 0.1);
                        const double peak = -sign_ * kFallPeak * seg.scale;
                        emit(kFallBurstS, [=](double t) {
                            return v * (1.0 - t / kFallBurstS) + lobe(t, kFallBurstS, peak);
                        });
                        record_action(ActionKind::WalkingFall, t0, t0 + kFallBurstS, false);
                        emit_still(dur - kFallBurstS);
                        mark_end(t0, v, t0 + kFallBurstS + 0.08);
                    }
                } else if (state_ == StateKind::Standing) {
                    if (target == StateKind::Sitting) {
                        need(i, seg, kSitBurstS + 0.1);
                        emit_lobe(kSitBurstS, sign_ * kSitPeak * seg.scale);
                        record_action(ActionKind::SittingDown, t0, t0 + kSitBurstS, true);
                        emit_still(dur - kSitBurstS);
                    } else { // Laying
                        need(i, seg, kFallBurstS + 0.1);
                        emit_lobe(kFallBurstS, -sign_ * kFallPeak * seg.scale);
                        record_action(ActionKind::FallingFromStanding, t0, t0 + kFallBurstS, true);
                        emit_still(dur - kFallBurstS);
                    }
                } else if (state_ == StateKind::Sitting && target == StateKind::Standing) {
                    need(i, seg, kStandUpBurstS + 0.1);
                    emit_lobe(kStandUpBurstS, -sign_ * kStandUpPeak * seg.scale);
                    record_action(ActionKind::StandingFromSitting, t0, t0 + kStandUpBurstS, true);
                    emit_still(dur - kStandUpBurstS);
                } else if (state_ == StateKind::Laying && target == StateKind::Standing) {
                    need(i, seg, kGetUpBurstS + 0.1);
                    const double lenA = kGetUpBurstS * 0.62;
                    emit_lobe(lenA, sign_ * kGetUpPeakA * seg.scale);
                    emit_lobe(kGetUpBurstS - lenA, sign_ * kGetUpPeakB * seg.scale);
                    record_action(ActionKind::StandingFromFalling, t0, t0 + kGetUpBurstS, true);
                    emit_still(dur - kGetUpBurstS);
                } else {
                    fail(i, seg.kind,
                         "no direct transition to " + states::to_string(target));
                }
                break;
            }
            case SegmentKind::Stop: {
                if (state_ != StateKind::Walking) fail(i, seg.kind, "requires Walking");
                const double v = cur_speed_;
                const double ramp = std::min(dur, kStopRampS);
                emit_ramp(ramp, v, 0.0);
                if (dur > ramp) emit_still(dur - ramp);
                record_action(ActionKind::WalkingStop, t0, t0 + ramp, false);
                mark_end(t0, v, t0 + std::min(dur, ramp + 0.05));
                break;
            }
            case SegmentKind::Start: {
                if (state_ != StateKind::Standing) fail(i, seg.kind, "requires Standing");
                const double v = signed_speed(seg);
                const double ramp = std::min(dur, kStartRampS);
                emit_ramp(ramp, 0.0, v);
                if (dur > ramp) emit_const(dur - ramp, v);
                record_action(ActionKind::StartWalking, t0, t0 + ramp, false);
                mark_start(t0 + ramp, v, t0 - 0.05);
                cur_speed_ = v;
                break;
            }
            case SegmentKind::Fall: {
                if (state_ == StateKind::Walking) {
                    const double v = cur_speed_;
                    const double peak = -sign_ * kFallPeak * seg.scale;
                    emit(dur, [=](double t) {
                        return v * (1.0 - t / dur) + lobe(t, dur, peak);
                    });
                    record_action(ActionKind::WalkingFall, t0, t0 + dur, false);
                    mark_end(t0, v, t0 + dur);
                } else if (state_ == StateKind::Standing) {
                    emit_lobe(dur, -sign_ * kFallPeak * seg.scale);
                    record_action(ActionKind::FallingFromStanding, t0, t0 + dur, true);
                } else {
                    fail(i, seg.kind, "requires Walking or Standing");
                }
                break;
            }
            case SegmentKind::SitDown: {
                if (state_ != StateKind::Standing) fail(i, seg.kind, "requires Standing");
                emit_lobe(dur, sign_ * kSitPeak * seg.scale);
                record_action(ActionKind::SittingDown, t0, t0 + dur, true);
                break;
            }
            case SegmentKind::StandUp: {
                if (state_ != StateKind::Sitting) fail(i, seg.kind, "requires Sitting");
                emit_lobe(dur, -sign_ * kStandUpPeak * seg.scale);
                record_action(ActionKind::StandingFromSitting, t0, t0 + dur, true);
                break;
            }
            case SegmentKind::StandUpFall: {
                if (state_ != StateKind::Laying) fail(i, seg.kind, "requires Laying");
                const double lenA = dur * 0.62;
                emit_lobe(lenA, sign_ * kGetUpPeakA * seg.scale);
                emit_lobe(dur - lenA, sign_ * kGetUpPeakB * seg.scale);
                record_action(ActionKind::StandingFromFalling, t0, t0 + dur, true);
                break;
            }
            case SegmentKind::Bend: {
                if (state_ == StateKind::Standing) {
                    emit_lobe(dur / 2, -sign_ * kBendPeak * seg.scale);
                    emit_lobe(dur / 2, sign_ * kBendPeak * seg.scale);
                    record_action(ActionKind::BendingWhileStanding, t0, t0 + dur, true);
                } else if (state_ == StateKind::Sitting) {
                    emit_lobe(dur / 2, -sign_ * kBendSitPeak * seg.scale);
                    emit_lobe(dur / 2, sign_ * kBendSitPeak * seg.scale);
                    record_action(ActionKind::BendingFromSitting, t0, t0 + dur, true);
                } else if (state_ == StateKind::Walking) {
                    // Pause, bend down-up, resume; stays in the walking state.
                    const double v = cur_speed_;
                    const double pause = 0.22 * dur;
                    const double half = (dur - 2 * pause) / 2;
                    emit_ramp(pause, v, 0.0);
                    emit_lobe(half, -sign_ * kBendPeak * 0.8 * seg.scale);
                    emit_lobe(half, sign_ * kBendPeak * 0.8 * seg.scale);
                    emit_ramp(pause, 0.0, v);
                    record_action(ActionKind::WalkingBend, t0, t0 + dur, false);
                } else {
                    fail(i, seg.kind, "cannot bend while Laying");
                }
                break;
            }
            case SegmentKind::Turn: {
                if (state_ != StateKind::Standing) fail(i, seg.kind, "requires Standing");
                emit_lobe(dur / 2, sign_ * kTurnPeak * seg.scale);
                emit_lobe(dur / 2, -sign_ * kTurnPeak * seg.scale);
                sign_ = -sign_;
                group_ = group_ == Group::Toward ? Group::Away : Group::Toward;
                truth_.state_timeline.emplace_back(cursor_, motion_state());
                break;
            }
        }
    }
    truth_.duration_s = cursor_;
}

std::vector<ScattererTrajectory> ProfileBuilder::sample_trajectories(const RadarConfig& cfg) {
    resolve_breakpoints();
    const Sampled torso = integrate(cfg.pri_s, true);
    const std::size_t m = torso.r.size();

    for (double r : torso.r)
        if (r < 0.2)
            throw ConfigError("scenario drives the torso closer than 0.2 m to the radar");

    std::vector<ScattererTrajectory> out;
    ScattererTrajectory t0;
    t0.samples.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        t0.samples[i] = {static_cast<double>(i) * cfg.pri_s, torso.r[i], torso.v[i], 1.0};
    out.push_back(std::move(t0));

    const int limbs = std::max(0, std::min(sc_.num_limbs, 2));
    const double fade = 0.30; // stride envelope ramp at span edges
    for (int li = 0; li < limbs; ++li) {
        const double phase = li == 0 ? 0.0 : M_PI;
        const double refl = sc_.limb_reflectivity * (li == 0 ? 1.0 : 0.8);
        ScattererTrajectory tr;
        tr.samples.resize(m);
        std::vector<double> rl(m);
        auto smooth01 = [](double x) {
            x = std::clamp(x, 0.0, 1.0);
            return x * x * (3.0 - 2.0 * x);
        };
        for (std::size_t i = 0; i < m; ++i) {
            const double t = static_cast<double>(i) * cfg.pri_s;
            double env = 0.0;
            for (const StrideSpan& s : stride_spans_) {
                if (t < s.t0 || t > s.t1) continue;
                env = smooth01((t - s.t0) / fade) * smooth01((s.t1 - t) / fade) *
                      std::min(1.0, s.speed_abs / 0.8);
                break;
            }
            const double disp =
                env * sc_.limb_amp_m *
                std::sin(2.0 * M_PI * sc_.stride_freq_hz * t + phase);
            rl[i] = torso.r[i] + disp;
        }
        for (std::size_t i = 0; i < m; ++i) {
            double v;
            if (i == 0)
                v = m > 1 ? (rl[1] - rl[0]) / cfg.pri_s : 0.0;
            else if (i + 1 == m)
                v = (rl[i] - rl[i - 1]) / cfg.pri_s;
            else
                v = (rl[i + 1] - rl[i - 1]) / (2.0 * cfg.pri_s);
            tr.samples[i] = {static_cast<double>(i) * cfg.pri_s, rl[i], v, refl};
        }
        out.push_back(std::move(tr));
    }
    return out;
}

} // namespace

ScenarioTruth MotionScenario::validate() const {
    ProfileBuilder b(*this);
    return b.finalize_truth();
}

std::vector<ScattererTrajectory> gen_trajectory(const MotionScenario& scenario,
                                                const RadarConfig& cfg) {
    cfg.validate();
    ProfileBuilder b(scenario);
    return b.sample_trajectories(cfg);
}

ComplexBaseband synth_baseband(const std::vector<ScattererTrajectory>& trajectories,
                               const RadarConfig& cfg, double noise_power,
                               std::uint64_t seed) {
    cfg.validate();
    if (noise_power < 0) throw ConfigError("noise power must be nonnegative");
    const std::size_t n = cfg.samples_per_pri;
    const std::size_t m = cfg.num_pri;
    for (const auto& tr : trajectories) {
        if (tr.samples.size() < m)
            throw DurationError("trajectory covers " + std::to_string(tr.samples.size()) +
                                " PRIs, need " + std::to_string(m));
    }

    ComplexBaseband out;
    out.config = cfg;
    out.data = ComplexMatrix(n, m, {0.0, 0.0});

    const double ts = cfg.pri_s / static_cast<double>(n);
    const double two_over_c = 2.0 / kSpeedOfLight;

    for (const auto& tr : trajectories) {
        for (std::size_t col = 0; col < m; ++col) {
            const TrajectorySample& s = tr.samples[col];
            const double amp = cfg.tx_amplitude * s.reflectivity;
            // Fast-time beat frequency carries range, PRI-to-PRI phase
            // carries Doppler.
            const double beat_hz = cfg.chirp_rate() * two_over_c * s.range_m;
            const double phase0 =
                2.0 * M_PI * cfg.center_frequency_hz * two_over_c * s.range_m;
            std::complex<double> acc = std::polar(amp, phase0);
            const std::complex<double> step = std::polar(1.0, 2.0 * M_PI * beat_hz * ts);
            for (std::size_t row = 0; row < n; ++row) {
                out.data(row, col) += acc;
                acc *= step;
            }
        }
    }

    if (noise_power > 0) {
        Rng rng(seed);
        const double sigma = std::sqrt(noise_power / 2.0);
        for (std::size_t col = 0; col < m; ++col)
            for (std::size_t row = 0; row < n; ++row)
                out.data(row, col) += std::complex<double>(sigma * rng.gaussian(),
                                                           sigma * rng.gaussian());
    }
    return out;
}

} // namespace radact::sigsim
