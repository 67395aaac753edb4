#include "radact/twoway.hpp"

#include <algorithm>

#include <json.hpp>

#include "radact/errors.hpp"

namespace radact::states {

namespace {

using classify::KnnModel;
using classify::Prediction;
using segmentation::Breakpoint;

ClassSet unique_sorted(ClassSet set) {
    std::sort(set.begin(), set.end(), [](const ActionClass& a, const ActionClass& b) {
        return action_id(a) < action_id(b);
    });
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

// In-place actions reachable from any plausible state: everything the
// current evidence allows except re-entering translation.
ClassSet inplace_candidates(const std::vector<MotionState>& plausible) {
    ClassSet out;
    for (const MotionState& s : plausible) {
        for (const ActionClass& a : allowed_forward(s))
            if (a.to_state().kind != StateKind::Walking &&
                a.from_state().kind != StateKind::Walking && !contains(out, a))
                out.push_back(a);
    }
    return unique_sorted(out);
}

// Filter to classes the model actually has exemplars for.
ClassSet trained_subset(const ClassSet& wanted, const ClassSet& trained) {
    ClassSet out;
    for (const ActionClass& a : wanted)
        if (contains(trained, a)) out.push_back(a);
    return out;
}

} // namespace

std::vector<MotionState> StateTimeline::states() const {
    std::vector<MotionState> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.state);
    return out;
}

StateTimeline two_way_decide(const SegmentTimeline& timeline, const KnnModel& fwd_model,
                             const KnnModel& rev_model, const DecisionFeatures& features,
                             const TwoWayConfig& cfg) {
    if (features.breakpoint_windows.size() != timeline.breakpoints.size())
        throw ShapeError("two_way_decide: breakpoint feature count mismatch");
    if (features.event_windows.size() != timeline.events.size())
        throw ShapeError("two_way_decide: event feature count mismatch");

    StateTimeline out;
    MotionState state{timeline.starts_translation ? StateKind::Walking : StateKind::Standing,
                      timeline.group};
    out.entries.push_back({0.0, state, {}, {}, {}, false, false});

    std::vector<MotionState> plausible{state};
    bool in_place_now = !timeline.starts_translation;

    // Index of the most recent in-place event entry, with the prior state
    // it was decided from; the reverse pass revisits it.
    long last_event_entry = -1;
    MotionState state_before_event = state;
    long last_bp_entry = -1; // entry of the preceding translation-end decision
    ClassSet last_bp_candidates;

    struct Point {
        double t;
        bool is_event;
        std::size_t idx;
    };
    std::vector<Point> points;
    for (std::size_t i = 0; i < timeline.breakpoints.size(); ++i)
        points.push_back({timeline.breakpoints[i].slow_time_s, false, i});
    for (std::size_t i = 0; i < timeline.events.size(); ++i) {
        const auto& ev = timeline.events[i];
        points.push_back({0.5 * (ev.onset_s + ev.offset_s), true, i});
    }
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.t < b.t; });

    for (const Point& pt : points) {
        if (pt.is_event) {
            // Energy events only mean something inside an in-place span;
            // gait energy keeps the detector firing while walking.
            if (!in_place_now) continue;
            const ClassSet cand =
                trained_subset(inplace_candidates(plausible), rev_model.class_set.empty()
                                                                  ? fwd_model.class_set
                                                                  : rev_model.class_set);
            if (cand.empty()) continue;
            const Prediction pred =
                classify::knn_predict(rev_model, features.event_windows[pt.idx], cand);
            if (!contains(cand, pred.label))
                throw InternalError("two_way_decide: restricted prediction escaped its set");

            state_before_event = state;
            state = pred.label.to_state();
            TimelineEntry e;
            e.t = timeline.events[pt.idx].offset_s;
            e.state = state;
            e.action_in = pred.label;
            e.forward_label = pred.label;
            out.entries.push_back(e);
            last_event_entry = static_cast<long>(out.entries.size()) - 1;

            plausible.clear();
            for (const ActionClass& c : cand)
                if (std::find(plausible.begin(), plausible.end(), c.to_state()) ==
                    plausible.end())
                    plausible.push_back(c.to_state());
            continue;
        }

        const Breakpoint& bp = timeline.breakpoints[pt.idx];
        if (bp.kind == Breakpoint::Kind::TranslationToInPlace) {
            // The merge window sees the end of gait plus the first in-place
            // moments; candidates are the forward actions of walking.
            const MotionState walk{StateKind::Walking, state.group};
            ClassSet cand = trained_subset(allowed_forward(walk), fwd_model.class_set);
            if (cand.empty()) continue;
            Prediction pred =
                classify::knn_predict(fwd_model, features.breakpoint_windows[pt.idx], cand);
            ActionClass committed = pred.label;
            if (committed.to_state().kind == StateKind::Walking) {
                // A bend verdict contradicts the in-place span the range map
                // shows next; fall back to the best non-walking candidate.
                ClassSet narrowed;
                for (const ActionClass& a : cand)
                    if (a.to_state().kind != StateKind::Walking) narrowed.push_back(a);
                if (!narrowed.empty())
                    committed = classify::knn_predict(
                                    fwd_model, features.breakpoint_windows[pt.idx], narrowed)
                                    .label;
            }

            state = committed.to_state();
            TimelineEntry e;
            e.t = bp.slow_time_s;
            e.state = state;
            e.action_in = committed;
            e.forward_label = pred.label;
            out.entries.push_back(e);
            last_bp_entry = static_cast<long>(out.entries.size()) - 1;
            last_bp_candidates = cand;
            in_place_now = true;
            last_event_entry = -1;

            plausible.clear();
            for (const ActionClass& c : cand)
                if (c.to_state().kind != StateKind::Walking &&
                    std::find(plausible.begin(), plausible.end(), c.to_state()) ==
                        plausible.end())
                    plausible.push_back(c.to_state());
        } else {
            // Walking re-entry: the only actions that lead into walking
            // from an in-place state.
            const MotionState walk{StateKind::Walking, state.group};
            ClassSet cand;
            for (const ActionClass& a : allowed_reverse(walk))
                if (a.from_state().kind != StateKind::Walking) cand.push_back(a);
            cand = trained_subset(cand, fwd_model.class_set);
            if (cand.empty()) continue;
            const Prediction pred =
                classify::knn_predict(fwd_model, features.breakpoint_windows[pt.idx], cand);

            TimelineEntry e;
            e.t = bp.slow_time_s;
            e.state = pred.label.to_state();
            e.action_in = pred.label;
            e.forward_label = pred.label;

            // Reverse pass: with walking re-entered confidently, revisit the
            // in-place action that preceded it using the reverse view of
            // the state this re-entry implies.
            if (last_event_entry >= 0 && pred.share >= cfg.reverse_trigger_share) {
                const MotionState entered = pred.label.from_state();
                ClassSet rev_cand;
                for (const ActionClass& a : allowed_reverse(entered))
                    if (a.from_state().kind != StateKind::Walking) rev_cand.push_back(a);
                rev_cand = trained_subset(unique_sorted(rev_cand), rev_model.class_set);
                if (!rev_cand.empty()) {
                    TimelineEntry& ev_entry =
                        out.entries[static_cast<std::size_t>(last_event_entry)];
                    const std::size_t ev_idx = [&] {
                        // entry times are event offsets; find the source index
                        for (std::size_t i = 0; i < timeline.events.size(); ++i)
                            if (timeline.events[i].offset_s == ev_entry.t) return i;
                        return std::size_t{0};
                    }();
                    const Prediction rev = classify::knn_predict(
                        rev_model, features.event_windows[ev_idx], rev_cand);
                    ev_entry.reverse_label = rev.label;

                    const ActionClass fwd_a = *ev_entry.action_in;
                    if (!(rev.label == fwd_a)) {
                        const double r_rev = cfg.recall_of(rev.label);
                        const double r_fwd = cfg.recall_of(fwd_a);
                        const bool override_fwd = r_rev > r_fwd;
                        const bool fits_history =
                            rev.label.from_state() == state_before_event;
                        if (override_fwd && fits_history) {
                            ev_entry.action_in = rev.label;
                            ev_entry.state = rev.label.to_state();
                            ev_entry.revised = true;
                        } else if (override_fwd && last_bp_entry >= 0) {
                            // One-step backward repair: pick the breakpoint
                            // candidate that leads into the state the
                            // reverse verdict needs.
                            TimelineEntry& bp_entry =
                                out.entries[static_cast<std::size_t>(last_bp_entry)];
                            bool repaired = false;
                            for (const ActionClass& c : last_bp_candidates) {
                                if (c.to_state() == rev.label.from_state()) {
                                    bp_entry.action_in = c;
                                    bp_entry.state = c.to_state();
                                    bp_entry.revised = true;
                                    ev_entry.action_in = rev.label;
                                    ev_entry.state = rev.label.to_state();
                                    ev_entry.revised = true;
                                    repaired = true;
                                    break;
                                }
                            }
                            if (!repaired) ev_entry.conflict = true;
                        } else {
                            ev_entry.conflict = true;
                        }
                    }
                }
            }

            state = {StateKind::Walking, state.group};
            e.state = state;
            out.entries.push_back(e);
            in_place_now = false;
            last_event_entry = -1;
            plausible = {state};
        }
    }
    return out;
}

std::string to_json(const StateTimeline& timeline, const std::string& name) {
    nlohmann::json j;
    if (!name.empty()) j["recording"] = name;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : timeline.entries) {
        nlohmann::json je;
        je["t"] = e.t;
        je["state"] = to_string(e.state.kind);
        je["group"] = to_string(e.state.group);
        je["action_in"] = e.action_in ? nlohmann::json(to_string(*e.action_in))
                                      : nlohmann::json(nullptr);
        je["forward_label"] = e.forward_label
                                  ? nlohmann::json(to_string(*e.forward_label))
                                  : nlohmann::json(nullptr);
        je["reverse_label"] = e.reverse_label
                                  ? nlohmann::json(to_string(*e.reverse_label))
                                  : nlohmann::json(nullptr);
        je["conflict"] = e.conflict;
        je["revised"] = e.revised;
        j["entries"].push_back(je);
    }
    return j.dump(2);
}

} // namespace radact::states
