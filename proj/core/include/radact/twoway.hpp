#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radact/classify.hpp"
#include "radact/segmentation.hpp"
#include "radact/states.hpp"

namespace radact::states {

/// Segmentation evidence for one recording: range-map breakpoints, energy
/// events, and whether the recording opens with translation.
struct SegmentTimeline {
    std::vector<segmentation::Breakpoint> breakpoints; // chronological
    std::vector<segmentation::EventInterval> events;   // chronological, unfiltered
    bool starts_translation = true;
    Group group = Group::Toward;
    double duration_s = 0.0;
};

/// Classifier inputs, aligned by index with the sorted breakpoints/events
/// of the SegmentTimeline. Breakpoint windows capture the translation
/// merge (or the walking re-entry); event windows span PBC onset..offset.
struct DecisionFeatures {
    std::vector<std::vector<double>> breakpoint_windows;
    std::vector<std::vector<double>> event_windows;
};

struct TwoWayConfig {
    double pre_breakpoint_s = 1.5;  // translation captured before t1
    double post_breakpoint_s = 0.5; // in-place captured after t1
    double reentry_window_s = 3.0;  // window after an in-place -> walking t4
    double reverse_trigger_share = 0.5; // vote share that counts as confident

    // Per-class holdout recall, aligned with recall_classes; used to decide
    // whether a reverse verdict overrides a forward one.
    ClassSet recall_classes;
    std::vector<double> recall;

    double recall_of(const ActionClass& a) const {
        for (std::size_t i = 0; i < recall_classes.size(); ++i)
            if (recall_classes[i] == a) return recall[i];
        return -1.0;
    }
};

struct TimelineEntry {
    double t = 0.0;
    MotionState state;
    std::optional<ActionClass> action_in;
    std::optional<ActionClass> forward_label;
    std::optional<ActionClass> reverse_label;
    bool conflict = false; // forward and reverse verdicts were irreconcilable
    bool revised = false;  // reverse pass replaced the committed action
};

struct StateTimeline {
    std::vector<TimelineEntry> entries;

    std::vector<MotionState> states() const;
};

/// Walks the segmentation evidence in time order. Translation-end
/// breakpoints are classified with the forward action set of the current
/// state, in-place events with the in-place actions of every plausible
/// state, walking re-entries with the walking in-edges. After a confident
/// re-entry the preceding in-place event is re-classified against the
/// reverse set of the state the re-entry implies; disagreements either
/// revise the entry (when the reverse class validates better and fits the
/// committed history) or stand flagged as conflicts.
StateTimeline two_way_decide(const SegmentTimeline& timeline,
                             const classify::KnnModel& fwd_model,
                             const classify::KnnModel& rev_model,
                             const DecisionFeatures& features,
                             const TwoWayConfig& cfg = {});

std::string to_json(const StateTimeline& timeline, const std::string& name = "");

} // namespace radact::states
