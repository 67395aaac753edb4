#include "radact/states.hpp"

#include <algorithm>

namespace radact::states {

namespace {

struct Edge {
    StateKind from;
    StateKind to;
};

// One row per ActionKind, declaration order.
constexpr std::array<Edge, kActionKindCount> kEdges = {{
    {StateKind::Walking, StateKind::Standing},  // WalkingStop
    {StateKind::Walking, StateKind::Walking},   // WalkingBend
    {StateKind::Walking, StateKind::Laying},    // WalkingFall
    {StateKind::Standing, StateKind::Sitting},  // SittingDown
    {StateKind::Standing, StateKind::Standing}, // BendingWhileStanding
    {StateKind::Standing, StateKind::Laying},   // FallingFromStanding
    {StateKind::Laying, StateKind::Standing},   // StandingFromFalling
    {StateKind::Sitting, StateKind::Standing},  // StandingFromSitting
    {StateKind::Sitting, StateKind::Sitting},   // BendingFromSitting
    {StateKind::Sitting, StateKind::Walking},   // StandingUpWalking
    {StateKind::Standing, StateKind::Walking},  // StartWalking
}};

constexpr std::array<const char*, kActionKindCount> kActionNames = {{
    "Walking-Stop",
    "Walking-Bend",
    "Walking-Fall",
    "Sitting-Down",
    "Bending-Standing",
    "Falling-Standing",
    "Standing-From-Fall",
    "Standing-From-Sit",
    "Bending-Sitting",
    "Standing-Up-Walking",
    "Start-Walking",
}};

} // namespace

MotionState ActionClass::from_state() const {
    return {kEdges[static_cast<std::size_t>(kind)].from, group};
}

MotionState ActionClass::to_state() const {
    return {kEdges[static_cast<std::size_t>(kind)].to, group};
}

std::string to_string(StateKind s) {
    switch (s) {
        case StateKind::Walking: return "Walking";
        case StateKind::Standing: return "Standing";
        case StateKind::Sitting: return "Sitting";
        case StateKind::Laying: return "Laying";
    }
    return "?";
}

std::string to_string(Group g) { return g == Group::Toward ? "toward" : "away"; }

std::string to_string(const MotionState& s) {
    return to_string(s.kind) + (s.group == Group::Toward ? "/T" : "/A");
}

std::string to_string(const ActionClass& a) {
    const char* prefix = a.group == Group::Toward ? "T-" : "A-";
    return prefix + std::string(kActionNames[static_cast<std::size_t>(a.kind)]);
}

ActionClass action_from_string(const std::string& name) {
    if (name.size() < 3 || (name[0] != 'T' && name[0] != 'A') || name[1] != '-')
        throw LabelError("unknown action class name: " + name);
    const Group g = name[0] == 'T' ? Group::Toward : Group::Away;
    const std::string body = name.substr(2);
    for (std::size_t i = 0; i < kActionKindCount; ++i) {
        if (body == kActionNames[i])
            return {static_cast<ActionKind>(i), g};
    }
    throw LabelError("unknown action class name: " + name);
}

StateKind state_from_string(const std::string& name) {
    if (name == "Walking") return StateKind::Walking;
    if (name == "Standing") return StateKind::Standing;
    if (name == "Sitting") return StateKind::Sitting;
    if (name == "Laying") return StateKind::Laying;
    throw LabelError("unknown state name: " + name);
}

Group group_from_string(const std::string& name) {
    if (name == "toward" || name == "T") return Group::Toward;
    if (name == "away" || name == "A") return Group::Away;
    throw ConfigError("unknown direction group: " + name);
}

std::size_t action_id(const ActionClass& a) {
    return static_cast<std::size_t>(a.kind) * 2 +
           (a.group == Group::Away ? 1 : 0);
}

ClassSet all_actions(Group g) {
    ClassSet out;
    out.reserve(kActionKindCount);
    for (std::size_t i = 0; i < kActionKindCount; ++i)
        out.push_back({static_cast<ActionKind>(i), g});
    return out;
}

ClassSet all_actions() {
    ClassSet out = all_actions(Group::Toward);
    const ClassSet away = all_actions(Group::Away);
    out.insert(out.end(), away.begin(), away.end());
    return out;
}

ClassSet allowed_forward(const MotionState& s) {
    ClassSet out;
    for (const ActionClass& a : all_actions(s.group))
        if (a.from_state() == s) out.push_back(a);
    return out;
}

ClassSet allowed_reverse(const MotionState& s) {
    ClassSet out;
    for (const ActionClass& a : all_actions(s.group))
        if (a.to_state() == s) out.push_back(a);
    return out;
}

bool transition_legal(const MotionState& s, const ActionClass& a) {
    return a.from_state() == s;
}

MotionState apply_transition(const MotionState& s, const ActionClass& a) {
    if (!transition_legal(s, a))
        throw TransitionError("illegal transition: " + to_string(a) +
                              " cannot start from " + to_string(s));
    return a.to_state();
}

ActionClass mirror_group(const ActionClass& a) {
    return {a.kind, a.group == Group::Toward ? Group::Away : Group::Toward};
}

bool contains(const ClassSet& set, const ActionClass& a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

} // namespace radact::states
