#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radact/errors.hpp"

namespace radact::states {

enum class StateKind : std::uint8_t { Walking, Standing, Sitting, Laying };

// Motion direction relative to the radar. Toward-motions shrink range and
// produce negative slow-time frequencies under the dechirped phase
// convention used by the simulator.
enum class Group : std::uint8_t { Toward, Away };

struct MotionState {
    StateKind kind = StateKind::Standing;
    Group group = Group::Toward;

    friend bool operator==(const MotionState&, const MotionState&) = default;
};

// Activity vocabulary: every edge of the motion graph, per direction group.
enum class ActionKind : std::uint8_t {
    WalkingStop,          // walking -> standing
    WalkingBend,          // walking -> walking (bend down and up mid-gait)
    WalkingFall,          // walking -> laying
    SittingDown,          // standing -> sitting
    BendingWhileStanding, // standing -> standing
    FallingFromStanding,  // standing -> laying
    StandingFromFalling,  // laying -> standing
    StandingFromSitting,  // sitting -> standing
    BendingFromSitting,   // sitting -> sitting
    StandingUpWalking,    // sitting -> walking (stand-up merged with gait)
    StartWalking,         // standing -> walking
};

inline constexpr std::size_t kActionKindCount = 11;

struct ActionClass {
    ActionKind kind = ActionKind::WalkingStop;
    Group group = Group::Toward;

    MotionState from_state() const;
    MotionState to_state() const;

    friend bool operator==(const ActionClass&, const ActionClass&) = default;
};

using ClassSet = std::vector<ActionClass>;

std::string to_string(StateKind s);
std::string to_string(Group g);
std::string to_string(const MotionState& s);

// Display names follow the "T-Walking-Fall" / "A-Sitting-Down" pattern.
std::string to_string(const ActionClass& a);
ActionClass action_from_string(const std::string& name);
StateKind state_from_string(const std::string& name);
Group group_from_string(const std::string& name);

// Stable small integer id, useful as an array index. Range [0, 22).
std::size_t action_id(const ActionClass& a);

// All 11 actions of one group, in ActionKind declaration order.
ClassSet all_actions(Group g);
// All 22 actions, Toward first.
ClassSet all_actions();

// Out-edges of a state: the actions a person can perform next.
ClassSet allowed_forward(const MotionState& s);

// In-edges of a state: the actions that can have led into it. Deliberately
// not symmetric with allowed_forward; falling, for instance, never
// precedes walking.
ClassSet allowed_reverse(const MotionState& s);

// Returns a.to_state() iff (s, a) is an edge of the motion graph, throws
// TransitionError otherwise.
MotionState apply_transition(const MotionState& s, const ActionClass& a);

bool transition_legal(const MotionState& s, const ActionClass& a);

// Same action mirrored into the other direction group. Involution.
ActionClass mirror_group(const ActionClass& a);

bool contains(const ClassSet& set, const ActionClass& a);

} // namespace radact::states
