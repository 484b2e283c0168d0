#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spo/microhome/scene_spec.hpp"
#include "spo/microhome/types.hpp"

namespace spo::microhome {

// Deterministic world construction: same (seed, spec) -> identical state.
WorldState init_scene(std::uint64_t seed, const SceneSpec& spec);

// Applies the action in place. Returns nullopt on success (tick advanced by 1);
// on failure returns the error and leaves the state untouched.
std::optional<ActionError> try_apply(WorldState& state, const Action& action);

// Pure functional form of try_apply.
std::variant<WorldState, ActionError> apply_action(const WorldState& state, const Action& action);

// Room-local view; contents of closed containers are hidden.
Observation observe(const WorldState& state);

// Decides each condition against the state. Throws UnknownIdError for
// conditions referencing ids (or flags) that do not exist.
GoalReport check_goal(const WorldState& state, const std::vector<GoalCondition>& goal);

bool goal_holds(const WorldState& state, const GoalCondition& cond);

// Every syntactically valid action over the scene's object set (legal or not
// in the current state). Stable order; independent of mutable object state.
std::vector<Action> action_space(const WorldState& state);

// Subset of action_space that would succeed right now.
std::vector<Action> legal_actions(const WorldState& state);

// Canonical JSON snapshot for golden-file tests ('\n'-free, sorted keys).
std::string snapshot_json(const WorldState& state);

}  // namespace spo::microhome
