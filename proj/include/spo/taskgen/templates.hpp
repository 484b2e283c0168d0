#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spo/microhome/scene_spec.hpp"
#include "spo/taskgen/lexicon.hpp"
#include "spo/taskgen/task.hpp"

namespace spo::taskgen {

enum class SlotKind : std::uint8_t {
    Grabbable,
    Receptacle,     // any surface or container
    OpenContainer,  // openable container
    Appliance,
    Cookable,
    Cleanable,  // currently dirty
    Surface,    // plain surface, not an appliance
};

struct SlotSpec {
    std::string name;
    SlotKind kind;
};

// High-level plan steps; the expander lowers them to primitive actions against
// a simulated state (walking to rooms, opening containers as needed).
enum class MacroOp : std::uint8_t {
    Acquire,    // a = object slot
    Deposit,    // a = object slot, b = receptacle slot
    ToggleOn,   // a = device slot
    ToggleOff,  // a = device slot
    CookStep,   // a = food slot (must already sit in a running appliance)
    CleanStep,  // a = object slot
    Finish,
};

struct Macro {
    MacroOp op;
    std::string a;
    std::string b;
};

struct TaskTemplate {
    std::string id;
    std::string family;
    std::string instruction_pattern;        // slots as {name} / {name.room}
    std::vector<SlotSpec> slots;            // the replaceable-slot table
    std::vector<std::string> goal_pattern;  // e.g. "object_in {o1} {d1}"
    std::vector<Macro> skeleton;
    int nominal_min = 1;  // plausible expanded plan-length range
    int nominal_max = 1;
};

struct GenConfig;

// The curated template library. Families: move, tidy, cook, multi.
std::vector<TaskTemplate> propose_templates(const GenConfig& config);

struct UnknownFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsatisfiableSlot : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PlanValidationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binds slots to concrete scene objects, expands and validates the golden
// plan, and derives the goal as the start->end state diff.
Task instantiate_task(const TaskTemplate& tmpl, const microhome::SceneSpec& scene,
                      std::uint64_t scene_seed, std::uint64_t rng_seed);

// Applies 0-3 instruction transformations (verb synonym, appearance
// description, context prefix) chosen deterministically from the seed.
std::string augment_instruction(const std::string& instruction, std::uint64_t rng_seed,
                                const Lexicon& lexicon);

struct TierQuota {
    int train = 0;
    int test = 0;
};

struct GenConfig {
    std::vector<std::string> families = {"move", "tidy", "cook", "multi"};
    std::string scene_text;  // empty = built-in default scene
    std::map<Tier, TierQuota> quotas = default_quotas();
    std::uint64_t scene_seed_base = 1000;
    std::uint64_t gen_seed = 2000;
    bool augment = true;

    static std::map<Tier, TierQuota> default_quotas();
    microhome::SceneSpec scene() const;
};

struct Corpus {
    std::vector<Task> train;
    std::vector<Task> test;
};

// Rejection-samples (template, seeds) tuples until every tier quota is met.
// Fully deterministic for a given config.
Corpus generate_corpus(const GenConfig& config);

// Start->end diff as goal conditions (sorted): container/room moves, gained
// state flags, and objects left in hand.
std::vector<microhome::GoalCondition> state_diff(const microhome::WorldState& start,
                                                 const microhome::WorldState& end);

}  // namespace spo::taskgen
