#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spo::microhome {

enum class Verb : std::uint8_t {
    Walk,
    Grab,
    Put,
    Open,
    Close,
    SwitchOn,
    SwitchOff,
    Clean,
    Cook,
    Done,
};

constexpr int kVerbCount = 10;

const char* verb_name(Verb v);
std::optional<Verb> verb_from_name(const std::string& name);
int verb_arity(Verb v);  // walk/grab/open/...: 1, put: 2, done: 0

struct Action {
    Verb verb = Verb::Done;
    std::string arg1;
    std::string arg2;

    bool operator==(const Action&) const = default;
    bool operator<(const Action& o) const {
        if (verb != o.verb) return verb < o.verb;
        if (arg1 != o.arg1) return arg1 < o.arg1;
        return arg2 < o.arg2;
    }

    std::string str() const;                               // "put apple_1 table_1"
    static Action parse(const std::string& text);          // throws on malformed input
};

// Object state flags, stored as a bitmask.
enum Flag : std::uint8_t {
    kOpen = 1 << 0,
    kClosed = 1 << 1,
    kOn = 1 << 2,
    kOff = 1 << 3,
    kClean = 1 << 4,
    kDirty = 1 << 5,
    kCooked = 1 << 6,
};

const char* flag_name(Flag f);
std::optional<Flag> flag_from_name(const std::string& name);
std::vector<std::string> flag_names(std::uint8_t mask);

// Per-class capabilities, declared by the scene spec.
struct ClassInfo {
    bool grabbable = false;
    bool surface = false;    // things can be put on it
    bool container = false;  // things can be put in it
    bool openable = false;   // open/close; closed containers hide contents
    bool switchable = false;
    bool cleanable = false;
    bool cookable = false;
    bool appliance = false;   // cooking happens in/on it while switched on
    bool sealed_run = false;  // must be closed to switch on (microwave rule)

    bool receptacle() const { return surface || container; }
    bool operator==(const ClassInfo&) const = default;
};

struct ObjectInstance {
    std::string id;
    std::string class_name;
    std::string room_id;
    std::string container_id;  // empty = directly in the room
    std::uint8_t flags = 0;

    bool has(Flag f) const { return (flags & f) != 0; }
    bool operator==(const ObjectInstance&) const = default;
};

struct AgentState {
    std::string room_id;
    std::vector<std::string> held;  // at most 2, in grab order
    bool operator==(const AgentState&) const = default;
};

struct WorldState {
    std::vector<std::string> rooms;
    std::map<std::string, ClassInfo> classes;
    std::map<std::string, ObjectInstance> objects;  // id -> instance, ordered
    AgentState agent;
    std::uint64_t tick = 0;

    const ObjectInstance* find(const std::string& id) const {
        auto it = objects.find(id);
        return it == objects.end() ? nullptr : &it->second;
    }
    const ClassInfo& class_of(const ObjectInstance& obj) const { return classes.at(obj.class_name); }
    bool is_room(const std::string& id) const;
    bool is_held(const std::string& id) const;

    bool operator==(const WorldState&) const = default;
};

struct VisibleObject {
    std::string id;
    std::string class_name;
    std::uint8_t flags = 0;
    std::string container_id;

    bool operator==(const VisibleObject&) const = default;
};

struct Observation {
    std::string room_id;
    std::vector<VisibleObject> visible;  // sorted by id; closed-container contents omitted
    std::vector<std::string> held;

    bool operator==(const Observation&) const = default;
};

enum class Predicate : std::uint8_t { ObjectIn, ObjectAtRoom, StateIs, Held };

const char* predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(const std::string& name);

struct GoalCondition {
    Predicate predicate = Predicate::ObjectIn;
    std::string subject;  // object id
    std::string target;   // receptacle id / room id / flag name

    bool operator==(const GoalCondition&) const = default;
    bool operator<(const GoalCondition& o) const {
        if (predicate != o.predicate) return predicate < o.predicate;
        if (subject != o.subject) return subject < o.subject;
        return target < o.target;
    }
    std::string str() const;
};

struct GoalReport {
    std::vector<GoalCondition> satisfied;
    std::size_t total = 0;
};

enum class ActionError : std::uint8_t {
    NotInRoom,
    HandsFull,
    NotHeld,
    InvalidStateTransition,
    UnknownId,
    MalformedAction,
};

const char* action_error_name(ActionError e);

struct MalformedSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownIdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spo::microhome
