#include "spo/microhome/types.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace spo::microhome {

namespace {

constexpr std::array<const char*, kVerbCount> kVerbNames = {
    "walk", "grab", "put", "open", "close", "switch_on", "switch_off", "clean", "cook", "done",
};

}  // namespace

const char* verb_name(Verb v) { return kVerbNames[static_cast<int>(v)]; }

std::optional<Verb> verb_from_name(const std::string& name) {
    for (int i = 0; i < kVerbCount; ++i) {
        if (name == kVerbNames[i]) return static_cast<Verb>(i);
    }
    return std::nullopt;
}

int verb_arity(Verb v) {
    switch (v) {
        case Verb::Put: return 2;
        case Verb::Done: return 0;
        default: return 1;
    }
}

std::string Action::str() const {
    std::string out = verb_name(verb);
    if (!arg1.empty()) out += " " + arg1;
    if (!arg2.empty()) out += " " + arg2;
    return out;
}

Action Action::parse(const std::string& text) {
    std::istringstream in(text);
    std::string v, a1, a2, extra;
    in >> v >> a1 >> a2 >> extra;
    auto verb = verb_from_name(v);
    if (!verb || !extra.empty()) throw std::invalid_argument("malformed action: " + text);
    Action a{*verb, a1, a2};
    int argc = a2.empty() ? (a1.empty() ? 0 : 1) : 2;
    if (argc != verb_arity(*verb)) throw std::invalid_argument("bad arity: " + text);
    return a;
}

const char* flag_name(Flag f) {
    switch (f) {
        case kOpen: return "open";
        case kClosed: return "closed";
        case kOn: return "on";
        case kOff: return "off";
        case kClean: return "clean";
        case kDirty: return "dirty";
        case kCooked: return "cooked";
    }
    return "?";
}

std::optional<Flag> flag_from_name(const std::string& name) {
    for (Flag f : {kOpen, kClosed, kOn, kOff, kClean, kDirty, kCooked}) {
        if (name == flag_name(f)) return f;
    }
    return std::nullopt;
}

std::vector<std::string> flag_names(std::uint8_t mask) {
    std::vector<std::string> out;
    for (Flag f : {kOpen, kClosed, kOn, kOff, kClean, kDirty, kCooked}) {
        if (mask & f) out.emplace_back(flag_name(f));
    }
    return out;
}

bool WorldState::is_room(const std::string& id) const {
    return std::find(rooms.begin(), rooms.end(), id) != rooms.end();
}

bool WorldState::is_held(const std::string& id) const {
    return std::find(agent.held.begin(), agent.held.end(), id) != agent.held.end();
}

const char* predicate_name(Predicate p) {
    switch (p) {
        case Predicate::ObjectIn: return "object_in";
        case Predicate::ObjectAtRoom: return "object_at_room";
        case Predicate::StateIs: return "state_is";
        case Predicate::Held: return "held";
    }
    return "?";
}

std::optional<Predicate> predicate_from_name(const std::string& name) {
    for (Predicate p : {Predicate::ObjectIn, Predicate::ObjectAtRoom, Predicate::StateIs, Predicate::Held}) {
        if (name == predicate_name(p)) return p;
    }
    return std::nullopt;
}

std::string GoalCondition::str() const {
    std::string out = predicate_name(predicate);
    out += " " + subject;
    if (!target.empty()) out += " " + target;
    return out;
}

const char* action_error_name(ActionError e) {
    switch (e) {
        case ActionError::NotInRoom: return "NotInRoom";
        case ActionError::HandsFull: return "HandsFull";
        case ActionError::NotHeld: return "NotHeld";
        case ActionError::InvalidStateTransition: return "InvalidStateTransition";
        case ActionError::UnknownId: return "UnknownId";
        case ActionError::MalformedAction: return "MalformedAction";
    }
    return "?";
}

}  // namespace spo::microhome
