#include "spo/microhome/sim.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "spo/rng.hpp"

namespace spo::microhome {

WorldState init_scene(std::uint64_t seed, const SceneSpec& spec) {
    spec.validate();
    WorldState state;
    state.rooms = spec.rooms;
    state.agent.room_id = spec.rooms.front();
    state.tick = 0;

    Rng rng(mix_seed(seed, 0x5ce2eull));
    for (const auto& cs : spec.classes) {
        state.classes[cs.name] = cs.info;
        int count = static_cast<int>(rng.range(cs.count_min, cs.count_max));
        for (int i = 1; i <= count; ++i) {
            ObjectInstance obj;
            obj.id = cs.name + "_" + std::to_string(i);
            obj.class_name = cs.name;
            obj.room_id = cs.room_id;
            obj.flags = cs.start_flags;
            if (!cs.place.empty()) {
                const std::string& holder_class = cs.place[rng.bounded(cs.place.size())];
                if (holder_class != "floor") {
                    // Pick among already created instances of the holder class.
                    std::vector<std::string> holders;
                    for (const auto& [id, o] : state.objects) {
                        if (o.class_name == holder_class) holders.push_back(id);
                    }
                    if (!holders.empty()) obj.container_id = holders[rng.bounded(holders.size())];
                }
            }
            state.objects.emplace(obj.id, std::move(obj));
        }
    }
    return state;
}

namespace {

// True when the object sits inside a closed container.
bool occluded(const WorldState& s, const ObjectInstance& obj) {
    if (obj.container_id.empty()) return false;
    const ObjectInstance* holder = s.find(obj.container_id);
    return holder && holder->has(kClosed);
}

std::optional<ActionError> check_and_apply(WorldState& s, const Action& a, bool commit) {
    int argc = a.arg2.empty() ? (a.arg1.empty() ? 0 : 1) : 2;
    if (argc != verb_arity(a.verb)) return ActionError::MalformedAction;

    switch (a.verb) {
        case Verb::Walk: {
            if (!s.is_room(a.arg1)) return ActionError::UnknownId;
            if (s.agent.room_id == a.arg1) return ActionError::InvalidStateTransition;
            if (commit) {
                s.agent.room_id = a.arg1;
                for (const auto& id : s.agent.held) s.objects.at(id).room_id = a.arg1;
            }
            return std::nullopt;
        }
        case Verb::Grab: {
            const ObjectInstance* obj = s.find(a.arg1);
            if (!obj) return ActionError::UnknownId;
            if (!s.class_of(*obj).grabbable) return ActionError::InvalidStateTransition;
            if (s.is_held(a.arg1)) return ActionError::InvalidStateTransition;
            if (obj->room_id != s.agent.room_id) return ActionError::NotInRoom;
            if (occluded(s, *obj)) return ActionError::InvalidStateTransition;
            if (s.agent.held.size() >= 2) return ActionError::HandsFull;
            if (commit) {
                s.objects.at(a.arg1).container_id.clear();
                s.agent.held.push_back(a.arg1);
            }
            return std::nullopt;
        }
        case Verb::Put: {
            if (!s.is_held(a.arg1)) return s.find(a.arg1) ? ActionError::NotHeld : ActionError::UnknownId;
            const ObjectInstance* rec = s.find(a.arg2);
            if (!rec) return ActionError::UnknownId;
            const ClassInfo& rc = s.class_of(*rec);
            if (!rc.receptacle()) return ActionError::InvalidStateTransition;
            if (rec->room_id != s.agent.room_id) return ActionError::NotInRoom;
            if (rc.openable && rec->has(kClosed)) return ActionError::InvalidStateTransition;
            if (commit) {
                auto& held = s.agent.held;
                held.erase(std::find(held.begin(), held.end(), a.arg1));
                auto& obj = s.objects.at(a.arg1);
                obj.container_id = a.arg2;
                obj.room_id = rec->room_id;
            }
            return std::nullopt;
        }
        case Verb::Open:
        case Verb::Close: {
            const ObjectInstance* obj = s.find(a.arg1);
            if (!obj) return ActionError::UnknownId;
            if (!s.class_of(*obj).openable) return ActionError::InvalidStateTransition;
            if (obj->room_id != s.agent.room_id) return ActionError::NotInRoom;
            bool opening = a.verb == Verb::Open;
            if (obj->has(opening ? kOpen : kClosed)) return ActionError::InvalidStateTransition;
            if (commit) {
                auto& o = s.objects.at(a.arg1);
                o.flags &= ~(kOpen | kClosed);
                o.flags |= opening ? kOpen : kClosed;
            }
            return std::nullopt;
        }
        case Verb::SwitchOn:
        case Verb::SwitchOff: {
            const ObjectInstance* obj = s.find(a.arg1);
            if (!obj) return ActionError::UnknownId;
            const ClassInfo& ci = s.class_of(*obj);
            if (!ci.switchable) return ActionError::InvalidStateTransition;
            if (obj->room_id != s.agent.room_id) return ActionError::NotInRoom;
            bool on = a.verb == Verb::SwitchOn;
            if (obj->has(on ? kOn : kOff)) return ActionError::InvalidStateTransition;
            if (on && ci.sealed_run && obj->has(kOpen)) return ActionError::InvalidStateTransition;
            if (commit) {
                auto& o = s.objects.at(a.arg1);
                o.flags &= ~(kOn | kOff);
                o.flags |= on ? kOn : kOff;
            }
            return std::nullopt;
        }
        case Verb::Clean: {
            const ObjectInstance* obj = s.find(a.arg1);
            if (!obj) return ActionError::UnknownId;
            if (!s.class_of(*obj).cleanable) return ActionError::InvalidStateTransition;
            if (obj->room_id != s.agent.room_id) return ActionError::NotInRoom;
            if (occluded(s, *obj)) return ActionError::InvalidStateTransition;
            if (!obj->has(kDirty)) return ActionError::InvalidStateTransition;
            if (commit) {
                auto& o = s.objects.at(a.arg1);
                o.flags &= ~(kClean | kDirty);
                o.flags |= kClean;
            }
            return std::nullopt;
        }
        case Verb::Cook: {
            const ObjectInstance* obj = s.find(a.arg1);
            if (!obj) return ActionError::UnknownId;
            if (!s.class_of(*obj).cookable) return ActionError::InvalidStateTransition;
            if (obj->room_id != s.agent.room_id) return ActionError::NotInRoom;
            if (obj->has(kCooked)) return ActionError::InvalidStateTransition;
            if (obj->container_id.empty()) return ActionError::InvalidStateTransition;
            const ObjectInstance* holder = s.find(obj->container_id);
            if (!holder || !s.class_of(*holder).appliance || !holder->has(kOn))
                return ActionError::InvalidStateTransition;
            if (commit) s.objects.at(a.arg1).flags |= kCooked;
            return std::nullopt;
        }
        case Verb::Done:
            return std::nullopt;
    }
    return ActionError::MalformedAction;
}

}  // namespace

std::optional<ActionError> try_apply(WorldState& state, const Action& action) {
    // Preconditions are all checked before any mutation, so a failed action
    // leaves the state exactly as it was.
    if (auto err = check_and_apply(state, action, false)) return err;
    check_and_apply(state, action, true);
    state.tick += 1;
    return std::nullopt;
}

std::variant<WorldState, ActionError> apply_action(const WorldState& state, const Action& action) {
    WorldState next = state;
    if (auto err = try_apply(next, action)) return *err;
    return next;
}

Observation observe(const WorldState& state) {
    Observation obs;
    obs.room_id = state.agent.room_id;
    obs.held = state.agent.held;
    for (const auto& [id, obj] : state.objects) {
        if (obj.room_id != state.agent.room_id) continue;
        if (state.is_held(id)) continue;
        if (occluded(state, obj)) continue;
        obs.visible.push_back({id, obj.class_name, obj.flags, obj.container_id});
    }
    return obs;
}

bool goal_holds(const WorldState& state, const GoalCondition& cond) {
    const ObjectInstance* subj = state.find(cond.subject);
    if (!subj) throw UnknownIdError("goal subject: " + cond.subject);
    switch (cond.predicate) {
        case Predicate::ObjectIn:
            if (!state.find(cond.target)) throw UnknownIdError("goal target: " + cond.target);
            return subj->container_id == cond.target;
        case Predicate::ObjectAtRoom:
            if (!state.is_room(cond.target)) throw UnknownIdError("goal room: " + cond.target);
            return subj->room_id == cond.target;
        case Predicate::StateIs: {
            auto flag = flag_from_name(cond.target);
            if (!flag) throw UnknownIdError("goal flag: " + cond.target);
            return subj->has(*flag);
        }
        case Predicate::Held:
            return state.is_held(cond.subject);
    }
    return false;
}

GoalReport check_goal(const WorldState& state, const std::vector<GoalCondition>& goal) {
    GoalReport report;
    report.total = goal.size();
    for (const auto& cond : goal) {
        if (goal_holds(state, cond)) report.satisfied.push_back(cond);
    }
    return report;
}

std::vector<Action> action_space(const WorldState& state) {
    std::vector<Action> acts;
    for (const auto& room : state.rooms) acts.push_back({Verb::Walk, room, ""});

    std::vector<std::string> grabbables, receptacles;
    for (const auto& [id, obj] : state.objects) {
        const ClassInfo& ci = state.class_of(obj);
        if (ci.grabbable) grabbables.push_back(id);
        if (ci.receptacle()) receptacles.push_back(id);
    }
    for (const auto& id : grabbables) acts.push_back({Verb::Grab, id, ""});
    for (const auto& g : grabbables) {
        for (const auto& r : receptacles) acts.push_back({Verb::Put, g, r});
    }
    for (const auto& [id, obj] : state.objects) {
        const ClassInfo& ci = state.class_of(obj);
        if (ci.openable) {
            acts.push_back({Verb::Open, id, ""});
            acts.push_back({Verb::Close, id, ""});
        }
        if (ci.switchable) {
            acts.push_back({Verb::SwitchOn, id, ""});
            acts.push_back({Verb::SwitchOff, id, ""});
        }
        if (ci.cleanable) acts.push_back({Verb::Clean, id, ""});
        if (ci.cookable) acts.push_back({Verb::Cook, id, ""});
    }
    acts.push_back({Verb::Done, "", ""});
    std::sort(acts.begin(), acts.end());
    return acts;
}

std::vector<Action> legal_actions(const WorldState& state) {
    std::vector<Action> out;
    for (const auto& a : action_space(state)) {
        if (!check_and_apply(const_cast<WorldState&>(state), a, false)) out.push_back(a);
    }
    return out;
}

std::string snapshot_json(const WorldState& state) {
    nlohmann::json j;
    j["tick"] = state.tick;
    j["rooms"] = state.rooms;
    j["agent"] = {{"room", state.agent.room_id}, {"held", state.agent.held}};
    nlohmann::json objs = nlohmann::json::object();
    for (const auto& [id, obj] : state.objects) {
        objs[id] = {
            {"class", obj.class_name},
            {"room", obj.room_id},
            {"container", obj.container_id},
            {"flags", flag_names(obj.flags)},
        };
    }
    j["objects"] = objs;
    return j.dump();
}

}  // namespace spo::microhome
