#include "spo/taskgen/templates.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "spo/microhome/sim.hpp"
#include "spo/rng.hpp"

namespace spo::taskgen {

using microhome::Action;
using microhome::GoalCondition;
using microhome::ObjectInstance;
using microhome::Predicate;
using microhome::SceneSpec;
using microhome::Verb;
using microhome::WorldState;

namespace {

std::string slot_ref(int i, const char* base) { return base + std::to_string(i); }

TaskTemplate make_move(int k) {
    TaskTemplate t;
    t.id = "move_" + std::to_string(k);
    t.family = "move";
    std::ostringstream instr;
    for (int i = 1; i <= k; ++i) {
        if (i == 1)
            instr << "Take the {o1} from the {o1.room} to the {d1} in the {d1.room}";
        else
            instr << ", then the {o" << i << "} to the {d" << i << "} in the {d" << i << ".room}";
        t.slots.push_back({slot_ref(i, "o"), SlotKind::Grabbable});
        t.slots.push_back({slot_ref(i, "d"), SlotKind::Receptacle});
        t.goal_pattern.push_back("object_in {o" + std::to_string(i) + "} {d" + std::to_string(i) + "}");
        t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "o"), ""});
        t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "o"), slot_ref(i, "d")});
    }
    instr << ".";
    t.instruction_pattern = instr.str();
    t.skeleton.push_back({MacroOp::Finish, "", ""});
    t.nominal_min = 3 * k + 1;
    t.nominal_max = 7 * k + 1;
    return t;
}

TaskTemplate make_tidy(int k) {
    TaskTemplate t;
    t.id = "tidy_" + std::to_string(k);
    t.family = "tidy";
    std::ostringstream instr;
    instr << "Put ";
    for (int i = 1; i <= k; ++i) {
        if (i > 1) instr << (i == k ? " and " : ", ");
        instr << "the {o" << i << "} from the {o" << i << ".room}";
        t.slots.push_back({slot_ref(i, "o"), SlotKind::Grabbable});
        t.goal_pattern.push_back("object_in {o" + std::to_string(i) + "} {c}");
        t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "o"), ""});
        t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "o"), "c"});
    }
    instr << " away in the {c} in the {c.room}, and clean the {w}.";
    t.slots.push_back({"c", SlotKind::OpenContainer});
    t.slots.push_back({"w", SlotKind::Cleanable});
    t.goal_pattern.push_back("state_is {w} clean");
    t.skeleton.push_back({MacroOp::CleanStep, "w", ""});
    t.skeleton.push_back({MacroOp::Finish, "", ""});
    t.instruction_pattern = instr.str();
    t.nominal_min = 4 * k + 2;
    t.nominal_max = 7 * k + 5;
    return t;
}

TaskTemplate make_cook(int k) {
    TaskTemplate t;
    t.id = "cook_" + std::to_string(k);
    t.family = "cook";
    std::ostringstream instr;
    instr << "Cook ";
    for (int i = 1; i <= k; ++i) {
        if (i > 1) instr << (i == k ? " and " : ", ");
        instr << "the {f" << i << "}";
        t.slots.push_back({slot_ref(i, "f"), SlotKind::Cookable});
        t.goal_pattern.push_back("state_is {f" + std::to_string(i) + "} cooked");
        t.goal_pattern.push_back("object_in {f" + std::to_string(i) + "} {s}");
        t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "f"), ""});
        t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "f"), "a"});
        t.skeleton.push_back({MacroOp::ToggleOn, "a", ""});
        t.skeleton.push_back({MacroOp::CookStep, slot_ref(i, "f"), ""});
        t.skeleton.push_back({MacroOp::ToggleOff, "a", ""});
        t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "f"), ""});
        t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "f"), "s"});
    }
    instr << " using the {a} and serve on the {s} in the {s.room}.";
    t.slots.push_back({"a", SlotKind::Appliance});
    t.slots.push_back({"s", SlotKind::Surface});
    t.skeleton.push_back({MacroOp::Finish, "", ""});
    t.instruction_pattern = instr.str();
    t.nominal_min = 8 * k + 1;
    t.nominal_max = 13 * k + 2;
    return t;
}

TaskTemplate make_multi(int k) {
    TaskTemplate t;
    t.id = "rearrange_" + std::to_string(k);
    t.family = "multi";
    std::ostringstream instr;
    instr << "Rearrange the house: move ";
    for (int i = 1; i <= k; ++i) {
        if (i > 1) instr << (i == k ? " and " : ", ");
        instr << "the {o" << i << "} to the {d" << i << "} in the {d" << i << ".room}";
        t.slots.push_back({slot_ref(i, "o"), SlotKind::Grabbable});
        t.slots.push_back({slot_ref(i, "d"), SlotKind::Receptacle});
        t.goal_pattern.push_back("object_in {o" + std::to_string(i) + "} {d" + std::to_string(i) + "}");
    }
    instr << ".";
    // Carry objects two at a time; the two-hands limit shapes the interleaving.
    for (int i = 1; i <= k; i += 2) {
        if (i + 1 <= k) {
            t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "o"), ""});
            t.skeleton.push_back({MacroOp::Acquire, slot_ref(i + 1, "o"), ""});
            t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "o"), slot_ref(i, "d")});
            t.skeleton.push_back({MacroOp::Deposit, slot_ref(i + 1, "o"), slot_ref(i + 1, "d")});
        } else {
            t.skeleton.push_back({MacroOp::Acquire, slot_ref(i, "o"), ""});
            t.skeleton.push_back({MacroOp::Deposit, slot_ref(i, "o"), slot_ref(i, "d")});
        }
    }
    t.skeleton.push_back({MacroOp::Finish, "", ""});
    t.instruction_pattern = instr.str();
    t.nominal_min = 3 * k + 1;
    t.nominal_max = 6 * k + 3;
    return t;
}

bool slot_matches(const WorldState& s, const ObjectInstance& obj, SlotKind kind) {
    const auto& ci = s.class_of(obj);
    switch (kind) {
        case SlotKind::Grabbable: return ci.grabbable;
        case SlotKind::Receptacle: return ci.receptacle();
        case SlotKind::OpenContainer: return ci.container && ci.openable;
        case SlotKind::Appliance: return ci.appliance;
        case SlotKind::Cookable: return ci.cookable && !obj.has(microhome::kCooked);
        case SlotKind::Cleanable: return ci.cleanable && obj.has(microhome::kDirty);
        case SlotKind::Surface: return ci.surface && !ci.appliance;
    }
    return false;
}

class PlanExpander {
public:
    explicit PlanExpander(WorldState state) : state_(std::move(state)) {}

    const std::vector<Action>& plan() const { return plan_; }
    const WorldState& state() const { return state_; }

    void run(const std::vector<Macro>& skeleton, const std::map<std::string, std::string>& binding) {
        for (const auto& m : skeleton) {
            switch (m.op) {
                case MacroOp::Acquire: acquire(binding.at(m.a)); break;
                case MacroOp::Deposit: deposit(binding.at(m.a), binding.at(m.b)); break;
                case MacroOp::ToggleOn: toggle(binding.at(m.a), true); break;
                case MacroOp::ToggleOff: toggle(binding.at(m.a), false); break;
                case MacroOp::CookStep: cook(binding.at(m.a)); break;
                case MacroOp::CleanStep: clean(binding.at(m.a)); break;
                case MacroOp::Finish: emit({Verb::Done, "", ""}); break;
            }
        }
    }

private:
    void emit(const Action& a) {
        if (auto err = microhome::try_apply(state_, a))
            throw PlanValidationFailed("step '" + a.str() + "' failed: " + microhome::action_error_name(*err));
        plan_.push_back(a);
    }

    const ObjectInstance& obj(const std::string& id) const { return state_.objects.at(id); }

    void ensure_at(const std::string& room) {
        if (state_.agent.room_id != room) emit({Verb::Walk, room, ""});
    }

    // Opens the holder if it hides the object; returns the holder id if we did.
    std::string unblock(const std::string& id) {
        const auto& o = obj(id);
        if (o.container_id.empty()) return "";
        const auto& holder = obj(o.container_id);
        if (!holder.has(microhome::kClosed)) return "";
        emit({Verb::Open, holder.id, ""});
        return holder.id;
    }

    void acquire(const std::string& id) {
        ensure_at(obj(id).room_id);
        std::string opened = unblock(id);
        emit({Verb::Grab, id, ""});
        if (!opened.empty()) emit({Verb::Close, opened, ""});
    }

    void deposit(const std::string& id, const std::string& rec) {
        ensure_at(obj(rec).room_id);
        bool reopen = false;
        if (state_.class_of(obj(rec)).openable && obj(rec).has(microhome::kClosed)) {
            emit({Verb::Open, rec, ""});
            reopen = true;
        }
        emit({Verb::Put, id, rec});
        if (reopen) emit({Verb::Close, rec, ""});
    }

    void toggle(const std::string& id, bool on) {
        ensure_at(obj(id).room_id);
        if (on && !obj(id).has(microhome::kOn)) {
            emit({Verb::SwitchOn, id, ""});
        } else if (!on && !obj(id).has(microhome::kOff)) {
            emit({Verb::SwitchOff, id, ""});
        }
    }

    void cook(const std::string& id) {
        ensure_at(obj(id).room_id);
        emit({Verb::Cook, id, ""});
    }

    void clean(const std::string& id) {
        ensure_at(obj(id).room_id);
        std::string opened = unblock(id);
        emit({Verb::Clean, id, ""});
        if (!opened.empty()) emit({Verb::Close, opened, ""});
    }

    WorldState state_;
    std::vector<Action> plan_;
};

std::string render_pattern(const std::string& pattern, const std::map<std::string, std::string>& binding,
                           const WorldState& initial) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size();) {
        if (pattern[i] != '{') {
            out += pattern[i++];
            continue;
        }
        auto close = pattern.find('}', i);
        std::string ref = pattern.substr(i + 1, close - i - 1);
        i = close + 1;
        bool want_room = false;
        if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".room") {
            want_room = true;
            ref = ref.substr(0, ref.size() - 5);
        }
        const auto& obj = initial.objects.at(binding.at(ref));
        out += want_room ? obj.room_id : obj.class_name;
    }
    return out;
}

}  // namespace

std::map<Tier, TierQuota> GenConfig::default_quotas() {
    return {{Tier::UltraShort, {73, 29}}, {Tier::Short, {42, 17}}, {Tier::Medium, {51, 21}}, {Tier::Long, {34, 13}}};
}

microhome::SceneSpec GenConfig::scene() const {
    return scene_text.empty() ? microhome::default_scene() : SceneSpec::parse(scene_text);
}

std::vector<TaskTemplate> propose_templates(const GenConfig& config) {
    std::vector<TaskTemplate> out;
    for (const auto& fam : config.families) {
        if (fam == "move") {
            for (int k = 1; k <= 8; ++k) out.push_back(make_move(k));
        } else if (fam == "tidy") {
            for (int k = 1; k <= 8; ++k) out.push_back(make_tidy(k));
        } else if (fam == "cook") {
            for (int k = 1; k <= 4; ++k) out.push_back(make_cook(k));
        } else if (fam == "multi") {
            for (int k = 2; k <= 9; ++k) out.push_back(make_multi(k));
        } else {
            throw UnknownFamily("unknown template family: " + fam);
        }
    }
    return out;
}

std::vector<GoalCondition> state_diff(const WorldState& start, const WorldState& end) {
    std::vector<GoalCondition> goal;
    for (const auto& [id, after] : end.objects) {
        const auto& before = start.objects.at(id);
        if (end.is_held(id)) {
            if (!start.is_held(id)) goal.push_back({Predicate::Held, id, ""});
        } else if (after.container_id != before.container_id && !after.container_id.empty()) {
            goal.push_back({Predicate::ObjectIn, id, after.container_id});
        } else if (after.room_id != before.room_id) {
            goal.push_back({Predicate::ObjectAtRoom, id, after.room_id});
        }
        for (auto f : {microhome::kOpen, microhome::kClosed, microhome::kOn, microhome::kOff, microhome::kClean,
                       microhome::kDirty, microhome::kCooked}) {
            if (after.has(f) && !before.has(f)) goal.push_back({Predicate::StateIs, id, microhome::flag_name(f)});
        }
    }
    std::sort(goal.begin(), goal.end());
    return goal;
}

Task instantiate_task(const TaskTemplate& tmpl, const SceneSpec& scene, std::uint64_t scene_seed,
                      std::uint64_t rng_seed) {
    WorldState initial = microhome::init_scene(scene_seed, scene);
    Rng rng(mix_seed(rng_seed, hash_str(tmpl.id)));

    std::map<std::string, std::string> binding;
    std::set<std::string> used;
    for (const auto& slot : tmpl.slots) {
        std::vector<std::string> candidates;
        for (const auto& [id, obj] : initial.objects) {
            if (used.count(id)) continue;
            if (!slot_matches(initial, obj, slot.kind)) continue;
            candidates.push_back(id);
        }
        if (candidates.empty())
            throw UnsatisfiableSlot("no object for slot " + slot.name + " of template " + tmpl.id);
        binding[slot.name] = candidates[rng.bounded(candidates.size())];
        used.insert(binding[slot.name]);
    }

    // A deposit that matches the object's starting holder would contribute
    // nothing to the goal; rebind such destinations away from it.
    for (const auto& m : tmpl.skeleton) {
        if (m.op != MacroOp::Deposit) continue;
        const auto& obj = initial.objects.at(binding.at(m.a));
        std::string& dest = binding.at(m.b);
        if (obj.container_id != dest) continue;
        auto kind = std::find_if(tmpl.slots.begin(), tmpl.slots.end(),
                                 [&](const SlotSpec& s) { return s.name == m.b; })
                        ->kind;
        std::vector<std::string> alternatives;
        for (const auto& [id, cand] : initial.objects) {
            if (id != dest && !used.count(id) && slot_matches(initial, cand, kind)) alternatives.push_back(id);
        }
        if (alternatives.empty()) throw UnsatisfiableSlot("no fresh destination for slot " + m.b);
        used.erase(dest);
        dest = alternatives[rng.bounded(alternatives.size())];
        used.insert(dest);
    }
    // Rebinding a shared destination can reintroduce a conflict for an
    // earlier object; reject such bindings outright.
    for (const auto& m : tmpl.skeleton) {
        if (m.op != MacroOp::Deposit) continue;
        if (initial.objects.at(binding.at(m.a)).container_id == binding.at(m.b))
            throw UnsatisfiableSlot("destination " + m.b + " matches the starting holder of " + m.a);
    }

    PlanExpander expander(initial);
    expander.run(tmpl.skeleton, binding);

    Task task;
    task.id = tmpl.id + ".s" + std::to_string(scene_seed) + ".r" + std::to_string(rng_seed);
    task.instruction = render_pattern(tmpl.instruction_pattern, binding, initial);
    task.scene_seed = scene_seed;
    task.goal = state_diff(initial, expander.state());
    task.golden_plan = expander.plan();
    task.tier = classify_difficulty(static_cast<int>(task.golden_plan.size()));
    if (task.goal.empty()) throw PlanValidationFailed("empty goal diff for template " + tmpl.id);

    // Validation pass: replay the plan on a fresh state and check the goal.
    WorldState replay = microhome::init_scene(scene_seed, scene);
    for (const auto& a : task.golden_plan) {
        if (microhome::try_apply(replay, a))
            throw PlanValidationFailed("golden plan replay failed for " + task.id);
    }
    if (microhome::check_goal(replay, task.goal).satisfied.size() != task.goal.size())
        throw PlanValidationFailed("golden plan misses its own goal for " + task.id);
    return task;
}

std::string augment_instruction(const std::string& instruction, std::uint64_t rng_seed, const Lexicon& lexicon) {
    Rng rng(mix_seed(rng_seed, 0xa06ull));
    int n = static_cast<int>(rng.range(0, 3));
    std::vector<int> kinds = {0, 1, 2};  // synonym, appearance, prefix
    rng.shuffle(kinds);
    kinds.resize(n);
    std::sort(kinds.begin(), kinds.end());  // apply in a fixed order

    std::string out = instruction;
    for (int kind : kinds) {
        if (kind == 0) {
            std::vector<std::string> present;
            for (const auto& [word, syns] : lexicon.verb_synonyms) {
                if (!syns.empty() && contains_word(out, word)) present.push_back(word);
            }
            if (present.empty()) continue;
            const auto& word = present[rng.bounded(present.size())];
            const auto& syns = lexicon.verb_synonyms.at(word);
            out = replace_word(out, word, syns[rng.bounded(syns.size())]);
        } else if (kind == 1) {
            std::vector<std::string> present;
            for (const auto& [cls, desc] : lexicon.appearance) {
                if (contains_word(out, cls)) present.push_back(cls);
            }
            if (present.empty()) continue;
            const auto& cls = present[rng.bounded(present.size())];
            out = replace_word(out, cls, lexicon.appearance.at(cls));
        } else {
            if (lexicon.context_prefixes.empty()) continue;
            out = lexicon.context_prefixes[rng.bounded(lexicon.context_prefixes.size())] + " " + out;
        }
    }
    return out;
}

Corpus generate_corpus(const GenConfig& config) {
    auto templates = propose_templates(config);
    if (templates.empty()) throw UnknownFamily("no template families configured");
    SceneSpec scene = config.scene();

    auto quotas = config.quotas;
    auto remaining = [&](bool train) {
        int n = 0;
        for (auto& [tier, q] : quotas) n += train ? q.train : q.test;
        return n;
    };

    Corpus corpus;
    int total_needed = remaining(true) + remaining(false);
    long long max_attempts = 2000LL * std::max(total_needed, 1);
    for (long long attempt = 0; attempt < max_attempts && remaining(true) + remaining(false) > 0; ++attempt) {
        const auto& tmpl = templates[attempt % templates.size()];
        std::uint64_t scene_seed = mix_seed(config.scene_seed_base, static_cast<std::uint64_t>(attempt));
        std::uint64_t rng_seed = mix_seed(config.gen_seed, static_cast<std::uint64_t>(attempt));
        Task task;
        try {
            task = instantiate_task(tmpl, scene, scene_seed, rng_seed);
        } catch (const UnsatisfiableSlot&) {
            continue;
        } catch (const PlanValidationFailed&) {
            continue;
        }
        auto it = quotas.find(task.tier);
        if (it == quotas.end()) continue;
        if (config.augment)
            task.instruction = augment_instruction(task.instruction, mix_seed(config.gen_seed, 0x777 + attempt),
                                                   Lexicon::defaults());
        if (it->second.train > 0) {
            corpus.train.push_back(std::move(task));
            --it->second.train;
        } else if (it->second.test > 0) {
            corpus.test.push_back(std::move(task));
            --it->second.test;
        }
    }
    for (const auto& [tier, q] : quotas) {
        if (q.train > 0 || q.test > 0)
            throw PlanValidationFailed(std::string("could not fill quota for tier ") + tier_name(tier));
    }
    return corpus;
}

}  // namespace spo::taskgen
