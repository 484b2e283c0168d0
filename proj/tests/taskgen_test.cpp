#include <doctest.h>

#include <set>

#include "spo/microhome/sim.hpp"
#include "spo/taskgen/templates.hpp"

using namespace spo::taskgen;
using namespace spo::microhome;

namespace {

GenConfig tiny_config() {
    GenConfig cfg;
    cfg.quotas = {{Tier::UltraShort, {4, 2}}, {Tier::Short, {3, 1}}, {Tier::Medium, {3, 1}}, {Tier::Long, {2, 1}}};
    return cfg;
}

}  // namespace

TEST_CASE("classify_difficulty boundaries") {
    CHECK(classify_difficulty(1) == Tier::UltraShort);
    CHECK(classify_difficulty(9) == Tier::UltraShort);
    CHECK(classify_difficulty(10) == Tier::Short);
    CHECK(classify_difficulty(19) == Tier::Short);
    CHECK(classify_difficulty(20) == Tier::Medium);
    CHECK(classify_difficulty(30) == Tier::Medium);
    CHECK(classify_difficulty(31) == Tier::Long);
    CHECK(classify_difficulty(58) == Tier::Long);
    CHECK_THROWS(classify_difficulty(0));
}

TEST_CASE("tiers partition the positive integers") {
    for (int len = 1; len <= 200; ++len) {
        int hits = 0;
        Tier t = classify_difficulty(len);
        for (Tier u : {Tier::UltraShort, Tier::Short, Tier::Medium, Tier::Long}) {
            if (u == t) ++hits;
        }
        CHECK(hits == 1);
    }
}

TEST_CASE("propose_templates covers the families") {
    GenConfig all;
    auto templates = propose_templates(all);
    CHECK(templates.size() >= 20);

    std::set<std::string> families;
    for (const auto& t : templates) families.insert(t.family);
    CHECK(families == std::set<std::string>{"move", "tidy", "cook", "multi"});

    GenConfig one;
    one.families = {"cook"};
    for (const auto& t : propose_templates(one)) CHECK(t.family == "cook");

    auto again = propose_templates(all);
    REQUIRE(again.size() == templates.size());
    for (std::size_t i = 0; i < templates.size(); ++i) CHECK(again[i].id == templates[i].id);

    GenConfig bad;
    bad.families = {"origami"};
    CHECK_THROWS_AS(propose_templates(bad), UnknownFamily);
}

TEST_CASE("template slots all appear in goal pattern or skeleton") {
    for (const auto& t : propose_templates(GenConfig{})) {
        CHECK(!t.skeleton.empty());
        for (const auto& slot : t.slots) {
            bool in_goal = false;
            for (const auto& g : t.goal_pattern) {
                if (g.find("{" + slot.name + "}") != std::string::npos) in_goal = true;
            }
            bool in_skel = false;
            for (const auto& m : t.skeleton) {
                if (m.a == slot.name || m.b == slot.name) in_skel = true;
            }
            CHECK((in_goal || in_skel));
        }
    }
}

TEST_CASE("each family's skeletons span all four tiers") {
    GenConfig all;
    std::map<std::string, std::pair<int, int>> span;
    for (const auto& t : propose_templates(all)) {
        auto& [lo, hi] = span.try_emplace(t.family, t.nominal_min, t.nominal_max).first->second;
        lo = std::min(lo, t.nominal_min);
        hi = std::max(hi, t.nominal_max);
    }
    for (const auto& [fam, range] : span) {
        CAPTURE(fam);
        CHECK(classify_difficulty(range.first) == Tier::UltraShort);
        CHECK(classify_difficulty(range.second) == Tier::Long);
    }
}

TEST_CASE("move template on a minimal scene yields the canonical plan and goal") {
    // Agent starts in the first room (livingroom); apple sits loose in the
    // kitchen, the only receptacle is the livingroom table.
    const char* text = R"(
room livingroom
room kitchen
class table room=livingroom count=1 props=surface
class apple room=kitchen count=1 props=grabbable
)";
    auto scene = SceneSpec::parse(text);
    GenConfig move_only;
    move_only.families = {"move"};
    auto tmpl = propose_templates(move_only).front();  // move_1
    Task task = instantiate_task(tmpl, scene, 7, 11);

    std::vector<std::string> plan;
    for (const auto& a : task.golden_plan) plan.push_back(a.str());
    CHECK(plan == std::vector<std::string>{"walk kitchen", "grab apple_1", "walk livingroom",
                                           "put apple_1 table_1", "done"});
    REQUIRE(task.goal.size() == 1);
    CHECK(task.goal[0] == GoalCondition{Predicate::ObjectIn, "apple_1", "table_1"});
    CHECK(task.tier == Tier::UltraShort);

    // goal equals the diff computed by independently executing the plan
    auto start = init_scene(7, scene);
    auto end = start;
    for (const auto& a : task.golden_plan) REQUIRE(!try_apply(end, a));
    CHECK(task.goal == state_diff(start, end));
}

TEST_CASE("instantiate_task fails cleanly when a slot has no candidates") {
    const char* stoveless = R"(
room kitchen
class counter room=kitchen count=1 props=surface
class apple room=kitchen count=1 props=grabbable,cookable
)";
    GenConfig cook_only;
    cook_only.families = {"cook"};
    auto tmpl = propose_templates(cook_only).front();
    CHECK_THROWS_AS(instantiate_task(tmpl, SceneSpec::parse(stoveless), 1, 1), UnsatisfiableSlot);
}

TEST_CASE("instantiate_task is deterministic") {
    GenConfig all;
    auto tmpl = propose_templates(all)[2];  // move_3
    auto a = instantiate_task(tmpl, default_scene(), 99, 123);
    auto b = instantiate_task(tmpl, default_scene(), 99, 123);
    CHECK(a == b);
    auto c = instantiate_task(tmpl, default_scene(), 99, 124);
    CHECK(a.id != c.id);
}

TEST_CASE("augment_instruction transformations") {
    const auto& lex = Lexicon::defaults();
    const std::string instr = "Put an apple on the table.";

    SUBCASE("appearance replacement rewrites the class word") {
        bool saw_appearance = false;
        for (std::uint64_t seed = 0; seed < 200 && !saw_appearance; ++seed) {
            auto out = augment_instruction(instr, seed, lex);
            if (out.find("red round fruit") != std::string::npos) saw_appearance = true;
        }
        CHECK(saw_appearance);
    }
    SUBCASE("identity when zero transformations are drawn") {
        bool saw_identity = false;
        for (std::uint64_t seed = 0; seed < 200 && !saw_identity; ++seed) {
            if (augment_instruction(instr, seed, lex) == instr) saw_identity = true;
        }
        CHECK(saw_identity);
    }
    SUBCASE("context prefixes prepend and keep the rest intact") {
        bool saw_prefix = false;
        for (std::uint64_t seed = 0; seed < 200 && !saw_prefix; ++seed) {
            auto out = augment_instruction(instr, seed, lex);
            for (const auto& p : lex.context_prefixes) {
                if (out.rfind(p, 0) == 0 && out.find("table") != std::string::npos) saw_prefix = true;
            }
        }
        CHECK(saw_prefix);
    }
    SUBCASE("deterministic per seed") {
        CHECK(augment_instruction(instr, 42, lex) == augment_instruction(instr, 42, lex));
    }
    SUBCASE("classes remain recoverable through the appearance inverse") {
        auto out = to_lower(augment_instruction("Take the salmon to the counter.", 7, lex));
        bool direct = contains_word(out, "salmon");
        auto described = lex.classes_described_in(out);
        bool via_inverse = std::find(described.begin(), described.end(), "salmon") != described.end();
        CHECK((direct || via_inverse));
    }
}

TEST_CASE("generated corpus validates and covers all tiers") {
    auto cfg = tiny_config();
    auto corpus = generate_corpus(cfg);
    CHECK(corpus.train.size() == 12);
    CHECK(corpus.test.size() == 5);

    std::set<Tier> tiers;
    auto scene = cfg.scene();
    std::vector<Task> all = corpus.train;
    all.insert(all.end(), corpus.test.begin(), corpus.test.end());
    std::set<std::string> ids;
    for (const auto& task : all) {
        tiers.insert(task.tier);
        CHECK(ids.insert(task.id).second);
        CHECK(task.tier == classify_difficulty(static_cast<int>(task.golden_plan.size())));

        // golden plan replayed from the scene seed satisfies every goal condition
        auto state = init_scene(task.scene_seed, scene);
        for (const auto& a : task.golden_plan) REQUIRE(!try_apply(state, a));
        auto report = check_goal(state, task.goal);
        CHECK(report.satisfied.size() == report.total);
        CHECK(report.total == task.goal.size());
    }
    CHECK(tiers.size() == 4);

    // determinism: the same config generates byte-identical tasks
    auto corpus2 = generate_corpus(cfg);
    CHECK(corpus.train == corpus2.train);
    CHECK(corpus.test == corpus2.test);
}

TEST_CASE("tasks round-trip through jsonl") {
    auto cfg = tiny_config();
    cfg.quotas = {{Tier::UltraShort, {2, 1}}, {Tier::Short, {1, 0}}, {Tier::Medium, {1, 0}}, {Tier::Long, {1, 0}}};
    auto corpus = generate_corpus(cfg);
    std::string path = "taskgen_roundtrip_test.jsonl";
    save_tasks(path, corpus.train);
    auto loaded = load_tasks(path);
    CHECK(loaded == corpus.train);
    std::remove(path.c_str());
}
