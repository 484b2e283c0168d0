#include <doctest.h>

#include <cmath>

#include "spo/metrics/metrics.hpp"
#include "spo/microhome/sim.hpp"
#include "spo/rng.hpp"
#include "spo/taskgen/templates.hpp"

using namespace spo;
using namespace spo::metrics;

namespace {

// Replays a fixed action list, then pads with done.
Decider scripted(std::vector<microhome::Action> plan) {
    auto i = std::make_shared<std::size_t>(0);
    return [plan = std::move(plan), i](const policy::PolicyModel& model,
                                       const policy::Context&) -> policy::Response {
        policy::Response r;
        microhome::Action a{microhome::Verb::Done, "", ""};
        if (*i < plan.size()) a = plan[(*i)++];
        int id = model.vocab.find(a.str());
        REQUIRE(id >= 0);
        r.tokens = {id, model.vocab.end_id()};
        r.final_action = a;
        return r;
    };
}

struct Fixture {
    taskgen::GenConfig gc;
    taskgen::Corpus corpus;
    microhome::SceneSpec scene;
    policy::FeatureSpace fs{12};

    Fixture() {
        gc.quotas = {{taskgen::Tier::UltraShort, {4, 0}},
                     {taskgen::Tier::Short, {2, 0}},
                     {taskgen::Tier::Medium, {1, 0}},
                     {taskgen::Tier::Long, {0, 0}}};
        corpus = generate_corpus(gc);
        scene = gc.scene();
    }

    EpisodeTrace run(const Decider& d, const taskgen::Task& t, int budget) const {
        return rollout(d, t, scene, taskgen::Lexicon::defaults(), fs, 24, budget);
    }
};

}  // namespace

TEST_CASE("golden-plan replay achieves every goal condition") {
    Fixture f;
    for (const auto& task : f.corpus.train) {
        auto trace = f.run(scripted(task.golden_plan), task, budget_for(task, {}));
        CHECK(gcr(trace, task.goal) == doctest::Approx(1.0));
        CHECK(sr(trace, task.goal) == 1);
        CHECK(trace.terminated_by == Termination::DoneAction);
        CHECK(trace.steps_used == static_cast<int>(task.golden_plan.size()));
    }
}

TEST_CASE("rollout terminates within budget for the untrained policy") {
    Fixture f;
    policy::PolicyParams zero(f.fs.dim());
    auto decider = greedy_decider(zero);
    for (const auto& task : f.corpus.train) {
        int budget = budget_for(task, {});
        auto trace = f.run(decider, task, budget);
        CHECK(trace.steps_used <= budget);
        CHECK(trace.steps_used >= 1);
    }
}

TEST_CASE("rollout is deterministic for the same policy and task") {
    Fixture f;
    policy::PolicyParams zero(f.fs.dim());
    Rng rng(5);
    for (auto& w : zero.w) w = 0.3 * (2 * rng.next_double() - 1);
    auto decider = greedy_decider(zero);
    const auto& task = f.corpus.train[1];
    auto a = f.run(decider, task, 40);
    auto b = f.run(decider, task, 40);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].action == b.steps[i].action);
        CHECK(a.steps[i].accepted == b.steps[i].accepted);
    }
    CHECK(a.final_state == b.final_state);

    // executed actions replay to the final state
    auto replay = microhome::init_scene(task.scene_seed, f.scene);
    for (const auto& s : a.steps) {
        if (s.action.verb == microhome::Verb::Done) {
            replay.tick += 1;
            continue;
        }
        if (s.accepted) REQUIRE(!microhome::try_apply(replay, s.action));
    }
    CHECK(replay == a.final_state);
}

TEST_CASE("three consecutive rejections stop the episode early") {
    Fixture f;
    const auto& task = f.corpus.train[0];
    // walk to a room the agent is already in: rejected forever
    auto first_room = f.scene.rooms.front();
    std::vector<microhome::Action> stuck(10, {microhome::Verb::Walk, first_room, ""});
    auto trace = f.run(scripted(stuck), task, 50);
    CHECK(trace.terminated_by == Termination::RepeatedFailure);
    CHECK(trace.steps_used == 3);
}

TEST_CASE("gcr counts satisfied conditions and sr is its indicator") {
    Fixture f;
    // find a task with at least 3 goal conditions and execute a prefix
    for (const auto& task : f.corpus.train) {
        if (task.goal.size() < 3) continue;
        auto half_plan = task.golden_plan;
        half_plan.resize(half_plan.size() / 2);
        auto trace = f.run(scripted(half_plan), task, 80);
        double g = gcr(trace, task.goal);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        CHECK(sr(trace, task.goal) == (g == 1.0 ? 1 : 0));

        // empty run on a change-requiring goal scores zero
        auto idle = f.run(scripted({}), task, 5);
        CHECK(gcr(idle, task.goal) == doctest::Approx(0.0));
        CHECK(sr(idle, task.goal) == 0);
        return;
    }
    FAIL("fixture corpus has no task with 3+ goal conditions");
}

TEST_CASE("sr equals one exactly when gcr equals one on random traces") {
    Fixture f;
    Rng rng(99);
    int full = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto& task = f.corpus.train[rng.bounded(f.corpus.train.size())];
        // random prefix of the golden plan, sometimes the whole plan
        auto plan = task.golden_plan;
        plan.resize(rng.bounded(plan.size() + 1));
        auto trace = f.run(scripted(plan), task, 100);
        double g = gcr(trace, task.goal);
        int s = sr(trace, task.goal);
        CHECK(((s == 1) == (g == 1.0)));
        full += s;
    }
    CHECK(full > 0);  // some prefixes complete the task
}

TEST_CASE("budget rule takes the capped multiple of the plan length") {
    taskgen::Task t;
    t.golden_plan.resize(12);
    CHECK(budget_for(t, {}) == 24);
    t.golden_plan.resize(55);
    CHECK(budget_for(t, {}) == 80);
    CHECK(budget_for(t, {2, 80, 30}) == 30);
}

TEST_CASE("evaluate_suite aggregates per tier and matches hand arithmetic") {
    Fixture f;
    // golden replay: every tier reports GCR = SR = 1
    std::map<std::string, std::vector<microhome::Action>> plans;
    auto decider = [&](const policy::PolicyModel& model, const policy::Context& ctx) -> policy::Response {
        auto& left = plans[ctx.task_id];
        policy::Response r;
        microhome::Action a{microhome::Verb::Done, "", ""};
        if (!left.empty()) {
            a = left.front();
            left.erase(left.begin());
        }
        int id = model.vocab.find(a.str());
        REQUIRE(id >= 0);
        r.tokens = {id, model.vocab.end_id()};
        r.final_action = a;
        return r;
    };
    for (const auto& t : f.corpus.train) plans[t.id] = t.golden_plan;
    auto report = evaluate_suite(decider, f.corpus.train, f.scene, taskgen::Lexicon::defaults(), f.fs, 24,
                                 {}, 1);
    CHECK(report.tiers.size() == 3);
    for (const auto& tr : report.tiers) {
        CHECK(tr.mean_gcr == doctest::Approx(1.0));
        CHECK(tr.sr == doctest::Approx(1.0));
    }
    CHECK(report.avg_gcr_tiers == doctest::Approx(1.0));
    CHECK(report.avg_sr_tasks == doctest::Approx(1.0));

    // single-task suite equals that task's metrics
    policy::PolicyParams zero(f.fs.dim());
    auto g = greedy_decider(zero);
    std::vector single{f.corpus.train[0]};
    auto rep1 = evaluate_suite(g, single, f.scene, taskgen::Lexicon::defaults(), f.fs, 24, {}, 1);
    auto trace = f.run(g, single[0], budget_for(single[0], {}));
    CHECK(rep1.tiers.size() == 1);
    CHECK(rep1.tiers[0].task_count == 1);
    CHECK(rep1.tiers[0].mean_gcr == doctest::Approx(gcr(trace, single[0].goal)));
    CHECK(rep1.avg_gcr_tiers == doctest::Approx(rep1.avg_gcr_tasks));

    // permuting tasks leaves the report unchanged
    auto shuffled = f.corpus.train;
    std::reverse(shuffled.begin(), shuffled.end());
    auto rep_a = evaluate_suite(g, f.corpus.train, f.scene, taskgen::Lexicon::defaults(), f.fs, 24, {}, 1);
    auto rep_b = evaluate_suite(g, shuffled, f.scene, taskgen::Lexicon::defaults(), f.fs, 24, {}, 1);
    CHECK(report_text(rep_a) == report_text(rep_b));
    CHECK(report_json(rep_a) == report_json(rep_b));
}

TEST_CASE("two-tier fixture averages match hand computation") {
    Fixture f;
    // pick one ultra-short and one short task, replay half plans
    const taskgen::Task* ultra = nullptr;
    const taskgen::Task* shorter = nullptr;
    for (const auto& t : f.corpus.train) {
        if (t.tier == taskgen::Tier::UltraShort && !ultra) ultra = &t;
        if (t.tier == taskgen::Tier::Short && !shorter) shorter = &t;
    }
    REQUIRE(ultra);
    REQUIRE(shorter);
    std::vector<taskgen::Task> suite = {*ultra, *shorter};

    std::map<std::string, std::vector<microhome::Action>> plans;
    plans[ultra->id] = ultra->golden_plan;  // full -> gcr 1
    auto half = shorter->golden_plan;
    half.resize(half.size() / 2);
    plans[shorter->id] = half;
    auto decider = [&](const policy::PolicyModel& model, const policy::Context& ctx) -> policy::Response {
        auto& left = plans[ctx.task_id];
        policy::Response r;
        microhome::Action a{microhome::Verb::Done, "", ""};
        if (!left.empty()) {
            a = left.front();
            left.erase(left.begin());
        }
        r.tokens = {model.vocab.find(a.str()), model.vocab.end_id()};
        r.final_action = a;
        return r;
    };

    auto report = evaluate_suite(decider, suite, f.scene, taskgen::Lexicon::defaults(), f.fs, 24, {}, 1);
    // hand-compute the short task's partial gcr through the trace
    plans[shorter->id] = half;
    auto trace = f.run(scripted(half), *shorter, budget_for(*shorter, {}));
    double short_gcr = gcr(trace, shorter->goal);
    REQUIRE(report.tiers.size() == 2);
    CHECK(report.tiers[0].mean_gcr == doctest::Approx(1.0));
    CHECK(report.tiers[1].mean_gcr == doctest::Approx(short_gcr));
    CHECK(report.avg_gcr_tiers == doctest::Approx(0.5 * (1.0 + short_gcr)));
    CHECK(report.avg_gcr_tasks == doctest::Approx(0.5 * (1.0 + short_gcr)));
    CHECK(report.avg_sr_tiers == doctest::Approx(0.5 * (1 + (short_gcr == 1.0 ? 1 : 0))));
}
