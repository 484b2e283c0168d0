#include <doctest.h>

#include <cmath>
#include <numeric>

#include "spo/judge/judge.hpp"
#include "spo/microhome/sim.hpp"
#include "spo/rng.hpp"
#include "spo/taskgen/templates.hpp"

using namespace spo;
using namespace spo::judge;
using spo::microhome::SceneSpec;

namespace {

const char* kJudgeScene = R"(
room kitchen
room livingroom
class fridge room=kitchen count=1 props=container,openable start=closed
class counter room=kitchen count=1 props=surface
class table room=livingroom count=1 props=surface
class apple room=kitchen count=1 props=grabbable place=floor
class salmon room=kitchen count=1 props=grabbable place=fridge
class bread room=kitchen count=1 props=grabbable place=counter
)";

struct JudgeWorld {
    microhome::WorldState state;
    taskgen::Task task;
    policy::PolicyModel model;
    policy::Context ctx;

    JudgeWorld() {
        state = microhome::init_scene(2, SceneSpec::parse(kJudgeScene));
        task.id = "judge_fixture";
        task.instruction = "Move the apple and the bread to the table.";
        task.scene_seed = 2;
        task.goal = {{microhome::Predicate::ObjectIn, "apple_1", "table_1"},
                     {microhome::Predicate::ObjectIn, "bread_1", "table_1"}};
        model = policy::PolicyModel::for_scene(state, policy::FeatureSpace{12}, 24);
        ctx = policy::make_context(task, state, {}, taskgen::Lexicon::defaults());
    }

    policy::Response response(const std::vector<std::string>& names) const {
        policy::Response r;
        for (const auto& n : names) {
            int id = model.vocab.find(n);
            REQUIRE(id >= 0);
            r.tokens.push_back(id);
        }
        r.final_action = model.vocab.token(r.tokens.back()).action;
        r.tokens.push_back(model.vocab.end_id());
        return r;
    }
};

}  // namespace

TEST_CASE("score_text combines relevance and consistency") {
    JudgeWorld w;
    // every goal object mentioned, applicable and novel final action
    auto good = w.response({"m:apple", "m:bread", "grab apple_1"});
    CHECK(score_text(w.model, w.ctx, good) == doctest::Approx(1.0));

    // nothing mentioned, inapplicable action (apple is not inside the fridge)
    auto bad = w.response({"then", "grab salmon_1"});
    CHECK(score_text(w.model, w.ctx, bad) == doctest::Approx(0.0));

    // one of two goal objects mentioned, applicable novel action
    auto half = w.response({"m:apple", "grab apple_1"});
    CHECK(score_text(w.model, w.ctx, half) == doctest::Approx(0.75));
}

TEST_CASE("score_text halves consistency for redundant repeats") {
    JudgeWorld w;
    auto walk = microhome::Action::parse("walk livingroom");
    auto state = w.state;
    REQUIRE(!microhome::try_apply(state, walk));
    REQUIRE(!microhome::try_apply(state, microhome::Action::parse("walk kitchen")));
    auto ctx = policy::make_context(w.task, state, {walk, microhome::Action::parse("walk kitchen")},
                                    taskgen::Lexicon::defaults());
    // applicable again, but a literal repeat of a completed step
    auto rep = w.response({"m:apple", "m:bread", "walk livingroom"});
    CHECK(score_text(w.model, ctx, rep) == doctest::Approx(0.5 + 0.25));
}

TEST_CASE("score_image measures grounded mentions") {
    JudgeWorld w;
    auto all_visible = w.response({"m:apple", "m:bread", "grab apple_1"});
    CHECK(score_image(w.model, w.ctx, all_visible) == doctest::Approx(1.0));

    // salmon sits inside the closed fridge: a pure hallucination
    auto unseen = w.response({"m:salmon", "grab apple_1"});
    CHECK(score_image(w.model, w.ctx, unseen) == doctest::Approx(0.0));

    auto two_of_three = w.response({"m:apple", "m:bread", "m:salmon", "grab apple_1"});
    CHECK(score_image(w.model, w.ctx, two_of_three) == doctest::Approx(2.0 / 3.0));

    // no mentions at all counts as no visual grounding
    auto mute = w.response({"then", "grab apple_1"});
    CHECK(score_image(w.model, w.ctx, mute) == doctest::Approx(0.0));

    // held objects stay grounded
    auto state = w.state;
    REQUIRE(!microhome::try_apply(state, microhome::Action::parse("grab apple_1")));
    auto ctx = policy::make_context(w.task, state, {microhome::Action::parse("grab apple_1")},
                                    taskgen::Lexicon::defaults());
    auto held = w.response({"m:apple", "put apple_1 counter_1"});
    CHECK(score_image(w.model, ctx, held) == doctest::Approx(1.0));
}

TEST_CASE("combine_weighted arithmetic") {
    CHECK(combine_weighted(0.8, 0.6, 1.0, 0.5) == doctest::Approx(1.1).epsilon(1e-15));
    for (double s : {0.0, 0.3, 1.0}) CHECK(combine_weighted(s, s, 1.0, 1.0) == doctest::Approx(2 * s));
    CHECK(combine_weighted(0.0, 0.0, 0.7, 0.9) == 0.0);
}

TEST_CASE("score_overall modes") {
    JudgeWorld w;
    auto fluent_hallucination = w.response({"m:salmon", "grab apple_1"});  // text-high, image-zero
    JudgeConfig direct;
    auto s = score_overall(w.model, w.ctx, fluent_hallucination, direct);
    CHECK(s.s_image == doctest::Approx(0.0));
    CHECK(s.overall == doctest::Approx(0.0));  // the gate forces zero

    auto perfect = w.response({"m:apple", "m:bread", "grab apple_1"});
    CHECK(score_overall(w.model, w.ctx, perfect, direct).overall == doctest::Approx(1.0));

    JudgeConfig weighted;
    weighted.mode = CombineMode::WeightedSum;
    weighted.w1 = weighted.w2 = 1.0;
    auto two_of_three = w.response({"m:apple", "m:bread", "m:salmon", "grab apple_1"});
    auto sw = score_overall(w.model, w.ctx, two_of_three, weighted);
    CHECK(sw.overall == doctest::Approx(0.5 * (sw.s_text + sw.s_image)));

    // the documented example: s_text 0.8, s_image 0.6 under equal weights
    CHECK(0.5 * combine_weighted(0.8, 0.6, 1.0, 1.0) == doctest::Approx(0.7));

    JudgeConfig bad;
    bad.mode = CombineMode::WeightedSum;
    bad.w1 = -0.2;
    CHECK_THROWS_AS(score_overall(w.model, w.ctx, perfect, bad), InvalidJudgeConfig);
}

TEST_CASE("criteria ablation switches") {
    JudgeWorld w;
    auto r = w.response({"m:apple", "m:salmon", "grab apple_1"});
    JudgeConfig text_only;
    text_only.criteria = Criteria::TextOnly;
    JudgeConfig image_only;
    image_only.criteria = Criteria::ImageOnly;
    auto st = score_overall(w.model, w.ctx, r, text_only);
    auto si = score_overall(w.model, w.ctx, r, image_only);
    CHECK(st.overall == doctest::Approx(st.s_text));
    CHECK(si.overall == doctest::Approx(si.s_image));
}

TEST_CASE("judge scores are deterministic and bounded") {
    JudgeWorld w;
    policy::PolicyParams params(w.model.features.dim());
    Rng rng(77);
    for (auto& x : params.w) x = rng.next_double() - 0.5;
    JudgeConfig cfg;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto r = policy::sample_response(w.model, params, w.ctx, {}, seed);
        auto a = score_overall(w.model, w.ctx, r, cfg);
        auto b = score_overall(w.model, w.ctx, r, cfg);
        CHECK(a == b);
        for (double v : {a.s_text, a.s_image, a.overall}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        if (a.s_image == 0.0) CHECK(a.overall == 0.0);  // direct-mode gating
    }
}

TEST_CASE("adding a grounded goal-object mention never lowers scores") {
    JudgeWorld w;
    policy::PolicyParams params(w.model.features.dim());
    Rng rng(123);
    for (auto& x : params.w) x = rng.next_double() - 0.5;
    int apple_mention = w.model.vocab.find("m:apple");
    REQUIRE(apple_mention >= 0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto r = policy::sample_response(w.model, params, w.ctx, {}, 5000 + seed);
        auto extended = r;
        extended.tokens.insert(extended.tokens.begin(), apple_mention);
        CHECK(score_text(w.model, w.ctx, extended) >= score_text(w.model, w.ctx, r));
        CHECK(score_image(w.model, w.ctx, extended) >= score_image(w.model, w.ctx, r));
    }
}

TEST_CASE("weight scaling preserves the weighted-mode ranking") {
    JudgeWorld w;
    std::vector<policy::Response> rs = {
        w.response({"m:apple", "grab apple_1"}),
        w.response({"m:apple", "m:bread", "grab apple_1"}),
        w.response({"m:salmon", "grab apple_1"}),
        w.response({"then", "grab salmon_1"}),
        w.response({"m:apple", "m:bread", "m:salmon", "grab apple_1"}),
    };
    auto ranking = [&](double w1, double w2) {
        std::vector<std::size_t> order(rs.size());
        std::vector<double> score(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            score[i] = combine_weighted(score_text(w.model, w.ctx, rs[i]), score_image(w.model, w.ctx, rs[i]),
                                        w1, w2);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] > score[b]; });
        return order;
    };
    CHECK(ranking(1.0, 0.5) == ranking(0.4, 0.2));
    CHECK(ranking(0.8, 0.8) == ranking(0.2, 0.2));
}
