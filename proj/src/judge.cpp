#include "spo/judge/judge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spo/microhome/sim.hpp"

namespace spo::judge {

using policy::Context;
using policy::PolicyModel;
using policy::Response;
using policy::TokenKind;

namespace {

std::set<std::string> mention_classes(const PolicyModel& model, const Response& r) {
    std::set<std::string> out;
    for (std::size_t i = 0; i + 2 < r.tokens.size(); ++i) {
        const auto& t = model.vocab.token(r.tokens[i]);
        if (t.kind == TokenKind::Mention) out.insert(t.mention_class);
    }
    return out;
}

std::set<std::string> grounded_classes(const Context& ctx) {
    std::set<std::string> out;
    for (const auto& v : ctx.obs.visible) out.insert(v.class_name);
    for (const auto& id : ctx.obs.held) {
        auto it = ctx.state.objects.find(id);
        if (it != ctx.state.objects.end()) out.insert(it->second.class_name);
    }
    return out;
}

}  // namespace

double score_text(const PolicyModel& model, const Context& ctx, const Response& response) {
    // task relevance: goal objects whose class is mentioned in the reasoning
    std::set<std::string> subjects;
    for (const auto& g : ctx.goal) subjects.insert(g.subject);
    double relevance = 0.0;
    if (!subjects.empty()) {
        auto mentioned = mention_classes(model, response);
        int hit = 0;
        for (const auto& id : subjects) {
            auto it = ctx.state.objects.find(id);
            if (it != ctx.state.objects.end() && mentioned.count(it->second.class_name)) ++hit;
        }
        relevance = static_cast<double>(hit) / static_cast<double>(subjects.size());
    }

    // historical consistency of the final action
    double consistency = 0.0;
    microhome::WorldState scratch = ctx.state;
    if (!microhome::try_apply(scratch, response.final_action)) {
        bool repeated = std::find(ctx.history.begin(), ctx.history.end(), response.final_action) !=
                        ctx.history.end();
        consistency = repeated ? 0.5 : 1.0;
    }
    return 0.5 * relevance + 0.5 * consistency;
}

double score_image(const PolicyModel& model, const Context& ctx, const Response& response) {
    auto grounded = grounded_classes(ctx);
    int total = 0, hit = 0;
    for (std::size_t i = 0; i + 2 < response.tokens.size(); ++i) {
        const auto& t = model.vocab.token(response.tokens[i]);
        if (t.kind != TokenKind::Mention) continue;
        ++total;
        if (grounded.count(t.mention_class)) ++hit;
    }
    if (total == 0) return 0.0;  // no visual grounding at all
    return static_cast<double>(hit) / static_cast<double>(total);
}

double combine_weighted(double s_text, double s_image, double w1, double w2) {
    return w1 * s_text + w2 * s_image;
}

ScoreTriple score_overall(const PolicyModel& model, const Context& ctx, const Response& response,
                          const JudgeConfig& cfg) {
    ScoreTriple s;
    s.s_text = score_text(model, ctx, response);
    s.s_image = score_image(model, ctx, response);
    switch (cfg.criteria) {
        case Criteria::TextOnly:
            s.overall = s.s_text;
            return s;
        case Criteria::ImageOnly:
            s.overall = s.s_image;
            return s;
        case Criteria::Both:
            break;
    }
    if (cfg.mode == CombineMode::WeightedSum) {
        if (!(cfg.w1 >= 0.0 && cfg.w1 <= 1.0) || !(cfg.w2 >= 0.0 && cfg.w2 <= 1.0) || cfg.w1 + cfg.w2 <= 0.0)
            throw InvalidJudgeConfig("weighted mode needs weights in [0,1] with w1+w2 > 0");
        s.overall = combine_weighted(s.s_text, s.s_image, cfg.w1, cfg.w2) / (cfg.w1 + cfg.w2);
    } else {
        if (!(cfg.gamma > 0.0)) throw InvalidJudgeConfig("direct mode needs gamma > 0");
        s.overall = s.s_text * std::pow(s.s_image, cfg.gamma);
    }
    return s;
}

}  // namespace spo::judge
