#include "spo/pairbuilder/pairbuilder.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spo/microhome/sim.hpp"
#include "spo/parallel.hpp"
#include "spo/rng.hpp"

namespace spo::pairbuilder {

using microhome::Action;
using nlohmann::json;

const char* category_name(NegCategory c) {
    switch (c) {
        case NegCategory::HqDiffAction: return "HQ_DIFF_ACTION";
        case NegCategory::LqDiffAction: return "LQ_DIFF_ACTION";
        case NegCategory::LqSameAction: return "LQ_SAME_ACTION";
        case NegCategory::BestWorstBaseline: return "BEST_WORST_BASELINE";
    }
    return "?";
}

NegCategory category_from_name(const std::string& name) {
    for (auto c : {NegCategory::HqDiffAction, NegCategory::LqDiffAction, NegCategory::LqSameAction,
                   NegCategory::BestWorstBaseline}) {
        if (name == category_name(c)) return c;
    }
    throw std::invalid_argument("unknown pair category: " + name);
}

const char* pair_mode_name(PairMode m) {
    switch (m) {
        case PairMode::SpoAll: return "SPO_ALL";
        case PairMode::SpoHqOnly: return "SPO_HQ_ONLY";
        case PairMode::SpoLqDiffOnly: return "SPO_LQ_DIFF_ONLY";
        case PairMode::SpoLqSameOnly: return "SPO_LQ_SAME_ONLY";
        case PairMode::BestWorst: return "BEST_WORST";
    }
    return "?";
}

PairMode pair_mode_from_name(const std::string& name) {
    for (auto m : {PairMode::SpoAll, PairMode::SpoHqOnly, PairMode::SpoLqDiffOnly, PairMode::SpoLqSameOnly,
                   PairMode::BestWorst}) {
        if (name == pair_mode_name(m)) return m;
    }
    throw std::invalid_argument("unknown pair mode: " + name);
}

int select_positive(const SampleSet& set) {
    const auto& samples = set.samples;
    if (samples.size() < 2) throw std::invalid_argument("select_positive needs K >= 2 samples");

    double best_score = samples[0].scores.overall;
    for (const auto& s : samples) best_score = std::max(best_score, s.scores.overall);

    std::map<Action, int> freq;
    for (const auto& s : samples) freq[s.response.final_action] += 1;

    int best = -1, best_freq = -1;
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        if (samples[static_cast<std::size_t>(i)].scores.overall != best_score) continue;
        int f = freq[samples[static_cast<std::size_t>(i)].response.final_action];
        if (f > best_freq) {
            best = i;
            best_freq = f;
        }
    }
    return best;
}

std::vector<NegativePick> select_negatives(const SampleSet& set, int positive_index, double margin) {
    const auto& samples = set.samples;
    const auto& pos = samples[static_cast<std::size_t>(positive_index)];
    const double threshold = pos.scores.overall - margin;
    const Action& pos_action = pos.response.final_action;

    int hq = -1, lq_diff = -1, lq_same = -1;
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        if (i == positive_index) continue;
        const auto& s = samples[static_cast<std::size_t>(i)];
        const bool same_action = s.response.final_action == pos_action;
        if (s.scores.overall >= threshold) {
            if (!same_action &&
                (hq < 0 || s.scores.overall > samples[static_cast<std::size_t>(hq)].scores.overall))
                hq = i;
        } else if (!same_action) {
            if (lq_diff < 0 || s.scores.overall < samples[static_cast<std::size_t>(lq_diff)].scores.overall)
                lq_diff = i;
        } else {
            if (lq_same < 0 || s.scores.overall < samples[static_cast<std::size_t>(lq_same)].scores.overall)
                lq_same = i;
        }
    }
    std::vector<NegativePick> out;
    if (hq >= 0) out.push_back({hq, NegCategory::HqDiffAction});
    if (lq_diff >= 0) out.push_back({lq_diff, NegCategory::LqDiffAction});
    if (lq_same >= 0) out.push_back({lq_same, NegCategory::LqSameAction});
    return out;
}

std::vector<SelectedPair> select_pairs(const SampleSet& set, PairMode mode, double margin) {
    const auto& samples = set.samples;
    std::vector<SelectedPair> out;
    if (samples.size() < 2) return out;

    if (mode == PairMode::BestWorst) {
        int best = 0, worst = 0;
        for (int i = 1; i < static_cast<int>(samples.size()); ++i) {
            if (samples[static_cast<std::size_t>(i)].scores.overall >
                samples[static_cast<std::size_t>(best)].scores.overall)
                best = i;
            if (samples[static_cast<std::size_t>(i)].scores.overall <
                samples[static_cast<std::size_t>(worst)].scores.overall)
                worst = i;
        }
        if (samples[static_cast<std::size_t>(best)].response.tokens !=
            samples[static_cast<std::size_t>(worst)].response.tokens)
            out.push_back({best, worst, NegCategory::BestWorstBaseline});
        return out;
    }

    int pos = select_positive(set);
    for (const auto& pick : select_negatives(set, pos, margin)) {
        bool wanted = mode == PairMode::SpoAll ||
                      (mode == PairMode::SpoHqOnly && pick.category == NegCategory::HqDiffAction) ||
                      (mode == PairMode::SpoLqDiffOnly && pick.category == NegCategory::LqDiffAction) ||
                      (mode == PairMode::SpoLqSameOnly && pick.category == NegCategory::LqSameAction);
        if (wanted) out.push_back({pos, pick.index, pick.category});
    }
    return out;
}

std::vector<int> harvest_steps(int plan_length, int contexts_per_task) {
    std::vector<int> steps;
    if (plan_length <= 0 || contexts_per_task <= 0) return steps;
    if (contexts_per_task >= plan_length) {
        for (int s = 0; s < plan_length; ++s) steps.push_back(s);
        return steps;
    }
    for (int j = 0; j < contexts_per_task; ++j)
        steps.push_back(static_cast<int>(static_cast<long long>(j) * plan_length / contexts_per_task));
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

PreferenceDataset build_pairs(const std::vector<taskgen::Task>& tasks, const microhome::SceneSpec& scene,
                              const policy::PolicyParams& params, const judge::ResponseScorer& scorer,
                              const taskgen::Lexicon& lexicon, const HarvestConfig& cfg) {
    if (cfg.k < 2) throw std::invalid_argument("harvest needs K >= 2");

    struct TaskResult {
        std::vector<PreferencePair> pairs;
        long contexts = 0;
        long skipped = 0;
    };
    std::vector<TaskResult> results(tasks.size());

    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t ti) {
        const auto& task = tasks[ti];
        auto& res = results[ti];
        auto state = microhome::init_scene(task.scene_seed, scene);
        auto model = std::make_shared<const policy::PolicyModel>(
            policy::PolicyModel::for_scene(state, cfg.features, cfg.max_tokens));

        auto steps = harvest_steps(static_cast<int>(task.golden_plan.size()), cfg.contexts_per_task);
        std::size_t next = 0;
        std::vector<Action> history;
        const std::uint64_t task_seed = mix_seed(cfg.sampling_seed, hash_str(task.id));

        for (int s = 0; s <= static_cast<int>(task.golden_plan.size()) && next < steps.size(); ++s) {
            if (steps[next] == s) {
                ++next;
                ++res.contexts;
                auto ctx = std::make_shared<const policy::Context>(
                    policy::make_context(task, state, history, lexicon));

                SampleSet set;
                set.context = ctx;
                for (int k = 0; k < cfg.k; ++k) {
                    ScoredSample sample;
                    sample.response = policy::sample_response(
                        *model, params, *ctx, cfg.sampling,
                        mix_seed(task_seed, (static_cast<std::uint64_t>(s) << 20) | static_cast<std::uint64_t>(k)));
                    sample.scores = scorer.score(*model, *ctx, sample.response);
                    sample.response.scores = sample.scores;
                    set.samples.push_back(std::move(sample));
                }

                auto selected = select_pairs(set, cfg.mode, cfg.margin);
                if (selected.empty()) ++res.skipped;
                for (const auto& sp : selected) {
                    PreferencePair pair;
                    pair.task_id = task.id;
                    pair.step = s;
                    pair.model = model;
                    pair.context = ctx;
                    pair.chosen = set.samples[static_cast<std::size_t>(sp.chosen)].response.tokens;
                    pair.rejected = set.samples[static_cast<std::size_t>(sp.rejected)].response.tokens;
                    pair.category = sp.category;
                    pair.s_chosen = set.samples[static_cast<std::size_t>(sp.chosen)].scores.overall;
                    pair.s_rejected = set.samples[static_cast<std::size_t>(sp.rejected)].scores.overall;
                    res.pairs.push_back(std::move(pair));
                }
            }
            if (s < static_cast<int>(task.golden_plan.size())) {
                const auto& a = task.golden_plan[static_cast<std::size_t>(s)];
                if (microhome::try_apply(state, a))
                    throw std::runtime_error("golden plan step failed during harvest for task " + task.id);
                history.push_back(a);
            }
        }
    });

    PreferenceDataset data;
    for (auto& res : results) {
        data.stats.contexts_total += res.contexts;
        data.stats.contexts_skipped += res.skipped;
        for (auto& p : res.pairs) data.pairs.push_back(std::move(p));
    }

    std::set<std::pair<std::string, std::vector<int>>> seen_rejected;
    for (const auto& p : data.pairs) {
        switch (p.category) {
            case NegCategory::HqDiffAction: ++data.stats.hq_diff; break;
            case NegCategory::LqDiffAction: ++data.stats.lq_diff; break;
            case NegCategory::LqSameAction: ++data.stats.lq_same; break;
            case NegCategory::BestWorstBaseline: ++data.stats.best_worst; break;
        }
        auto key = std::make_pair(p.task_id + "#" + std::to_string(p.step), p.rejected);
        if (!seen_rejected.insert(key).second) ++data.stats.duplicate_rejected;
    }
    return data;
}

void save_pairs(const std::string& path, const PreferenceDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& p : data.pairs) {
        json chosen = json::array(), rejected = json::array();
        for (int t : p.chosen) chosen.push_back(p.model->vocab.token(t).name);
        for (int t : p.rejected) rejected.push_back(p.model->vocab.token(t).name);
        json j{{"task_id", p.task_id},
               {"step", p.step},
               {"context_digest", policy::context_digest(*p.context)},
               {"chosen_tokens", chosen},
               {"rejected_tokens", rejected},
               {"category", category_name(p.category)},
               {"s_chosen", p.s_chosen},
               {"s_rejected", p.s_rejected}};
        out << j.dump() << "\n";
    }
}

PreferenceDataset load_pairs(const std::string& path, const std::vector<taskgen::Task>& tasks,
                             const microhome::SceneSpec& scene, const taskgen::Lexicon& lexicon,
                             const policy::FeatureSpace& features, int max_tokens) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);

    std::map<std::string, const taskgen::Task*> by_id;
    for (const auto& t : tasks) by_id[t.id] = &t;

    // contexts rebuilt by replaying golden-plan prefixes; cached per (task, step)
    std::map<std::string, std::shared_ptr<const policy::PolicyModel>> models;
    std::map<std::pair<std::string, int>, std::shared_ptr<const policy::Context>> contexts;

    PreferenceDataset data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        PreferencePair p;
        p.task_id = j.at("task_id").get<std::string>();
        p.step = j.at("step").get<int>();
        auto it = by_id.find(p.task_id);
        if (it == by_id.end()) throw std::runtime_error("pairs file references unknown task " + p.task_id);
        const auto& task = *it->second;

        auto& model = models[p.task_id];
        if (!model) {
            auto state = microhome::init_scene(task.scene_seed, scene);
            model = std::make_shared<const policy::PolicyModel>(
                policy::PolicyModel::for_scene(state, features, max_tokens));
        }
        auto key = std::make_pair(p.task_id, p.step);
        auto& ctx = contexts[key];
        if (!ctx) {
            auto state = microhome::init_scene(task.scene_seed, scene);
            std::vector<Action> history;
            for (int s = 0; s < p.step; ++s) {
                const auto& a = task.golden_plan[static_cast<std::size_t>(s)];
                if (microhome::try_apply(state, a))
                    throw std::runtime_error("cannot replay prefix for task " + p.task_id);
                history.push_back(a);
            }
            ctx = std::make_shared<const policy::Context>(policy::make_context(task, state, history, lexicon));
        }
        p.model = model;
        p.context = ctx;
        for (const auto& name : j.at("chosen_tokens")) {
            int id = model->vocab.find(name.get<std::string>());
            if (id < 0) throw std::runtime_error("unknown token '" + name.get<std::string>() + "' in pairs file");
            p.chosen.push_back(id);
        }
        for (const auto& name : j.at("rejected_tokens")) {
            int id = model->vocab.find(name.get<std::string>());
            if (id < 0) throw std::runtime_error("unknown token '" + name.get<std::string>() + "' in pairs file");
            p.rejected.push_back(id);
        }
        p.category = category_from_name(j.at("category").get<std::string>());
        p.s_chosen = j.at("s_chosen").get<double>();
        p.s_rejected = j.at("s_rejected").get<double>();
        data.pairs.push_back(std::move(p));
    }
    for (const auto& p : data.pairs) {
        switch (p.category) {
            case NegCategory::HqDiffAction: ++data.stats.hq_diff; break;
            case NegCategory::LqDiffAction: ++data.stats.lq_diff; break;
            case NegCategory::LqSameAction: ++data.stats.lq_same; break;
            case NegCategory::BestWorstBaseline: ++data.stats.best_worst; break;
        }
    }
    return data;
}

}  // namespace spo::pairbuilder
