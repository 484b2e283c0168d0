#include "spo/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "spo/microhome/sim.hpp"
#include "spo/parallel.hpp"

namespace spo::metrics {

using microhome::Action;

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::DoneAction: return "done_action";
        case Termination::StepBudget: return "step_budget";
        case Termination::RepeatedFailure: return "repeated_failure";
    }
    return "?";
}

Decider greedy_decider(const policy::PolicyParams& params) {
    return [&params](const policy::PolicyModel& model, const policy::Context& ctx) {
        policy::SamplingConfig cfg;
        cfg.greedy = true;
        return policy::sample_response(model, params, ctx, cfg, 0);
    };
}

EpisodeTrace rollout(const Decider& decider, const taskgen::Task& task, const microhome::SceneSpec& scene,
                     const taskgen::Lexicon& lexicon, const policy::FeatureSpace& features, int max_tokens,
                     int budget) {
    if (budget < 1) throw std::invalid_argument("rollout budget must be >= 1");

    auto state = microhome::init_scene(task.scene_seed, scene);
    auto model = policy::PolicyModel::for_scene(state, features, max_tokens);

    EpisodeTrace trace;
    trace.task_id = task.id;
    std::vector<Action> history;
    int consecutive_failures = 0;

    while (trace.steps_used < budget) {
        auto ctx = policy::make_context(task, state, history, lexicon);
        auto response = decider(model, ctx);
        const Action action = response.final_action;
        ++trace.steps_used;

        if (action.verb == microhome::Verb::Done) {
            trace.steps.push_back({action, true});
            trace.terminated_by = Termination::DoneAction;
            state.tick += 1;
            break;
        }
        auto err = microhome::try_apply(state, action);
        trace.steps.push_back({action, !err.has_value()});
        if (err) {
            if (++consecutive_failures >= 3) {
                trace.terminated_by = Termination::RepeatedFailure;
                break;
            }
        } else {
            consecutive_failures = 0;
            history.push_back(action);
        }
    }
    trace.final_state = std::move(state);
    return trace;
}

double gcr(const EpisodeTrace& trace, const std::vector<microhome::GoalCondition>& goal) {
    if (goal.empty()) throw std::invalid_argument("gcr needs a non-empty goal");
    auto report = microhome::check_goal(trace.final_state, goal);
    return static_cast<double>(report.satisfied.size()) / static_cast<double>(report.total);
}

int sr(const EpisodeTrace& trace, const std::vector<microhome::GoalCondition>& goal) {
    if (goal.empty()) throw std::invalid_argument("sr needs a non-empty goal");
    auto report = microhome::check_goal(trace.final_state, goal);
    return report.satisfied.size() == report.total ? 1 : 0;
}

int budget_for(const taskgen::Task& task, const BudgetRule& rule) {
    if (rule.fixed > 0) return rule.fixed;
    return std::min(rule.factor * static_cast<int>(task.golden_plan.size()), rule.cap);
}

SuiteReport evaluate_suite(const Decider& decider, const std::vector<taskgen::Task>& tasks,
                           const microhome::SceneSpec& scene, const taskgen::Lexicon& lexicon,
                           const policy::FeatureSpace& features, int max_tokens, const BudgetRule& rule,
                           int jobs) {
    struct PerTask {
        taskgen::Tier tier{};
        double gcr = 0.0;
        int sr = 0;
    };
    std::vector<PerTask> rows(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const auto& task = tasks[i];
        auto trace = rollout(decider, task, scene, lexicon, features, max_tokens, budget_for(task, rule));
        rows[i] = {task.tier, gcr(trace, task.goal), sr(trace, task.goal)};
    });

    std::map<taskgen::Tier, TierReport> by_tier;
    SuiteReport report;
    for (const auto& row : rows) {
        auto& tr = by_tier[row.tier];
        tr.tier = row.tier;
        tr.task_count += 1;
        tr.mean_gcr += row.gcr;
        tr.sr += row.sr;
        report.avg_gcr_tasks += row.gcr;
        report.avg_sr_tasks += row.sr;
    }
    report.total_tasks = static_cast<int>(tasks.size());
    if (report.total_tasks > 0) {
        report.avg_gcr_tasks /= report.total_tasks;
        report.avg_sr_tasks /= report.total_tasks;
    }
    for (auto& [tier, tr] : by_tier) {
        tr.mean_gcr /= tr.task_count;
        tr.sr /= tr.task_count;
        report.tiers.push_back(tr);
        report.avg_gcr_tiers += tr.mean_gcr;
        report.avg_sr_tiers += tr.sr;
    }
    if (!report.tiers.empty()) {
        report.avg_gcr_tiers /= static_cast<double>(report.tiers.size());
        report.avg_sr_tiers /= static_cast<double>(report.tiers.size());
    }
    return report;
}

std::string report_text(const SuiteReport& report) {
    char line[128];
    std::string out;
    out += "tier            tasks      GCR       SR\n";
    for (const auto& tr : report.tiers) {
        std::snprintf(line, sizeof line, "%-15s %5d   %6.4f   %6.4f\n", taskgen::tier_name(tr.tier),
                      tr.task_count, tr.mean_gcr, tr.sr);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-15s %5s   %6.4f   %6.4f\n", "average(tiers)", "-",
                  report.avg_gcr_tiers, report.avg_sr_tiers);
    out += line;
    std::snprintf(line, sizeof line, "%-15s %5d   %6.4f   %6.4f\n", "average(tasks)", report.total_tasks,
                  report.avg_gcr_tasks, report.avg_sr_tasks);
    out += line;
    return out;
}

std::string report_json(const SuiteReport& report) {
    nlohmann::json tiers = nlohmann::json::array();
    for (const auto& tr : report.tiers) {
        tiers.push_back({{"tier", taskgen::tier_name(tr.tier)},
                         {"tasks", tr.task_count},
                         {"gcr", tr.mean_gcr},
                         {"sr", tr.sr}});
    }
    nlohmann::json j{{"tiers", tiers},
                     {"average_tiers", {{"gcr", report.avg_gcr_tiers}, {"sr", report.avg_sr_tiers}}},
                     {"average_tasks", {{"gcr", report.avg_gcr_tasks}, {"sr", report.avg_sr_tasks}}},
                     {"total_tasks", report.total_tasks}};
    return j.dump(2);
}

}  // namespace spo::metrics
