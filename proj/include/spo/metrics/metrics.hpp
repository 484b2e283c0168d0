#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spo/microhome/scene_spec.hpp"
#include "spo/policy/policy.hpp"
#include "spo/taskgen/task.hpp"

namespace spo::metrics {

enum class Termination : std::uint8_t { DoneAction, StepBudget, RepeatedFailure };

const char* termination_name(Termination t);

struct EpisodeStep {
    microhome::Action action;
    bool accepted = false;
};

struct EpisodeTrace {
    std::string task_id;
    std::vector<EpisodeStep> steps;  // attempted actions in order
    microhome::WorldState final_state;
    int steps_used = 0;  // attempts, accepted or not, counted against the budget
    Termination terminated_by = Termination::StepBudget;
};

// Chooses the next response given the scene model and the current context.
using Decider = std::function<policy::Response(const policy::PolicyModel&, const policy::Context&)>;

// Deterministic greedy decoding of a trained parameter vector.
Decider greedy_decider(const policy::PolicyParams& params);

// Observe -> decide -> execute until a done action, the step budget, or three
// consecutive rejected actions.
EpisodeTrace rollout(const Decider& decider, const taskgen::Task& task, const microhome::SceneSpec& scene,
                     const taskgen::Lexicon& lexicon, const policy::FeatureSpace& features, int max_tokens,
                     int budget);

// Fraction of goal conditions satisfied in the trace's final state.
double gcr(const EpisodeTrace& trace, const std::vector<microhome::GoalCondition>& goal);

// 1 iff every goal condition is satisfied (gcr == 1).
int sr(const EpisodeTrace& trace, const std::vector<microhome::GoalCondition>& goal);

// Step budget: fixed when positive, otherwise min(factor * plan length, cap).
struct BudgetRule {
    int factor = 2;
    int cap = 80;
    int fixed = 0;
};

int budget_for(const taskgen::Task& task, const BudgetRule& rule);

struct TierReport {
    taskgen::Tier tier{};
    int task_count = 0;
    double mean_gcr = 0.0;
    double sr = 0.0;
};

struct SuiteReport {
    std::vector<TierReport> tiers;  // tiers present, in tier order
    double avg_gcr_tiers = 0.0;     // unweighted mean over tiers (headline)
    double avg_sr_tiers = 0.0;
    double avg_gcr_tasks = 0.0;  // per-task weighted, for transparency
    double avg_sr_tasks = 0.0;
    int total_tasks = 0;
};

SuiteReport evaluate_suite(const Decider& decider, const std::vector<taskgen::Task>& tasks,
                           const microhome::SceneSpec& scene, const taskgen::Lexicon& lexicon,
                           const policy::FeatureSpace& features, int max_tokens, const BudgetRule& rule,
                           int jobs = 1);

// Frozen report formats used as golden files.
std::string report_text(const SuiteReport& report);
std::string report_json(const SuiteReport& report);

}  // namespace spo::metrics
