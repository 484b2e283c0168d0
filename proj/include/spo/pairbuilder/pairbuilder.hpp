#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spo/judge/judge.hpp"
#include "spo/microhome/scene_spec.hpp"
#include "spo/policy/policy.hpp"
#include "spo/taskgen/task.hpp"

namespace spo::pairbuilder {

enum class NegCategory : std::uint8_t {
    HqDiffAction,       // near-top score, different final action
    LqDiffAction,       // below the margin, different final action
    LqSameAction,       // below the margin, same final action
    BestWorstBaseline,  // single-criterion best-vs-worst pair
};

const char* category_name(NegCategory c);  // "HQ_DIFF_ACTION", ...
NegCategory category_from_name(const std::string& name);

struct ScoredSample {
    policy::Response response;
    ScoreTriple scores;
};

struct SampleSet {
    std::shared_ptr<const policy::Context> context;
    std::vector<ScoredSample> samples;  // K >= 2
};

// Index of R+: highest overall score; ties broken by the frequency of the
// sample's final action across all K samples, then by lowest index.
int select_positive(const SampleSet& set);

struct NegativePick {
    int index;
    NegCategory category;
};

// At most one negative per category. HQ keeps the highest-scoring different
// action within the margin; both LQ categories keep the minimum-score sample.
std::vector<NegativePick> select_negatives(const SampleSet& set, int positive_index, double margin);

enum class PairMode : std::uint8_t { SpoAll, SpoHqOnly, SpoLqDiffOnly, SpoLqSameOnly, BestWorst };

const char* pair_mode_name(PairMode m);  // "SPO_ALL", ...
PairMode pair_mode_from_name(const std::string& name);

// (chosen index, rejected index, category) triples for one scored sample set.
struct SelectedPair {
    int chosen;
    int rejected;
    NegCategory category;
};
std::vector<SelectedPair> select_pairs(const SampleSet& set, PairMode mode, double margin);

struct PreferencePair {
    std::string task_id;
    int step = 0;  // golden-plan prefix length of the harvested context
    std::shared_ptr<const policy::PolicyModel> model;
    std::shared_ptr<const policy::Context> context;
    std::vector<int> chosen;
    std::vector<int> rejected;
    NegCategory category = NegCategory::BestWorstBaseline;
    double s_chosen = 0.0;
    double s_rejected = 0.0;
};

struct DatasetStats {
    long contexts_total = 0;
    long contexts_skipped = 0;  // produced zero pairs
    long hq_diff = 0;
    long lq_diff = 0;
    long lq_same = 0;
    long best_worst = 0;
    long duplicate_rejected = 0;  // same rejected response reused across categories
};

struct PreferenceDataset {
    std::vector<PreferencePair> pairs;
    DatasetStats stats;
};

struct HarvestConfig {
    int k = 5;
    policy::SamplingConfig sampling;
    double margin = 0.1;
    PairMode mode = PairMode::SpoAll;
    int contexts_per_task = 6;
    std::uint64_t sampling_seed = 7;
    policy::FeatureSpace features;
    int max_tokens = 24;
    int jobs = 1;
};

// Harvests teacher-forced contexts along each task's golden-plan prefixes,
// samples K responses per context, scores them, and assembles pairs.
// Deterministic for fixed seeds regardless of the jobs count.
PreferenceDataset build_pairs(const std::vector<taskgen::Task>& tasks, const microhome::SceneSpec& scene,
                              const policy::PolicyParams& params, const judge::ResponseScorer& scorer,
                              const taskgen::Lexicon& lexicon, const HarvestConfig& cfg);

// Evenly spaced prefix indices harvested from a plan of the given length.
std::vector<int> harvest_steps(int plan_length, int contexts_per_task);

// JSONL persistence: {task_id, step, context_digest, chosen_tokens,
// rejected_tokens, category, s_chosen, s_rejected}.
void save_pairs(const std::string& path, const PreferenceDataset& data);

// Reloading needs the tasks to rebuild contexts (replaying golden-plan
// prefixes) and the vocabulary to re-index token names.
PreferenceDataset load_pairs(const std::string& path, const std::vector<taskgen::Task>& tasks,
                             const microhome::SceneSpec& scene, const taskgen::Lexicon& lexicon,
                             const policy::FeatureSpace& features, int max_tokens);

}  // namespace spo::pairbuilder
