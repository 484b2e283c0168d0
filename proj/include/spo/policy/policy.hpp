#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spo/microhome/types.hpp"
#include "spo/policy/vocab.hpp"
#include "spo/score.hpp"
#include "spo/taskgen/lexicon.hpp"
#include "spo/taskgen/task.hpp"

namespace spo::policy {

// Hashed feature space; collisions are accepted. Features are composed by
// mixing precomputed component hashes (tag, parts...) and masking to the
// table size, so no strings are built on hot paths.
struct FeatureSpace {
    std::uint32_t dim_bits = 16;

    std::uint32_t dim() const { return 1u << dim_bits; }
    std::uint32_t mask() const { return dim() - 1u; }

    std::uint32_t index(const std::string& name) const;  // whole-string form
    std::uint32_t fold(std::uint64_t tag, std::uint64_t a) const;
    std::uint32_t fold(std::uint64_t tag, std::uint64_t a, std::uint64_t b) const;

    bool operator==(const FeatureSpace&) const = default;
};

// Feature tags and the start-of-sequence salt for the bigram feature.
std::uint64_t bias_tag();
std::uint64_t bigram_tag();
std::uint64_t keyword_tag();
std::uint64_t start_salt();

// Task input as the policy sees it: instruction, room-local observation, and
// the executed-action history. state/goal ride along for the programmatic
// judge and the feature flags; both are derivable from (scene, history).
struct Context {
    std::string task_id;
    std::string instruction;
    std::vector<std::string> keywords;  // sorted, recovered via the lexicon
    microhome::Observation obs;
    std::vector<microhome::Action> history;
    microhome::WorldState state;
    std::vector<microhome::GoalCondition> goal;
};

Context make_context(const taskgen::Task& task, const microhome::WorldState& current,
                     std::vector<microhome::Action> history, const taskgen::Lexicon& lexicon);

std::string context_digest(const Context& ctx);

// Reasoning chain: zero or more reasoning tokens, one terminal Act, then END.
struct Response {
    std::vector<int> tokens;
    microhome::Action final_action;
    std::optional<ScoreTriple> scores;

    bool operator==(const Response& o) const { return tokens == o.tokens; }
};

struct PolicyParams {
    std::vector<double> w;

    PolicyParams() = default;
    explicit PolicyParams(std::uint32_t dim) : w(dim, 0.0) {}
};

// Vocabulary + feature space + the length contract that defines the sequence
// distribution (an Act is forced at position max_tokens - 2).
struct PolicyModel {
    Vocabulary vocab;
    FeatureSpace features;
    int max_tokens = 24;

    static PolicyModel for_scene(const microhome::WorldState& initial, FeatureSpace fs = {},
                                 int max_tokens = 24);
};

struct SamplingConfig {
    double temperature = 0.7;
    double top_p = 0.95;
    bool greedy = false;
};

// Active feature indices for one (context, previous token, candidate) triple;
// binary features, duplicates add.
std::vector<std::uint32_t> featurize(const PolicyModel& model, const Context& ctx, int last_token_id,
                                     int candidate_id);

namespace detail {
class FeatureExtractor;
}

// Per-context scorer caching the history/visibility/keyword parts of each
// candidate's logit; only the bigram term varies by step.
class StepScorer {
public:
    StepScorer(const PolicyModel& model, const PolicyParams& params, const Context& ctx);

    // Fills logits for `support` given the previous token (-1 at the start).
    void logits(int last_token_id, const std::vector<int>& support, std::vector<double>& out) const;

private:
    const PolicyParams& params_;
    std::shared_ptr<const detail::FeatureExtractor> fx_;
    std::vector<double> static_logit_;
};

Response sample_response(const PolicyModel& model, const PolicyParams& params, const Context& ctx,
                         const SamplingConfig& cfg, std::uint64_t seed);

// Scores whole sequences against one context; builds the per-context feature
// caches once, so it is the cheap way to evaluate many (params, response)
// combinations at the same prompt.
class SequenceScorer {
public:
    SequenceScorer(const PolicyModel& model, const Context& ctx);

    // Exact sequence log-probability under the full per-step softmax (no
    // nucleus truncation). Malformed sequences score -inf.
    double logprob(const PolicyParams& params, const std::vector<int>& tokens) const;

    // d logprob / d w as a sparse vector, sorted by feature index:
    // sum over steps of features(realized) - E_softmax[features].
    std::vector<std::pair<std::uint32_t, double>> grad_logprob(const PolicyParams& params,
                                                               const std::vector<int>& tokens) const;

private:
    const PolicyModel& model_;
    std::shared_ptr<const detail::FeatureExtractor> fx_;
};

double logprob(const PolicyModel& model, const PolicyParams& params, const Context& ctx,
               const std::vector<int>& tokens);

std::vector<std::pair<std::uint32_t, double>> grad_logprob(const PolicyModel& model,
                                                           const PolicyParams& params, const Context& ctx,
                                                           const std::vector<int>& tokens);

std::string response_text(const PolicyModel& model, const Response& r);

}  // namespace spo::policy
