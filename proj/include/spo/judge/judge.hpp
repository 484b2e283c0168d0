#pragma once

#include <stdexcept>

#include "spo/policy/policy.hpp"
#include "spo/score.hpp"

namespace spo::judge {

enum class CombineMode : std::uint8_t { WeightedSum, Direct };
// Ablation switch: which criteria feed the overall score.
enum class Criteria : std::uint8_t { Both, TextOnly, ImageOnly };

struct JudgeConfig {
    CombineMode mode = CombineMode::Direct;
    double w1 = 1.0;  // weighted mode: text weight
    double w2 = 1.0;  // weighted mode: image weight
    double gamma = 1.0;  // direct mode: image gate exponent
    Criteria criteria = Criteria::Both;
};

struct InvalidJudgeConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Textual coherence: half task relevance (goal objects mentioned in the
// reasoning), half consistency of the final action with the current state
// (1 applicable and novel, 1/2 applicable but already executed, 0 otherwise).
double score_text(const policy::PolicyModel& model, const policy::Context& ctx,
                  const policy::Response& response);

// Image awareness: fraction of object mentions grounded in the observation
// (visible or held); 0 when the reasoning mentions no objects at all.
double score_image(const policy::PolicyModel& model, const policy::Context& ctx,
                   const policy::Response& response);

// Raw weighted combination w1*s_text + w2*s_image (ranking use; not rescaled).
double combine_weighted(double s_text, double s_image, double w1, double w2);

// Weighted mode rescales the combination back to [0,1]; direct mode gates the
// text score by the image score (s_text * s_image^gamma) so an ungrounded
// chain cannot score high.
ScoreTriple score_overall(const policy::PolicyModel& model, const policy::Context& ctx,
                          const policy::Response& response, const JudgeConfig& cfg);

// Scoring interface shared by the programmatic judge and the external client.
class ResponseScorer {
public:
    virtual ~ResponseScorer() = default;
    virtual ScoreTriple score(const policy::PolicyModel& model, const policy::Context& ctx,
                              const policy::Response& response) const = 0;
};

class ProgrammaticJudge final : public ResponseScorer {
public:
    explicit ProgrammaticJudge(JudgeConfig cfg = {}) : cfg_(cfg) {}
    ScoreTriple score(const policy::PolicyModel& model, const policy::Context& ctx,
                      const policy::Response& response) const override {
        return score_overall(model, ctx, response, cfg_);
    }

private:
    JudgeConfig cfg_;
};

}  // namespace spo::judge
