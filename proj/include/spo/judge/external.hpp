#pragma once

#include <stdexcept>
#include <string>

#include "spo/judge/judge.hpp"

namespace spo::judge {

struct ExternalJudgeEndpoint {
    std::string url;  // e.g. "http://127.0.0.1:8089/score"
    int timeout_ms = 5000;
    int max_retries = 3;
};

struct JudgeUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedJudgeReply : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// POSTs {instruction, reasoning, history, observation} and parses
// {task_alignment, image_utilization, overall}, clamping each to [0,1].
// Transport failures retry up to max_retries, then JudgeUnavailable; a reply
// that does not parse raises MalformedJudgeReply immediately.
ScoreTriple query_external_judge(const ExternalJudgeEndpoint& endpoint, const policy::PolicyModel& model,
                                 const policy::Context& ctx, const policy::Response& response);

// One-line scene summary sent as the observation field.
std::string observation_summary(const policy::Context& ctx);

class ExternalJudgeScorer final : public ResponseScorer {
public:
    explicit ExternalJudgeScorer(ExternalJudgeEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    ScoreTriple score(const policy::PolicyModel& model, const policy::Context& ctx,
                      const policy::Response& response) const override {
        return query_external_judge(endpoint_, model, ctx, response);
    }

private:
    ExternalJudgeEndpoint endpoint_;
};

}  // namespace spo::judge
