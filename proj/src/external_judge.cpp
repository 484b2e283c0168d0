#include "spo/judge/external.hpp"

#include <iostream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace spo::judge {

using nlohmann::json;

std::string observation_summary(const policy::Context& ctx) {
    std::string out = "room " + ctx.obs.room_id + ";";
    for (const auto& v : ctx.obs.visible) {
        out += " " + v.id;
        auto flags = microhome::flag_names(v.flags);
        if (!flags.empty()) {
            out += "(";
            for (std::size_t i = 0; i < flags.size(); ++i) out += (i ? "," : "") + flags[i];
            out += ")";
        }
    }
    out += "; held:";
    if (ctx.obs.held.empty()) out += " none";
    for (const auto& h : ctx.obs.held) out += " " + h;
    return out;
}

namespace {

struct ParsedUrl {
    std::string host_port;  // scheme://host:port
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

double clamp_score(double v, const char* field) {
    if (v < 0.0 || v > 1.0) {
        std::cerr << "external judge: " << field << "=" << v << " outside [0,1], clamping\n";
        return std::min(1.0, std::max(0.0, v));
    }
    return v;
}

}  // namespace

ScoreTriple query_external_judge(const ExternalJudgeEndpoint& endpoint, const policy::PolicyModel& model,
                                 const policy::Context& ctx, const policy::Response& response) {
    json history = json::array();
    for (const auto& a : ctx.history) history.push_back(a.str());
    json request{{"instruction", ctx.instruction},
                 {"reasoning", policy::response_text(model, response)},
                 {"history", history},
                 {"observation", observation_summary(ctx)}};
    const std::string body = request.dump();

    auto [host, path] = split_url(endpoint.url);
    std::string reply;
    bool got_reply = false;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        httplib::Client client(host);
        client.set_connection_timeout(0, endpoint.timeout_ms * 1000);
        client.set_read_timeout(0, endpoint.timeout_ms * 1000);
        auto res = client.Post(path, body, "application/json");
        if (res && res->status == 200) {
            reply = res->body;
            got_reply = true;
            break;
        }
    }
    if (!got_reply)
        throw JudgeUnavailable("external judge unreachable at " + endpoint.url + " after " +
                               std::to_string(endpoint.max_retries + 1) + " attempts");

    json parsed;
    try {
        parsed = json::parse(reply);
    } catch (const json::exception&) {
        throw MalformedJudgeReply("external judge reply is not JSON: " + reply.substr(0, 120));
    }
    if (!parsed.contains("task_alignment") || !parsed.contains("image_utilization") ||
        !parsed.contains("overall") || !parsed["task_alignment"].is_number() ||
        !parsed["image_utilization"].is_number() || !parsed["overall"].is_number())
        throw MalformedJudgeReply("external judge reply missing score fields: " + reply.substr(0, 120));

    ScoreTriple s;
    s.s_text = clamp_score(parsed["task_alignment"].get<double>(), "task_alignment");
    s.s_image = clamp_score(parsed["image_utilization"].get<double>(), "image_utilization");
    s.overall = clamp_score(parsed["overall"].get<double>(), "overall");
    return s;
}

}  // namespace spo::judge
