#include "spo/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "spo/microhome/sim.hpp"
#include "spo/rng.hpp"

namespace spo::policy {

std::uint32_t FeatureSpace::index(const std::string& name) const {
    return static_cast<std::uint32_t>(hash_str(name)) & mask();
}

std::uint32_t FeatureSpace::fold(std::uint64_t tag, std::uint64_t a) const {
    return static_cast<std::uint32_t>(mix_seed(tag, a)) & mask();
}

std::uint32_t FeatureSpace::fold(std::uint64_t tag, std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint32_t>(mix_seed(mix_seed(tag, a), b)) & mask();
}

std::uint64_t bias_tag() {
    static const std::uint64_t tag = hash_str("b|");
    return tag;
}
std::uint64_t bigram_tag() {
    static const std::uint64_t tag = hash_str("g|");
    return tag;
}
std::uint64_t keyword_tag() {
    static const std::uint64_t tag = hash_str("k|");
    return tag;
}
std::uint64_t start_salt() {
    static const std::uint64_t salt = hash_str("<s>");
    return salt;
}

PolicyModel PolicyModel::for_scene(const microhome::WorldState& initial, FeatureSpace fs, int max_tokens) {
    return PolicyModel{Vocabulary::for_scene(initial), fs, max_tokens};
}

Context make_context(const taskgen::Task& task, const microhome::WorldState& current,
                     std::vector<microhome::Action> history, const taskgen::Lexicon& lexicon) {
    Context ctx;
    ctx.task_id = task.id;
    ctx.instruction = task.instruction;
    ctx.obs = microhome::observe(current);
    ctx.history = std::move(history);
    ctx.state = current;
    ctx.goal = task.goal;

    const std::string lower = taskgen::to_lower(task.instruction);
    std::set<std::string> kws;
    std::set<std::string> classes;
    for (const auto& [id, obj] : current.objects) classes.insert(obj.class_name);
    for (const auto& cls : classes) {
        if (taskgen::contains_word(lower, cls)) kws.insert(cls);
    }
    for (const auto& cls : lexicon.classes_described_in(lower)) {
        if (classes.count(cls)) kws.insert(cls);
    }
    for (const auto& room : current.rooms) {
        if (taskgen::contains_word(lower, room)) kws.insert(room);
    }
    // Verb-ish words: canonical verbs, lexicon base words, and synonyms mapped
    // back to their base word.
    std::set<std::string> verb_words;
    for (int v = 0; v < microhome::kVerbCount; ++v)
        verb_words.insert(microhome::verb_name(static_cast<microhome::Verb>(v)));
    for (const auto& [base, syns] : lexicon.verb_synonyms) verb_words.insert(base);
    std::string word;
    for (std::size_t i = 0; i <= lower.size(); ++i) {
        char c = i < lower.size() ? lower[i] : ' ';
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            word += c;
            continue;
        }
        if (!word.empty()) {
            std::string base = lexicon.base_verb(word);
            if (verb_words.count(base)) kws.insert(base);
            word.clear();
        }
    }
    for (const auto& [base, syns] : lexicon.verb_synonyms) {
        for (const auto& syn : syns) {
            if (syn.find(' ') != std::string::npos && lower.find(syn) != std::string::npos) kws.insert(base);
        }
    }
    ctx.keywords.assign(kws.begin(), kws.end());
    return ctx;
}

std::string context_digest(const Context& ctx) {
    std::string blob = ctx.task_id + "\x1f" + ctx.instruction + "\x1f" + ctx.obs.room_id;
    for (const auto& v : ctx.obs.visible) {
        blob += "\x1f" + v.id + "," + v.class_name + "," + std::to_string(v.flags) + "," + v.container_id;
    }
    blob += "\x1e";
    for (const auto& h : ctx.obs.held) blob += h + ",";
    blob += "\x1e";
    for (const auto& a : ctx.history) blob += a.str() + ";";
    blob += "\x1e";
    for (const auto& g : ctx.goal) blob += g.str() + ";";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_str(blob)));
    return buf;
}

namespace detail {

// Per-context caches: grounded objects/classes, executed actions, and each
// candidate's step-invariant feature indices.
class FeatureExtractor {
public:
    FeatureExtractor(const PolicyModel& model, const Context& ctx) : model_(model) {
        std::set<std::string> grounded_ids, grounded_classes;
        for (const auto& v : ctx.obs.visible) {
            grounded_ids.insert(v.id);
            grounded_classes.insert(v.class_name);
        }
        for (const auto& id : ctx.obs.held) {
            grounded_ids.insert(id);
            auto it = ctx.state.objects.find(id);
            if (it != ctx.state.objects.end()) grounded_classes.insert(it->second.class_name);
        }
        std::set<microhome::Action> history(ctx.history.begin(), ctx.history.end());

        const auto& fs = model.features;
        std::vector<std::uint64_t> kw_hash;
        kw_hash.reserve(ctx.keywords.size());
        for (const auto& kw : ctx.keywords) kw_hash.push_back(hash_str(kw));

        const std::uint32_t vis_idx = fs.index("vis");
        const std::uint32_t hist_idx = fs.index("hist");

        const auto& toks = model.vocab.tokens();
        static_feats_.resize(toks.size());
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::End) continue;
            auto& feats = static_feats_[i];
            feats.reserve(kw_hash.size() + 3);
            feats.push_back(fs.fold(bias_tag(), t.salt));
            for (auto kh : kw_hash) feats.push_back(fs.fold(keyword_tag(), kh, t.salt));
            bool grounded = false;
            if (t.kind == TokenKind::Mention) {
                grounded = grounded_classes.count(t.mention_class) > 0;
            } else if (t.kind == TokenKind::Act && !t.args.empty()) {
                grounded = true;
                for (const auto& arg : t.args) grounded = grounded && grounded_ids.count(arg) > 0;
            }
            if (grounded) feats.push_back(vis_idx);
            if (t.kind == TokenKind::Act && history.count(t.action)) feats.push_back(hist_idx);
        }
    }

    const std::vector<std::uint32_t>& static_features(int id) const {
        return static_feats_[static_cast<std::size_t>(id)];
    }

    std::uint32_t bigram(int last_id, int cand_id) const {
        const std::uint64_t last = last_id < 0 ? start_salt() : model_.vocab.token(last_id).salt;
        return model_.features.fold(bigram_tag(), last, model_.vocab.token(cand_id).salt);
    }

    const PolicyModel& model() const { return model_; }

private:
    const PolicyModel& model_;
    std::vector<std::vector<std::uint32_t>> static_feats_;
};

}  // namespace detail

namespace {

using detail::FeatureExtractor;

double weight_sum(const PolicyParams& params, const std::vector<std::uint32_t>& feats) {
    double s = 0.0;
    for (auto f : feats) s += params.w[f];
    return s;
}

struct StepDistribution {
    std::vector<double> logits;  // aligned with support
    double logsumexp = 0.0;
    std::vector<double> probs;
};

StepDistribution step_distribution(const FeatureExtractor& fx, const PolicyParams& params, int last_id,
                                   const std::vector<int>& support) {
    StepDistribution d;
    d.logits.resize(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        int cand = support[i];
        d.logits[i] = weight_sum(params, fx.static_features(cand)) + params.w[fx.bigram(last_id, cand)];
    }
    double mx = *std::max_element(d.logits.begin(), d.logits.end());
    double sum = 0.0;
    d.probs.resize(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        d.probs[i] = std::exp(d.logits[i] - mx);
        sum += d.probs[i];
    }
    for (auto& p : d.probs) p /= sum;
    d.logsumexp = mx + std::log(sum);
    return d;
}

// -1 when the token sequence is not a well-formed response.
int act_position(const PolicyModel& model, const std::vector<int>& tokens) {
    const int n = static_cast<int>(tokens.size());
    if (n < 2 || n > model.max_tokens) return -1;
    if (tokens.back() != model.vocab.end_id()) return -1;
    const int pos = n - 2;
    for (int i = 0; i < pos; ++i) {
        if (tokens[i] < 0 || tokens[i] >= model.vocab.size()) return -1;
        auto kind = model.vocab.token(tokens[i]).kind;
        if (kind != TokenKind::Connective && kind != TokenKind::Mention) return -1;
    }
    if (tokens[pos] < 0 || tokens[pos] >= model.vocab.size()) return -1;
    if (!model.vocab.is_act(tokens[pos])) return -1;
    return pos;
}

}  // namespace

std::vector<std::uint32_t> featurize(const PolicyModel& model, const Context& ctx, int last_token_id,
                                     int candidate_id) {
    FeatureExtractor fx(model, ctx);
    std::vector<std::uint32_t> out = fx.static_features(candidate_id);
    out.push_back(fx.bigram(last_token_id, candidate_id));
    std::sort(out.begin(), out.end());
    return out;
}

StepScorer::StepScorer(const PolicyModel& model, const PolicyParams& params, const Context& ctx)
    : params_(params) {
    auto fx = std::make_shared<detail::FeatureExtractor>(model, ctx);
    static_logit_.resize(static_cast<std::size_t>(model.vocab.size()), 0.0);
    for (int i = 0; i < model.vocab.size(); ++i) {
        if (i == model.vocab.end_id()) continue;
        static_logit_[static_cast<std::size_t>(i)] = weight_sum(params, fx->static_features(i));
    }
    fx_ = std::move(fx);
}

void StepScorer::logits(int last_token_id, const std::vector<int>& support, std::vector<double>& out) const {
    out.resize(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        int cand = support[i];
        out[i] = static_logit_[static_cast<std::size_t>(cand)] +
                 params_.w[fx_->bigram(last_token_id, cand)];
    }
}

Response sample_response(const PolicyModel& model, const PolicyParams& params, const Context& ctx,
                         const SamplingConfig& cfg, std::uint64_t seed) {
    if (!cfg.greedy && (cfg.temperature <= 0.0 || cfg.top_p <= 0.0 || cfg.top_p > 1.0))
        throw std::invalid_argument("sampling needs temperature > 0 and top_p in (0, 1]");
    if (model.max_tokens < 2) throw std::invalid_argument("max_tokens must be >= 2");

    StepScorer scorer(model, params, ctx);
    Rng rng(mix_seed(seed, 0x5a3ull));
    Response r;
    int last = -1;
    std::vector<double> logits;
    std::vector<std::size_t> order;
    for (int pos = 0; pos < model.max_tokens - 1; ++pos) {
        const bool forced = pos == model.max_tokens - 2;
        const auto& support = forced ? model.vocab.act_ids() : model.vocab.gen_ids();
        scorer.logits(last, support, logits);

        int picked;
        if (cfg.greedy) {
            picked = support[static_cast<std::size_t>(
                std::max_element(logits.begin(), logits.end()) - logits.begin())];
        } else {
            // softmax at temperature, then nucleus truncation
            double mx = *std::max_element(logits.begin(), logits.end());
            std::vector<double> p(logits.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < logits.size(); ++i) {
                p[i] = std::exp((logits[i] - mx) / cfg.temperature);
                sum += p[i];
            }
            for (auto& x : p) x /= sum;
            order.resize(p.size());
            std::iota(order.begin(), order.end(), 0u);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (p[a] != p[b]) return p[a] > p[b];
                return support[a] < support[b];
            });
            std::size_t cut = 0;
            double mass = 0.0;
            while (cut < order.size()) {
                mass += p[order[cut]];
                ++cut;
                if (mass >= cfg.top_p) break;
            }
            double u = rng.next_double() * mass;
            double acc = 0.0;
            std::size_t chosen = cut - 1;
            for (std::size_t i = 0; i < cut; ++i) {
                acc += p[order[i]];
                if (u < acc) {
                    chosen = i;
                    break;
                }
            }
            picked = support[order[chosen]];
        }

        r.tokens.push_back(picked);
        if (model.vocab.is_act(picked)) {
            r.final_action = model.vocab.token(picked).action;
            r.tokens.push_back(model.vocab.end_id());
            return r;
        }
        last = picked;
    }
    // unreachable: the forced step always emits an Act
    throw std::logic_error("sampling failed to terminate");
}

SequenceScorer::SequenceScorer(const PolicyModel& model, const Context& ctx)
    : model_(model), fx_(std::make_shared<detail::FeatureExtractor>(model, ctx)) {}

double SequenceScorer::logprob(const PolicyParams& params, const std::vector<int>& tokens) const {
    const int pos_act = act_position(model_, tokens);
    if (pos_act < 0) return -std::numeric_limits<double>::infinity();

    double lp = 0.0;
    int last = -1;
    for (int i = 0; i <= pos_act; ++i) {
        const bool forced = i == model_.max_tokens - 2;
        const auto& support = forced ? model_.vocab.act_ids() : model_.vocab.gen_ids();
        auto d = step_distribution(*fx_, params, last, support);
        auto it = std::find(support.begin(), support.end(), tokens[static_cast<std::size_t>(i)]);
        if (it == support.end()) return -std::numeric_limits<double>::infinity();
        lp += d.logits[static_cast<std::size_t>(it - support.begin())] - d.logsumexp;
        last = tokens[static_cast<std::size_t>(i)];
    }
    return lp;  // END after the Act has probability 1
}

std::vector<std::pair<std::uint32_t, double>> SequenceScorer::grad_logprob(
    const PolicyParams& params, const std::vector<int>& tokens) const {
    const int pos_act = act_position(model_, tokens);
    if (pos_act < 0) throw std::invalid_argument("grad_logprob: malformed response");

    std::unordered_map<std::uint32_t, double> acc;
    int last = -1;
    for (int i = 0; i <= pos_act; ++i) {
        const bool forced = i == model_.max_tokens - 2;
        const auto& support = forced ? model_.vocab.act_ids() : model_.vocab.gen_ids();
        auto d = step_distribution(*fx_, params, last, support);

        const int realized = tokens[static_cast<std::size_t>(i)];
        for (auto f : fx_->static_features(realized)) acc[f] += 1.0;
        acc[fx_->bigram(last, realized)] += 1.0;

        for (std::size_t k = 0; k < support.size(); ++k) {
            const double p = d.probs[k];
            for (auto f : fx_->static_features(support[k])) acc[f] -= p;
            acc[fx_->bigram(last, support[k])] -= p;
        }
        last = realized;
    }
    std::vector<std::pair<std::uint32_t, double>> out;
    out.reserve(acc.size());
    for (const auto& [idx, v] : acc) {
        if (std::abs(v) > 1e-12) out.emplace_back(idx, v);  // drop cancelled coordinates
    }
    std::sort(out.begin(), out.end());
    return out;
}

double logprob(const PolicyModel& model, const PolicyParams& params, const Context& ctx,
               const std::vector<int>& tokens) {
    return SequenceScorer(model, ctx).logprob(params, tokens);
}

std::vector<std::pair<std::uint32_t, double>> grad_logprob(const PolicyModel& model,
                                                           const PolicyParams& params, const Context& ctx,
                                                           const std::vector<int>& tokens) {
    return SequenceScorer(model, ctx).grad_logprob(params, tokens);
}

std::string response_text(const PolicyModel& model, const Response& r) {
    std::string out;
    for (int id : r.tokens) {
        if (id == model.vocab.end_id()) continue;
        if (!out.empty()) out += " ";
        out += model.vocab.token(id).name;
    }
    return out;
}

}  // namespace spo::policy
