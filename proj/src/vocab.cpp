#include "spo/policy/vocab.hpp"

#include <algorithm>
#include <set>

#include "spo/microhome/sim.hpp"
#include "spo/rng.hpp"

namespace spo::policy {

const std::vector<std::string>& connective_words() {
    static const std::vector<std::string> words = {"then",  "because", "so",   "first",
                                                   "next",  "need",    "goal", "already_done"};
    return words;
}

namespace {

std::string act_canon(const microhome::WorldState& s, const microhome::Action& a) {
    std::string out = "a:";
    out += microhome::verb_name(a.verb);
    auto canon_arg = [&](const std::string& arg) {
        const auto* obj = s.find(arg);
        return obj ? obj->class_name : arg;  // rooms keep their id
    };
    if (!a.arg1.empty()) out += ":" + canon_arg(a.arg1);
    if (!a.arg2.empty()) out += ":" + canon_arg(a.arg2);
    return out;
}

std::vector<std::string> act_object_args(const microhome::WorldState& s, const microhome::Action& a) {
    std::vector<std::string> args;
    if (!a.arg1.empty() && s.find(a.arg1)) args.push_back(a.arg1);
    if (!a.arg2.empty() && s.find(a.arg2)) args.push_back(a.arg2);
    return args;
}

}  // namespace

Vocabulary Vocabulary::for_scene(const microhome::WorldState& initial) {
    std::vector<Token> tokens;
    for (const auto& w : connective_words()) tokens.push_back({TokenKind::Connective, w, "c:" + w, {}, "", {}});

    std::set<std::string> classes;
    for (const auto& [id, obj] : initial.objects) classes.insert(obj.class_name);
    for (const auto& cls : classes) tokens.push_back({TokenKind::Mention, "m:" + cls, "m:" + cls, {}, cls, {}});

    for (const auto& a : microhome::action_space(initial)) {
        tokens.push_back(
            {TokenKind::Act, a.str(), act_canon(initial, a), a, "", act_object_args(initial, a)});
    }
    return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<Token> tokens) {
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.tokens_.push_back({TokenKind::End, "<end>", "c:<end>", {}, "", {}});
    v.index();
    return v;
}

void Vocabulary::index() {
    by_name_.clear();
    act_ids_.clear();
    gen_ids_.clear();
    for (int i = 0; i < size(); ++i) {
        Token& t = tokens_[static_cast<std::size_t>(i)];
        t.salt = spo::hash_str(t.canon);
        by_name_[t.name] = i;
        if (t.kind == TokenKind::End) {
            end_id_ = i;
            continue;
        }
        gen_ids_.push_back(i);
        if (t.kind == TokenKind::Act) act_ids_.push_back(i);
    }
}

int Vocabulary::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

}  // namespace spo::policy
