#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spo/microhome/types.hpp"

namespace spo::policy {

enum class TokenKind : std::uint8_t { Connective, Mention, Act, End };

struct Token {
    TokenKind kind;
    std::string name;   // serialization form: "then", "m:apple", "grab apple_1", "<end>"
    std::string canon;  // class-level feature form: "c:then", "m:apple", "a:grab:apple"
    microhome::Action action;       // Act tokens only
    std::string mention_class;      // Mention tokens only
    std::vector<std::string> args;  // object ids referenced by an Act token
    std::uint64_t salt = 0;         // hash of canon, filled at indexing time
};

// Closed, indexed token set for one scene: connectives, one mention token per
// object class, one action token per syntactically valid action, END last.
class Vocabulary {
public:
    static Vocabulary for_scene(const microhome::WorldState& initial);

    // Test hook: build from explicit reasoning/act tokens.
    static Vocabulary from_tokens(std::vector<Token> tokens);

    const std::vector<Token>& tokens() const { return tokens_; }
    const Token& token(int id) const { return tokens_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(tokens_.size()); }

    int end_id() const { return end_id_; }
    const std::vector<int>& act_ids() const { return act_ids_; }
    // Generation support: every non-END token (reasoning may stop via an Act).
    const std::vector<int>& gen_ids() const { return gen_ids_; }

    int find(const std::string& name) const;  // -1 when absent

    bool is_act(int id) const { return token(id).kind == TokenKind::Act; }

private:
    void index();

    std::vector<Token> tokens_;
    std::unordered_map<std::string, int> by_name_;
    std::vector<int> act_ids_;
    std::vector<int> gen_ids_;
    int end_id_ = -1;
};

const std::vector<std::string>& connective_words();

}  // namespace spo::policy
