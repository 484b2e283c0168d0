#include "spo/taskgen/lexicon.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace spo::taskgen {

std::string to_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Finds the next whole-word, case-insensitive occurrence of `word` at or
// after `from`; npos if none.
std::size_t find_word(const std::string& text, const std::string& word, std::size_t from) {
    const std::string lt = to_lower(text), lw = to_lower(word);
    std::size_t pos = from;
    while ((pos = lt.find(lw, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !word_char(lt[pos - 1]);
        bool right_ok = pos + lw.size() >= lt.size() || !word_char(lt[pos + lw.size()]);
        if (left_ok && right_ok) return pos;
        pos += 1;
    }
    return std::string::npos;
}

}  // namespace

bool contains_word(const std::string& text, const std::string& word) {
    return find_word(text, word, 0) != std::string::npos;
}

std::string replace_word(const std::string& text, const std::string& word, const std::string& with) {
    std::string out = text;
    std::size_t pos = 0;
    while ((pos = find_word(out, word, pos)) != std::string::npos) {
        out.replace(pos, word.size(), with);
        pos += with.size();
    }
    return out;
}

Lexicon Lexicon::parse(const std::string& text) {
    Lexicon lex;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (!kind.empty() && kind.back() == ':') kind.pop_back();
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("lexicon line " + std::to_string(lineno) + ": missing ':'");
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        std::string rest = trim(line.substr(colon + 1));
        if (kind == "verb") {
            std::string word;
            ls >> word;
            word = trim(word.substr(0, word.find(':')));
            std::vector<std::string> syns;
            std::string cur;
            for (char c : rest + "|") {
                if (c == '|') {
                    cur = trim(cur);
                    if (!cur.empty()) syns.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            lex.verb_synonyms[to_lower(word)] = syns;
        } else if (kind == "appearance") {
            std::string cls;
            ls >> cls;
            cls = trim(cls.substr(0, cls.find(':')));
            lex.appearance[to_lower(cls)] = to_lower(rest);
        } else if (kind == "prefix") {
            lex.context_prefixes.push_back(rest);
        } else {
            throw std::invalid_argument("lexicon line " + std::to_string(lineno) + ": unknown entry '" + kind + "'");
        }
    }
    return lex;
}

std::string Lexicon::str() const {
    std::ostringstream out;
    for (const auto& [word, syns] : verb_synonyms) {
        out << "verb " << word << ":";
        for (std::size_t i = 0; i < syns.size(); ++i) out << (i ? " | " : " ") << syns[i];
        out << "\n";
    }
    for (const auto& [cls, desc] : appearance) out << "appearance " << cls << ": " << desc << "\n";
    for (const auto& p : context_prefixes) out << "prefix: " << p << "\n";
    return out.str();
}

std::vector<std::string> Lexicon::classes_described_in(const std::string& lowercased_text) const {
    std::vector<std::string> out;
    for (const auto& [cls, desc] : appearance) {
        if (lowercased_text.find(desc) != std::string::npos) out.push_back(cls);
    }
    return out;
}

std::string Lexicon::base_verb(const std::string& word) const {
    const std::string lw = to_lower(word);
    for (const auto& [base, syns] : verb_synonyms) {
        for (const auto& s : syns) {
            if (to_lower(s) == lw) return base;
        }
    }
    return lw;
}

const Lexicon& Lexicon::defaults() {
    static const Lexicon lex = parse(R"(
verb take: carry | bring
verb move: reposition | relocate
verb put: place | set
verb cook: prepare
verb clean: wash | scrub
verb serve: lay out
verb gather: collect

appearance apple: red round fruit
appearance bread: freshly baked loaf
appearance salmon: pink fish fillet
appearance egg: smooth oval snack
appearance plate: flat ceramic dish
appearance cup: small drinking vessel
appearance knife: sharp cutting tool
appearance book: paper bound volume
appearance toy: little plastic figure
appearance pillow: soft cushion
appearance journal: leather notebook
appearance socks: woolen foot garment
appearance towel: soft cotton cloth
appearance soap: scented washing bar
appearance table: low wooden platform
appearance counter: kitchen worktop
appearance fridge: cold storage unit
appearance microwave: compact heating box
appearance cabinet: wall mounted cupboard
appearance sink: metal washing tub
appearance stove: cooking range
appearance shelf: wall rack
appearance sofa: cushioned seat
appearance bed: sleeping furniture
appearance desk: writing station
appearance drawer: sliding storage box
appearance lamp: bedside light
appearance tv: television screen
appearance basin: ceramic washstand
appearance bathcabinet: mirrored wall cupboard

prefix: Before the guests arrive,
prefix: When you get a moment,
prefix: To get the house in order,
prefix: As part of the evening routine,
prefix: Since we are expecting visitors,
)");
    return lex;
}

}  // namespace spo::taskgen
