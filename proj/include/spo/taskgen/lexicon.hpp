#pragma once

#include <map>
#include <string>
#include <vector>

namespace spo::taskgen {

// Word material for instruction augmentation: verb synonyms, per-class
// appearance descriptions ("apple" -> "red round fruit"), and context
// prefixes. The appearance map is injective so mentions stay recoverable.
struct Lexicon {
    std::map<std::string, std::vector<std::string>> verb_synonyms;
    std::map<std::string, std::string> appearance;
    std::vector<std::string> context_prefixes;

    static const Lexicon& defaults();

    // Text form, one entry per line:
    //   verb <word>: <syn> | <syn> ...
    //   appearance <class>: <description>
    //   prefix: <text>
    static Lexicon parse(const std::string& text);
    std::string str() const;

    // Inverse appearance lookup: class whose description appears verbatim in
    // the text, or empty.
    std::vector<std::string> classes_described_in(const std::string& lowercased_text) const;

    // Maps a synonym back to its base verb word; returns the word itself if
    // it is not a known synonym.
    std::string base_verb(const std::string& word) const;
};

// Lowercases ASCII.
std::string to_lower(const std::string& s);

// Replaces whole-word occurrences (case-insensitive match on the needle).
std::string replace_word(const std::string& text, const std::string& word, const std::string& with);

// True if `word` occurs as a whole word (case-insensitive).
bool contains_word(const std::string& text, const std::string& word);

}  // namespace spo::taskgen
