#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace itsminer::textprep {

// Placeholder strings emitted by apply_replacements. Every one of them ends
// in "_specification" and contains neither digits nor separators, so a second
// pass over already-replaced text is a no-op.
inline constexpr const char* kUrlPlaceholder = "url_specification";
inline constexpr const char* kUserPlaceholder = "user_specification";
inline constexpr const char* kVotePlaceholder = "vote_specification";
inline constexpr const char* kNumberPlaceholder = "number_specification";
inline constexpr const char* kVersionPlaceholder = "version_specification";
inline constexpr const char* kEmailPlaceholder = "email_specification";
inline constexpr const char* kCodePlaceholder = "code_specification";
inline constexpr const char* kPathPlaceholder = "path_specification";

struct ReplacementRule {
    std::string name;
    std::string pattern;      // human-readable description of what it matches
    std::string placeholder;  // token the match becomes
};

/// The replacement rules in their fixed application order (code, url, email,
/// user, path, version, vote, number): longest-context first, so a URL
/// inside a code block is swallowed by the code rule.
const std::vector<ReplacementRule>& replacement_rules();

/// Replaces URLs, user mentions, "+1" votes, bare numbers, version strings,
/// emails, code fragments and filesystem paths with their placeholder tokens.
/// Idempotent: applying it twice equals applying it once.
std::string apply_replacements(const std::string& text);

struct Token {
    std::string surface;   // lowercased
    std::size_t position;  // 0-based index within the document
};

/// Splits on non-alphanumeric boundaries (underscore counts as a word
/// character so placeholders stay whole; bytes >= 0x80 are treated as word
/// characters so UTF-8 words are not torn apart). Tokens are lowercased,
/// standalone punctuation disappears.
std::vector<Token> tokenize(const std::string& text);

enum class PosTag : std::uint8_t {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Determiner,
    Preposition,
    Pronoun,
    Conjunction,
    Number,
    Punct,
    Symbol,
    Other,
};

const char* pos_tag_name(PosTag tag);

/// Coarse tagger: lexicon lookup first, then suffix rules (-ly adverb,
/// -ing/-ed verb, -tion/-ment/-ness noun, -ous/-ful/-able adjective), then
/// digit-shaped tokens as Number, placeholders as Noun, everything else
/// Other. The lexicon is a word<TAB>tag TSV loaded once per path.
class PosTagger {
public:
    /// Loads the bundled lexicon (ITSMINER_DATA_DIR/pos_lexicon.tsv).
    PosTagger();
    explicit PosTagger(const std::string& lexicon_path);

    std::vector<PosTag> tag(const std::vector<Token>& tokens) const;
    PosTag tag_word(const std::string& surface) const;

    std::size_t lexicon_size() const;

    /// Process-wide tagger backed by the bundled lexicon.
    static const PosTagger& bundled();

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace itsminer::textprep
