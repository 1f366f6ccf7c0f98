#include "itsminer/textprep/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <unordered_map>

#include "itsminer/errors.hpp"

namespace itsminer::textprep {

namespace {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_digit(unsigned char c) { return std::isdigit(c); }

bool at_word_boundary_before(const std::string& s, std::size_t pos) {
    return pos == 0 || !is_word_char(static_cast<unsigned char>(s[pos - 1]));
}

bool at_word_boundary_after(const std::string& s, std::size_t end) {
    return end >= s.size() || !is_word_char(static_cast<unsigned char>(s[end]));
}

// --- code rule ---------------------------------------------------------------

// Finds a fence opener at `pos`; returns the length of the opener and the
// closing fence string, or 0 if none.
std::size_t match_fence_open(const std::string& s, std::size_t pos, std::string& closer) {
    if (s.compare(pos, 3, "```") == 0) {
        closer = "```";
        return 3;
    }
    if (s.compare(pos, 5, "{code") == 0 && pos + 5 < s.size() &&
        (s[pos + 5] == '}' || s[pos + 5] == ':')) {
        std::size_t brace = s.find('}', pos + 5);
        if (brace != std::string::npos) {
            closer = "{code}";
            return brace - pos + 1;
        }
    }
    if (s.compare(pos, 10, "{noformat}") == 0) {
        closer = "{noformat}";
        return 10;
    }
    return 0;
}

std::string replace_fenced_code(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        std::string closer;
        std::size_t open_len = 0;
        if (text[i] == '`' || text[i] == '{')
            open_len = match_fence_open(text, i, closer);
        if (open_len == 0) {
            out += text[i++];
            continue;
        }
        std::size_t close_pos = text.find(closer, i + open_len);
        out += kCodePlaceholder;
        if (close_pos == std::string::npos) break;  // unterminated: swallow the rest
        i = close_pos + closer.size();
    }
    return out;
}

// A line qualifies as code when it shows at least two of: braces, semicolons,
// '=' assignments, indentation of four or more columns.
bool is_code_line(const std::string& line) {
    int signals = 0;
    if (line.find('{') != std::string::npos || line.find('}') != std::string::npos) ++signals;
    if (line.find(';') != std::string::npos) ++signals;
    if (line.find('=') != std::string::npos) ++signals;
    std::size_t indent = 0;
    for (char c : line) {
        if (c == ' ')
            ++indent;
        else if (c == '\t')
            indent += 4;
        else
            break;
    }
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (indent >= 4 && !blank) ++signals;
    return signals >= 2;
}

std::string replace_code_lines(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::size_t end = (nl == std::string::npos) ? text.size() : nl;
        std::string line = text.substr(start, end - start);
        out += is_code_line(line) ? kCodePlaceholder : line;
        if (nl == std::string::npos) break;
        out += '\n';
        start = nl + 1;
    }
    return out;
}

// --- url rule ----------------------------------------------------------------

bool is_scheme_char(unsigned char c) { return std::isalnum(c) || c == '+' || c == '.' || c == '-'; }

std::string replace_urls(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t match_len = 0;
        // scheme://... form
        if (std::isalpha(static_cast<unsigned char>(text[i])) && at_word_boundary_before(text, i)) {
            std::size_t j = i;
            while (j < text.size() && is_scheme_char(static_cast<unsigned char>(text[j]))) ++j;
            if (j + 2 < text.size() && text.compare(j, 3, "://") == 0) {
                j += 3;
                while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
                match_len = j - i;
            }
        }
        // bare www. form
        if (match_len == 0 && text.compare(i, 4, "www.") == 0 && at_word_boundary_before(text, i)) {
            std::size_t j = i + 4;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j > i + 4) match_len = j - i;
        }
        if (match_len > 0) {
            // trailing sentence punctuation belongs to the prose, not the URL
            while (match_len > 0) {
                char c = text[i + match_len - 1];
                if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
                    c == ')' || c == ']' || c == '"' || c == '\'' || c == '>')
                    --match_len;
                else
                    break;
            }
            if (match_len > 0) {
                out += kUrlPlaceholder;
                i += match_len;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

// --- email rule --------------------------------------------------------------

bool is_email_local_char(unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}
bool is_email_domain_char(unsigned char c) { return std::isalnum(c) || c == '.' || c == '-'; }

std::string replace_emails(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '@' && i > 0 && i + 1 < text.size()) {
            // widen left over the local part
            std::size_t lo = i;
            while (lo > 0 && is_email_local_char(static_cast<unsigned char>(text[lo - 1]))) --lo;
            std::size_t hi = i + 1;
            while (hi < text.size() && is_email_domain_char(static_cast<unsigned char>(text[hi]))) ++hi;
            // domain needs a dot followed by two or more letters
            std::string domain = text.substr(i + 1, hi - i - 1);
            std::size_t last_dot = domain.rfind('.');
            bool tld_ok = last_dot != std::string::npos && domain.size() - last_dot - 1 >= 2 &&
                          std::all_of(domain.begin() + last_dot + 1, domain.end(), [](char c) {
                              return std::isalpha(static_cast<unsigned char>(c));
                          });
            if (lo < i && tld_ok) {
                out.resize(out.size() - (i - lo));  // drop the local part already copied
                out += kEmailPlaceholder;
                i = hi;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

// --- user rule ---------------------------------------------------------------

std::string replace_users(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        // Jira bracket mention: [~name] or [~accountid:...]
        if (text[i] == '[' && i + 1 < text.size() && text[i + 1] == '~') {
            std::size_t close = text.find(']', i + 2);
            if (close != std::string::npos && close > i + 2) {
                out += kUserPlaceholder;
                i = close + 1;
                continue;
            }
        }
        // @handle mention
        if (text[i] == '@' && at_word_boundary_before(text, i)) {
            std::size_t j = i + 1;
            while (j < text.size()) {
                unsigned char c = text[j];
                if (std::isalnum(c) || c == '_' || c == '-' || c == '.')
                    ++j;
                else
                    break;
            }
            // a trailing dot is sentence punctuation
            while (j > i + 1 && text[j - 1] == '.') --j;
            if (j > i + 1) {
                out += kUserPlaceholder;
                i = j;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

// --- path rule ---------------------------------------------------------------

bool is_path_seg_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-' || c == '+';
}

// Matches a filesystem path starting at pos; returns its length or 0.
// Accepted shapes: /a/b (two or more segments), ~/a, C:\a, \\host\share,
// and relative a/b/c (two or more separators) or a/b.ext.
std::size_t match_path(const std::string& s, std::size_t pos) {
    std::size_t j = pos;
    int separators = 0;
    bool absolute = false;
    if (s[j] == '~' && j + 1 < s.size() && s[j + 1] == '/') {
        absolute = true;
        j += 1;
    } else if (s[j] == '/') {
        absolute = true;
    } else if (std::isalpha(static_cast<unsigned char>(s[j])) && j + 2 < s.size() && s[j + 1] == ':' &&
               (s[j + 2] == '\\' || s[j + 2] == '/')) {
        // windows drive
        std::size_t k = j + 3;
        while (k < s.size() && (is_path_seg_char(static_cast<unsigned char>(s[k])) || s[k] == '\\' || s[k] == '/'))
            ++k;
        return (k > j + 3) ? k - pos : 0;
    } else if (s.compare(j, 2, "\\\\") == 0) {
        std::size_t k = j + 2;
        while (k < s.size() && (is_path_seg_char(static_cast<unsigned char>(s[k])) || s[k] == '\\')) ++k;
        return (k > j + 2) ? k - pos : 0;
    }

    bool last_seg_has_dot = false;
    bool any_letter = false;
    std::size_t k = j;
    while (k < s.size()) {
        if (s[k] == '/') {
            ++separators;
            last_seg_has_dot = false;
            ++k;
            continue;
        }
        if (!is_path_seg_char(static_cast<unsigned char>(s[k]))) break;
        if (s[k] == '.') last_seg_has_dot = true;
        if (std::isalpha(static_cast<unsigned char>(s[k]))) any_letter = true;
        ++k;
    }
    if (k == pos || s[k - 1] == '/') {
        // trailing slash is fine only for absolute paths with content
        if (!(absolute && k > j + 1)) {
            while (k > pos && s[k - 1] == '/') --k;
        }
    }
    if (!any_letter) return 0;
    std::size_t sep_count = static_cast<std::size_t>(separators);
    if (absolute && sep_count >= 2) return k - pos;           // /a/b
    if (!absolute && sep_count >= 2) return k - pos;          // a/b/c
    if (!absolute && sep_count == 1 && last_seg_has_dot) return k - pos;  // a/b.ext
    if (absolute && s[pos] == '~' && sep_count >= 1) return k - pos;      // ~/a
    return 0;
}

std::string replace_paths(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        bool could_start = (c == '/' || c == '~' || c == '\\' || std::isalnum(c) || c == '.' || c == '_');
        if (could_start && at_word_boundary_before(text, i)) {
            std::size_t len = match_path(text, i);
            if (len > 0) {
                out += kPathPlaceholder;
                i += len;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

// --- version rule ------------------------------------------------------------

// digit-dot sequence with at least one dot: 1.2, 1.2.3, optional leading v.
std::size_t match_version(const std::string& s, std::size_t pos) {
    std::size_t j = pos;
    if (s[j] == 'v' || s[j] == 'V') ++j;
    std::size_t digits_start = j;
    int groups = 0;
    while (j < s.size()) {
        std::size_t d = j;
        while (d < s.size() && is_digit(static_cast<unsigned char>(s[d]))) ++d;
        if (d == j) break;
        ++groups;
        j = d;
        if (j < s.size() && s[j] == '.' && j + 1 < s.size() && is_digit(static_cast<unsigned char>(s[j + 1])))
            ++j;
        else
            break;
    }
    if (j == digits_start || groups < 2) return 0;
    if (!at_word_boundary_after(s, j)) return 0;
    return j - pos;
}

std::string replace_versions(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if ((is_digit(c) || c == 'v' || c == 'V') && at_word_boundary_before(text, i)) {
            std::size_t len = match_version(text, i);
            if (len > 0) {
                out += kVersionPlaceholder;
                i += len;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

// --- vote rule ---------------------------------------------------------------

std::string replace_votes(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '+' && i + 1 < text.size() && text[i + 1] == '1' &&
            (i == 0 || std::isspace(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '(' ||
             text[i - 1] == '"') &&
            (i + 2 >= text.size() || !is_word_char(static_cast<unsigned char>(text[i + 2])))) {
            out += kVotePlaceholder;
            i += 2;
            continue;
        }
        out += text[i++];
    }
    return out;
}

// --- number rule -------------------------------------------------------------

std::string replace_numbers(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_digit(static_cast<unsigned char>(text[i])) && at_word_boundary_before(text, i)) {
            std::size_t j = i;
            while (j < text.size() && is_digit(static_cast<unsigned char>(text[j]))) ++j;
            if (at_word_boundary_after(text, j)) {
                out += kNumberPlaceholder;
                i = j;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

}  // namespace

const std::vector<ReplacementRule>& replacement_rules() {
    static const std::vector<ReplacementRule> rules = {
        {"code", "markup-fenced blocks and lines with two or more code signals "
                 "(braces, semicolons, assignments, deep indentation)", kCodePlaceholder},
        {"url", "scheme://... and www.-prefixed links", kUrlPlaceholder},
        {"email", "local@domain.tld addresses", kEmailPlaceholder},
        {"user", "@handle and [~name] mentions", kUserPlaceholder},
        {"path", "absolute, home-relative, drive-letter and multi-segment "
                 "relative filesystem paths", kPathPlaceholder},
        {"version", "digit-dot sequences like 1.2.3, optionally v-prefixed", kVersionPlaceholder},
        {"vote", "standalone +1", kVotePlaceholder},
        {"number", "bare integers", kNumberPlaceholder},
    };
    return rules;
}

std::string apply_replacements(const std::string& text) {
    std::string s = replace_fenced_code(text);
    s = replace_code_lines(s);
    s = replace_urls(s);
    s = replace_emails(s);
    s = replace_users(s);
    s = replace_paths(s);
    s = replace_versions(s);
    s = replace_votes(s);
    s = replace_numbers(s);
    return s;
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t position = 0;
    while (i < text.size()) {
        if (!is_word_char(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::string surface;
        while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) {
            unsigned char c = text[j];
            surface += (c < 0x80) ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
            ++j;
        }
        tokens.push_back(Token{std::move(surface), position++});
        i = j;
    }
    return tokens;
}

const char* pos_tag_name(PosTag tag) {
    switch (tag) {
        case PosTag::Noun: return "noun";
        case PosTag::Verb: return "verb";
        case PosTag::Adjective: return "adjective";
        case PosTag::Adverb: return "adverb";
        case PosTag::Determiner: return "determiner";
        case PosTag::Preposition: return "preposition";
        case PosTag::Pronoun: return "pronoun";
        case PosTag::Conjunction: return "conjunction";
        case PosTag::Number: return "number";
        case PosTag::Punct: return "punct";
        case PosTag::Symbol: return "symbol";
        case PosTag::Other: return "other";
    }
    return "other";
}

namespace {

PosTag parse_tag_name(const std::string& name, const std::string& path) {
    static const std::unordered_map<std::string, PosTag> table = {
        {"noun", PosTag::Noun},          {"verb", PosTag::Verb},
        {"adjective", PosTag::Adjective}, {"adverb", PosTag::Adverb},
        {"determiner", PosTag::Determiner}, {"preposition", PosTag::Preposition},
        {"pronoun", PosTag::Pronoun},    {"conjunction", PosTag::Conjunction},
        {"number", PosTag::Number},      {"punct", PosTag::Punct},
        {"symbol", PosTag::Symbol},      {"other", PosTag::Other},
    };
    auto it = table.find(name);
    if (it == table.end()) throw IoError("unknown PoS tag '" + name + "' in lexicon " + path);
    return it->second;
}

bool ends_with(const std::string& s, const char* suffix) {
    std::size_t n = std::char_traits<char>::length(suffix);
    return s.size() > n + 1 && s.compare(s.size() - n, n, suffix) == 0;
}

std::string default_lexicon_path() {
    if (const char* env = std::getenv("ITSMINER_LEXICON")) return env;
    return std::string(ITSMINER_DATA_DIR) + "/pos_lexicon.tsv";
}

}  // namespace

struct PosTagger::Impl {
    std::unordered_map<std::string, PosTag> lexicon;
};

PosTagger::PosTagger() : PosTagger(default_lexicon_path()) {}

PosTagger::PosTagger(const std::string& lexicon_path) {
    std::ifstream in(lexicon_path);
    if (!in) throw IoError("cannot open lexicon: " + lexicon_path);
    auto impl = std::make_shared<Impl>();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string word = line.substr(0, tab);
        std::string tag = line.substr(tab + 1);
        if (!tag.empty() && tag.back() == '\r') tag.pop_back();
        impl->lexicon.emplace(std::move(word), parse_tag_name(tag, lexicon_path));
    }
    impl_ = std::move(impl);
}

PosTag PosTagger::tag_word(const std::string& surface) const {
    std::string w;
    w.reserve(surface.size());
    for (unsigned char c : surface) w += (c < 0x80) ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);

    auto it = impl_->lexicon.find(w);
    if (it != impl_->lexicon.end()) return it->second;

    if (ends_with(w, "ly")) return PosTag::Adverb;
    if (ends_with(w, "ing") || ends_with(w, "ed")) return PosTag::Verb;
    if (ends_with(w, "tion") || ends_with(w, "ment") || ends_with(w, "ness")) return PosTag::Noun;
    if (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "able")) return PosTag::Adjective;

    bool all_digits = !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); });
    if (all_digits) return PosTag::Number;

    if (ends_with(w, "_specification")) return PosTag::Noun;

    bool has_alnum = std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; });
    if (!has_alnum) return PosTag::Symbol;

    return PosTag::Other;
}

std::vector<PosTag> PosTagger::tag(const std::vector<Token>& tokens) const {
    std::vector<PosTag> tags;
    tags.reserve(tokens.size());
    for (const Token& t : tokens) tags.push_back(tag_word(t.surface));
    return tags;
}

std::size_t PosTagger::lexicon_size() const { return impl_->lexicon.size(); }

const PosTagger& PosTagger::bundled() {
    static PosTagger tagger;
    return tagger;
}

}  // namespace itsminer::textprep
