#include "itsminer/corpus/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "itsminer/errors.hpp"
#include "itsminer/rng.hpp"

using nlohmann::json;

namespace itsminer::corpus {

const char* issue_type_name(IssueType t) {
    switch (t) {
        case IssueType::Bug: return "bug";
        case IssueType::Improvement: return "improvement";
        case IssueType::NewFeature: return "new_feature";
    }
    return "bug";
}

std::optional<IssueType> parse_issue_type(const std::string& name) {
    std::string n;
    for (unsigned char c : name)
        if (!std::isspace(c) && c != '_' && c != '-') n += static_cast<char>(std::tolower(c));
    if (n == "bug" || n == "bugs") return IssueType::Bug;
    if (n == "improvement" || n == "improvements") return IssueType::Improvement;
    if (n == "newfeature" || n == "newfeatures" || n == "feature") return IssueType::NewFeature;
    return std::nullopt;
}

const char* success_label_name(SuccessLabel l) {
    return l == SuccessLabel::Successful ? "successful" : "unsuccessful";
}

std::optional<SuccessLabel> parse_success_label(const std::string& name) {
    std::string n;
    for (unsigned char c : name) n += static_cast<char>(std::tolower(c));
    if (n == "successful") return SuccessLabel::Successful;
    if (n == "unsuccessful") return SuccessLabel::Unsuccessful;
    return std::nullopt;
}

std::int64_t CorpusStats::total_issues() const {
    std::int64_t t = 0;
    for (const auto& row : issues)
        for (std::int64_t v : row) t += v;
    return t;
}

std::int64_t CorpusStats::total_comments() const {
    std::int64_t t = 0;
    for (const auto& row : comments)
        for (std::int64_t v : row) t += v;
    return t;
}

namespace {

// lowercase, strip apostrophes (ASCII and U+2019), collapse whitespace runs
std::string normalize_tag(const std::string& tag) {
    std::string out;
    out.reserve(tag.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < tag.size(); ++i) {
        unsigned char c = tag[i];
        if (c == '\'') continue;
        if (tag.compare(i, 3, "\xe2\x80\x99") == 0) {  // U+2019 right single quote
            i += 2;
            continue;
        }
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

}  // namespace

std::optional<SuccessLabel> map_resolution(const std::string& resolution_tag) {
    static const std::vector<std::string> successful = {"complete", "done", "fixed", "resolved"};
    static const std::vector<std::string> unsuccessful = {
        "abandoned", "cannot reproduce", "incomplete", "timed out",
        "unresolved", "wont do",          "wont fix"};
    std::string n = normalize_tag(resolution_tag);
    if (std::find(successful.begin(), successful.end(), n) != successful.end())
        return SuccessLabel::Successful;
    if (std::find(unsuccessful.begin(), unsuccessful.end(), n) != unsuccessful.end())
        return SuccessLabel::Unsuccessful;
    return std::nullopt;
}

std::int64_t resolution_days(const IssueRecord& issue) {
    if (issue.resolved_at < issue.created_at)
        throw InvalidInterval("issue " + issue.issue_id + " resolved before creation");
    return elapsed_days(issue.created_at, issue.resolved_at);
}

std::int64_t comment_offset_days(const IssueRecord& issue, const CommentRecord& comment,
                                 std::int64_t* clamped_counter) {
    std::int64_t days = elapsed_days(issue.created_at, comment.created_at);
    if (days < 0) {
        if (clamped_counter) ++*clamped_counter;
        return 0;
    }
    return days;
}

std::unordered_map<std::string, std::vector<std::size_t>> Corpus::comments_by_issue() const {
    std::unordered_map<std::string, std::vector<std::size_t>> by_issue;
    for (std::size_t i = 0; i < comments.size(); ++i) by_issue[comments[i].issue_id].push_back(i);
    return by_issue;
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    std::unordered_map<std::string, const IssueRecord*> by_id;
    by_id.reserve(corpus.issues.size());
    for (const IssueRecord& issue : corpus.issues) {
        ++stats.issues[static_cast<int>(issue.issue_type)][static_cast<int>(issue.label)];
        by_id.emplace(issue.issue_id, &issue);
    }
    for (const CommentRecord& comment : corpus.comments) {
        auto it = by_id.find(comment.issue_id);
        if (it == by_id.end()) continue;
        const IssueRecord& issue = *it->second;
        ++stats.comments[static_cast<int>(issue.issue_type)][static_cast<int>(issue.label)];
    }
    return stats;
}

Corpus sample_study_set(const Corpus& corpus, std::int64_t per_type_per_class, std::uint64_t seed,
                        std::vector<std::string>* deficient_cells) {
    // bucket issue indices per (type, label) cell in stored order
    std::array<std::array<std::vector<std::size_t>, 2>, 3> cells;
    for (std::size_t i = 0; i < corpus.issues.size(); ++i) {
        const IssueRecord& issue = corpus.issues[i];
        cells[static_cast<int>(issue.issue_type)][static_cast<int>(issue.label)].push_back(i);
    }

    std::vector<std::size_t> selected;
    for (int t = 0; t < 3; ++t) {
        for (int l = 0; l < 2; ++l) {
            auto& cell = cells[t][l];
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t * 2 + l + 1)));
            deterministic_shuffle(cell, rng);
            if (static_cast<std::int64_t>(cell.size()) < per_type_per_class) {
                if (deficient_cells)
                    deficient_cells->push_back(std::string(issue_type_name(static_cast<IssueType>(t))) +
                                               "/" + success_label_name(static_cast<SuccessLabel>(l)));
                selected.insert(selected.end(), cell.begin(), cell.end());
            } else {
                selected.insert(selected.end(), cell.begin(),
                                cell.begin() + static_cast<std::ptrdiff_t>(per_type_per_class));
            }
        }
    }
    std::sort(selected.begin(), selected.end());  // keep stored order in the subset

    Corpus out;
    out.issues.reserve(selected.size());
    std::unordered_map<std::string, bool> keep_issue;
    for (std::size_t idx : selected) {
        out.issues.push_back(corpus.issues[idx]);
        keep_issue.emplace(corpus.issues[idx].issue_id, true);
    }
    for (const CommentRecord& comment : corpus.comments)
        if (keep_issue.count(comment.issue_id)) out.comments.push_back(comment);
    return out;
}

namespace {

json issue_to_json(const IssueRecord& r) {
    return json{{"kind", "issue"},
                {"issue_id", r.issue_id},
                {"project_key", r.project_key},
                {"issue_type", issue_type_name(r.issue_type)},
                {"created_at", format_iso8601(r.created_at)},
                {"resolved_at", format_iso8601(r.resolved_at)},
                {"status", r.status},
                {"resolution_tag", r.resolution_tag},
                {"description", r.description},
                {"label", success_label_name(r.label)}};
}

json comment_to_json(const CommentRecord& r) {
    return json{{"kind", "comment"},
                {"comment_id", r.comment_id},
                {"issue_id", r.issue_id},
                {"created_at", format_iso8601(r.created_at)},
                {"description", r.description}};
}

IssueRecord issue_from_json(const json& j, std::size_t line_no) {
    try {
        IssueRecord r;
        r.issue_id = j.at("issue_id").get<std::string>();
        r.project_key = j.at("project_key").get<std::string>();
        auto type = parse_issue_type(j.at("issue_type").get<std::string>());
        if (!type) throw SchemaError("unknown issue_type", line_no);
        r.issue_type = *type;
        r.created_at = parse_iso8601(j.at("created_at").get<std::string>());
        r.resolved_at = parse_iso8601(j.at("resolved_at").get<std::string>());
        r.status = j.at("status").get<std::string>();
        r.resolution_tag = j.at("resolution_tag").get<std::string>();
        r.description = j.at("description").get<std::string>();
        auto label = parse_success_label(j.at("label").get<std::string>());
        if (!label) throw SchemaError("unknown label", line_no);
        r.label = *label;
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad issue record: ") + e.what(), line_no);
    } catch (const ProtocolError& e) {
        throw SchemaError(std::string("bad issue record: ") + e.what(), line_no);
    }
}

CommentRecord comment_from_json(const json& j, std::size_t line_no) {
    try {
        CommentRecord r;
        r.comment_id = j.at("comment_id").get<std::string>();
        r.issue_id = j.at("issue_id").get<std::string>();
        r.created_at = parse_iso8601(j.at("created_at").get<std::string>());
        r.description = j.at("description").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad comment record: ") + e.what(), line_no);
    } catch (const ProtocolError& e) {
        throw SchemaError(std::string("bad comment record: ") + e.what(), line_no);
    }
}

}  // namespace

void write_corpus(const std::string& path, const Corpus& corpus) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus: " + path);
    out << json{{"kind", "header"}, {"format", "itsminer-corpus"}, {"version", 1}}.dump() << "\n";
    for (const IssueRecord& r : corpus.issues) out << issue_to_json(r).dump() << "\n";
    for (const CommentRecord& r : corpus.comments) out << comment_to_json(r).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Corpus read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read corpus: " + path);
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("unparseable JSON", line_no);
        std::string kind = j.value("kind", "");
        if (kind == "header") continue;
        if (kind == "issue") corpus.issues.push_back(issue_from_json(j, line_no));
        else if (kind == "comment") corpus.comments.push_back(comment_from_json(j, line_no));
        else throw SchemaError("unknown record kind '" + kind + "'", line_no);
    }
    return corpus;
}

namespace {

std::string json_string_or_empty(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return "";
    if (j[key].is_string()) return j[key].get<std::string>();
    return j[key].dump();
}

}  // namespace

Corpus build_corpus(const std::string& raw_dump_path, BuildReport& report) {
    std::ifstream in(raw_dump_path);
    if (!in) throw IoError("cannot read raw dump: " + raw_dump_path);

    Corpus corpus;
    std::unordered_map<std::string, std::size_t> issue_index;
    std::vector<std::pair<std::string, CommentRecord>> pending_comments;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("unparseable JSON", line_no);
        std::string kind = j.value("kind", "");
        if (kind == "project" || kind == "header") continue;

        if (kind == "issue") {
            const json& data = j.contains("data") ? j["data"] : j;
            const json fields = data.contains("fields") ? data["fields"] : json::object();
            std::string id = data.contains("key") ? json_string_or_empty(data, "key")
                                                  : json_string_or_empty(data, "id");
            if (id.empty()) {
                report.excluded.push_back({"", "", "missing issue id"});
                continue;
            }

            std::string status;
            if (fields.contains("status") && fields["status"].is_object())
                status = json_string_or_empty(fields["status"], "name");
            if (status != "Closed") {
                report.excluded.push_back({id, "", "status not Closed"});
                continue;
            }

            std::string type_name;
            if (fields.contains("issuetype") && fields["issuetype"].is_object())
                type_name = json_string_or_empty(fields["issuetype"], "name");
            auto type = parse_issue_type(type_name);
            if (!type) {
                report.excluded.push_back({id, "", "issue type '" + type_name + "' not studied"});
                continue;
            }

            std::string tag;
            if (fields.contains("resolution") && fields["resolution"].is_object())
                tag = json_string_or_empty(fields["resolution"], "name");
            auto label = map_resolution(tag);
            if (!label) {
                report.excluded.push_back({id, tag, "unknown resolution"});
                continue;
            }

            std::string created = json_string_or_empty(fields, "created");
            std::string resolved = json_string_or_empty(fields, "resolutiondate");
            if (created.empty() || resolved.empty()) {
                report.excluded.push_back({id, tag, "missing timestamps"});
                continue;
            }

            IssueRecord r;
            r.issue_id = id;
            r.project_key = j.contains("project") ? json_string_or_empty(j, "project")
                                                  : (fields.contains("project") && fields["project"].is_object()
                                                         ? json_string_or_empty(fields["project"], "key")
                                                         : "");
            r.issue_type = *type;
            try {
                r.created_at = parse_iso8601(created);
                r.resolved_at = parse_iso8601(resolved);
            } catch (const ProtocolError&) {
                report.excluded.push_back({id, tag, "malformed timestamp"});
                continue;
            }
            if (r.resolved_at < r.created_at) {
                report.excluded.push_back({id, tag, "resolved before created"});
                continue;
            }
            r.status = status;
            r.resolution_tag = tag;
            r.description = json_string_or_empty(fields, "description");
            r.label = *label;
            issue_index.emplace(r.issue_id, corpus.issues.size());
            corpus.issues.push_back(std::move(r));
            ++report.issues_kept;
        } else if (kind == "comment") {
            const json& data = j.contains("data") ? j["data"] : j;
            CommentRecord c;
            c.comment_id = json_string_or_empty(data, "id");
            c.issue_id = json_string_or_empty(j, "issue_id");
            std::string created = json_string_or_empty(data, "created");
            if (c.issue_id.empty() || created.empty()) continue;
            try {
                c.created_at = parse_iso8601(created);
            } catch (const ProtocolError&) {
                continue;
            }
            c.description = json_string_or_empty(data, "body");
            pending_comments.emplace_back(c.issue_id, std::move(c));
        } else {
            throw SchemaError("unknown record kind '" + kind + "'", line_no);
        }
    }

    for (auto& [issue_id, comment] : pending_comments) {
        auto it = issue_index.find(issue_id);
        if (it == issue_index.end()) continue;  // comment of an excluded issue
        comment_offset_days(corpus.issues[it->second], comment, &report.clamped_comment_offsets);
        corpus.comments.push_back(std::move(comment));
        ++report.comments_kept;
    }
    return corpus;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void write_exclusion_report(const std::string& path, const std::vector<ExclusionRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write exclusion report: " + path);
    out << "issue_id,resolution_tag,reason\n";
    for (const ExclusionRow& row : rows)
        out << csv_escape(row.issue_id) << "," << csv_escape(row.resolution_tag) << ","
            << csv_escape(row.reason) << "\n";
}

}  // namespace itsminer::corpus
