#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "itsminer/corpus/records.hpp"

namespace itsminer::corpus {

/// Maps a resolution tag to its success label, or nullopt for tags outside
/// both published lists (the caller excludes those records and reports them).
/// Matching is case-insensitive with apostrophes removed and whitespace
/// collapsed, so "Won't Fix", "wont fix" and "WONT  FIX" all agree.
std::optional<SuccessLabel> map_resolution(const std::string& resolution_tag);

/// Whole days from creation to resolution. Throws InvalidInterval when
/// resolved_at < created_at.
std::int64_t resolution_days(const IssueRecord& issue);

/// Whole days from issue creation to comment creation, clamped at 0 for
/// clock-skewed data. `clamped_counter`, when given, is incremented on clamp.
std::int64_t comment_offset_days(const IssueRecord& issue, const CommentRecord& comment,
                                 std::int64_t* clamped_counter = nullptr);

struct Corpus {
    std::vector<IssueRecord> issues;
    std::vector<CommentRecord> comments;

    /// Comment indices per issue id, in stored order.
    std::unordered_map<std::string, std::vector<std::size_t>> comments_by_issue() const;
};

CorpusStats corpus_stats(const Corpus& corpus);

/// Deterministic balanced subsample: up to per_type_per_class issues per
/// (type x label) cell, all comments of the selected issues carried along.
/// Cells with fewer issues are taken whole; `deficient_cells`, when given,
/// receives "type/label" names of those cells.
Corpus sample_study_set(const Corpus& corpus, std::int64_t per_type_per_class, std::uint64_t seed,
                        std::vector<std::string>* deficient_cells = nullptr);

/// JSONL persistence: one object per line with a "kind" field ("issue" or
/// "comment"), timestamps as ISO-8601 UTC strings. Lossless round-trip.
void write_corpus(const std::string& path, const Corpus& corpus);
Corpus read_corpus(const std::string& path);

struct ExclusionRow {
    std::string issue_id;
    std::string resolution_tag;
    std::string reason;
};

struct BuildReport {
    std::int64_t issues_kept = 0;
    std::int64_t comments_kept = 0;
    std::int64_t clamped_comment_offsets = 0;
    std::vector<ExclusionRow> excluded;
};

/// Normalizes a raw ingest dump (see jira::RawDumpWriter) into typed records:
/// keeps Closed issues of the three studied types whose resolution tag maps
/// to a label; everything else lands in the exclusion report.
Corpus build_corpus(const std::string& raw_dump_path, BuildReport& report);

/// CSV with columns issue_id, resolution_tag, reason.
void write_exclusion_report(const std::string& path, const std::vector<ExclusionRow>& rows);

}  // namespace itsminer::corpus
