#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "itsminer/chrono_util.hpp"

namespace itsminer::corpus {

enum class IssueType : std::uint8_t { Bug, Improvement, NewFeature };

enum class SuccessLabel : std::uint8_t { Successful, Unsuccessful };

const char* issue_type_name(IssueType t);
std::optional<IssueType> parse_issue_type(const std::string& name);

const char* success_label_name(SuccessLabel l);
std::optional<SuccessLabel> parse_success_label(const std::string& name);

struct IssueRecord {
    std::string issue_id;
    std::string project_key;
    IssueType issue_type = IssueType::Bug;
    UtcSeconds created_at = 0;
    UtcSeconds resolved_at = 0;
    std::string status;          // "Closed" for every corpus record
    std::string resolution_tag;  // raw tag as served by the tracker
    std::string description;
    SuccessLabel label = SuccessLabel::Successful;
};

struct CommentRecord {
    std::string comment_id;
    std::string issue_id;
    UtcSeconds created_at = 0;
    std::string description;
};

/// Issue and comment counts per (issue type x label) cell.
struct CorpusStats {
    // indexed [issue_type][label]
    std::array<std::array<std::int64_t, 2>, 3> issues{};
    std::array<std::array<std::int64_t, 2>, 3> comments{};

    std::int64_t issue_cell(IssueType t, SuccessLabel l) const {
        return issues[static_cast<int>(t)][static_cast<int>(l)];
    }
    std::int64_t comment_cell(IssueType t, SuccessLabel l) const {
        return comments[static_cast<int>(t)][static_cast<int>(l)];
    }
    std::int64_t total_issues() const;
    std::int64_t total_comments() const;
};

}  // namespace itsminer::corpus
