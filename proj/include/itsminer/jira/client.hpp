#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace itsminer::jira {

struct ItsEndpoint {
    std::string base_url;  // scheme://host[:port][/prefix]
    std::optional<std::string> auth_token;
    int page_size = 50;
    int max_retries = 3;          // total attempts; a 0 is treated as 1
    std::int64_t min_request_interval_ms = 0;
    int max_in_flight = 4;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;
};

struct RawIssuePage {
    std::vector<nlohmann::json> items;
    std::optional<std::string> next_cursor;  // absent on the final page
    std::optional<std::int64_t> total_reported;
};

/// Client for Jira-REST-v2-compatible endpoints. Read-only: search and
/// comment listing. Shareable across threads; requests are globally spaced
/// by min_request_interval and capped at max_in_flight concurrent calls.
class JiraClient {
public:
    explicit JiraClient(ItsEndpoint endpoint);
    ~JiraClient();

    /// Distinct project keys visible at the endpoint, in served order.
    std::vector<std::string> fetch_projects();

    /// One page of raw issues of a project; thread next_cursor to enumerate
    /// every issue exactly once.
    RawIssuePage fetch_issues(const std::string& project_key,
                              const std::optional<std::string>& cursor = std::nullopt);

    /// All comments of an issue in server order (pages threaded internally).
    std::vector<nlohmann::json> fetch_comments(const std::string& issue_id);

    const ItsEndpoint& endpoint() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Newline-delimited raw dump: one JSON object per line with a "kind" field
/// ("project", "issue" or "comment"), payloads stored verbatim under "data".
class RawDumpWriter {
public:
    explicit RawDumpWriter(const std::string& path);

    void write_project(const nlohmann::json& payload);
    void write_issue(const std::string& project_key, const nlohmann::json& payload);
    void write_comment(const std::string& issue_id, const nlohmann::json& payload);

private:
    void write_line(nlohmann::json record);
    std::ofstream out_;
    std::mutex mutex_;
};

/// Fetches all issues and comments of a project into the dump. Returns the
/// number of issues written.
std::int64_t ingest_project(JiraClient& client, const std::string& project_key,
                            RawDumpWriter& dump);

}  // namespace itsminer::jira
