#include "itsminer/jira/client.hpp"

#include <chrono>
#include <condition_variable>
#include <thread>

#include <httplib.h>

#include "itsminer/errors.hpp"

using nlohmann::json;

namespace itsminer::jira {

void ItsEndpoint::validate() const {
    if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0 || scheme_end + 3 >= base_url.size())
        throw ConfigError("endpoint base_url is not a URL: " + base_url);
    if (page_size < 1) throw ConfigError("page_size must be >= 1");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (min_request_interval_ms < 0) throw ConfigError("min_request_interval must be >= 0");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
}

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // what httplib::Client takes
    std::string path_prefix;       // "" or "/jira"
};

ParsedUrl split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

}  // namespace

struct JiraClient::Impl {
    ItsEndpoint endpoint;
    ParsedUrl url;

    std::mutex pacing_mutex;
    std::chrono::steady_clock::time_point next_allowed = std::chrono::steady_clock::now();

    std::mutex slots_mutex;
    std::condition_variable slots_cv;
    int slots_free = 0;

    explicit Impl(ItsEndpoint ep) : endpoint(std::move(ep)), url(split_url(endpoint.base_url)) {
        slots_free = endpoint.max_in_flight;
    }

    // blocks until the politeness interval since the previous request elapsed
    void pace() {
        std::chrono::steady_clock::time_point wake;
        {
            std::lock_guard lock(pacing_mutex);
            auto now = std::chrono::steady_clock::now();
            wake = std::max(now, next_allowed);
            next_allowed = wake + std::chrono::milliseconds(endpoint.min_request_interval_ms);
        }
        std::this_thread::sleep_until(wake);
    }

    struct SlotGuard {
        Impl& impl;
        explicit SlotGuard(Impl& i) : impl(i) {
            std::unique_lock lock(impl.slots_mutex);
            impl.slots_cv.wait(lock, [&] { return impl.slots_free > 0; });
            --impl.slots_free;
        }
        ~SlotGuard() {
            {
                std::lock_guard lock(impl.slots_mutex);
                ++impl.slots_free;
            }
            impl.slots_cv.notify_one();
        }
    };

    // one GET with retries on transport failures and 5xx/429; other statuses
    // are reported to the caller for context-specific mapping
    httplib::Result get(const std::string& path) {
        SlotGuard slot(*this);
        int attempts = std::max(1, endpoint.max_retries);
        std::string last_error;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            pace();
            httplib::Client client(url.scheme_host_port);
            client.set_connection_timeout(30);
            client.set_read_timeout(60);
            client.set_follow_location(true);
            httplib::Headers headers;
            if (endpoint.auth_token)
                headers.emplace("Authorization", "Bearer " + *endpoint.auth_token);
            auto res = client.Get(url.path_prefix + path, headers);
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500 || res->status == 429) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            return res;
        }
        throw NetworkError("request failed after " + std::to_string(attempts) +
                           " attempts: " + url.scheme_host_port + url.path_prefix + path + " (" +
                           last_error + ")");
    }

    json get_json(const std::string& path, const char* not_found_means) {
        auto res = get(path);
        if (res->status == 401 || res->status == 403)
            throw AuthError("HTTP " + std::to_string(res->status) + " for " + path);
        if (res->status == 404 || res->status == 400)
            throw_not_found(not_found_means, path);
        if (res->status < 200 || res->status >= 300)
            throw ProtocolError("unexpected HTTP " + std::to_string(res->status) + " for " + path);
        json j = json::parse(res->body, nullptr, false);
        if (j.is_discarded()) throw ProtocolError("unparseable response body for " + path);
        return j;
    }

    [[noreturn]] static void throw_not_found(const char* kind, const std::string& path) {
        if (std::string(kind) == "project") throw UnknownProject("project not found: " + path);
        throw UnknownIssue("issue not found: " + path);
    }
};

JiraClient::JiraClient(ItsEndpoint endpoint) {
    endpoint.validate();
    impl_ = std::make_unique<Impl>(std::move(endpoint));
}

JiraClient::~JiraClient() = default;

const ItsEndpoint& JiraClient::endpoint() const { return impl_->endpoint; }

std::vector<std::string> JiraClient::fetch_projects() {
    json j = impl_->get_json("/rest/api/2/project", "project");
    if (!j.is_array()) throw ProtocolError("project listing is not an array");
    std::vector<std::string> keys;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("key") || !item["key"].is_string())
            throw ProtocolError("project entry without a key");
        std::string key = item["key"].get<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    return keys;
}

RawIssuePage JiraClient::fetch_issues(const std::string& project_key,
                                      const std::optional<std::string>& cursor) {
    if (project_key.empty()) throw ConfigError("project_key is empty");
    std::int64_t start_at = 0;
    if (cursor) {
        try {
            start_at = std::stoll(*cursor);
        } catch (const std::exception&) {
            throw ProtocolError("malformed cursor: " + *cursor);
        }
    }
    std::string path = "/rest/api/2/search?jql=" + url_encode("project=" + project_key) +
                       "&startAt=" + std::to_string(start_at) +
                       "&maxResults=" + std::to_string(impl_->endpoint.page_size);
    json j = impl_->get_json(path, "project");
    if (!j.is_object() || !j.contains("issues") || !j["issues"].is_array())
        throw ProtocolError("search response without an issues array");

    RawIssuePage page;
    for (const auto& issue : j["issues"]) page.items.push_back(issue);
    if (j.contains("total") && j["total"].is_number())
        page.total_reported = j["total"].get<std::int64_t>();

    std::int64_t next = start_at + static_cast<std::int64_t>(page.items.size());
    bool more = !page.items.empty() &&
                (!page.total_reported || next < *page.total_reported);
    if (more) page.next_cursor = std::to_string(next);
    return page;
}

std::vector<json> JiraClient::fetch_comments(const std::string& issue_id) {
    if (issue_id.empty()) throw ConfigError("issue_id is empty");
    std::vector<json> comments;
    std::int64_t start_at = 0;
    for (;;) {
        std::string path = "/rest/api/2/issue/" + url_encode(issue_id) +
                           "/comment?startAt=" + std::to_string(start_at) +
                           "&maxResults=" + std::to_string(impl_->endpoint.page_size);
        json j = impl_->get_json(path, "issue");
        if (!j.is_object() || !j.contains("comments") || !j["comments"].is_array())
            throw ProtocolError("comment response without a comments array");
        std::int64_t got = 0;
        for (const auto& c : j["comments"]) {
            comments.push_back(c);
            ++got;
        }
        std::int64_t total = j.contains("total") && j["total"].is_number()
                                 ? j["total"].get<std::int64_t>()
                                 : start_at + got;
        start_at += got;
        if (got == 0 || start_at >= total) break;
    }
    return comments;
}

RawDumpWriter::RawDumpWriter(const std::string& path) : out_(path) {
    if (!out_) throw IoError("cannot write raw dump: " + path);
}

void RawDumpWriter::write_line(json record) {
    std::lock_guard lock(mutex_);
    out_ << record.dump() << "\n";
    if (!out_) throw IoError("raw dump write failed");
}

void RawDumpWriter::write_project(const json& payload) {
    write_line(json{{"kind", "project"}, {"data", payload}});
}

void RawDumpWriter::write_issue(const std::string& project_key, const json& payload) {
    write_line(json{{"kind", "issue"}, {"project", project_key}, {"data", payload}});
}

void RawDumpWriter::write_comment(const std::string& issue_id, const json& payload) {
    write_line(json{{"kind", "comment"}, {"issue_id", issue_id}, {"data", payload}});
}

std::int64_t ingest_project(JiraClient& client, const std::string& project_key,
                            RawDumpWriter& dump) {
    std::int64_t n_issues = 0;
    std::optional<std::string> cursor;
    for (;;) {
        RawIssuePage page = client.fetch_issues(project_key, cursor);
        for (const json& issue : page.items) {
            dump.write_issue(project_key, issue);
            ++n_issues;
            std::string id = issue.contains("key") && issue["key"].is_string()
                                 ? issue["key"].get<std::string>()
                                 : (issue.contains("id") && issue["id"].is_string()
                                        ? issue["id"].get<std::string>()
                                        : "");
            if (id.empty()) continue;
            for (const json& comment : client.fetch_comments(id)) dump.write_comment(id, comment);
        }
        if (!page.next_cursor) break;
        cursor = page.next_cursor;
    }
    return n_issues;
}

}  // namespace itsminer::jira
