#include <doctest.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "itsminer/errors.hpp"
#include "itsminer/jira/client.hpp"
#include "itsminer/rng.hpp"

using namespace itsminer;
using namespace itsminer::jira;
using nlohmann::json;

namespace {

// In-process Jira-shaped server. Issues are PRJ-1..PRJ-n; comments are
// three per issue.
class MockJira {
public:
    explicit MockJira(int n_issues, int fail_first = 0) : n_issues_(n_issues), fail_budget_(fail_first) {
        server_.Get("/rest/api/2/project", [this](const httplib::Request&, httplib::Response& res) {
            if (consume_failure(res)) return;
            res.set_content(R"([{"key":"FLEX"},{"key":"JBIDE"},{"key":"SPR"}])", "application/json");
        });
        server_.Get("/rest/api/2/search",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        if (consume_failure(res)) return;
                        handle_search(req, res);
                    });
        server_.Get(R"(/rest/api/2/issue/([^/]+)/comment)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        if (consume_failure(res)) return;
                        handle_comments(req, res);
                    });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockJira() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int request_count() const { return requests_.load(); }

private:
    bool consume_failure(httplib::Response& res) {
        ++requests_;
        int before = fail_budget_.load();
        while (before > 0 && !fail_budget_.compare_exchange_weak(before, before - 1)) {
        }
        if (before > 0) {
            res.status = 503;
            res.set_content("try later", "text/plain");
            return true;
        }
        return false;
    }

    void handle_search(const httplib::Request& req, httplib::Response& res) {
        std::string jql = req.get_param_value("jql");
        if (jql != "project=PRJ") {
            res.status = 404;
            res.set_content(R"({"errorMessages":["no such project"]})", "application/json");
            return;
        }
        int start_at = std::stoi(req.get_param_value("startAt"));
        int max_results = std::stoi(req.get_param_value("maxResults"));
        json issues = json::array();
        for (int i = start_at; i < std::min(start_at + max_results, n_issues_); ++i) {
            issues.push_back(json{{"key", "PRJ-" + std::to_string(i + 1)},
                                  {"fields",
                                   {{"issuetype", {{"name", "Bug"}}},
                                    {"status", {{"name", "Closed"}}},
                                    {"resolution", {{"name", "Fixed"}}},
                                    {"created", "2020-01-01T00:00:00.000+0000"},
                                    {"resolutiondate", "2020-02-01T00:00:00.000+0000"},
                                    {"description", "issue body"}}}});
        }
        json body{{"startAt", start_at},
                  {"maxResults", max_results},
                  {"total", n_issues_},
                  {"issues", std::move(issues)}};
        res.set_content(body.dump(), "application/json");
    }

    void handle_comments(const httplib::Request& req, httplib::Response& res) {
        std::string issue_id = req.matches[1];
        if (issue_id == "GONE-1") {
            res.status = 404;
            res.set_content(R"({"errorMessages":["issue does not exist"]})", "application/json");
            return;
        }
        json comments = json::array();
        for (int i = 0; i < 3; ++i)
            comments.push_back(json{{"id", issue_id + "-c" + std::to_string(i)},
                                    {"body", "comment " + std::to_string(i)},
                                    {"created", "2020-01-02T00:00:00.000+0000"}});
        json body{{"startAt", 0}, {"maxResults", 50}, {"total", 3}, {"comments", std::move(comments)}};
        res.set_content(body.dump(), "application/json");
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int n_issues_;
    std::atomic<int> fail_budget_;
    std::atomic<int> requests_{0};
};

ItsEndpoint endpoint_for(const MockJira& mock) {
    ItsEndpoint ep;
    ep.base_url = mock.base_url();
    ep.page_size = 50;
    ep.max_retries = 3;
    return ep;
}

}  // namespace

TEST_SUITE("jira") {

TEST_CASE("endpoint validation") {
    ItsEndpoint ep;
    CHECK_THROWS_AS(ep.validate(), ConfigError);  // empty url
    ep.base_url = "nonsense";
    CHECK_THROWS_AS(ep.validate(), ConfigError);
    ep.base_url = "http://tracker.local";
    CHECK_NOTHROW(ep.validate());
    ep.page_size = 0;
    CHECK_THROWS_AS(ep.validate(), ConfigError);
}

TEST_CASE("fetch_projects returns served keys") {
    MockJira mock(5);
    JiraClient client(endpoint_for(mock));
    CHECK(client.fetch_projects() == std::vector<std::string>{"FLEX", "JBIDE", "SPR"});
}

TEST_CASE("pagination arithmetic: 120 issues at page size 50") {
    MockJira mock(120);
    ItsEndpoint ep = endpoint_for(mock);
    ep.page_size = 50;
    JiraClient client(ep);

    RawIssuePage p1 = client.fetch_issues("PRJ");
    CHECK(p1.items.size() == 50);
    REQUIRE(p1.next_cursor);
    REQUIRE(p1.total_reported);
    CHECK(*p1.total_reported == 120);

    RawIssuePage p2 = client.fetch_issues("PRJ", p1.next_cursor);
    CHECK(p2.items.size() == 50);
    REQUIRE(p2.next_cursor);

    RawIssuePage p3 = client.fetch_issues("PRJ", p2.next_cursor);
    CHECK(p3.items.size() == 20);
    CHECK(!p3.next_cursor);
}

TEST_CASE("zero-issue project yields one empty final page") {
    MockJira mock(0);
    JiraClient client(endpoint_for(mock));
    RawIssuePage page = client.fetch_issues("PRJ");
    CHECK(page.items.empty());
    CHECK(!page.next_cursor);
}

TEST_CASE("enumeration completeness over random sizes") {
    Rng rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        int k = static_cast<int>(rng.below(60));
        int page_size = 1 + static_cast<int>(rng.below(13));
        MockJira mock(k);
        ItsEndpoint ep = endpoint_for(mock);
        ep.page_size = page_size;
        JiraClient client(ep);

        std::set<std::string> seen;
        std::size_t fetched = 0;
        std::optional<std::string> cursor;
        for (;;) {
            RawIssuePage page = client.fetch_issues("PRJ", cursor);
            for (const json& item : page.items) {
                seen.insert(item.at("key").get<std::string>());
                ++fetched;
            }
            if (!page.next_cursor) break;
            cursor = page.next_cursor;
        }
        CHECK(fetched == static_cast<std::size_t>(k));      // no duplicates fetched
        CHECK(seen.size() == static_cast<std::size_t>(k));  // every id distinct
    }
}

TEST_CASE("unknown project raises UnknownProject") {
    MockJira mock(5);
    JiraClient client(endpoint_for(mock));
    CHECK_THROWS_AS(client.fetch_issues("ZZZZ"), UnknownProject);
}

TEST_CASE("comments are fetched with ids, bodies and timestamps") {
    MockJira mock(3);
    JiraClient client(endpoint_for(mock));
    auto comments = client.fetch_comments("PRJ-1");
    REQUIRE(comments.size() == 3);
    for (const json& c : comments) {
        CHECK(c.contains("id"));
        CHECK(c.contains("body"));
        CHECK(c.contains("created"));
    }
    CHECK_THROWS_AS(client.fetch_comments("GONE-1"), UnknownIssue);
}

TEST_CASE("retry budget: failures below the budget succeed, at it fail") {
    {
        MockJira mock(3, 2);  // first two requests fail
        ItsEndpoint ep = endpoint_for(mock);
        ep.max_retries = 3;
        JiraClient client(ep);
        CHECK_NOTHROW(client.fetch_projects());
    }
    {
        MockJira mock(3, 3);
        ItsEndpoint ep = endpoint_for(mock);
        ep.max_retries = 3;
        JiraClient client(ep);
        CHECK_THROWS_AS(client.fetch_projects(), NetworkError);
    }
}

TEST_CASE("politeness: consecutive requests are spaced by the interval") {
    MockJira mock(10);
    ItsEndpoint ep = endpoint_for(mock);
    ep.min_request_interval_ms = 60;
    ep.page_size = 5;
    JiraClient client(ep);

    auto start = std::chrono::steady_clock::now();
    client.fetch_issues("PRJ");                          // request 1
    client.fetch_issues("PRJ", std::optional<std::string>("5"));  // request 2
    double elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    CHECK(elapsed_ms >= 60.0);
}

TEST_CASE("ingest_project writes a replayable dump") {
    MockJira mock(7);
    ItsEndpoint ep = endpoint_for(mock);
    ep.page_size = 3;
    JiraClient client(ep);
    std::string path = "/tmp/itsminer_dump_test.jsonl";
    {
        RawDumpWriter dump(path);
        CHECK(ingest_project(client, "PRJ", dump) == 7);
    }
    std::ifstream in(path);
    int issues = 0, comments = 0;
    std::string line;
    while (std::getline(in, line)) {
        json j = json::parse(line);
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "issue") ++issues;
        else if (kind == "comment") ++comments;
        CHECK(j.contains("data"));
    }
    CHECK(issues == 7);
    CHECK(comments == 21);
}

TEST_CASE("malformed body raises ProtocolError") {
    httplib::Server bad;
    bad.Get("/rest/api/2/project", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>surprise</html>", "text/html");
    });
    int port = bad.bind_to_any_port("127.0.0.1");
    std::thread t([&] { bad.listen_after_bind(); });
    bad.wait_until_ready();

    ItsEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port);
    JiraClient client(ep);
    CHECK_THROWS_AS(client.fetch_projects(), ProtocolError);

    bad.stop();
    t.join();
}

TEST_CASE("auth failures raise AuthError") {
    httplib::Server locked;
    locked.Get("/rest/api/2/project", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("{}", "application/json");
    });
    int port = locked.bind_to_any_port("127.0.0.1");
    std::thread t([&] { locked.listen_after_bind(); });
    locked.wait_until_ready();

    ItsEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port);
    JiraClient client(ep);
    CHECK_THROWS_AS(client.fetch_projects(), AuthError);

    locked.stop();
    t.join();
}

}  // TEST_SUITE
