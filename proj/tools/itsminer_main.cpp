#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "itsminer/corpus/corpus.hpp"
#include "itsminer/errors.hpp"
#include "itsminer/jira/client.hpp"
#include "itsminer/runner/runner.hpp"

using namespace itsminer;

namespace {

int cmd_ingest(const std::string& endpoint_url, std::vector<std::string> projects,
               const std::string& out_path, const std::string& token, int page_size,
               int max_retries, std::int64_t interval_ms, bool all_projects, int workers) {
    jira::ItsEndpoint endpoint;
    endpoint.base_url = endpoint_url;
    if (!token.empty()) endpoint.auth_token = token;
    endpoint.page_size = page_size;
    endpoint.max_retries = max_retries;
    endpoint.min_request_interval_ms = interval_ms;
    endpoint.max_in_flight = workers;
    jira::JiraClient client(endpoint);

    jira::RawDumpWriter dump(out_path);
    if (all_projects) {
        projects = client.fetch_projects();
        for (const std::string& key : projects) dump.write_project({{"key", key}});
        std::cerr << "discovered " << projects.size() << " projects\n";
    }
    if (projects.empty()) {
        std::cerr << "nothing to ingest: give --project or --all-projects\n";
        return 1;
    }

    // distinct projects may be fetched concurrently; pages of one project
    // stay sequential inside ingest_project
    std::atomic<std::size_t> next{0};
    std::atomic<std::int64_t> total{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= projects.size()) break;
            std::int64_t n = jira::ingest_project(client, projects[i], dump);
            total += n;
            std::cerr << projects[i] << ": " << n << " issues\n";
        }
    };
    int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(projects.size())));
    std::vector<std::thread> threads;
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();

    std::cerr << "wrote " << total.load() << " issues to " << out_path << "\n";
    return 0;
}

int cmd_build_corpus(const std::string& in_path, const std::string& out_path,
                     const std::string& excluded_path) {
    corpus::BuildReport report;
    corpus::Corpus c = corpus::build_corpus(in_path, report);
    corpus::write_corpus(out_path, c);
    corpus::write_exclusion_report(excluded_path, report.excluded);

    corpus::CorpusStats stats = corpus::corpus_stats(c);
    std::cerr << "kept " << report.issues_kept << " issues, " << report.comments_kept
              << " comments; excluded " << report.excluded.size() << " (see " << excluded_path
              << ")\n";
    if (report.clamped_comment_offsets > 0)
        std::cerr << "clamped " << report.clamped_comment_offsets
                  << " negative comment offsets to 0\n";
    for (int t = 0; t < 3; ++t) {
        auto type = static_cast<corpus::IssueType>(t);
        std::cerr << corpus::issue_type_name(type) << ": "
                  << stats.issue_cell(type, corpus::SuccessLabel::Successful) << " successful / "
                  << stats.issue_cell(type, corpus::SuccessLabel::Unsuccessful)
                  << " unsuccessful\n";
    }
    return 0;
}

int cmd_sample(const std::string& in_path, const std::string& out_path, std::int64_t per_cell,
               std::uint64_t seed) {
    corpus::Corpus c = corpus::read_corpus(in_path);
    std::vector<std::string> deficient;
    corpus::Corpus sampled = corpus::sample_study_set(c, per_cell, seed, &deficient);
    corpus::write_corpus(out_path, sampled);
    std::cerr << "sampled " << sampled.issues.size() << " issues with "
              << sampled.comments.size() << " comments\n";
    for (const std::string& cell : deficient)
        std::cerr << "cell " << cell << " had fewer than " << per_cell
                  << " issues and was taken whole\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& corpus_path,
            const std::string& out_dir) {
    runner::RunConfig config =
        config_path.empty() ? runner::RunConfig{} : runner::parse_config_file(config_path);
    corpus::Corpus c = corpus::read_corpus(corpus_path);
    runner::GridOutcome outcome = runner::run_grid(config, c, out_dir);

    std::int64_t ran = 0, skipped = 0;
    for (const runner::ExperimentResult& r : outcome.results) (r.skipped() ? skipped : ran)++;
    std::cerr << "ran " << ran << " experiments, skipped " << skipped << "\n";
    std::cerr << "results: " << outcome.results_csv << "\n";
    std::cerr << "stats:   " << outcome.stats_csv << "\n";
    std::cerr << "series:  " << outcome.success_series_csv << "\n";
    if (!outcome.rankings_dir.empty()) std::cerr << "ranks:   " << outcome.rankings_dir << "\n";
    return 0;
}

int cmd_rank(const std::string& results_dir, const std::string& out_path, int top_k) {
    std::string rankings_dir = (std::filesystem::path(results_dir) / "rankings").string();
    runner::write_feature_rank_report(rankings_dir, out_path, top_k);
    std::cerr << "wrote " << out_path << "\n";
    return 0;
}

int cmd_report(const std::string& results_dir, const std::string& format,
               const std::string& out_path) {
    auto rows =
        runner::read_results_csv((std::filesystem::path(results_dir) / "results.csv").string());
    std::string path = out_path.empty()
                           ? (std::filesystem::path(results_dir) / ("stats." + format)).string()
                           : out_path;
    runner::write_stats_report(path, rows, format);
    std::cerr << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"issue-success prediction toolkit: mines Jira-compatible trackers, builds a "
                 "labeled corpus, and runs the time-windowed classification experiment grid"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "fetch issues and comments into a raw dump");
    std::string endpoint_url, token, ingest_out = "raw.jsonl";
    std::vector<std::string> projects;
    int page_size = 50, max_retries = 3, ingest_workers = 2;
    std::int64_t interval_ms = 250;
    bool all_projects = false;
    ingest->add_option("--endpoint", endpoint_url, "tracker base URL")->required();
    ingest->add_option("--project", projects, "project key (repeatable)");
    ingest->add_flag("--all-projects", all_projects, "ingest every visible project");
    ingest->add_option("--out", ingest_out, "raw dump path");
    ingest->add_option("--token", token, "bearer token");
    ingest->add_option("--page-size", page_size, "issues per page");
    ingest->add_option("--max-retries", max_retries, "attempts per request");
    ingest->add_option("--interval-ms", interval_ms, "minimum delay between requests");
    ingest->add_option("--workers", ingest_workers, "concurrent project fetches");

    // build-corpus
    auto* build = app.add_subcommand("build-corpus", "normalize a raw dump into a labeled corpus");
    std::string build_in = "raw.jsonl", build_out = "corpus.jsonl", excluded_out = "excluded.csv";
    build->add_option("--in", build_in, "raw dump path");
    build->add_option("--out", build_out, "corpus path");
    build->add_option("--excluded", excluded_out, "exclusion report CSV");

    // sample
    auto* sample = app.add_subcommand("sample", "balanced study-set subsample");
    std::string sample_in = "corpus.jsonl", sample_out = "sampled.jsonl";
    std::int64_t per_cell = 5000;
    std::uint64_t sample_seed = 42;
    sample->add_option("--in", sample_in, "corpus path");
    sample->add_option("--out", sample_out, "sampled corpus path");
    sample->add_option("--per-cell", per_cell, "issues per (type x label) cell");
    sample->add_option("--seed", sample_seed, "sampling seed");

    // run
    auto* run = app.add_subcommand("run", "execute the experiment grid");
    std::string config_path, run_corpus = "corpus.jsonl", run_out = "results";
    bool print_default_config = false;
    run->add_option("--config", config_path, "grid config file (defaults when omitted)");
    run->add_option("--corpus", run_corpus, "corpus path");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--print-default-config", print_default_config,
                  "print the annotated default config and exit");

    // rank
    auto* rank = app.add_subcommand("rank", "aggregate per-experiment feature rankings");
    std::string rank_results = "results", rank_out = "feature_ranks.csv";
    int top_k = 100;
    rank->add_option("--results", rank_results, "results directory of a run with rankings on");
    rank->add_option("--out", rank_out, "output CSV");
    rank->add_option("--top-k", top_k, "rank threshold for the N column");

    // report
    auto* report = app.add_subcommand("report", "descriptive statistics of a results CSV");
    std::string report_results = "results", report_format = "csv", report_out;
    report->add_option("--results", report_results, "results directory");
    report->add_option("--format", report_format, "csv or md")
        ->check(CLI::IsMember({"csv", "md"}));
    report->add_option("--out", report_out, "output path (default <results>/stats.<format>)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest)
            return cmd_ingest(endpoint_url, projects, ingest_out, token, page_size, max_retries,
                              interval_ms, all_projects, ingest_workers);
        if (*build) return cmd_build_corpus(build_in, build_out, excluded_out);
        if (*sample) return cmd_sample(sample_in, sample_out, per_cell, sample_seed);
        if (*run) {
            if (print_default_config) {
                std::cout << runner::default_config_text();
                return 0;
            }
            return cmd_run(config_path, run_corpus, run_out);
        }
        if (*rank) return cmd_rank(rank_results, rank_out, top_k);
        if (*report) return cmd_report(report_results, report_format, report_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
