#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itsminer/corpus/corpus.hpp"
#include "itsminer/eval/metrics.hpp"
#include "itsminer/runner/documents.hpp"
#include "itsminer/runner/grid.hpp"

namespace itsminer::runner {

struct ExperimentResult {
    ExperimentSpec spec;
    eval::MetricSet metrics;
    std::int64_t n_train = 0;
    std::int64_t n_test = 0;
    std::int64_t train_successful = 0;
    std::int64_t train_unsuccessful = 0;
    std::int64_t test_successful = 0;
    std::int64_t test_unsuccessful = 0;
    std::int32_t vocab_size = 0;
    double wall_time_s = 0.0;  // informational; kept out of the CSV outputs
    std::string skip_reason;   // empty when the experiment ran

    bool skipped() const { return !skip_reason.empty(); }

    // importance orders per target class, when rankings are enabled
    std::optional<std::vector<std::string>> ranking_successful;
    std::optional<std::vector<std::string>> ranking_unsuccessful;
};

/// select_window -> split -> undersample(train) -> [balance_test] ->
/// fit vocabulary on train only -> vectorize -> fit -> predict -> metrics.
/// Pipeline-stage failures (EmptyWindow, TooFewDocuments, SingleClassError,
/// EmptyVocabulary) become a skip record, never an exception.
ExperimentResult run_experiment(const ExperimentSpec& spec, const corpus::Corpus& corpus,
                                const RunConfig& config);

struct GridOutcome {
    std::vector<ExperimentResult> results;  // spec order
    std::string results_csv;
    std::string stats_csv;
    std::string success_series_csv;
    std::string pearson_csv;
    std::string rankings_dir;  // empty when rankings are disabled
};

/// Runs every spec of the grid (config.workers in parallel), then writes
/// results.csv, the per-(type, classifier) descriptive statistics, the
/// success-percentage-vs-horizon series with its per-project Pearson
/// coefficient, and optional per-experiment feature rankings.
GridOutcome run_grid(const RunConfig& config, const corpus::Corpus& corpus,
                     const std::string& out_dir);

// --- report / rank helpers (consume run_grid outputs) -------------------------

struct ResultRow {
    ExperimentSpec spec;
    std::string experiment_id;
    eval::MetricSet metrics;
    std::int64_t n_train = 0;
    std::int64_t n_test = 0;
    std::string skip_reason;
};

std::vector<ResultRow> read_results_csv(const std::string& path);

/// Appendix-C-shaped block: per (issue type, classifier), min/max/mean/
/// variance/std of each metric over the experiments where it was defined.
void write_stats_report(const std::string& path, const std::vector<ResultRow>& rows,
                        const std::string& format /* "csv" or "md" */);

/// Aggregates the per-experiment rankings dumped under <results>/rankings
/// into feature,N,AR,class,issue_type rows.
void write_feature_rank_report(const std::string& rankings_dir, const std::string& out_path,
                               int top_k);

}  // namespace itsminer::runner
