#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itsminer/corpus/records.hpp"
#include "itsminer/features/features.hpp"
#include "itsminer/learn/learn.hpp"

namespace itsminer::runner {

/// The 80 day horizons: 1, 5, 10, 20, ..., 100, then 150 to 3500 in steps
/// of 50.
std::vector<std::int64_t> default_time_grid();

struct ExperimentSpec {
    corpus::IssueType issue_type = corpus::IssueType::Bug;
    learn::ClassifierKind classifier = learn::ClassifierKind::MNB;
    std::int64_t horizon_days = 1;
    features::WeightingScheme weighting = features::WeightingScheme::TF;
    features::FeatureFamilyKind family = features::FeatureFamilyKind::WordNgrams;
    bool balanced_test = false;
    std::uint64_t seed = 0;  // derived from the global seed and the fields above

    /// Stable identifier, e.g. "bug-mnb-n30-tfidf-word".
    std::string id() const;
};

struct RunConfig {
    // grid dimensions
    std::vector<corpus::IssueType> issue_types;
    std::vector<learn::ClassifierKind> classifiers;
    std::vector<std::int64_t> horizons;
    std::vector<features::WeightingScheme> weightings;
    std::vector<features::FeatureFamilyKind> families;
    bool balanced_test = false;

    // featurization
    int min_df = 2;
    int max_features = 100000;  // 0 = unlimited
    int word_n_min = 1;
    int word_n_max = 10;
    int pos_n_min = 2;
    int pos_n_max = 5;

    // split
    double train_fraction = 0.75;

    // execution
    std::uint64_t seed = 42;
    int workers = 2;
    bool rankings = false;
    int rank_dump_limit = 0;            // 0 = dump the full importance order
    std::string importance = "weights";  // "weights" or "model"

    learn::HyperParams hyper;

    RunConfig();  // fills the default full grid
};

/// Cross product of the enabled dimensions, in deterministic nested order
/// (type, classifier, horizon, weighting, family). Throws ConfigError on an
/// empty dimension. Default config yields 3*7*80*2*2 = 6720 specs.
std::vector<ExperimentSpec> build_grid(const RunConfig& config);

/// Parses the plain key-value config file (see default_config_text for the
/// full key list). Unknown keys are a ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Annotated config with every key at its default.
std::string default_config_text();

}  // namespace itsminer::runner
