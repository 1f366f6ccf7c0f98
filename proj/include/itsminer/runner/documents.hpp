#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "itsminer/corpus/corpus.hpp"

namespace itsminer::runner {

struct Document {
    std::string issue_id;
    std::string project_key;
    std::string text;  // replaced issue description + visible comments
    corpus::SuccessLabel label = corpus::SuccessLabel::Successful;
    corpus::IssueType issue_type = corpus::IssueType::Bug;
    std::int64_t horizon_days = 0;
};

/// One document per issue of the type resolved in more than horizon_days
/// days: issue description joined with the comments whose offset is within
/// the horizon (ascending by timestamp), all after apply_replacements.
/// Throws EmptyWindow when no issue qualifies.
std::vector<Document> select_window(const corpus::Corpus& corpus, corpus::IssueType issue_type,
                                    std::int64_t horizon_days);

/// Seeded shuffle, then split at floor(train_fraction * n). Throws
/// TooFewDocuments below 4 documents.
std::pair<std::vector<Document>, std::vector<Document>> split_train_test(
    const std::vector<Document>& documents, double train_fraction, std::uint64_t seed);

/// Downsamples the larger class (seeded, uniform, without replacement) to
/// the smaller class's size. Throws SingleClassError.
std::vector<Document> undersample(const std::vector<Document>& documents, std::uint64_t seed);

/// Same balancing applied to a test split.
std::vector<Document> balance_test(const std::vector<Document>& documents, std::uint64_t seed);

}  // namespace itsminer::runner
