#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itsminer/features/features.hpp"

namespace itsminer::eval {

struct ExperimentRanking {
    std::string experiment_id;
    // full importance order: ordered_features[0] has rank 1
    std::vector<std::string> ordered_features;
};

struct FeatureRankEntry {
    std::string feature;
    std::int64_t n = 0;    // experiments where rank <= top_k
    double ar = 0.0;       // mean rank over ALL experiments, absent = |V|+1
};

/// Aggregates per-experiment importance orders. A feature absent from an
/// experiment's vocabulary counts at rank |that vocabulary| + 1, which is
/// what lets the mean rank exceed top_k. Output sorted by n descending,
/// then ar ascending, then feature name.
std::vector<FeatureRankEntry> rank_features(const std::vector<ExperimentRanking>& rankings,
                                            int top_k = 100);

/// Importance order for one class: features sorted by descending total
/// vectorized weight over the class's documents, ties lexicographic.
std::vector<std::string> importance_from_weights(const features::Vocabulary& vocab,
                                                 const std::vector<features::SparseVector>& class_vectors);

/// Alternative order from per-feature scores (e.g. linear-model
/// coefficients), same tie rule. Scores must have vocab size.
std::vector<std::string> importance_from_scores(const features::Vocabulary& vocab,
                                                const std::vector<double>& scores);

}  // namespace itsminer::eval
