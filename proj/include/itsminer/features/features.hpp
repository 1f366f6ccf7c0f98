#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace itsminer::features {

// Separator placed between the units of an n-gram. U+2581 (lower one-eighth
// block) cannot appear in tokens or tag names, so joined features never
// collide with each other.
inline constexpr const char* kNgramSeparator = "\xe2\x96\x81";

enum class FeatureFamilyKind : std::uint8_t { WordNgrams, PosNgrams };

struct FeatureFamily {
    FeatureFamilyKind kind = FeatureFamilyKind::WordNgrams;
    int n_min = 1;
    int n_max = 10;

    static FeatureFamily word_ngrams(int n_min = 1, int n_max = 10) {
        return {FeatureFamilyKind::WordNgrams, n_min, n_max};
    }
    static FeatureFamily pos_ngrams(int n_min = 2, int n_max = 5) {
        return {FeatureFamilyKind::PosNgrams, n_min, n_max};
    }
};

enum class WeightingScheme : std::uint8_t { TF, TFIDF };

/// Multiset of features of one document (feature string -> occurrence count).
using FeatureCounts = std::map<std::string, double>;

/// All contiguous n-grams of `units` for n in [n_min, n_max], joined with
/// kNgramSeparator. Throws InvalidRange when n_min < 1 or n_min > n_max.
FeatureCounts extract_ngrams(const std::vector<std::string>& units, int n_min, int n_max);

struct SparseVector {
    std::int32_t dim = 0;
    // strictly increasing indices, finite weights, no explicit zeros
    std::vector<std::pair<std::int32_t, double>> entries;

    double l2_norm() const;
    bool empty() const { return entries.empty(); }
};

class Vocabulary {
public:
    Vocabulary() = default;

    /// Fits a vocabulary over the documents' feature multisets: keeps
    /// features with document frequency >= min_df, optionally trims to the
    /// max_features highest-df features (ties broken lexicographically),
    /// and assigns dense indices in lexicographic feature order.
    /// Throws EmptyVocabulary when nothing survives pruning.
    static Vocabulary fit(const std::vector<FeatureCounts>& documents, FeatureFamily family,
                          int min_df = 2, std::optional<int> max_features = std::nullopt);

    std::int32_t size() const { return static_cast<std::int32_t>(index_.size()); }
    std::int64_t n_documents() const { return n_documents_; }
    const FeatureFamily& family() const { return family_; }

    /// Index of a feature, or nullopt when out of vocabulary.
    std::optional<std::int32_t> index_of(const std::string& feature) const;
    std::int64_t df(const std::string& feature) const;

    /// Features in index order (index i -> features()[i]).
    const std::vector<std::string>& features() const { return feature_by_index_; }
    std::int64_t df_by_index(std::int32_t index) const { return df_by_index_[index]; }

    /// TSV persistence: header line carries n_documents, family and the
    /// pruning thresholds; rows are feature, index, df.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

    int min_df() const { return min_df_; }
    std::optional<int> max_features() const { return max_features_; }

private:
    std::unordered_map<std::string, std::int32_t> index_;
    std::vector<std::string> feature_by_index_;
    std::vector<std::int64_t> df_by_index_;
    std::int64_t n_documents_ = 0;
    FeatureFamily family_;
    int min_df_ = 2;
    std::optional<int> max_features_;
};

/// Raw in-vocabulary counts; out-of-vocabulary features are dropped.
SparseVector vectorize_tf(const FeatureCounts& doc, const Vocabulary& vocab);

/// tf * (ln((1 + N) / (1 + df)) + 1), then L2-normalized. The all-zero
/// vector stays zero.
SparseVector vectorize_tfidf(const FeatureCounts& doc, const Vocabulary& vocab);

SparseVector vectorize(const FeatureCounts& doc, const Vocabulary& vocab, WeightingScheme scheme);

double idf(std::int64_t n_documents, std::int64_t df);

}  // namespace itsminer::features
