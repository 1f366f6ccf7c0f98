#include "itsminer/features/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "itsminer/errors.hpp"

namespace itsminer::features {

FeatureCounts extract_ngrams(const std::vector<std::string>& units, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max)
        throw InvalidRange("invalid n-gram range [" + std::to_string(n_min) + ", " +
                           std::to_string(n_max) + "]");
    FeatureCounts counts;
    const int len = static_cast<int>(units.size());
    for (int n = n_min; n <= n_max; ++n) {
        for (int start = 0; start + n <= len; ++start) {
            std::string feature = units[start];
            for (int k = 1; k < n; ++k) {
                feature += kNgramSeparator;
                feature += units[start + k];
            }
            counts[feature] += 1.0;
        }
    }
    return counts;
}

double SparseVector::l2_norm() const {
    double sq = 0.0;
    for (const auto& [_, w] : entries) sq += w * w;
    return std::sqrt(sq);
}

Vocabulary Vocabulary::fit(const std::vector<FeatureCounts>& documents, FeatureFamily family,
                           int min_df, std::optional<int> max_features) {
    // document frequency per feature; map keeps features sorted for the
    // lexicographic index assignment below
    std::map<std::string, std::int64_t> df;
    for (const FeatureCounts& doc : documents)
        for (const auto& [feature, count] : doc)
            if (count > 0) ++df[feature];

    std::vector<std::pair<std::string, std::int64_t>> kept;
    kept.reserve(df.size());
    for (auto& [feature, d] : df)
        if (d >= min_df) kept.emplace_back(feature, d);

    if (max_features && static_cast<std::int64_t>(kept.size()) > *max_features) {
        // highest df first, ties lexicographic; then restore lexicographic order
        std::stable_sort(kept.begin(), kept.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        kept.resize(static_cast<std::size_t>(*max_features));
        std::sort(kept.begin(), kept.end());
    }

    if (kept.empty()) throw EmptyVocabulary("no feature reached min_df=" + std::to_string(min_df));

    Vocabulary vocab;
    vocab.n_documents_ = static_cast<std::int64_t>(documents.size());
    vocab.family_ = family;
    vocab.min_df_ = min_df;
    vocab.max_features_ = max_features;
    vocab.feature_by_index_.reserve(kept.size());
    vocab.df_by_index_.reserve(kept.size());
    for (auto& [feature, d] : kept) {
        vocab.index_.emplace(feature, static_cast<std::int32_t>(vocab.feature_by_index_.size()));
        vocab.feature_by_index_.push_back(feature);
        vocab.df_by_index_.push_back(d);
    }
    return vocab;
}

std::optional<std::int32_t> Vocabulary::index_of(const std::string& feature) const {
    auto it = index_.find(feature);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::int64_t Vocabulary::df(const std::string& feature) const {
    auto idx = index_of(feature);
    return idx ? df_by_index_[*idx] : 0;
}

double idf(std::int64_t n_documents, std::int64_t df) {
    return std::log((1.0 + static_cast<double>(n_documents)) / (1.0 + static_cast<double>(df))) + 1.0;
}

SparseVector vectorize_tf(const FeatureCounts& doc, const Vocabulary& vocab) {
    std::vector<std::pair<std::int32_t, double>> entries;
    for (const auto& [feature, count] : doc) {
        if (count == 0) continue;
        if (auto idx = vocab.index_of(feature)) entries.emplace_back(*idx, count);
    }
    std::sort(entries.begin(), entries.end());
    return SparseVector{vocab.size(), std::move(entries)};
}

SparseVector vectorize_tfidf(const FeatureCounts& doc, const Vocabulary& vocab) {
    SparseVector v = vectorize_tf(doc, vocab);
    for (auto& [idx, w] : v.entries) w *= idf(vocab.n_documents(), vocab.df_by_index(idx));
    double norm = v.l2_norm();
    if (norm > 0.0)
        for (auto& [_, w] : v.entries) w /= norm;
    return v;
}

SparseVector vectorize(const FeatureCounts& doc, const Vocabulary& vocab, WeightingScheme scheme) {
    return scheme == WeightingScheme::TF ? vectorize_tf(doc, vocab) : vectorize_tfidf(doc, vocab);
}

namespace {

std::string family_name(FeatureFamilyKind kind) {
    return kind == FeatureFamilyKind::WordNgrams ? "word" : "pos";
}

}  // namespace

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write vocabulary: " + path);
    out << "#vocab\tn_documents=" << n_documents_ << "\tfamily=" << family_name(family_.kind)
        << "\tn_min=" << family_.n_min << "\tn_max=" << family_.n_max << "\tmin_df=" << min_df_
        << "\tmax_features=" << (max_features_ ? std::to_string(*max_features_) : "none") << "\n";
    for (std::size_t i = 0; i < feature_by_index_.size(); ++i)
        out << feature_by_index_[i] << "\t" << i << "\t" << df_by_index_[i] << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read vocabulary: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("#vocab", 0) != 0)
        throw SchemaError("missing vocabulary header in " + path, 1);

    Vocabulary vocab;
    {
        std::istringstream hs(header);
        std::string field;
        while (std::getline(hs, field, '\t')) {
            auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            std::string key = field.substr(0, eq), value = field.substr(eq + 1);
            if (key == "n_documents") vocab.n_documents_ = std::stoll(value);
            else if (key == "family")
                vocab.family_.kind =
                    value == "pos" ? FeatureFamilyKind::PosNgrams : FeatureFamilyKind::WordNgrams;
            else if (key == "n_min") vocab.family_.n_min = std::stoi(value);
            else if (key == "n_max") vocab.family_.n_max = std::stoi(value);
            else if (key == "min_df") vocab.min_df_ = std::stoi(value);
            else if (key == "max_features" && value != "none") vocab.max_features_ = std::stoi(value);
        }
    }

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = (t1 == std::string::npos) ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw SchemaError("malformed vocabulary row", line_no);
        std::string feature = line.substr(0, t1);
        std::int32_t index = static_cast<std::int32_t>(std::stol(line.substr(t1 + 1, t2 - t1 - 1)));
        std::int64_t d = std::stoll(line.substr(t2 + 1));
        if (index != static_cast<std::int32_t>(vocab.feature_by_index_.size()))
            throw SchemaError("non-dense vocabulary index", line_no);
        vocab.index_.emplace(feature, index);
        vocab.feature_by_index_.push_back(std::move(feature));
        vocab.df_by_index_.push_back(d);
    }
    return vocab;
}

}  // namespace itsminer::features
