#include "itsminer/eval/ranking.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace itsminer::eval {

std::vector<FeatureRankEntry> rank_features(const std::vector<ExperimentRanking>& rankings,
                                            int top_k) {
    struct Accum {
        std::int64_t n = 0;
        std::int64_t rank_sum = 0;
    };
    std::map<std::string, Accum> by_feature;

    // first sweep registers every feature seen anywhere
    for (const ExperimentRanking& r : rankings)
        for (const std::string& f : r.ordered_features) by_feature[f];

    for (const ExperimentRanking& r : rankings) {
        std::unordered_map<std::string, std::int64_t> rank_of;
        rank_of.reserve(r.ordered_features.size());
        for (std::size_t i = 0; i < r.ordered_features.size(); ++i)
            rank_of.emplace(r.ordered_features[i], static_cast<std::int64_t>(i) + 1);
        const std::int64_t absent_rank = static_cast<std::int64_t>(r.ordered_features.size()) + 1;
        for (auto& [feature, acc] : by_feature) {
            auto it = rank_of.find(feature);
            std::int64_t rank = (it == rank_of.end()) ? absent_rank : it->second;
            acc.rank_sum += rank;
            if (it != rank_of.end() && rank <= top_k) ++acc.n;
        }
    }

    std::vector<FeatureRankEntry> out;
    out.reserve(by_feature.size());
    const double n_experiments = static_cast<double>(rankings.size());
    for (auto& [feature, acc] : by_feature)
        out.push_back(FeatureRankEntry{feature, acc.n,
                                       n_experiments > 0 ? acc.rank_sum / n_experiments : 0.0});

    std::sort(out.begin(), out.end(), [](const FeatureRankEntry& a, const FeatureRankEntry& b) {
        if (a.n != b.n) return a.n > b.n;
        if (a.ar != b.ar) return a.ar < b.ar;
        return a.feature < b.feature;
    });
    return out;
}

std::vector<std::string> importance_from_weights(
    const features::Vocabulary& vocab, const std::vector<features::SparseVector>& class_vectors) {
    std::vector<double> mass(static_cast<std::size_t>(vocab.size()), 0.0);
    for (const features::SparseVector& v : class_vectors)
        for (const auto& [idx, w] : v.entries) mass[static_cast<std::size_t>(idx)] += w;
    return importance_from_scores(vocab, mass);
}

std::vector<std::string> importance_from_scores(const features::Vocabulary& vocab,
                                                const std::vector<double>& scores) {
    std::vector<std::int32_t> order(static_cast<std::size_t>(vocab.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
    const auto& names = vocab.features();
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        double sa = scores[static_cast<std::size_t>(a)], sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return names[static_cast<std::size_t>(a)] < names[static_cast<std::size_t>(b)];
    });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (std::int32_t idx : order) out.push_back(names[static_cast<std::size_t>(idx)]);
    return out;
}

}  // namespace itsminer::eval
