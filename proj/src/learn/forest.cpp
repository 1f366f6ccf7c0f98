#include <cmath>

#include "tree_builder.hpp"

namespace itsminer::learn::detail {

TreeModel fit_decision_tree(const Problem& p, const HyperParams& params) {
    ColumnIndex columns = ColumnIndex::build(p.X);
    TreeGrowOptions options;
    options.max_depth = params.tree_max_depth;
    options.min_samples_split = params.tree_min_samples_split;
    options.min_samples_leaf = params.tree_min_samples_leaf;
    options.features_per_split = 0;

    std::vector<std::int32_t> rows(p.X.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::int32_t>(i);
    Rng rng(params.seed);  // unused: the full-feature tree is deterministic
    return grow_classification_tree(columns, p.y01, rows, options, rng);
}

// Bagged CART ensemble: bootstrap per tree, sqrt(d) candidate features per
// split, majority vote at prediction time. Each tree's random stream is
// derived from (seed, tree index) so trees can be grown in any order.
ForestModel fit_forest(const Problem& p, const HyperParams& params) {
    ColumnIndex columns = ColumnIndex::build(p.X);
    TreeGrowOptions options;
    options.max_depth = params.tree_max_depth;
    options.min_samples_split = params.tree_min_samples_split;
    options.min_samples_leaf = params.tree_min_samples_leaf;
    options.features_per_split =
        std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(p.dim)))));

    const std::size_t n = p.X.size();
    ForestModel forest;
    forest.trees.reserve(static_cast<std::size_t>(params.rfc_trees));
    for (int t = 0; t < params.rfc_trees; ++t) {
        Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t) + 1));
        std::vector<std::int32_t> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i] = static_cast<std::int32_t>(rng.below(n));  // bootstrap draw
        forest.trees.push_back(grow_classification_tree(columns, p.y01, rows, options, rng));
    }
    return forest;
}

}  // namespace itsminer::learn::detail
