#include <algorithm>
#include <cmath>
#include <limits>

#include "tree_builder.hpp"

namespace itsminer::learn::detail {

ColumnIndex ColumnIndex::build(const std::vector<SparseVector>& X) {
    ColumnIndex ci;
    ci.dim = X.empty() ? 0 : X.front().dim;
    ci.n_rows = X.size();
    ci.columns.resize(static_cast<std::size_t>(ci.dim));
    for (std::size_t row = 0; row < X.size(); ++row)
        for (const auto& [idx, v] : X[row].entries)
            if (v != 0.0)
                ci.columns[static_cast<std::size_t>(idx)].emplace_back(
                    static_cast<std::int32_t>(row), v);
    return ci;
}

namespace {

// per-row weight (bootstrap multiplicity), target sums for the split sweep
struct SplitStats {
    double w = 0.0;    // weight
    double s1 = 0.0;   // weighted positives (classification) / weighted grad (regression)
    double s2 = 0.0;   // weighted grad^2 (regression only)
};

struct Candidate {
    bool found = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // lower is better
};

class TreeGrower {
public:
    TreeGrower(const ColumnIndex& columns, const TreeGrowOptions& options, Rng& rng,
               const std::vector<int>* y01, const std::vector<double>* grad,
               const std::vector<double>* hess)
        : columns_(columns),
          options_(options),
          rng_(rng),
          y01_(y01),
          grad_(grad),
          hess_(hess),
          row_weight_(columns.n_rows, 0.0),
          row_multiplicity_(columns.n_rows, 0.0) {
        if (options_.features_per_split > 0) {
            perm_.resize(static_cast<std::size_t>(columns_.dim));
            for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<std::int32_t>(i);
        }
    }

    TreeModel grow(const std::vector<std::int32_t>& rows) {
        // collapse bootstrap multiplicity into weights
        std::vector<std::int32_t> unique_rows;
        {
            std::vector<std::int32_t> sorted = rows;
            std::sort(sorted.begin(), sorted.end());
            for (std::int32_t r : sorted) {
                if (unique_rows.empty() || unique_rows.back() != r) unique_rows.push_back(r);
                row_multiplicity_[static_cast<std::size_t>(r)] += 1.0;
            }
        }

        TreeModel tree;
        build_node(tree, unique_rows, 0);
        for (std::int32_t r : unique_rows) row_multiplicity_[static_cast<std::size_t>(r)] = 0.0;
        return tree;
    }

private:
    double target_pos(std::int32_t row) const {
        return y01_ ? static_cast<double>((*y01_)[static_cast<std::size_t>(row)])
                    : (*grad_)[static_cast<std::size_t>(row)];
    }

    // impurity proxy of a subset from aggregate sums; lower is better when
    // weighted by subset size
    double subset_cost(double w, double s1, double s2) const {
        if (w <= 0.0) return 0.0;
        if (y01_) {
            double p = s1 / w;
            return w * (1.0 - p * p - (1.0 - p) * (1.0 - p));  // w * gini
        }
        return s2 - s1 * s1 / w;  // weighted SSE of grad values
    }

    std::int32_t make_leaf(TreeModel& tree, double w, double s1, double sh) {
        TreeNode leaf;
        leaf.feature = -1;
        leaf.n_samples = static_cast<std::int64_t>(std::llround(w));
        if (y01_) {
            leaf.value = (w > 0.0) ? s1 / w : 0.0;
        } else {
            leaf.value = (sh > 1e-12) ? s1 / sh : 0.0;  // Newton step sum(g)/sum(h)
        }
        tree.nodes.push_back(leaf);
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }

    // Evaluates feature f for the node described by (rows marked in
    // row_weight_), returning threshold/score if a valid split exists.
    void eval_feature(std::int32_t f, double node_w, double node_s1, double node_s2,
                      Candidate& best) const {
        const auto& column = columns_.columns[static_cast<std::size_t>(f)];

        // gather present (nonzero) values of in-node rows
        thread_local std::vector<std::pair<double, SplitStats>> present;
        present.clear();
        double present_w = 0.0, present_s1 = 0.0, present_s2 = 0.0;
        for (const auto& [row, value] : column) {
            double w = row_weight_[static_cast<std::size_t>(row)];
            if (w == 0.0) continue;
            double t = target_pos(row);
            present.push_back({value, SplitStats{w, w * t, w * t * t}});
            present_w += w;
            present_s1 += w * t;
            present_s2 += w * t * t;
        }
        if (present.empty()) return;  // feature constant (all zero) in node

        double zero_w = node_w - present_w;
        if (zero_w > 0.0) {
            double zero_s1 = node_s1 - present_s1;
            double zero_s2 = node_s2 - present_s2;
            present.push_back({0.0, SplitStats{zero_w, zero_s1, zero_s2}});
        }
        std::sort(present.begin(), present.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (present.front().first == present.back().first) return;  // constant

        double left_w = 0.0, left_s1 = 0.0, left_s2 = 0.0;
        const double msl = static_cast<double>(options_.min_samples_leaf);
        for (std::size_t i = 0; i + 1 < present.size(); ++i) {
            left_w += present[i].second.w;
            left_s1 += present[i].second.s1;
            left_s2 += present[i].second.s2;
            if (present[i].first == present[i + 1].first) continue;
            double right_w = node_w - left_w;
            if (left_w < msl || right_w < msl) continue;
            double cost = subset_cost(left_w, left_s1, left_s2) +
                          subset_cost(right_w, node_s1 - left_s1, node_s2 - left_s2);
            if (cost < best.score) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (present[i].first + present[i + 1].first);
                best.score = cost;
            }
        }
    }

    std::int32_t build_node(TreeModel& tree, const std::vector<std::int32_t>& rows, int depth) {
        // node aggregates
        double node_w = 0.0, node_s1 = 0.0, node_s2 = 0.0, node_sh = 0.0;
        for (std::int32_t r : rows) {
            double w = row_multiplicity_[static_cast<std::size_t>(r)];
            double t = target_pos(r);
            node_w += w;
            node_s1 += w * t;
            node_s2 += w * t * t;
            if (hess_) node_sh += w * (*hess_)[static_cast<std::size_t>(r)];
        }

        bool pure = y01_ ? (node_s1 == 0.0 || node_s1 == node_w)
                         : (subset_cost(node_w, node_s1, node_s2) <= 1e-12);
        bool depth_capped = options_.max_depth > 0 && depth >= options_.max_depth;
        if (pure || depth_capped || node_w < static_cast<double>(options_.min_samples_split))
            return make_leaf(tree, node_w, node_s1, node_sh);

        // mark node membership for the column sweeps
        for (std::int32_t r : rows)
            row_weight_[static_cast<std::size_t>(r)] = row_multiplicity_[static_cast<std::size_t>(r)];

        Candidate best;
        if (options_.features_per_split <= 0) {
            for (std::int32_t f = 0; f < columns_.dim; ++f)
                eval_feature(f, node_w, node_s1, node_s2, best);
        } else {
            // random order without replacement; inspect at least
            // features_per_split features and keep going until one splits
            const std::size_t d = perm_.size();
            for (std::size_t t = 0; t < d; ++t) {
                std::size_t j = t + static_cast<std::size_t>(rng_.below(d - t));
                std::swap(perm_[t], perm_[j]);
                eval_feature(perm_[t], node_w, node_s1, node_s2, best);
                if (t + 1 >= static_cast<std::size_t>(options_.features_per_split) && best.found)
                    break;
            }
        }

        for (std::int32_t r : rows) row_weight_[static_cast<std::size_t>(r)] = 0.0;

        if (!best.found) return make_leaf(tree, node_w, node_s1, node_sh);

        std::vector<std::int32_t> left_rows, right_rows;
        for (std::int32_t r : rows) {
            double v = 0.0;
            // column lookup: binary search the (row, value) list
            const auto& column = columns_.columns[static_cast<std::size_t>(best.feature)];
            auto it = std::lower_bound(column.begin(), column.end(), r,
                                       [](const auto& e, std::int32_t row) { return e.first < row; });
            if (it != column.end() && it->first == r) v = it->second;
            (v <= best.threshold ? left_rows : right_rows).push_back(r);
        }

        std::int32_t node_index;
        {
            TreeNode node;
            node.feature = best.feature;
            node.threshold = best.threshold;
            node.n_samples = static_cast<std::int64_t>(std::llround(node_w));
            tree.nodes.push_back(node);
            node_index = static_cast<std::int32_t>(tree.nodes.size() - 1);
        }
        std::int32_t left = build_node(tree, left_rows, depth + 1);
        std::int32_t right = build_node(tree, right_rows, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_index)].left = left;
        tree.nodes[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }

    const ColumnIndex& columns_;
    const TreeGrowOptions& options_;
    Rng& rng_;
    const std::vector<int>* y01_;
    const std::vector<double>* grad_;
    const std::vector<double>* hess_;
    std::vector<double> row_weight_;
    std::vector<double> row_multiplicity_;
    std::vector<std::int32_t> perm_;
};

}  // namespace

TreeModel grow_classification_tree(const ColumnIndex& columns, const std::vector<int>& y01,
                                   const std::vector<std::int32_t>& rows,
                                   const TreeGrowOptions& options, Rng& rng) {
    TreeGrower grower(columns, options, rng, &y01, nullptr, nullptr);
    return grower.grow(rows);
}

TreeModel grow_regression_tree(const ColumnIndex& columns, const std::vector<double>& grad,
                               const std::vector<double>& hess,
                               const std::vector<std::int32_t>& rows,
                               const TreeGrowOptions& options, Rng& rng) {
    TreeGrower grower(columns, options, rng, nullptr, &grad, &hess);
    return grower.grow(rows);
}

}  // namespace itsminer::learn::detail
