#pragma once

#include <cstdint>
#include <vector>

#include "itsminer/learn/learn.hpp"
#include "itsminer/rng.hpp"

namespace itsminer::learn::detail {

// Column-major view of a sparse sample set: per feature, the (row, value)
// pairs with value != 0, rows ascending. Shared by every tree grown on the
// same sample matrix.
struct ColumnIndex {
    std::int32_t dim = 0;
    std::size_t n_rows = 0;
    std::vector<std::vector<std::pair<std::int32_t, double>>> columns;

    static ColumnIndex build(const std::vector<SparseVector>& X);
};

struct TreeGrowOptions {
    int max_depth = 0;  // 0 = unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int features_per_split = 0;  // 0 = all features
};

// CART with Gini impurity over binary labels; leaves store the positive
// fraction. `rng` is consumed only when features_per_split > 0 and for
// nothing else, so a fixed sample order gives a fixed tree.
TreeModel grow_classification_tree(const ColumnIndex& columns, const std::vector<int>& y01,
                                   const std::vector<std::int32_t>& rows,
                                   const TreeGrowOptions& options, Rng& rng);

// Regression tree on gradient/hessian pairs: splits minimize the weighted
// variance of `grad`, leaves store sum(grad)/sum(hess) (a Newton step for
// the logistic loss; pass hess = 1 for plain mean leaves).
TreeModel grow_regression_tree(const ColumnIndex& columns, const std::vector<double>& grad,
                               const std::vector<double>& hess,
                               const std::vector<std::int32_t>& rows,
                               const TreeGrowOptions& options, Rng& rng);

}  // namespace itsminer::learn::detail
