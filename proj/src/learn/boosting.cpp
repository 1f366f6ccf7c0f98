#include <algorithm>
#include <cmath>

#include "tree_builder.hpp"

namespace itsminer::learn::detail {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// mean binomial deviance over the training set given raw scores f
double deviance(const std::vector<int>& y01, const std::vector<double>& f) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y01.size(); ++i) {
        double z = f[i];
        // log(1 + exp(z)) - y*z, computed stably
        double l = (z > 35.0) ? z : (z < -35.0 ? std::exp(z) : std::log1p(std::exp(z)));
        loss += l - (y01[i] ? z : 0.0);
    }
    return loss / static_cast<double>(y01.size());
}

}  // namespace

// Stage-wise boosting of depth-limited regression trees on the logistic
// loss. Each stage fits the negative gradient (y - p) and takes a Newton
// step per leaf: sum(residual) / sum(p*(1-p)).
BoostModel fit_boosting(const Problem& p, const HyperParams& params) {
    ColumnIndex columns = ColumnIndex::build(p.X);
    TreeGrowOptions options;
    options.max_depth = params.gbc_max_depth;
    options.min_samples_split = params.tree_min_samples_split;
    options.min_samples_leaf = params.tree_min_samples_leaf;
    options.features_per_split = 0;

    const std::size_t n = p.X.size();
    double pos = 0.0;
    for (int y : p.y01) pos += y;
    double prior = pos / static_cast<double>(n);
    prior = std::clamp(prior, 1e-12, 1.0 - 1e-12);

    BoostModel boost;
    boost.learning_rate = params.gbc_learning_rate;
    boost.f0 = std::log(prior / (1.0 - prior));
    boost.trees.reserve(static_cast<std::size_t>(params.gbc_stages));

    std::vector<double> f(n, boost.f0);
    std::vector<double> grad(n), hess(n);
    std::vector<std::int32_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::int32_t>(i);

    Rng rng(params.seed);  // trees use every feature; kept for interface parity
    for (int stage = 0; stage < params.gbc_stages; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            double prob = sigmoid(f[i]);
            grad[i] = static_cast<double>(p.y01[i]) - prob;
            hess[i] = std::max(prob * (1.0 - prob), 1e-12);
        }
        TreeModel tree = grow_regression_tree(columns, grad, hess, rows, options, rng);
        for (std::size_t i = 0; i < n; ++i)
            f[i] += boost.learning_rate * tree.leaf_value(p.X[i]);
        boost.trees.push_back(std::move(tree));
        boost.staged_train_loss.push_back(deviance(p.y01, f));
    }
    return boost;
}

}  // namespace itsminer::learn::detail
