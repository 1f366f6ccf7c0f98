#include <cmath>

#include "itsminer/learn/learn.hpp"

namespace itsminer::learn::detail {

// Multinomial likelihoods with additive smoothing. Fractional non-negative
// weights (TF-IDF) are accepted as pseudo-counts.
NaiveBayesModel fit_naive_bayes(const Problem& p, const HyperParams& params) {
    const double alpha = params.mnb_alpha;
    const std::size_t d = static_cast<std::size_t>(p.dim);

    NaiveBayesModel model;
    double class_count[2] = {0.0, 0.0};
    std::vector<double> feature_mass[2];
    feature_mass[0].assign(d, 0.0);
    feature_mass[1].assign(d, 0.0);

    for (std::size_t i = 0; i < p.X.size(); ++i) {
        int c = p.y01[i];
        class_count[c] += 1.0;
        for (const auto& [idx, w] : p.X[i].entries)
            feature_mass[c][static_cast<std::size_t>(idx)] += w;
    }

    const double n = static_cast<double>(p.X.size());
    for (int c = 0; c < 2; ++c) {
        model.log_prior[c] = std::log(class_count[c] / n);
        double total = 0.0;
        for (double m : feature_mass[c]) total += m;
        double denom = std::log(total + alpha * static_cast<double>(d));
        model.feature_log_prob[c].resize(d);
        for (std::size_t f = 0; f < d; ++f)
            model.feature_log_prob[c][f] = std::log(feature_mass[c][f] + alpha) - denom;
    }
    return model;
}

}  // namespace itsminer::learn::detail
