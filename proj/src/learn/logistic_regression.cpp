#include <cmath>

#include "itsminer/learn/learn.hpp"

namespace itsminer::learn {

namespace {

// log(1 + exp(z)) without overflow
double log1pexp(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double lr_objective(const std::vector<SparseVector>& X, const std::vector<int>& y01, double c,
                    const std::vector<double>& packed, std::vector<double>* grad) {
    const std::size_t d = packed.size() - 1;
    const double bias = packed[d];

    if (grad) grad->assign(packed.size(), 0.0);

    double loss = 0.0;
    for (std::size_t f = 0; f < d; ++f) loss += 0.5 * packed[f] * packed[f];
    if (grad)
        for (std::size_t f = 0; f < d; ++f) (*grad)[f] = packed[f];

    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = bias;
        for (const auto& [idx, w] : X[i].entries) z += w * packed[static_cast<std::size_t>(idx)];
        double ysign = y01[i] ? 1.0 : -1.0;
        loss += c * log1pexp(-ysign * z);
        if (grad) {
            // d/dz of log(1+exp(-y z)) = -y * sigmoid(-y z)
            double g = c * (-ysign) * sigmoid(-ysign * z);
            for (const auto& [idx, w] : X[i].entries) (*grad)[static_cast<std::size_t>(idx)] += g * w;
            (*grad)[d] += g;
        }
    }
    return loss;
}

namespace detail {

// Deterministic full-batch gradient descent with backtracking line search on
// the L2-regularized logistic objective; stops on gradient norm <= lr_tol.
LinearModel fit_logistic_regression(const Problem& p, const HyperParams& params, bool& converged) {
    const std::size_t d = static_cast<std::size_t>(p.dim);
    std::vector<double> packed(d + 1, 0.0);
    std::vector<double> grad;

    double loss = lr_objective(p.X, p.y01, params.lr_c, packed, &grad);
    converged = false;

    for (int iter = 0; iter < params.lr_max_iter; ++iter) {
        double grad_norm = 0.0;
        for (double g : grad) grad_norm += g * g;
        grad_norm = std::sqrt(grad_norm);
        if (grad_norm <= params.lr_tol) {
            converged = true;
            break;
        }

        // Armijo backtracking along -grad
        double step = 1.0 / std::max(1.0, grad_norm);
        const double c1 = 1e-4;
        std::vector<double> trial(packed.size());
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t k = 0; k < packed.size(); ++k) trial[k] = packed[k] - step * grad[k];
            double trial_loss = lr_objective(p.X, p.y01, params.lr_c, trial, nullptr);
            if (trial_loss <= loss - c1 * step * grad_norm * grad_norm) {
                packed.swap(trial);
                loss = trial_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: no further progress possible
        loss = lr_objective(p.X, p.y01, params.lr_c, packed, &grad);
    }

    LinearModel model;
    model.weights.assign(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias = packed[d];
    return model;
}

}  // namespace detail
}  // namespace itsminer::learn
