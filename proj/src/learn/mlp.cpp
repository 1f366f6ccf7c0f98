#include <cmath>

#include "itsminer/learn/learn.hpp"
#include "itsminer/rng.hpp"

namespace itsminer::learn {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// parameter packing: [W0, b0, W1, b1, ...], each W row-major (out x in)
struct Packing {
    std::vector<std::size_t> w_offset;
    std::vector<std::size_t> b_offset;
    std::size_t total = 0;
};

Packing make_packing(const std::vector<int>& sizes) {
    Packing p;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        p.w_offset.push_back(off);
        off += static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]);
        p.b_offset.push_back(off);
        off += static_cast<std::size_t>(sizes[l + 1]);
    }
    p.total = off;
    return p;
}

}  // namespace

std::size_t mlp_parameter_count(const std::vector<int>& layer_sizes) {
    return make_packing(layer_sizes).total;
}

double mlp_objective(const std::vector<SparseVector>& X, const std::vector<int>& y01,
                     const std::vector<int>& layer_sizes, double l2,
                     const std::vector<double>& packed, std::vector<double>* grad) {
    const Packing pk = make_packing(layer_sizes);
    const std::size_t n_layers = layer_sizes.size() - 1;
    const double n = static_cast<double>(X.size());

    if (grad) grad->assign(pk.total, 0.0);

    double loss = 0.0;
    std::vector<std::vector<double>> act(n_layers);   // post-activation per layer
    std::vector<std::vector<double>> delta(n_layers);

    for (std::size_t s = 0; s < X.size(); ++s) {
        const SparseVector& x = X[s];
        // forward
        for (std::size_t l = 0; l < n_layers; ++l) {
            int out = layer_sizes[l + 1];
            int in = layer_sizes[l];
            act[l].assign(static_cast<std::size_t>(out), 0.0);
            const double* w = &packed[pk.w_offset[l]];
            const double* b = &packed[pk.b_offset[l]];
            bool last = (l + 1 == n_layers);
            for (int o = 0; o < out; ++o) {
                double z = b[o];
                const double* row = w + static_cast<std::size_t>(o) * in;
                if (l == 0) {
                    for (const auto& [idx, v] : x.entries) z += row[idx] * v;
                } else {
                    for (int i = 0; i < in; ++i) z += row[i] * act[l - 1][static_cast<std::size_t>(i)];
                }
                act[l][static_cast<std::size_t>(o)] = last ? z : std::max(0.0, z);
            }
        }

        double z_out = act[n_layers - 1][0];
        double y = static_cast<double>(y01[s]);
        // BCE written on the raw output: log(1+exp(z)) - y*z
        double stable = (z_out > 35.0) ? z_out : (z_out < -35.0 ? std::exp(z_out) : std::log1p(std::exp(z_out)));
        loss += (stable - y * z_out) / n;

        if (!grad) continue;

        // backward: output delta is dLoss/dz_out
        delta[n_layers - 1].assign(1, (sigmoid(z_out) - y) / n);
        for (std::size_t l = n_layers; l-- > 0;) {
            int out = layer_sizes[l + 1];
            int in = layer_sizes[l];
            double* gw = &(*grad)[pk.w_offset[l]];
            double* gb = &(*grad)[pk.b_offset[l]];
            for (int o = 0; o < out; ++o) {
                double dz = delta[l][static_cast<std::size_t>(o)];
                if (dz == 0.0) continue;
                gb[o] += dz;
                double* grow = gw + static_cast<std::size_t>(o) * in;
                if (l == 0) {
                    for (const auto& [idx, v] : x.entries) grow[idx] += dz * v;
                } else {
                    for (int i = 0; i < in; ++i) grow[i] += dz * act[l - 1][static_cast<std::size_t>(i)];
                }
            }
            if (l == 0) break;
            // propagate through the previous ReLU layer
            delta[l - 1].assign(static_cast<std::size_t>(in), 0.0);
            const double* w = &packed[pk.w_offset[l]];
            for (int i = 0; i < in; ++i) {
                if (act[l - 1][static_cast<std::size_t>(i)] <= 0.0) continue;  // ReLU gate
                double sum = 0.0;
                for (int o = 0; o < out; ++o)
                    sum += delta[l][static_cast<std::size_t>(o)] * w[static_cast<std::size_t>(o) * in + i];
                delta[l - 1][static_cast<std::size_t>(i)] = sum;
            }
        }
    }

    // L2 penalty on weights only (biases excluded), scaled by 1/n
    double penalty = 0.0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::size_t count = static_cast<std::size_t>(layer_sizes[l + 1]) *
                            static_cast<std::size_t>(layer_sizes[l]);
        for (std::size_t k = 0; k < count; ++k) {
            double w = packed[pk.w_offset[l] + k];
            penalty += w * w;
            if (grad) (*grad)[pk.w_offset[l] + k] += l2 * w / n;
        }
    }
    loss += 0.5 * l2 * penalty / n;
    return loss;
}

namespace detail {

// Feed-forward net with ReLU hidden layers and a logistic output, trained by
// full-batch backpropagation with a backtracking line search.
MlpModel fit_mlp(const Problem& p, const HyperParams& params, bool& converged) {
    std::vector<int> sizes;
    sizes.push_back(p.dim);
    for (int h : params.mlp_hidden) sizes.push_back(h);
    sizes.push_back(1);

    const Packing pk = make_packing(sizes);
    std::vector<double> packed(pk.total, 0.0);

    // Glorot-uniform weight init, zero biases
    Rng rng(params.seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
        std::size_t count = static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]);
        for (std::size_t k = 0; k < count; ++k)
            packed[pk.w_offset[l] + k] = rng.uniform(-limit, limit);
    }

    std::vector<double> grad;
    double loss = mlp_objective(p.X, p.y01, sizes, params.mlp_l2, packed, &grad);
    converged = false;

    std::vector<double> trial(packed.size());
    for (int iter = 0; iter < params.mlp_max_iter; ++iter) {
        double grad_norm = 0.0;
        for (double g : grad) grad_norm += g * g;
        grad_norm = std::sqrt(grad_norm);
        if (grad_norm <= params.mlp_tol) {
            converged = true;
            break;
        }

        double step = 1.0;
        const double c1 = 1e-4;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t k = 0; k < packed.size(); ++k) trial[k] = packed[k] - step * grad[k];
            double trial_loss = mlp_objective(p.X, p.y01, sizes, params.mlp_l2, trial, nullptr);
            if (trial_loss <= loss - c1 * step * grad_norm * grad_norm) {
                packed.swap(trial);
                loss = trial_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        loss = mlp_objective(p.X, p.y01, sizes, params.mlp_l2, packed, &grad);
    }

    MlpModel model;
    model.layer_sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        std::size_t count = static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]);
        model.weights.emplace_back(packed.begin() + static_cast<std::ptrdiff_t>(pk.w_offset[l]),
                                   packed.begin() + static_cast<std::ptrdiff_t>(pk.w_offset[l] + count));
        model.biases.emplace_back(
            packed.begin() + static_cast<std::ptrdiff_t>(pk.b_offset[l]),
            packed.begin() + static_cast<std::ptrdiff_t>(pk.b_offset[l] + sizes[l + 1]));
    }
    return model;
}

}  // namespace detail
}  // namespace itsminer::learn
