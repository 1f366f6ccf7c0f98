#include <doctest.h>

#include <cmath>

#include "itsminer/errors.hpp"
#include "itsminer/learn/learn.hpp"
#include "itsminer/rng.hpp"
#include "test_util.hpp"

using namespace itsminer;
using namespace itsminer::learn;
using test_util::sv;

namespace {

constexpr SuccessLabel S = SuccessLabel::Successful;
constexpr SuccessLabel U = SuccessLabel::Unsuccessful;

// central-difference gradient of an objective callable
template <typename F>
std::vector<double> numeric_gradient(F&& objective, const std::vector<double>& at, double h) {
    std::vector<double> grad(at.size());
    std::vector<double> point = at;
    for (std::size_t k = 0; k < at.size(); ++k) {
        point[k] = at[k] + h;
        double hi = objective(point);
        point[k] = at[k] - h;
        double lo = objective(point);
        point[k] = at[k];
        grad[k] = (hi - lo) / (2.0 * h);
    }
    return grad;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        scale += a[k] * a[k] + b[k] * b[k];
    }
    return std::sqrt(diff) / std::max(1e-12, std::sqrt(scale));
}

struct RandomInstance {
    std::vector<SparseVector> X;
    std::vector<int> y01;
    std::vector<SuccessLabel> y;
};

RandomInstance random_instance(Rng& rng, int max_n = 8, int max_d = 5) {
    RandomInstance inst;
    int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n - 1)));
    int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_d)));
    for (int i = 0; i < n; ++i) {
        SparseVector v;
        v.dim = d;
        for (int f = 0; f < d; ++f)
            if (rng.below(3) != 0)
                v.entries.emplace_back(f, rng.uniform(-2.0, 2.0));
        inst.X.push_back(std::move(v));
        int label = (i < 1) ? 1 : (i < 2 ? 0 : static_cast<int>(rng.below(2)));
        inst.y01.push_back(label);
        inst.y.push_back(label ? S : U);
    }
    return inst;
}

}  // namespace

TEST_SUITE("learn_linear") {

TEST_CASE("lr analytic gradient matches central differences") {
    Rng rng(424242);
    for (int trial = 0; trial < 120; ++trial) {
        RandomInstance inst = random_instance(rng);
        std::size_t dim = static_cast<std::size_t>(inst.X.front().dim);
        std::vector<double> packed(dim + 1);
        for (double& p : packed) p = rng.uniform(-1.0, 1.0);
        double c = rng.uniform(0.3, 3.0);

        std::vector<double> analytic;
        lr_objective(inst.X, inst.y01, c, packed, &analytic);
        auto numeric = numeric_gradient(
            [&](const std::vector<double>& at) { return lr_objective(inst.X, inst.y01, c, at, nullptr); },
            packed, 1e-6);
        CHECK(relative_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("lr separates linearly separable points") {
    // class decided by feature 0 sign
    std::vector<SparseVector> X = {sv(2, {{0, 2.0}}), sv(2, {{0, 1.5}, {1, 0.5}}),
                                   sv(2, {{0, -1.0}}), sv(2, {{0, -2.0}, {1, 0.5}})};
    std::vector<SuccessLabel> y = {S, S, U, U};
    TrainedModel model = fit(ClassifierKind::LR, X, y);
    for (std::size_t i = 0; i < X.size(); ++i) CHECK(predict(model, X[i]) == y[i]);
}

TEST_CASE("lr converged loss is permutation invariant") {
    Rng rng(7);
    RandomInstance inst = random_instance(rng, 10, 4);
    HyperParams params;
    params.lr_max_iter = 500;
    params.lr_tol = 1e-8;
    TrainedModel a = fit(ClassifierKind::LR, inst.X, inst.y, params);

    std::vector<std::size_t> order(inst.X.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    deterministic_shuffle(order, rng);
    std::vector<SparseVector> rx;
    std::vector<SuccessLabel> ry;
    std::vector<int> ry01;
    for (std::size_t i : order) {
        rx.push_back(inst.X[i]);
        ry.push_back(inst.y[i]);
        ry01.push_back(inst.y01[i]);
    }
    TrainedModel b = fit(ClassifierKind::LR, rx, ry, params);

    auto packed_of = [](const TrainedModel& m) {
        const auto& lm = m.as<LinearModel>();
        std::vector<double> packed = lm.weights;
        packed.push_back(lm.bias);
        return packed;
    };
    double loss_a = lr_objective(inst.X, inst.y01, params.lr_c, packed_of(a), nullptr);
    double loss_b = lr_objective(rx, ry01, params.lr_c, packed_of(b), nullptr);
    CHECK(loss_a == doctest::Approx(loss_b).epsilon(1e-8));
}

TEST_CASE("lr flags non-convergence but still returns a model") {
    Rng rng(99);
    RandomInstance inst = random_instance(rng, 12, 4);
    HyperParams params;
    params.lr_max_iter = 1;  // too few iterations to reach tol
    params.lr_tol = 1e-14;
    TrainedModel model = fit(ClassifierKind::LR, inst.X, inst.y, params);
    CHECK(!model.converged);
    CHECK_NOTHROW(predict(model, inst.X.front()));
}

TEST_CASE("lr score and prediction are consistent") {
    Rng rng(1234);
    RandomInstance inst = random_instance(rng, 10, 4);
    TrainedModel model = fit(ClassifierKind::LR, inst.X, inst.y);
    for (const auto& x : inst.X) {
        double score = predict_score(model, x);
        CHECK(predict(model, x) == (score > 0.5 ? S : U));
    }
}

TEST_CASE("mlp analytic gradient matches central differences") {
    Rng rng(31415);
    std::vector<int> sizes_options[] = {{3, 5, 2, 1}, {2, 4, 1}, {4, 3, 1}};
    for (int trial = 0; trial < 120; ++trial) {
        RandomInstance inst = random_instance(rng, 6, 4);
        std::vector<int> sizes = sizes_options[trial % 3];
        sizes[0] = inst.X.front().dim;
        std::size_t count = mlp_parameter_count(sizes);
        std::vector<double> packed(count);
        for (double& p : packed) p = rng.uniform(-0.8, 0.8);
        double l2 = 1e-5;

        std::vector<double> analytic;
        mlp_objective(inst.X, inst.y01, sizes, l2, packed, &analytic);
        auto numeric = numeric_gradient(
            [&](const std::vector<double>& at) {
                return mlp_objective(inst.X, inst.y01, sizes, l2, at, nullptr);
            },
            packed, 1e-6);
        CHECK(relative_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("mlp learns a separable problem") {
    std::vector<SparseVector> X;
    std::vector<SuccessLabel> y;
    for (int i = 0; i < 10; ++i) {
        double v = 1.0 + 0.1 * i;
        X.push_back(sv(2, {{0, v}}));
        y.push_back(S);
        X.push_back(sv(2, {{1, v}}));
        y.push_back(U);
    }
    HyperParams params;
    params.mlp_max_iter = 400;
    TrainedModel model = fit(ClassifierKind::MLPC, X, y, params);
    int correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i) correct += predict(model, X[i]) == y[i];
    CHECK(correct >= static_cast<int>(0.9 * static_cast<double>(X.size())));
}

TEST_CASE("mlp is deterministic under a fixed seed") {
    Rng rng(5);
    RandomInstance inst = random_instance(rng, 10, 4);
    TrainedModel a = fit(ClassifierKind::MLPC, inst.X, inst.y);
    TrainedModel b = fit(ClassifierKind::MLPC, inst.X, inst.y);
    for (const auto& x : inst.X) CHECK(predict_score(a, x) == predict_score(b, x));
}

TEST_CASE("mlp model round-trip preserves predictions") {
    Rng rng(6);
    RandomInstance inst = random_instance(rng, 8, 3);
    TrainedModel model = fit(ClassifierKind::MLPC, inst.X, inst.y);
    save_model(model, "/tmp/itsminer_mlp_model.json");
    TrainedModel loaded = load_model("/tmp/itsminer_mlp_model.json");
    for (const auto& x : inst.X) CHECK(predict_score(loaded, x) == predict_score(model, x));
}

}  // TEST_SUITE
