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

struct LabeledSet {
    std::vector<SparseVector> X;
    std::vector<SuccessLabel> y;
};

// two gaussian-ish blobs along feature 0, distinct points
LabeledSet blobs(Rng& rng, int n_per_class, double gap) {
    LabeledSet set;
    for (int i = 0; i < n_per_class; ++i) {
        set.X.push_back(sv(2, {{0, gap + rng.uniform(0.0, 1.0)}, {1, rng.uniform(0.0, 1.0)}}));
        set.y.push_back(S);
        set.X.push_back(sv(2, {{0, -gap - rng.uniform(0.0, 1.0)}, {1, rng.uniform(0.0, 1.0)}}));
        set.y.push_back(U);
    }
    return set;
}

}  // namespace

TEST_SUITE("learn_svm") {

TEST_CASE("linear kernel separates blobs") {
    Rng rng(1);
    LabeledSet set = blobs(rng, 12, 1.0);
    HyperParams params;
    params.svc_kernel = SvmKernel::Linear;
    TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y, params);
    int correct = 0;
    for (std::size_t i = 0; i < set.X.size(); ++i) correct += predict(model, set.X[i]) == set.y[i];
    CHECK(correct == static_cast<int>(set.X.size()));
}

TEST_CASE("rbf kernel separates a circular pattern") {
    Rng rng(2);
    LabeledSet set;
    // inner cluster successful, ring unsuccessful (not linearly separable)
    for (int i = 0; i < 14; ++i) {
        double angle = rng.uniform(0.0, 6.283185);
        double r_in = rng.uniform(0.0, 0.4);
        set.X.push_back(sv(2, {{0, r_in * std::cos(angle)}, {1, r_in * std::sin(angle)}}));
        set.y.push_back(S);
        double r_out = rng.uniform(1.6, 2.0);
        set.X.push_back(sv(2, {{0, r_out * std::cos(angle)}, {1, r_out * std::sin(angle)}}));
        set.y.push_back(U);
    }
    HyperParams params;
    params.svc_kernel = SvmKernel::Rbf;
    params.svc_gamma = 1.0;
    TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y, params);
    int correct = 0;
    for (std::size_t i = 0; i < set.X.size(); ++i) correct += predict(model, set.X[i]) == set.y[i];
    CHECK(correct >= static_cast<int>(0.95 * static_cast<double>(set.X.size())));
}

TEST_CASE("kkt conditions hold after smo convergence") {
    Rng rng(3);
    LabeledSet set = blobs(rng, 10, 0.2);  // overlapping enough to bound some multipliers
    for (SvmKernel kernel : {SvmKernel::Linear, SvmKernel::Rbf}) {
        HyperParams params;
        params.svc_kernel = kernel;
        params.svc_gamma = kernel == SvmKernel::Rbf ? 0.5 : 0.0;
        TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y, params);
        CHECK(svm_kkt_violation(model, set.X, set.y) < 1e-3 + params.svc_tol);
    }
}

TEST_CASE("default gamma follows 1/(dim * variance)") {
    Rng rng(4);
    LabeledSet set = blobs(rng, 8, 1.0);
    TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y);
    const auto& svm = model.as<SvmModel>();

    double total = 0.0, total_sq = 0.0;
    double cells = static_cast<double>(set.X.size()) * 2.0;
    for (const auto& v : set.X)
        for (const auto& [_, w] : v.entries) {
            total += w;
            total_sq += w * w;
        }
    double mean = total / cells;
    double var = total_sq / cells - mean * mean;
    CHECK(svm.gamma == doctest::Approx(1.0 / (2.0 * var)).epsilon(1e-12));
}

TEST_CASE("predict_score is a probability consistent with predict") {
    Rng rng(5);
    LabeledSet set = blobs(rng, 10, 0.5);
    TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y);
    for (const auto& x : set.X) {
        double score = predict_score(model, x);
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
        CHECK(predict(model, x) == (score > 0.5 ? S : U));
    }
    // platt link is increasing in the decision value, so high-decision points
    // score higher
    const auto& svm = model.as<SvmModel>();
    double d_pos = svm.decision_value(set.X[0]);
    double d_neg = svm.decision_value(set.X[1]);
    if (d_pos > d_neg) CHECK(predict_score(model, set.X[0]) >= predict_score(model, set.X[1]));
}

TEST_CASE("svm training is deterministic") {
    Rng rng(6);
    LabeledSet set = blobs(rng, 8, 0.3);
    TrainedModel a = fit(ClassifierKind::SVC, set.X, set.y);
    TrainedModel b = fit(ClassifierKind::SVC, set.X, set.y);
    for (const auto& x : set.X) CHECK(predict_score(a, x) == predict_score(b, x));
}

TEST_CASE("svm model round-trip preserves predictions") {
    Rng rng(7);
    LabeledSet set = blobs(rng, 6, 0.8);
    TrainedModel model = fit(ClassifierKind::SVC, set.X, set.y);
    save_model(model, "/tmp/itsminer_svm_model.json");
    TrainedModel loaded = load_model("/tmp/itsminer_svm_model.json");
    for (const auto& x : set.X) CHECK(predict_score(loaded, x) == predict_score(model, x));
}

}  // TEST_SUITE
