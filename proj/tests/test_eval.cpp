#include <doctest.h>

#include <cmath>

#include "itsminer/errors.hpp"
#include "itsminer/eval/metrics.hpp"
#include "itsminer/eval/ranking.hpp"
#include "itsminer/rng.hpp"

using namespace itsminer;
using namespace itsminer::eval;
using corpus::SuccessLabel;

namespace {
constexpr SuccessLabel S = SuccessLabel::Successful;
constexpr SuccessLabel U = SuccessLabel::Unsuccessful;
}

TEST_SUITE("eval") {

TEST_CASE("confusion counting") {
    ConfusionMatrix cm = confusion({S, S, U, U}, {S, U, U, S});
    CHECK(cm.tp == 1);
    CHECK(cm.fn == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 1);
}

TEST_CASE("confusion on perfect predictions") {
    std::vector<SuccessLabel> actual = {S, S, S, S, S, S, U, U, U, U};
    ConfusionMatrix cm = confusion(actual, actual);
    CHECK(cm.tp == 6);
    CHECK(cm.tn == 4);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);
}

TEST_CASE("confusion rejects mismatched lengths") {
    CHECK_THROWS_AS(confusion({S, U}, {S}), LengthMismatch);
}

TEST_CASE("metrics worked example") {
    MetricSet m = metrics(ConfusionMatrix{8, 2, 7, 3});
    CHECK(*m.precision_successful == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(*m.recall_successful == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
    CHECK(*m.accuracy == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(*m.f1_successful ==
          doctest::Approx(2.0 * (0.8 * 8.0 / 11.0) / (0.8 + 8.0 / 11.0)).epsilon(1e-12));
}

TEST_CASE("metrics undefined on zero denominators") {
    MetricSet m = metrics(ConfusionMatrix{0, 0, 5, 5});
    CHECK(!m.precision_successful);
    CHECK(m.recall_successful);  // tp+fn = 5
    CHECK(*m.recall_successful == 0.0);
    CHECK(!m.f1_successful);
}

TEST_CASE("metrics on a perfect matrix") {
    MetricSet m = metrics(ConfusionMatrix{5, 0, 5, 0});
    CHECK(*m.accuracy == 1.0);
    CHECK(*m.precision_successful == 1.0);
    CHECK(*m.precision_unsuccessful == 1.0);
    CHECK(*m.recall_successful == 1.0);
    CHECK(*m.recall_unsuccessful == 1.0);
    CHECK(*m.f1_successful == 1.0);
    CHECK(*m.f1_unsuccessful == 1.0);
}

TEST_CASE("metrics match independent recomputation on random matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        ConfusionMatrix cm{static_cast<std::int64_t>(rng.below(20)),
                           static_cast<std::int64_t>(rng.below(20)),
                           static_cast<std::int64_t>(rng.below(20)),
                           static_cast<std::int64_t>(rng.below(20))};
        if (cm.total() == 0) continue;
        MetricSet m = metrics(cm);
        double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
        double tn = static_cast<double>(cm.tn), fn = static_cast<double>(cm.fn);
        CHECK(*m.accuracy == doctest::Approx((tp + tn) / (tp + tn + fp + fn)).epsilon(1e-12));
        if (cm.tp + cm.fp > 0)
            CHECK(*m.precision_successful == doctest::Approx(tp / (tp + fp)).epsilon(1e-12));
        else CHECK(!m.precision_successful);
        if (cm.tn + cm.fn > 0)
            CHECK(*m.precision_unsuccessful == doctest::Approx(tn / (tn + fn)).epsilon(1e-12));
        else CHECK(!m.precision_unsuccessful);
    }
}

TEST_CASE("descriptive statistics") {
    DescriptiveStats s = descriptive_stats({0.5, 0.7, 0.9});
    CHECK(s.min == 0.5);
    CHECK(s.max == 0.9);
    CHECK(s.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.variance == doctest::Approx(0.02666666666666667).epsilon(1e-9));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(0.02666666666666667)).epsilon(1e-9));

    DescriptiveStats single = descriptive_stats({0.81});
    CHECK(single.min == 0.81);
    CHECK(single.max == 0.81);
    CHECK(single.mean == 0.81);
    CHECK(single.variance == 0.0);

    CHECK_THROWS_AS(descriptive_stats({}), EmptyInput);
}

TEST_CASE("pearson on perfect linear relations") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson error contracts") {
    CHECK_THROWS_AS(pearson({1, 2}, {1}), LengthMismatch);
    CHECK_THROWS_AS(pearson({1}, {1}), LengthMismatch);
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), DegenerateSeries);
}

TEST_CASE("pearson shift and scale invariance") {
    Rng rng(5150);
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(rng.uniform());
        y.push_back(rng.uniform());
    }
    double base = pearson(x, y);
    std::vector<double> ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = 3.5 * x[i] + 11.0;
    CHECK(pearson(ax, y) == doctest::Approx(base).epsilon(1e-12));
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = -2.0 * x[i] + 4.0;
    CHECK(pearson(ax, y) == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("rank_features N and AR arithmetic") {
    std::vector<ExperimentRanking> rankings;
    // "patch" ranks 10, 20, 30 across three experiments of 200 features each
    for (int e = 0; e < 3; ++e) {
        ExperimentRanking r;
        r.experiment_id = "e" + std::to_string(e);
        int target_rank = 10 * (e + 1);
        for (int i = 1; i <= 200; ++i) {
            if (i == target_rank) r.ordered_features.push_back("patch");
            else r.ordered_features.push_back("filler_" + std::to_string(e) + "_" + std::to_string(i));
        }
        rankings.push_back(std::move(r));
    }
    auto entries = rank_features(rankings, 100);
    REQUIRE(!entries.empty());
    CHECK(entries[0].feature == "patch");  // the only feature present everywhere
    CHECK(entries[0].n == 3);
    CHECK(entries[0].ar == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("rank_features with ranks beyond top_k") {
    std::vector<ExperimentRanking> rankings;
    for (int e = 0; e < 3; ++e) {
        ExperimentRanking r;
        r.experiment_id = "e" + std::to_string(e);
        for (int i = 1; i <= 200; ++i)
            r.ordered_features.push_back(i == 150 ? "rare" : "w" + std::to_string(i));
        rankings.push_back(std::move(r));
    }
    auto entries = rank_features(rankings, 100);
    auto rare = std::find_if(entries.begin(), entries.end(),
                             [](const FeatureRankEntry& e) { return e.feature == "rare"; });
    REQUIRE(rare != entries.end());
    CHECK(rare->n == 0);
    CHECK(rare->ar == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("rank_features absent features count at vocab size plus one") {
    // feature "only_a" exists in experiment A (|V|=3, rank 1) and is absent
    // from experiment B (|V|=120), so AR = (1 + 121) / 2 = 61 > top_k = 50
    ExperimentRanking a;
    a.experiment_id = "A";
    a.ordered_features = {"only_a", "shared", "other"};
    ExperimentRanking b;
    b.experiment_id = "B";
    for (int i = 0; i < 120; ++i) b.ordered_features.push_back("b" + std::to_string(i));
    b.ordered_features[5] = "shared";

    auto entries = rank_features({a, b}, 50);
    auto only_a = std::find_if(entries.begin(), entries.end(),
                               [](const FeatureRankEntry& e) { return e.feature == "only_a"; });
    REQUIRE(only_a != entries.end());
    CHECK(only_a->n == 1);
    CHECK(only_a->ar == doctest::Approx(61.0).epsilon(1e-12));
    CHECK(only_a->ar > 50.0);
}

TEST_CASE("per-experiment importance ordering and ties") {
    std::vector<features::FeatureCounts> docs = {{{"file", 1.0}, {"patch", 1.0}},
                                                 {{"patch", 1.0}, {"zz", 1.0}}};
    features::Vocabulary vocab =
        features::Vocabulary::fit(docs, features::FeatureFamily::word_ngrams(), 1);

    std::vector<features::SparseVector> class_vectors;
    {
        features::SparseVector v;
        v.dim = vocab.size();
        v.entries = {{*vocab.index_of("file"), 2.0}, {*vocab.index_of("patch"), 3.1}};
        class_vectors.push_back(v);
    }
    auto order = importance_from_weights(vocab, class_vectors);
    REQUIRE(order.size() == 3);
    CHECK(order[0] == "patch");
    CHECK(order[1] == "file");
    CHECK(order[2] == "zz");

    // all-equal masses fall back to lexicographic order
    auto tied = importance_from_scores(vocab, {1.0, 1.0, 1.0});
    CHECK(tied == std::vector<std::string>{"file", "patch", "zz"});
}

}  // TEST_SUITE
