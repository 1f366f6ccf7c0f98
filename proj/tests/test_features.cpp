#include <doctest.h>

#include <cmath>

#include "itsminer/errors.hpp"
#include "itsminer/features/features.hpp"
#include "itsminer/rng.hpp"
#include "test_util.hpp"

using namespace itsminer;
using namespace itsminer::features;

namespace {
const std::string SEP = kNgramSeparator;
}

TEST_SUITE("features") {

TEST_CASE("extract_ngrams over a range of n") {
    auto counts = extract_ngrams({"a", "b", "c"}, 1, 2);
    CHECK(counts.size() == 5);
    CHECK(counts.at("a") == 1.0);
    CHECK(counts.at("b") == 1.0);
    CHECK(counts.at("c") == 1.0);
    CHECK(counts.at("a" + SEP + "b") == 1.0);
    CHECK(counts.at("b" + SEP + "c") == 1.0);
}

TEST_CASE("extract_ngrams when nothing fits") {
    CHECK(extract_ngrams({"a"}, 2, 3).empty());
}

TEST_CASE("extract_ngrams over tags") {
    auto counts = extract_ngrams({"determiner", "noun", "verb"}, 2, 2);
    CHECK(counts.size() == 2);
    CHECK(counts.count("determiner" + SEP + "noun") == 1);
    CHECK(counts.count("noun" + SEP + "verb") == 1);
}

TEST_CASE("extract_ngrams rejects bad ranges") {
    CHECK_THROWS_AS(extract_ngrams({"a"}, 0, 2), InvalidRange);
    CHECK_THROWS_AS(extract_ngrams({"a"}, 3, 2), InvalidRange);
}

TEST_CASE("ngram count identity for single n") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t len = rng.below(12);
        std::vector<std::string> units;
        for (std::size_t i = 0; i < len; ++i) units.push_back("t" + std::to_string(rng.below(4)));
        int n = 1 + static_cast<int>(rng.below(5));
        auto counts = extract_ngrams(units, n, n);
        double total = 0;
        for (auto& [_, c] : counts) total += c;
        std::int64_t expected = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(len) - n + 1);
        CHECK(total == static_cast<double>(expected));
    }
}

TEST_CASE("fit_vocabulary counts document frequencies") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}}, {{"bug", 1.0}, {"fix", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);
    CHECK(v.size() == 2);
    CHECK(v.index_of("bug") == 0);
    CHECK(v.index_of("fix") == 1);
    CHECK(v.df("bug") == 2);
    CHECK(v.df("fix") == 1);
    CHECK(v.n_documents() == 2);

    Vocabulary pruned = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 2);
    CHECK(pruned.size() == 1);
    CHECK(pruned.index_of("bug") == 0);
    CHECK(!pruned.index_of("fix"));

    CHECK_THROWS_AS(Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 3), EmptyVocabulary);
}

TEST_CASE("fit_vocabulary max_features keeps highest df") {
    std::vector<FeatureCounts> docs = {{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}},
                                       {{"b", 1.0}, {"c", 1.0}},
                                       {{"c", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1, 2);
    CHECK(v.size() == 2);
    CHECK(v.index_of("b"));   // df 2
    CHECK(v.index_of("c"));   // df 3
    CHECK(!v.index_of("a"));  // df 1 trimmed
}

TEST_CASE("vectorize_tf counts in-vocabulary features") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}}, {{"bug", 1.0}, {"fix", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);

    SparseVector tf = vectorize_tf({{"bug", 2.0}, {"fix", 1.0}}, v);
    REQUIRE(tf.entries.size() == 2);
    CHECK(tf.entries[0] == std::pair<std::int32_t, double>{0, 2.0});
    CHECK(tf.entries[1] == std::pair<std::int32_t, double>{1, 1.0});

    CHECK(vectorize_tf({{"crash", 1.0}}, v).entries.empty());
    CHECK(vectorize_tf({}, v).entries.empty());
}

TEST_CASE("tfidf reproduces the two-document golden values") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}}, {{"bug", 1.0}, {"fix", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);
    SparseVector w = vectorize_tfidf({{"bug", 1.0}, {"fix", 1.0}}, v);
    REQUIRE(w.entries.size() == 2);
    CHECK(w.entries[0].second == doctest::Approx(0.579739).epsilon(1e-6));
    CHECK(w.entries[1].second == doctest::Approx(0.814802).epsilon(1e-6));
    CHECK(w.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tfidf of an all-OOV document is the zero vector") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}}, {{"bug", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);
    CHECK(vectorize_tfidf({{"crash", 3.0}}, v).entries.empty());
}

TEST_CASE("tfidf single-feature document normalizes to exactly one") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}}, {{"bug", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);
    SparseVector w = vectorize_tfidf({{"bug", 7.0}}, v);
    REQUIRE(w.entries.size() == 1);
    CHECK(w.entries[0].second == 1.0);
}

TEST_CASE("tfidf is scale free") {
    Rng rng(31337);
    std::vector<FeatureCounts> docs;
    for (int i = 0; i < 6; ++i) {
        FeatureCounts doc;
        for (int f = 0; f < 5; ++f)
            if (rng.below(2)) doc["f" + std::to_string(f)] = 1.0 + static_cast<double>(rng.below(4));
        docs.push_back(doc);
    }
    docs.push_back({{"f0", 1.0}});
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);

    for (int trial = 0; trial < 50; ++trial) {
        FeatureCounts doc;
        for (int f = 0; f < 5; ++f)
            if (rng.below(2)) doc["f" + std::to_string(f)] = 1.0 + static_cast<double>(rng.below(5));
        if (doc.empty()) continue;
        FeatureCounts doubled = doc;
        for (auto& [_, c] : doubled) c *= 2.0;
        SparseVector a = vectorize_tfidf(doc, v), b = vectorize_tfidf(doubled, v);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t k = 0; k < a.entries.size(); ++k)
            CHECK(a.entries[k].second == doctest::Approx(b.entries[k].second).epsilon(1e-12));
    }
}

TEST_CASE("idf is monotone in df") {
    for (std::int64_t n = 2; n <= 50; ++n)
        for (std::int64_t df = 1; df < n; ++df) CHECK(idf(n, df) > idf(n, df + 1));
}

TEST_CASE("vocabulary round-trips through its TSV file") {
    std::vector<FeatureCounts> docs = {{{"bug", 1.0}, {"a" + SEP + "b", 2.0}},
                                       {{"bug", 1.0}, {"fix", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::pos_ngrams(2, 4), 1, 10);
    std::string path = "/tmp/itsminer_vocab_test.tsv";
    v.save(path);
    Vocabulary loaded = Vocabulary::load(path);
    CHECK(loaded.size() == v.size());
    CHECK(loaded.n_documents() == v.n_documents());
    CHECK(loaded.family().kind == FeatureFamilyKind::PosNgrams);
    CHECK(loaded.family().n_min == 2);
    CHECK(loaded.family().n_max == 4);
    CHECK(loaded.min_df() == 1);
    REQUIRE(loaded.max_features());
    CHECK(*loaded.max_features() == 10);
    for (const std::string& f : v.features()) {
        CHECK(loaded.index_of(f) == v.index_of(f));
        CHECK(loaded.df(f) == v.df(f));
    }
}

TEST_CASE("transform is deterministic") {
    std::vector<FeatureCounts> docs = {{{"x", 1.0}, {"y", 2.0}}, {{"y", 1.0}}};
    Vocabulary v = Vocabulary::fit(docs, FeatureFamily::word_ngrams(), 1);
    FeatureCounts doc = {{"x", 3.0}, {"y", 1.0}};
    SparseVector a = vectorize_tfidf(doc, v), b = vectorize_tfidf(doc, v);
    CHECK(a.entries == b.entries);
}

}  // TEST_SUITE
