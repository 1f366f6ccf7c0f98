"""Python smoke tests for the itsminer extension module."""

import json
import math
import os
import sys
import tempfile

import itsminer as im


def approx(a, b, eps=1e-9):
    assert abs(a - b) < eps, f"{a} != {b} (+/- {eps})"


def test_textprep():
    assert im.apply_replacements("see https://a.b/c for details") == \
        "see url_specification for details"
    assert im.apply_replacements("+1") == "vote_specification"
    assert im.tokenize("Fixed in trunk, thanks!") == ["fixed", "in", "trunk", "thanks"]
    assert im.pos_tag(["the", "patch", "fixed", "it"]) == \
        ["determiner", "noun", "verb", "pronoun"]


def test_features():
    grams = im.extract_ngrams(["a", "b", "c"], 1, 2)
    assert len(grams) == 5

    docs = [{"bug": 1.0}, {"bug": 1.0, "fix": 1.0}]
    vocab = im.Vocabulary.fit(docs, min_df=1)
    assert vocab.size == 2
    assert vocab.df("bug") == 2

    vec = im.vectorize({"bug": 1.0, "fix": 1.0}, vocab, "tfidf")
    weights = dict(vec.entries)
    approx(weights[0], 0.579739, 1e-6)
    approx(weights[1], 0.814802, 1e-6)
    approx(vec.l2_norm(), 1.0, 1e-12)


def test_learn():
    X = [im.SparseVector(2, [(0, 2.0)]), im.SparseVector(2, [(1, 1.0)])]
    y = ["successful", "unsuccessful"]
    model = im.fit("mnb", X, y)
    probe = im.SparseVector(2, [(0, 1.0)])
    approx(im.predict_score(model, probe), 0.6923076923076923, 1e-9)
    assert im.predict(model, probe) == "successful"

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.json")
        im.save_model(model, path)
        loaded = im.load_model(path)
        assert im.predict_score(loaded, probe) == im.predict_score(model, probe)


def test_eval():
    cm = im.confusion(["successful", "successful", "unsuccessful", "unsuccessful"],
                      ["successful", "unsuccessful", "unsuccessful", "successful"])
    assert (cm.tp, cm.fn, cm.tn, cm.fp) == (1, 1, 1, 1)

    metrics = im.metrics(im.ConfusionMatrix(tp=8, fp=2, tn=7, fn=3))
    approx(metrics["precision_successful"], 0.8, 1e-12)
    approx(metrics["accuracy"], 0.75, 1e-12)

    undefined = im.metrics(im.ConfusionMatrix(tp=0, fp=0, tn=5, fn=5))
    assert undefined["precision_successful"] is None

    approx(im.pearson([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]), 1.0, 1e-12)

    stats = im.descriptive_stats([0.5, 0.7, 0.9])
    approx(stats["mean"], 0.7, 1e-12)

    ranks = im.rank_features([("e1", ["a", "b"]), ("e2", ["b", "a"])], top_k=100)
    assert ranks[0][1] == 2  # both features in the top 100 twice


def test_resolution_mapping():
    assert im.map_resolution("Fixed") == "successful"
    assert im.map_resolution("Won't Fix") == "unsuccessful"
    assert im.map_resolution("Duplicate") is None


def test_grid_and_run():
    assert len(im.default_time_grid()) == 80
    assert im.grid_size(im.default_config_text()) == 6720

    good = ["patch applied cleanly", "fixed in trunk thanks", "merged and released",
            "verified the repair works", "committed the change", "resolved after review"]
    bad = ["cannot reproduce anymore", "abandoned stale ticket", "wontfix closing forever",
           "timeout waiting reporter", "incomplete missing detail", "stalled no response"]

    lines = []
    for i in range(12):
        for positive in (True, False):
            words = good if positive else bad
            lines.append(json.dumps({
                "kind": "issue",
                "issue_id": ("S-" if positive else "U-") + str(i),
                "project_key": "PRJ",
                "issue_type": "bug",
                "created_at": "2020-01-01T00:00:00Z",
                "resolved_at": "2020-02-10T00:00:00Z",
                "status": "Closed",
                "resolution_tag": "Fixed" if positive else "Won't Fix",
                "description": words[i % 6],
                "label": "successful" if positive else "unsuccessful",
            }))

    config = """
[grid]
issue_types = bug
classifiers = mnb, lr
horizons = 1, 20
weightings = tfidf
families = word

[features]
min_df = 1
word_n_max = 2

[run]
seed = 7
workers = 2
"""
    with tempfile.TemporaryDirectory() as tmp:
        corpus_path = os.path.join(tmp, "corpus.jsonl")
        with open(corpus_path, "w") as f:
            f.write("\n".join(lines) + "\n")
        summary = im.run_grid(config, corpus_path, os.path.join(tmp, "results"))
        assert summary["experiments"] == 4
        assert summary["ran"] == 4
        assert os.path.exists(summary["results_csv"])
        with open(summary["results_csv"]) as f:
            header = f.readline().rstrip("\n").split(",")
            rows = [line.rstrip("\n").split(",") for line in f if line.strip()]
        assert len(rows) == 4
        accuracy_col = header.index("accuracy")
        for row in rows:
            # the separable corpus classifies perfectly
            assert float(row[accuracy_col]) == 1.0, row


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
