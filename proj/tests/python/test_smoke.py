# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 turingkit Contributors
import math

import pytest

import turingkit


def test_feature_names_and_values():
    names = turingkit.feature_names()
    assert len(names) == 19
    f = turingkit.extract_features("Hello world!")
    assert list(f) == names
    assert f["word_count"] == 2
    assert f["punctuation_count"] == 1
    assert f["perplexity_proxy"] == pytest.approx(1.0)


def test_tokenize():
    t = turingkit.tokenize("hi @bob see https://x.org/a. #tag")
    assert t["mentions"] == ["@bob"]
    assert t["hashtags"] == ["#tag"]
    assert t["urls"] == ["https://x.org/a"]
    assert t["words"] == ["hi", "see"]


def test_rank_sum_and_bh():
    r = turingkit.wilcoxon_rank_sum([1, 2], [3, 4])
    assert r["exact"]
    assert r["p"] == pytest.approx(1 / 3)
    adjusted = turingkit.bh_fdr([0.01, 0.02, 0.03, 0.04], 0.05)
    assert all(p == pytest.approx(0.04) and sig for p, sig in adjusted)
    with pytest.raises(ValueError):
        turingkit.wilcoxon_rank_sum([], [1.0])


def test_cosine_and_selection():
    assert turingkit.cosine([1, 0], [1, 1]) == pytest.approx(math.sqrt(0.5))
    assert len(turingkit.embed("abc", "fallback:32")) == 32
    idx, scores = turingkit.select_cosine_optimal(["pizza night", "the bus was late"], "the bus was late")
    assert idx == 1
    assert scores[1] == pytest.approx(1.0)


def test_turing_test_detects_sentinel():
    words = ["cat", "dog", "sun", "rain", "tea", "bus", "park", "song", "game", "book"]
    human = [f"{words[i % 10]} {words[(i * 3) % 10]} {words[(i * 7) % 10]} {i}" for i in range(200)]
    ai = [t + " zqxv" for t in human[:100]]
    r = turingkit.run_turing_test(ai, human[100:], "fallback:64")
    assert len(r["per_seed_accuracy"]) == 3
    assert r["mean_accuracy"] >= 0.9


def test_divergence_report():
    rows = turingkit.divergence_report(["so happy today"] * 10, ["rain again"] * 10)
    assert len(rows) == 20
    assert all(0 <= row["p_adjusted"] <= 1 for row in rows)


def test_cli_entry():
    assert turingkit.main(["--help"]) == 0
    assert turingkit.main(["nope"]) == 2
