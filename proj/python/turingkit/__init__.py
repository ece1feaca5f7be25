# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 turingkit Contributors
"""Python bindings for the turingkit C++ core."""
from ._core import (
    __version__,
    bh_fdr,
    cosine,
    divergence_report,
    embed,
    extract_features,
    feature_names,
    main,
    run_turing_test,
    select_cosine_optimal,
    sentiment_compound,
    tokenize,
    wilcoxon_rank_sum,
)

__all__ = [
    "bh_fdr",
    "cosine",
    "divergence_report",
    "embed",
    "extract_features",
    "feature_names",
    "main",
    "run_turing_test",
    "select_cosine_optimal",
    "sentiment_compound",
    "tokenize",
    "wilcoxon_rank_sum",
]
