"""Topic extraction from dialogue transcripts."""

from ._core import (
    DataError,
    InvariantError,
    UsageError,
    elbow,
    kmeans,
    planted_corpus,
    preprocess,
    run_all,
    score,
    tfidf,
    train_lda,
)

__all__ = [
    "DataError",
    "InvariantError",
    "UsageError",
    "elbow",
    "kmeans",
    "planted_corpus",
    "preprocess",
    "run_all",
    "score",
    "tfidf",
    "train_lda",
]
