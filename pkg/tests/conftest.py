"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from keythread.scoring import ScoreMatrix, Variant
from keythread.store import EmbeddingMatrix, QueryVector


def random_instance(seed: int, n: int, dim: int) -> tuple[EmbeddingMatrix, QueryVector]:
    """Unit-normalized random embeddings and query from one seed."""
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    rows = rng.standard_normal((n, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return EmbeddingMatrix(data=rows, normalized=True), QueryVector(data=q, normalized=True)


def upper_matrix(values: np.ndarray, alpha: float = 1.0,
                 relevance: np.ndarray | None = None) -> ScoreMatrix:
    """Wrap a hand-built upper-triangular array as a ScoreMatrix."""
    arr = np.asarray(values, dtype=np.float64)
    assert arr.shape[0] == arr.shape[1]
    # zero out the lower triangle and diagonal to honor the variant invariant
    arr = np.triu(arr, k=1)
    return ScoreMatrix(
        n=arr.shape[0], variant=Variant.ASYMMETRIC_UPPER, alpha=alpha,
        values=arr, relevance=relevance,
    )
