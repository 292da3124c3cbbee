"""Score model: query relevance, frame diversity, and the combined matrix.

For unit-norm embeddings f and query q, relevance(i) = <f_i, q> and
diversity(i, j) = exp(-<f_i, f_j>), which lies in [1/e, e]. The combined
pairwise score is relevance(i) + alpha * diversity(i, j), stored either in the
upper triangle only (AsymmetricUpper, the solver-facing form) or mirrored with
both endpoints' relevance (Symmetric). The diagonal is always zero, so the
quadratic form x^T S x over a 0/1 selection vector sums pair contributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DimMismatch,
    DuplicateIndex,
    IndexOutOfRange,
    NegativeAlpha,
    NotNormalized,
    RankOutOfRange,
    ResolutionTooSmall,
    SameIndex,
)
from .store import EmbeddingMatrix, QueryVector

# Dense N x N matrices above this frame count are refused by the CLI;
# pre-stride the video instead.
MAX_DENSE_FRAMES = 8192


class Variant(str, Enum):
    ASYMMETRIC_UPPER = "asymmetric_upper"
    SYMMETRIC = "symmetric"


@dataclass
class ScoreMatrix:
    n: int
    variant: Variant
    alpha: float
    values: np.ndarray  # (n, n) float64, zero diagonal
    # Relevance used to build the matrix; solvers need it for the K=1
    # degenerate case. None for hand-built matrices.
    relevance: np.ndarray | None = None


@dataclass
class DownsampledMatrix:
    grid: np.ndarray  # (t,) int, strictly increasing positions in the source
    values: np.ndarray  # (t, t) float64
    source_n: int


def _check_normalized(e: EmbeddingMatrix, q: QueryVector) -> None:
    if not e.normalized or not q.normalized:
        raise NotNormalized("embeddings and query must be unit-normalized first")
    if e.dim != q.dim:
        raise DimMismatch(f"embedding dim {e.dim} != query dim {q.dim}")


def relevance_scores(e: EmbeddingMatrix, q: QueryVector) -> np.ndarray:
    """Cosine similarity of every frame to the query, shape (n_frames,)."""
    _check_normalized(e, q)
    return e.data @ q.data


def diversity_score(e: EmbeddingMatrix, i: int, j: int) -> float:
    if not e.normalized:
        raise NotNormalized("embeddings must be unit-normalized first")
    n = e.n_frames
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"indices ({i}, {j}) outside [0, {n})")
    if i == j:
        raise SameIndex(f"diversity is defined for distinct frames, got i == j == {i}")
    return float(np.exp(-np.dot(e.data[i], e.data[j])))


def build_score_matrix(
    e: EmbeddingMatrix,
    q: QueryVector,
    alpha: float,
    variant: Variant = Variant.ASYMMETRIC_UPPER,
) -> ScoreMatrix:
    """Construct the pairwise score matrix for one video/query pair."""
    _check_normalized(e, q)
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be >= 0, got {alpha}")
    rel = e.data @ q.data
    sims = e.data @ e.data.T
    div = np.exp(-sims)
    if variant is Variant.ASYMMETRIC_UPPER:
        values = np.triu(rel[:, None] + alpha * div, k=1)
    else:
        # Mirror the upper triangle so values[i][j] == values[j][i] exactly
        # even when the BLAS product is asymmetric at the ulp level.
        upper = np.triu(rel[:, None] + 2.0 * alpha * div + rel[None, :], k=1)
        values = upper + upper.T
    return ScoreMatrix(
        n=e.n_frames, variant=variant, alpha=float(alpha), values=values, relevance=rel
    )


def check_indices(indices, n: int) -> list[int]:
    """Validate a selection: in-range, distinct; returns it sorted ascending."""
    out = [int(t) for t in indices]
    seen: set[int] = set()
    for t in out:
        if not 0 <= t < n:
            raise IndexOutOfRange(f"index {t} outside [0, {n})")
        if t in seen:
            raise DuplicateIndex(t)
        seen.add(t)
    return sorted(out)


def objective(s: ScoreMatrix, indices) -> float:
    """Quadratic-form value x^T S x of a selection, as a 0/1 indicator x.

    Accumulates in a fixed row-major order over the sorted selection so the
    result is bit-for-bit reproducible.
    """
    idx = check_indices(indices, s.n)
    vals = s.values
    acc = 0.0
    for a in idx:
        row = vals[a]
        for b in idx:
            acc += row[b]
    return float(acc)


def pairscore(values: np.ndarray, a: int, b: int) -> float:
    """Order-free pair contribution: values[min][max] + values[max][min]."""
    lo, hi = (a, b) if a <= b else (b, a)
    return float(values[lo, hi]) + float(values[hi, lo])


def low_rank_approx(s: ScoreMatrix, r: int) -> ScoreMatrix:
    """Best rank-r approximation in Frobenius norm, via truncated SVD.

    The result is dense; no triangular structure is re-imposed.
    """
    if not 1 <= r <= s.n:
        raise RankOutOfRange(f"rank {r} outside [1, {s.n}]")
    u, sv, vt = np.linalg.svd(s.values, full_matrices=False)
    values = (u[:, :r] * sv[:r]) @ vt[:r]
    return ScoreMatrix(
        n=s.n, variant=s.variant, alpha=s.alpha, values=values, relevance=s.relevance
    )


def downsample(s: ScoreMatrix, target_resolution: int) -> DownsampledMatrix:
    """Restrict the matrix to a uniform grid of at most target_resolution frames.

    Grid position m maps to source frame floor(m * n / t); identity when
    n <= target_resolution.
    """
    if target_resolution < 2:
        raise ResolutionTooSmall(f"target resolution must be >= 2, got {target_resolution}")
    n = s.n
    t = min(n, target_resolution)
    grid = (np.arange(t) * n) // t
    values = s.values[np.ix_(grid, grid)]
    return DownsampledMatrix(grid=grid, values=values, source_n=n)
