"""Reference selectors: uniform striding, top-k relevance, and a
determinantal point process (DPP) greedy MAP over a relevance-weighted
similarity kernel.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimMismatch, KernelNotPSD, KOutOfRange, NotNormalized
from .store import EmbeddingMatrix, QueryVector

DPP_JITTER = 1e-9


def uniform_select(n: int, k: int) -> list[int]:
    """Centers of k equal strata: floor(m*n/k) + floor(n/(2k))."""
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")
    half = n // (2 * k)
    return [min((m * n) // k + half, n - 1) for m in range(k)]


def topk_select(relevance: np.ndarray, k: int) -> list[int]:
    """The k most relevant frames, lowest index on ties, sorted ascending."""
    rel = np.asarray(relevance, dtype=np.float64)
    n = rel.shape[0]
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")
    order = np.argsort(-rel, kind="stable")
    return sorted(int(i) for i in order[:k])


def _map_fast(L: np.ndarray, k: int) -> list[int]:
    # Greedy MAP via incremental Cholesky conditioning: di2s holds each
    # item's marginal variance given the current selection.
    n = L.shape[0]
    cis = np.zeros((k, n))
    di2s = np.diagonal(L).copy()
    selected: list[int] = []
    degenerate = False
    while len(selected) < k:
        j = int(np.argmax(di2s))
        pivot = float(di2s[j])
        selected.append(j)
        di2s[j] = -np.inf
        if len(selected) == k or degenerate:
            continue
        if pivot < -1e-6:
            raise KernelNotPSD(f"negative conditional variance {pivot:.3e}")
        if pivot < 1e-12:
            # Remaining gains are numerically zero (e.g. exact duplicates);
            # stop conditioning and fill from the current gains.
            degenerate = True
            continue
        # Rows 0..r-1 hold the conditioning of the r previously selected items.
        r = len(selected) - 1
        eis = (L[j, :] - cis[:r, j] @ cis[:r, :]) / math.sqrt(pivot)
        cis[r, :] = eis
        di2s -= eis * eis
        di2s[j] = -np.inf
    return selected


def _map_naive(L: np.ndarray, k: int) -> list[int]:
    # Oracle: recompute the principal-minor determinant for every candidate.
    n = L.shape[0]
    selected: list[int] = []
    for _ in range(k):
        best_j, best_det = -1, -math.inf
        for j in range(n):
            if j in selected:
                continue
            idx = selected + [j]
            det = float(np.linalg.det(L[np.ix_(idx, idx)]))
            if det > best_det:
                best_det, best_j = det, j
        selected.append(best_j)
    return selected


def dpp_kernel(e: EmbeddingMatrix, q: QueryVector) -> np.ndarray:
    """Quality-weighted similarity kernel L = diag(rel) (E E^T) diag(rel),
    relevance clamped to >= 0 and a small diagonal jitter added.

    Similar frames produce near-parallel kernel rows, so any subset holding
    both has a near-zero principal minor and greedy MAP repels them.
    """
    if not e.normalized or not q.normalized:
        raise NotNormalized("embeddings and query must be unit-normalized first")
    if e.dim != q.dim:
        raise DimMismatch(f"embedding dim {e.dim} != query dim {q.dim}")
    rel = np.clip(e.data @ q.data, 0.0, None)
    sims = e.data @ e.data.T
    L = np.outer(rel, rel) * sims
    np.fill_diagonal(L, rel * rel + DPP_JITTER)
    return L


def dpp_greedy_select(
    e: EmbeddingMatrix, q: QueryVector, k: int, method: str = "fast"
) -> list[int]:
    """Greedy MAP subset of size k under the DPP kernel, sorted ascending.

    method="naive" recomputes determinants directly and exists as a test
    oracle for the fast conditioning path.
    """
    L = dpp_kernel(e, q)
    if not 1 <= k <= e.n_frames:
        raise KOutOfRange(f"k must be in [1, {e.n_frames}], got {k}")
    if method == "naive":
        sel = _map_naive(L, k)
    elif method == "fast":
        sel = _map_fast(L, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(sel)
