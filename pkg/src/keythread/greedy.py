"""Approximate selection: greedy cumulative-score search with optional
low-rank denoising, uniform grid downsampling, and local window refinement.

The search runs in O(n*k) once the score matrix exists: each step adds one
symmetrized column to a running cumulative-score vector and takes an argmax.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateIndex, DimMismatch, IndexOutOfRange, KOutOfRange, RankOutOfRange
from .exact import SelectionResult, Solver, SolveStats
from .scoring import (
    DownsampledMatrix,
    ScoreMatrix,
    Variant,
    build_score_matrix,
    downsample,
    low_rank_approx,
    objective,
    pairscore,
)
from .store import EmbeddingMatrix, QueryVector


@dataclass
class GreedyConfig:
    rank_ratio: float = 0.25
    target_resolution: int = 128
    refine_window_k: int = 2
    enable_lowrank: bool = True
    enable_downsample: bool = True
    enable_refine: bool = True
    enable_init: bool = True


def greedy_core(
    m: ScoreMatrix | DownsampledMatrix,
    relevance: np.ndarray | None,
    k: int,
    start: int | None = None,
) -> list[int]:
    """Greedy cumulative-score selection over the candidate axis of m.

    Starts at the most relevant candidate (lowest index on ties) unless an
    explicit start is given; each later pick maximizes the summed symmetrized
    pair score against everything already selected. Returns candidate-space
    positions in acquisition order.
    """
    vals = m.values
    t = vals.shape[0]
    if not 1 <= k <= t:
        raise KOutOfRange(f"k must be in [1, {t}], got {k}")
    if start is None:
        if relevance is None:
            raise ValueError("relevance is required when no start index is given")
        rel = np.asarray(relevance, dtype=np.float64)
        if rel.shape != (t,):
            raise DimMismatch(f"relevance has shape {rel.shape}, expected ({t},)")
        start = int(np.argmax(rel))
    elif not 0 <= start < t:
        raise IndexOutOfRange(f"start {start} outside [0, {t})")

    selected = [start]
    cum = np.zeros(t)
    cum[start] = -np.inf
    for _ in range(k - 1):
        y = selected[-1]
        cum += vals[:, y] + vals[y, :]
        j = int(np.argmax(cum))
        selected.append(j)
        cum[j] = -np.inf
    return selected


def refine(
    s_r: ScoreMatrix,
    selection: list[int],
    k_window: int,
    trace: list | None = None,
) -> list[int]:
    """One in-order pass of local swaps within +-k_window frames.

    A position moves only on a strict cumulative-score improvement against the
    other (already updated) selected frames; ties keep the incumbent, and tied
    improvers resolve to the lowest index. Pass a list as `trace` to collect
    (position, old, new, old_score, new_score) swap records.
    """
    if k_window < 0:
        raise ValueError(f"k_window must be >= 0, got {k_window}")
    n = s_r.n
    sel = [int(t) for t in selection]
    seen: set[int] = set()
    for y in sel:
        if not 0 <= y < n:
            raise IndexOutOfRange(f"index {y} outside [0, {n})")
        if y in seen:
            raise DuplicateIndex(y)
        seen.add(y)
    vals = s_r.values
    for pos in range(len(sel)):
        y = sel[pos]
        others = [s for p, s in enumerate(sel) if p != pos]
        taken = set(others)
        best_c = y
        best_v = sum(pairscore(vals, o, y) for o in others)
        incumbent_v = best_v
        for c in range(y - k_window, y + k_window + 1):
            if c == y or not 0 <= c < n or c in taken:
                continue
            v = sum(pairscore(vals, o, c) for o in others)
            if v > best_v:
                best_v, best_c = v, c
        if best_c != y:
            sel[pos] = best_c
            if trace is not None:
                trace.append((pos, y, best_c, incumbent_v, best_v))
    return sel


def search_on_matrix(
    s: ScoreMatrix,
    k: int,
    cfg: GreedyConfig,
    refine_trace: list | None = None,
) -> list[int]:
    """Run the configured search stages on a prebuilt score matrix.

    Returns original frame indices in acquisition order, before sorting and
    before the final objective evaluation.
    """
    n = s.n
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")
    if k == 1:
        # Degenerate: the quadratic objective is 0 for every singleton, so
        # return the initialization pick directly.
        if not cfg.enable_init:
            return [0]
        if s.relevance is None:
            raise ValueError("initialization requires a relevance vector on s")
        return [int(np.argmax(s.relevance))]

    if cfg.enable_lowrank:
        if not 0.0 < cfg.rank_ratio <= 1.0:
            raise RankOutOfRange(f"rank_ratio must be in (0, 1], got {cfg.rank_ratio}")
        s_r = low_rank_approx(s, max(1, int(cfg.rank_ratio * n)))
    else:
        s_r = s

    if cfg.enable_downsample:
        d = downsample(s_r, cfg.target_resolution)
        m: ScoreMatrix | DownsampledMatrix = d
        grid = d.grid
        rel_c = s.relevance[grid] if s.relevance is not None else None
    else:
        m = s_r
        grid = None
        rel_c = s.relevance

    if cfg.enable_init:
        if rel_c is None:
            raise ValueError("initialization requires a relevance vector on s")
        core = greedy_core(m, rel_c, k)
    else:
        core = greedy_core(m, rel_c, k, start=0)

    sel = [int(grid[p]) for p in core] if grid is not None else core
    if cfg.enable_refine:
        sel = refine(s_r, sel, cfg.refine_window_k, trace=refine_trace)
    return sel


def greedy_select(
    e: EmbeddingMatrix,
    q: QueryVector,
    alpha: float,
    k: int,
    cfg: GreedyConfig | None = None,
) -> SelectionResult:
    """Full approximate pipeline; the objective is evaluated on the original
    (untruncated) score matrix."""
    t0 = time.perf_counter_ns()
    if cfg is None:
        cfg = GreedyConfig()
    s = build_score_matrix(e, q, alpha, Variant.ASYMMETRIC_UPPER)
    sel = sorted(search_on_matrix(s, k, cfg))
    return SelectionResult(
        sel, objective(s, sel), Solver.GREEDY,
        SolveStats(elapsed_ns=time.perf_counter_ns() - t0),
    )
