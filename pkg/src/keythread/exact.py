"""Exact selection: exhaustive enumeration and best-first-equivalent DFS
branch-and-bound over the 0/1 selection vector with a cardinality constraint.

Both solvers share one objective evaluation and one tie-break (lexicographically
smallest index list among maxima), so their answers are comparable exactly.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import IndexOutOfRange, KOutOfRange, SearchSpaceTooLarge
from .scoring import ScoreMatrix, check_indices, objective

BRUTE_FORCE_MAX_SUBSETS = 100_000_000


class Solver(str, Enum):
    BRUTE = "brute"
    BNB = "bnb"
    GREEDY = "greedy"
    UNIFORM = "uniform"
    TOPK = "topk"
    DPP = "dpp"


@dataclass
class SolveStats:
    nodes_explored: int = 0
    elapsed_ns: int = 0
    node_limit_hit: bool = False


@dataclass
class SelectionResult:
    indices: list[int]  # sorted ascending
    objective: float
    solver: Solver
    stats: SolveStats = field(default_factory=SolveStats)

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "objective": self.objective,
            "solver": self.solver.value,
            "nodes_explored": self.stats.nodes_explored,
            "elapsed_ns": self.stats.elapsed_ns,
            "node_limit_hit": self.stats.node_limit_hit,
        }


def _quad_sum(vals, idx) -> float:
    # Same accumulation order as scoring.objective; vals may be an ndarray or
    # a nested list.
    acc = 0.0
    for a in idx:
        row = vals[a]
        for b in idx:
            acc += row[b]
    return float(acc)


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")


def best_single(s: ScoreMatrix) -> int:
    """Index for the degenerate k=1 case: the most query-relevant frame,
    lowest index on ties; index 0 when the matrix carries no relevance."""
    if s.relevance is None:
        return 0
    return int(np.argmax(s.relevance))


def brute_force(s: ScoreMatrix, k: int) -> SelectionResult:
    """Enumerate every size-k subset and return the best selection."""
    t0 = time.perf_counter_ns()
    _check_k(k, s.n)
    if math.comb(s.n, k) > BRUTE_FORCE_MAX_SUBSETS:
        raise SearchSpaceTooLarge(
            f"C({s.n}, {k}) exceeds {BRUTE_FORCE_MAX_SUBSETS} subsets"
        )
    if k == 1:
        i = best_single(s)
        return SelectionResult(
            [i], objective(s, [i]), Solver.BRUTE,
            SolveStats(elapsed_ns=time.perf_counter_ns() - t0),
        )
    vals = s.values.tolist()
    best: tuple[int, ...] | None = None
    best_obj = -math.inf
    for combo in itertools.combinations(range(s.n), k):
        obj = _quad_sum(vals, combo)
        if obj > best_obj:
            best_obj, best = obj, combo
    assert best is not None
    return SelectionResult(
        list(best), best_obj, Solver.BRUTE,
        SolveStats(elapsed_ns=time.perf_counter_ns() - t0),
    )


def _bound_increment(W, fixed, cand, slots, maxpair=None) -> float:
    """Optimistic objective gain from adding `slots` members of `cand`.

    Each candidate is credited with its full pair contribution to the fixed
    set plus (slots-1)/2 times its best possible pairing among candidates,
    which dominates every feasible completion.
    """
    if slots == 0:
        return 0.0
    if len(cand) < slots:
        return -math.inf
    half = 0.5 * (slots - 1)
    g = []
    for c in cand:
        row = W[c]
        v = 0.0
        for f in fixed:
            v += row[f]
        if slots >= 2:
            mp = maxpair(c) if maxpair is not None else max(
                row[d] for d in cand if d != c
            )
            v += half * mp
        g.append(v)
    g.sort(reverse=True)
    acc = 0.0
    for v in g[:slots]:
        acc += v
    return acc


def upper_bound(
    s: ScoreMatrix, fixed, next_candidate: int, remaining_slots: int
) -> float:
    """Admissible bound on the best objective reachable from a partial state.

    `fixed` is already selected; the remaining slots may use any index in
    [next_candidate, n) not already fixed. Returns -inf when no completion
    is feasible.
    """
    fixed_sorted = check_indices(fixed, s.n)
    if not 0 <= next_candidate <= s.n:
        raise IndexOutOfRange(f"next_candidate {next_candidate} outside [0, {s.n}]")
    if remaining_slots < 0:
        raise KOutOfRange(f"remaining_slots must be >= 0, got {remaining_slots}")
    taken = set(fixed_sorted)
    cand = [c for c in range(next_candidate, s.n) if c not in taken]
    W = (s.values + s.values.T).tolist()
    inc = _bound_increment(W, fixed_sorted, cand, remaining_slots)
    return objective(s, fixed_sorted) + inc


def _suffix_maxpair(W, n: int) -> list[list[float]]:
    # table[c][j] = max over c' in [j, n), c' != c of W[c][c']
    table = []
    for c in range(n):
        row = W[c]
        t = [-math.inf] * (n + 1)
        for j in range(n - 1, -1, -1):
            v = row[j] if j != c else -math.inf
            t[j] = v if v > t[j + 1] else t[j + 1]
        table.append(t)
    return table


def bnb_search(
    s: ScoreMatrix,
    k: int,
    node_limit: int | None = 40000,
    warm_start=None,
    record_pruned: bool = False,
) -> tuple[SelectionResult, list[tuple[tuple[int, ...], int]]]:
    """Branch-and-bound core; also returns the pruned (fixed, next) states
    when record_pruned is set, for audit."""
    t0 = time.perf_counter_ns()
    n = s.n
    _check_k(k, n)
    if node_limit is not None and node_limit < 1:
        raise ValueError(f"node_limit must be >= 1, got {node_limit}")
    if k == 1:
        i = best_single(s)
        return (
            SelectionResult(
                [i], objective(s, [i]), Solver.BNB,
                SolveStats(elapsed_ns=time.perf_counter_ns() - t0),
            ),
            [],
        )
    best: list[int] | None = None
    best_obj = -math.inf
    if warm_start is not None:
        ws = check_indices(warm_start, n)
        if len(ws) != k:
            raise KOutOfRange(f"warm start has {len(ws)} indices, expected {k}")
        best, best_obj = ws, objective(s, ws)

    vals = s.values.tolist()
    W = (s.values + s.values.T).tolist()
    suffix = _suffix_maxpair(W, n)
    limit = math.inf if node_limit is None else node_limit
    pruned: list[tuple[tuple[int, ...], int]] = []
    nodes = 0
    hit = False
    # Stack holds (fixed, next_index, objective-of-fixed); the exclude child
    # is pushed first so the include child pops first, which makes leaves
    # appear in lexicographic order and the first strict maximum the
    # lexicographically smallest optimum.
    stack: list[tuple[tuple[int, ...], int, float]] = [((), 0, 0.0)]
    while stack:
        if nodes >= limit:
            hit = True
            break
        fixed, nxt, obj_f = stack.pop()
        nodes += 1
        slots = k - len(fixed)
        if slots == 0:
            obj = _quad_sum(vals, fixed)
            if obj > best_obj:
                best_obj, best = obj, list(fixed)
            continue
        if n - nxt < slots:
            continue
        cand = range(nxt, n)
        inc = _bound_increment(W, fixed, cand, slots, maxpair=lambda c: suffix[c][nxt])
        if obj_f + inc <= best_obj:
            if record_pruned:
                pruned.append((fixed, nxt))
            continue
        stack.append((fixed, nxt + 1, obj_f))
        row = W[nxt]
        gain = 0.0
        for f in fixed:
            gain += row[f]
        stack.append((fixed + (nxt,), nxt + 1, obj_f + gain))

    if best is None:
        # Limit hit before any leaf and no warm start: fall back to the
        # lexicographically first feasible set so the result stays valid.
        best = list(range(k))
        best_obj = _quad_sum(vals, best)
    return (
        SelectionResult(
            sorted(best), best_obj, Solver.BNB,
            SolveStats(
                nodes_explored=nodes,
                elapsed_ns=time.perf_counter_ns() - t0,
                node_limit_hit=hit,
            ),
        ),
        pruned,
    )


def branch_and_bound(
    s: ScoreMatrix,
    k: int,
    node_limit: int | None = 40000,
    warm_start=None,
) -> SelectionResult:
    """Exact when run to completion; anytime under a node budget, never worse
    than the warm start."""
    result, _ = bnb_search(s, k, node_limit=node_limit, warm_start=warm_start)
    return result
