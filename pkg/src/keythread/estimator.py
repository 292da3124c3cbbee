"""Scikit-learn style wrapper around the selectors."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .greedy import GreedyConfig
from .harness import run_solver
from .validation import as_embedding_matrix, as_query_vector


class KeyframeSelector(BaseEstimator, TransformerMixin):
    """Select k frames from an (n_frames, dim) embedding matrix.

    fit(X, query=...) runs the configured solver; transform(X) returns the
    selected rows in temporal order.

    Parameters mirror the library defaults: greedy search with rank n/4
    low-rank denoising, a 128-point candidate grid, and a +-2 frame
    refinement window.
    """

    def __init__(
        self,
        k: int = 8,
        solver: str = "greedy",
        alpha: float = 1.0,
        rank_ratio: float = 0.25,
        target_resolution: int = 128,
        refine_window_k: int = 2,
        node_limit: int | None = 40000,
        normalize: bool = True,
    ):
        self.k = k
        self.solver = solver
        self.alpha = alpha
        self.rank_ratio = rank_ratio
        self.target_resolution = target_resolution
        self.refine_window_k = refine_window_k
        self.node_limit = node_limit
        self.normalize = normalize

    def fit(self, X, y=None, *, query=None):
        if query is None and self.solver != "uniform":
            raise ValueError(f"solver {self.solver!r} requires a query vector")
        e = as_embedding_matrix(X, normalize=self.normalize)
        if query is not None:
            q = as_query_vector(query, dim=e.dim, normalize=self.normalize)
        else:
            # Uniform striding ignores the query; any unit vector works for
            # the objective bookkeeping.
            placeholder = np.zeros(e.dim)
            placeholder[0] = 1.0
            q = as_query_vector(placeholder, normalize=False)
        cfg = GreedyConfig(
            rank_ratio=self.rank_ratio,
            target_resolution=self.target_resolution,
            refine_window_k=self.refine_window_k,
        )
        result = run_solver(
            self.solver, e, q, self.alpha, self.k,
            greedy_cfg=cfg, node_limit=self.node_limit,
        )
        self.result_ = result
        self.indices_ = np.asarray(result.indices, dtype=np.intp)
        self.objective_ = result.objective
        self.n_features_in_ = e.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "indices_")
        arr = np.asarray(X)
        if arr.ndim != 2 or arr.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected shape (n, {self.n_features_in_}), got {arr.shape}"
            )
        return arr[self.indices_]
