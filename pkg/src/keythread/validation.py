"""Input validation helpers for array-level entry points."""

from __future__ import annotations

import numpy as np

from .errors import DataError, DimMismatch, NotNormalized
from .store import EmbeddingMatrix, QueryVector, normalize_query, normalize_rows


def as_embedding_matrix(X, normalize: bool = True) -> EmbeddingMatrix:
    """Coerce a 2-D array-like to an EmbeddingMatrix.

    With normalize=False the rows must already be unit-norm (within 1e-6).
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DataError(f"expected a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError("embeddings contain non-finite values")
    m = EmbeddingMatrix(data=arr)
    if normalize:
        return normalize_rows(m)
    norms = np.linalg.norm(arr, axis=1)
    if not np.allclose(norms, 1.0, atol=1e-6):
        raise NotNormalized("rows are not unit-norm; pass normalize=True")
    m.normalized = True
    return m


def as_query_vector(q, dim: int | None = None, normalize: bool = True) -> QueryVector:
    arr = np.asarray(q, dtype=np.float64).reshape(-1)
    if arr.shape[0] == 0:
        raise DataError("query is empty")
    if not np.all(np.isfinite(arr)):
        raise DataError("query contains non-finite values")
    if dim is not None and arr.shape[0] != dim:
        raise DimMismatch(f"query dim {arr.shape[0]} != embedding dim {dim}")
    qv = QueryVector(data=arr)
    if normalize:
        return normalize_query(qv)
    if not np.isclose(np.linalg.norm(arr), 1.0, atol=1e-6):
        raise NotNormalized("query is not unit-norm; pass normalize=True")
    qv.normalized = True
    return qv
