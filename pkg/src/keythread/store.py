"""Embedding and caption containers plus the KFCE interchange format.

KFCE files are little-endian regardless of platform: a 4-byte magic "KFCE",
then version, n_frames and dim as uint32, then n_frames*dim float32 values in
row-major order. Query vectors use the same layout with n_frames == 1.
In-memory arithmetic is float64; only the payload is float32.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimZero,
    DuplicateIndex,
    MalformedHeader,
    MalformedLine,
    NegativeIndex,
    TruncatedPayload,
    ZeroRow,
)

MAGIC = b"KFCE"
VERSION = 1
_HEADER = struct.Struct("<4sIII")

MAX_CAPTION_BYTES = 512


@dataclass
class EmbeddingMatrix:
    """Frame embeddings, one row per frame."""

    data: np.ndarray  # (n_frames, dim) float64
    normalized: bool = False

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass
class QueryVector:
    data: np.ndarray  # (dim,) float64
    normalized: bool = False

    @property
    def dim(self) -> int:
        return self.data.shape[0]


@dataclass
class CaptionSet:
    """Captions keyed by 0-based frame index; sparse, text stored verbatim."""

    entries: dict[int, str] = field(default_factory=dict)

    def __contains__(self, index: int) -> bool:
        return index in self.entries

    def __getitem__(self, index: int) -> str:
        return self.entries[index]

    def __len__(self) -> int:
        return len(self.entries)


def _as_matrix(raw: np.ndarray, n: int, d: int) -> np.ndarray:
    return raw.astype(np.float64).reshape(n, d)


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise MalformedHeader(f"file shorter than header: {len(blob)} bytes")
    magic, version, n, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MalformedHeader(f"bad magic {magic!r}")
    if version != VERSION:
        raise MalformedHeader(f"unsupported version {version}")
    if n == 0 or d == 0:
        raise DimZero(f"n_frames={n} dim={d}")
    need = n * d * 4
    payload = blob[_HEADER.size:]
    if len(payload) < need:
        raise TruncatedPayload(f"need {need} payload bytes, got {len(payload)}")
    raw = np.frombuffer(payload[:need], dtype="<f4")
    return EmbeddingMatrix(data=_as_matrix(raw, n, d), normalized=False)


def write_embeddings(m: EmbeddingMatrix, path: str | Path) -> None:
    n, d = m.data.shape
    if n == 0 or d == 0:
        raise DimZero(f"n_frames={n} dim={d}")
    payload = np.ascontiguousarray(m.data, dtype="<f4").tobytes()
    Path(path).write_bytes(_HEADER.pack(MAGIC, VERSION, n, d) + payload)


def load_query(path: str | Path) -> QueryVector:
    m = load_embeddings(path)
    if m.n_frames != 1:
        raise MalformedHeader(f"query file must hold exactly 1 row, got {m.n_frames}")
    return QueryVector(data=m.data[0], normalized=False)


def write_query(q: QueryVector, path: str | Path) -> None:
    write_embeddings(EmbeddingMatrix(data=q.data.reshape(1, -1)), path)


def normalize_rows(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Return a copy with unit-norm rows; zero rows are a data error."""
    norms = np.linalg.norm(m.data, axis=1)
    bad = np.flatnonzero(norms <= 1e-12)
    if bad.size:
        raise ZeroRow(int(bad[0]))
    return EmbeddingMatrix(data=m.data / norms[:, None], normalized=True)


def normalize_query(q: QueryVector) -> QueryVector:
    norm = float(np.linalg.norm(q.data))
    if norm <= 1e-12:
        raise ZeroRow(0)
    return QueryVector(data=q.data / norm, normalized=True)


def load_captions(path: str | Path) -> CaptionSet:
    """Parse a UTF-8 JSONL caption file with records {"index": int, "text": str}."""
    entries: dict[int, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedLine(lineno, "invalid JSON") from e
            if not isinstance(rec, dict) or "index" not in rec or "text" not in rec:
                raise MalformedLine(lineno, "record needs index and text fields")
            index, text = rec["index"], rec["text"]
            if not isinstance(index, int) or isinstance(index, bool):
                raise MalformedLine(lineno, "index must be an integer")
            if not isinstance(text, str):
                raise MalformedLine(lineno, "text must be a string")
            if len(text.encode("utf-8")) > MAX_CAPTION_BYTES:
                raise MalformedLine(lineno, f"caption exceeds {MAX_CAPTION_BYTES} bytes")
            if index < 0:
                raise NegativeIndex(f"line {lineno}: index {index}")
            if index in entries:
                raise DuplicateIndex(index)
            entries[index] = text
    return CaptionSet(entries=entries)


def write_captions(c: CaptionSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for index in sorted(c.entries):
            fh.write(json.dumps({"index": index, "text": c.entries[index]}) + "\n")
