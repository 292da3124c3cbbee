from __future__ import annotations

import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keythread.errors import (
    DimZero,
    DuplicateIndex,
    MalformedHeader,
    MalformedLine,
    NegativeIndex,
    TruncatedPayload,
    ZeroRow,
)
from keythread.store import (
    CaptionSet,
    EmbeddingMatrix,
    QueryVector,
    load_captions,
    load_embeddings,
    load_query,
    normalize_query,
    normalize_rows,
    write_captions,
    write_embeddings,
    write_query,
)

HEADER = struct.Struct("<4sIII")


def test_load_reads_row_major_payload(tmp_path):
    """A hand-packed 3x2 file comes back with the values in row order."""
    vals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    blob = HEADER.pack(b"KFCE", 1, 3, 2) + np.array(vals, dtype="<f4").tobytes()
    path = tmp_path / "e.kfce"
    path.write_bytes(blob)
    m = load_embeddings(path)
    assert m.n_frames == 3 and m.dim == 2
    assert m.normalized is False
    assert m.data.tolist() == [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]


def test_bad_magic_rejected(tmp_path):
    blob = HEADER.pack(b"XXXX", 1, 1, 1) + np.zeros(1, dtype="<f4").tobytes()
    path = tmp_path / "bad.kfce"
    path.write_bytes(blob)
    with pytest.raises(MalformedHeader):
        load_embeddings(path)


def test_bad_version_rejected(tmp_path):
    blob = HEADER.pack(b"KFCE", 2, 1, 1) + np.zeros(1, dtype="<f4").tobytes()
    path = tmp_path / "bad.kfce"
    path.write_bytes(blob)
    with pytest.raises(MalformedHeader):
        load_embeddings(path)


def test_short_file_rejected(tmp_path):
    path = tmp_path / "short.kfce"
    path.write_bytes(b"KFCE")
    with pytest.raises(MalformedHeader):
        load_embeddings(path)


def test_truncated_payload_rejected(tmp_path):
    blob = HEADER.pack(b"KFCE", 1, 2, 2) + np.zeros(3, dtype="<f4").tobytes()
    path = tmp_path / "trunc.kfce"
    path.write_bytes(blob)
    with pytest.raises(TruncatedPayload):
        load_embeddings(path)


def test_zero_dims_rejected(tmp_path):
    path = tmp_path / "zero.kfce"
    path.write_bytes(HEADER.pack(b"KFCE", 1, 0, 4))
    with pytest.raises(DimZero):
        load_embeddings(path)


def test_round_trip_random_16x8(tmp_path):
    """Written bytes load back bit for bit for float32-representable data."""
    rng = np.random.default_rng(0)
    data = rng.standard_normal((16, 8)).astype(np.float32).astype(np.float64)
    path = tmp_path / "rt.kfce"
    write_embeddings(EmbeddingMatrix(data=data), path)
    back = load_embeddings(path)
    assert back.data.tobytes() == data.tobytes()


def test_write_1x1_size_arithmetic(tmp_path):
    path = tmp_path / "one.kfce"
    write_embeddings(EmbeddingMatrix(data=np.array([[0.5]])), path)
    assert path.stat().st_size == 16 + 4


def test_write_empty_rejected(tmp_path):
    with pytest.raises(DimZero):
        write_embeddings(EmbeddingMatrix(data=np.empty((0, 4))), tmp_path / "no.kfce")


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_round_trip_property(tmp_path_factory, n, d, seed):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n, d)).astype(np.float32).astype(np.float64)
    path = tmp_path_factory.mktemp("kfce") / "m.kfce"
    write_embeddings(EmbeddingMatrix(data=data), path)
    back = load_embeddings(path)
    assert back.data.shape == (n, d)
    assert back.data.tobytes() == data.tobytes()


def test_query_round_trip_and_shape_guard(tmp_path):
    q = QueryVector(data=np.array([0.25, -1.5, 3.0]))
    path = tmp_path / "q.kfce"
    write_query(q, path)
    back = load_query(path)
    assert back.data.tolist() == [0.25, -1.5, 3.0]
    assert back.normalized is False
    # a 2-row file is not a query
    write_embeddings(EmbeddingMatrix(data=np.zeros((2, 3)) + 1.0), tmp_path / "e.kfce")
    with pytest.raises(MalformedHeader):
        load_query(tmp_path / "e.kfce")


def test_normalize_rows_three_four_five():
    m = normalize_rows(EmbeddingMatrix(data=np.array([[3.0, 4.0]])))
    assert m.normalized is True
    assert m.data.tolist() == [[0.6, 0.8]]


def test_normalize_rows_unit_row_unchanged():
    m = normalize_rows(EmbeddingMatrix(data=np.array([[1.0, 0.0]])))
    assert m.data.tolist() == [[1.0, 0.0]]


def test_normalize_rows_zero_row_rejected():
    with pytest.raises(ZeroRow):
        normalize_rows(EmbeddingMatrix(data=np.array([[0.0, 0.0], [1.0, 0.0]])))


def test_normalize_rows_idempotent():
    rng = np.random.default_rng(3)
    m = normalize_rows(EmbeddingMatrix(data=rng.standard_normal((20, 6))))
    again = normalize_rows(m)
    assert np.max(np.abs(again.data - m.data)) < 1e-12


def test_normalized_cosines_stay_in_range():
    rng = np.random.default_rng(4)
    m = normalize_rows(EmbeddingMatrix(data=rng.standard_normal((50, 5))))
    sims = m.data @ m.data.T
    assert sims.max() <= 1 + 1e-9 and sims.min() >= -1 - 1e-9


def test_normalize_query_zero_rejected():
    with pytest.raises(ZeroRow):
        normalize_query(QueryVector(data=np.zeros(4)))


def test_load_captions_two_records(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(
        '{"index": 0, "text": "a dog"}\n{"index": 5, "text": "a car"}\n',
        encoding="utf-8",
    )
    caps = load_captions(path)
    assert len(caps) == 2
    assert caps[0] == "a dog" and caps[5] == "a car"
    assert 3 not in caps


def test_load_captions_duplicate_index(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(
        '{"index": 3, "text": "x"}\n{"index": 3, "text": "y"}\n', encoding="utf-8"
    )
    with pytest.raises(DuplicateIndex):
        load_captions(path)


def test_load_captions_empty_file(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text("", encoding="utf-8")
    assert len(load_captions(path)) == 0


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        '{"index": 1}',
        '{"text": "no index"}',
        '{"index": "1", "text": "x"}',
        '{"index": true, "text": "x"}',
        '{"index": 1, "text": 7}',
    ],
)
def test_load_captions_malformed_lines(tmp_path, line):
    path = tmp_path / "c.jsonl"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(MalformedLine):
        load_captions(path)


def test_load_captions_negative_index(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"index": -1, "text": "x"}\n', encoding="utf-8")
    with pytest.raises(NegativeIndex):
        load_captions(path)


def test_load_captions_oversized_text(tmp_path):
    # 513 bytes of UTF-8 exceeds the 512-byte cap
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"index": 0, "text": "x" * 513}) + "\n", encoding="utf-8")
    with pytest.raises(MalformedLine):
        load_captions(path)


def test_caption_round_trip_preserves_text(tmp_path):
    caps = CaptionSet({2: "emoji ✈ ok", 0: "plain"})
    path = tmp_path / "c.jsonl"
    write_captions(caps, path)
    back = load_captions(path)
    assert back.entries == caps.entries
