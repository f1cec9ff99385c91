"""Keyed vector serialization: a text format and a compact binary format.

Text: header line "n dim", then one "key v1 ... vd" row per vector
(values written with %.10g). Keys must be non-empty and free of
whitespace.

Binary: magic "SNV1", uint32 LE count, uint32 LE dim, then per row a
uint16 LE key byte length, the UTF-8 key, and dim float32 LE values.

Readers reject duplicate keys, malformed headers, and truncated files.
Loaded vectors are float64 regardless of format; the binary format
round-trips at float32 precision.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SNV1"


class VectorFormatError(ValueError):
    pass


def _check_keys(keys: list[str], n_rows: int) -> None:
    if len(keys) != n_rows:
        raise VectorFormatError(f"{len(keys)} keys for {n_rows} vector rows")
    seen = set()
    for k in keys:
        if not k or k != "".join(k.split()):
            raise VectorFormatError(f"key {k!r} is empty or contains whitespace")
        if k in seen:
            raise VectorFormatError(f"duplicate key {k!r}")
        seen.add(k)


def save_vectors_text(path: str | Path, keys: list[str], vectors: np.ndarray) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError("vectors must be 2-D")
    _check_keys(keys, vectors.shape[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{vectors.shape[0]} {vectors.shape[1]}\n")
        for key, row in zip(keys, vectors):
            fh.write(key + " " + " ".join("%.10g" % x for x in row) + "\n")


def load_vectors_text(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFormatError(f"{path}: bad header, expected 'n dim'")
        try:
            n, dim = int(header[0]), int(header[1])
        except ValueError:
            raise VectorFormatError(f"{path}: bad header, expected 'n dim'") from None
        if n < 0 or dim < 1:
            raise VectorFormatError(f"{path}: bad header values n={n} dim={dim}")
        keys: list[str] = []
        seen: set[str] = set()
        out = np.empty((n, dim), dtype=np.float64)
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise VectorFormatError(f"{path}: row {i} has {len(parts)} fields, expected {dim + 1}")
            if parts[0] in seen:
                raise VectorFormatError(f"{path}: duplicate key {parts[0]!r}")
            seen.add(parts[0])
            keys.append(parts[0])
            out[i] = [float(x) for x in parts[1:]]
        if fh.readline().strip():
            raise VectorFormatError(f"{path}: trailing rows past declared count {n}")
    return keys, out


def save_vectors_binary(path: str | Path, keys: list[str], vectors: np.ndarray) -> None:
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim != 2:
        raise ValueError("vectors must be 2-D")
    _check_keys(keys, vectors.shape[0])
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", vectors.shape[0], vectors.shape[1]))
        for key, row in zip(keys, vectors):
            raw = key.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValueError(f"key {key!r} exceeds 65535 bytes")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(row.astype("<f4").tobytes())


def load_vectors_binary(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise VectorFormatError(f"{path}: bad magic, not a vector file")
        head = fh.read(8)
        if len(head) != 8:
            raise VectorFormatError(f"{path}: truncated header")
        n, dim = struct.unpack("<II", head)
        if dim < 1:
            raise VectorFormatError(f"{path}: bad dim {dim}")
        keys: list[str] = []
        seen: set[str] = set()
        out = np.empty((n, dim), dtype=np.float64)
        row_bytes = 4 * dim
        for i in range(n):
            lenraw = fh.read(2)
            if len(lenraw) != 2:
                raise VectorFormatError(f"{path}: truncated at row {i}")
            (klen,) = struct.unpack("<H", lenraw)
            kraw = fh.read(klen)
            vraw = fh.read(row_bytes)
            if len(kraw) != klen or len(vraw) != row_bytes:
                raise VectorFormatError(f"{path}: truncated at row {i}")
            key = kraw.decode("utf-8")
            if key in seen:
                raise VectorFormatError(f"{path}: duplicate key {key!r}")
            seen.add(key)
            keys.append(key)
            out[i] = np.frombuffer(vraw, dtype="<f4")
        if fh.read(1):
            raise VectorFormatError(f"{path}: trailing bytes past declared count {n}")
    return keys, out


def save_vectors(path: str | Path, keys: list[str], vectors: np.ndarray,
                 fmt: str = "text") -> None:
    if fmt == "text":
        save_vectors_text(path, keys, vectors)
    elif fmt == "binary":
        save_vectors_binary(path, keys, vectors)
    else:
        raise ValueError(f"unknown vector format {fmt!r}")


def load_vectors(path: str | Path, fmt: str | None = None) -> tuple[list[str], np.ndarray]:
    """Load either format; sniffs the magic bytes when fmt is None."""
    if fmt is None:
        with open(path, "rb") as fh:
            fmt = "binary" if fh.read(4) == MAGIC else "text"
    if fmt == "text":
        return load_vectors_text(path)
    if fmt == "binary":
        return load_vectors_binary(path)
    raise ValueError(f"unknown vector format {fmt!r}")
