"""Columnar binary cache for variety sample sets.

Layout (all little-endian)::

    b"TVLB1"            magic
    uint16              format version
    uint32              header length in bytes
    header              UTF-8 JSON: key fields, meta, column table
    column data         raw C-order arrays, in header order

A cache hit is bit-identical to the arrays that were stored.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

from tvlab import __version__
from tvlab.variety import VarietySample

MAGIC = b"TVLB1"
FORMAT_VERSION = 1
_COLUMNS = (("points", "<c16"), ("weights", "<f8"), ("residuals", "<f8"), ("on_boundary", "|u1"))


class CacheError(RuntimeError):
    """Malformed or mismatched cache file."""


def sample_key(ideal_key: str, radius: float, s: float, n: int, seed: int, method: str) -> str:
    fields = [ideal_key, repr(float(radius)), repr(float(s)), str(int(n)), str(int(seed)), method, __version__]
    return hashlib.sha256("|".join(fields).encode()).hexdigest()[:24]


def key_for(sample: VarietySample) -> str:
    m = sample.meta
    return sample_key(m["ideal_key"], m["radius"], m["s"], m["n"], m["seed"], m["method"])


def write_sample(path, sample: VarietySample) -> None:
    arrays = {
        "points": np.ascontiguousarray(sample.points, dtype="<c16"),
        "weights": np.ascontiguousarray(sample.weights, dtype="<f8"),
        "residuals": np.ascontiguousarray(sample.residuals, dtype="<f8"),
        "on_boundary": np.ascontiguousarray(sample.on_boundary, dtype="|u1"),
    }
    header = {
        "key": key_for(sample),
        "meta": sample.meta,
        "columns": [{"name": nm, "dtype": dt, "shape": list(arrays[nm].shape)} for nm, dt in _COLUMNS],
    }
    hb = json.dumps(header, sort_keys=True).encode()
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HI", FORMAT_VERSION, len(hb)))
        fh.write(hb)
        for nm, _ in _COLUMNS:
            fh.write(arrays[nm].tobytes(order="C"))
    os.replace(tmp, path)


def read_sample(path) -> VarietySample:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:5] != MAGIC:
        raise CacheError(f"{path}: bad magic")
    version, hlen = struct.unpack_from("<HI", raw, 5)
    if version != FORMAT_VERSION:
        raise CacheError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    off = 5 + struct.calcsize("<HI")
    header = json.loads(raw[off : off + hlen].decode())
    off += hlen
    cols = {}
    for col in header["columns"]:
        dt = np.dtype(col["dtype"])
        count = int(np.prod(col["shape"])) if col["shape"] else 1
        nbytes = count * dt.itemsize
        if off + nbytes > len(raw):
            raise CacheError(f"{path}: truncated column {col['name']}")
        cols[col["name"]] = np.frombuffer(raw, dtype=dt, count=count, offset=off).reshape(col["shape"]).copy()
        off += nbytes
    meta = header["meta"]
    return VarietySample(
        cols["points"].astype(complex, copy=False),
        cols["weights"].astype(float, copy=False),
        cols["residuals"].astype(float, copy=False),
        cols["on_boundary"].astype(bool),
        meta,
    )


class SampleCache:
    """Directory of ``<key>.tvlb`` files; ``None`` directory disables caching."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key: str, compute) -> VarietySample:
        if self.directory is None:
            self.misses += 1
            return compute()
        path = self.directory / f"{key}.tvlb"
        if path.exists():
            self.hits += 1
            return read_sample(path)
        self.misses += 1
        sample = compute()
        write_sample(path, sample)
        return sample
