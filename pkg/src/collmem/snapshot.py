"""Binary graph snapshots.

Layout (all integers little-endian)::

    magic  b"CMSNAP\\x00\\x01"
    u32    format version
    u64    header length, then UTF-8 JSON header
           {n_nodes, horizon, n_edges, start, meta}
    u64    node-table length, then UTF-8 JSON array of labels
    i8[N+1]  upper-triangle CSR row pointers
    i8[E]    CSR column ids (j > i)
    f8[E]    edge weights
    i8[N*T]  series block, row-major
"""

from __future__ import annotations

import json
import struct
from datetime import datetime

import numpy as np

from .errors import FormatError
from .graph import TemporalGraph

MAGIC = b"CMSNAP\x00\x01"
VERSION = 1


def _write_block(fh, payload):
    fh.write(struct.pack("<Q", len(payload)))
    fh.write(payload)


def _read_block(fh):
    (n,) = struct.unpack("<Q", fh.read(8))
    data = fh.read(n)
    if len(data) != n:
        raise FormatError("truncated snapshot")
    return data


def _read_array(fh, dtype, count):
    dt = np.dtype(dtype)
    raw = fh.read(dt.itemsize * count)
    if len(raw) != dt.itemsize * count:
        raise FormatError("truncated snapshot")
    return np.frombuffer(raw, dtype=dt).astype(dt.newbyteorder("="))


def save_snapshot(graph, path, meta=None):
    e = graph.edges
    counts = np.bincount(e[:, 0], minlength=graph.n_nodes) if len(e) else np.zeros(graph.n_nodes, np.int64)
    indptr = np.zeros(graph.n_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    header = {
        "n_nodes": graph.n_nodes,
        "horizon": graph.horizon,
        "n_edges": graph.n_edges,
        "start": graph.start.isoformat() if graph.start else None,
        "meta": meta or {},
    }
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        _write_block(fh, json.dumps(header, sort_keys=True).encode("utf-8"))
        _write_block(fh, json.dumps(list(graph.labels), ensure_ascii=False).encode("utf-8"))
        fh.write(indptr.astype("<i8").tobytes())
        fh.write(e[:, 1].astype("<i8").tobytes())
        fh.write(graph.weights.astype("<f8").tobytes())
        fh.write(graph.series.astype("<i8").tobytes())


def load_snapshot(path, with_meta=False):
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise FormatError(f"{path}: not a graph snapshot")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise FormatError(f"{path}: unsupported snapshot version {version}")
        header = json.loads(_read_block(fh).decode("utf-8"))
        labels = json.loads(_read_block(fh).decode("utf-8"))
        n, t, m = header["n_nodes"], header["horizon"], header["n_edges"]
        if len(labels) != n:
            raise FormatError("node table size mismatch")
        indptr = _read_array(fh, "<i8", n + 1)
        cols = _read_array(fh, "<i8", m)
        weights = _read_array(fh, "<f8", m)
        series = _read_array(fh, "<i8", n * t).reshape(n, t)
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    start = datetime.fromisoformat(header["start"]) if header["start"] else None
    graph = TemporalGraph(tuple(labels), series, np.stack([rows, cols], axis=1), weights, start)
    if with_meta:
        return graph, header["meta"]
    return graph
