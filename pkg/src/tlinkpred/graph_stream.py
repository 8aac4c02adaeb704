"""Edge-list ingestion, chronological splitting, batching and dataset statistics."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

DEFAULT_RATIOS = (0.70, 0.15, 0.15)
DEFAULT_BATCH_SIZE = 200

# header aliases; the first match per role wins
_SRC_NAMES = ("src", "source", "u", "user_id", "node1")
_DST_NAMES = ("dst", "destination", "v", "i", "item_id", "node2")
_T_NAMES = ("t", "ts", "time", "timestamp")

SPLIT_FILES = ("train.csv", "val.csv", "test.csv")


class StreamError(ValueError):
    """Raised for malformed edge files or invalid split requests."""


class TemporalEdge(NamedTuple):
    src: int
    dst: int
    t: float


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EdgeStream:
    """Immutable, time-ordered sequence of directed edges.

    Stored column-wise: ``src`` and ``dst`` are int64 arrays, ``t`` is float64.
    """

    src: np.ndarray
    dst: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        t = np.asarray(self.t, dtype=np.float64)
        if not (src.shape == dst.shape == t.shape) or src.ndim != 1:
            raise StreamError("src, dst and t must be 1-d arrays of equal length")
        if len(t) and (np.any(np.diff(t) < 0)):
            raise StreamError("timestamps must be non-decreasing")
        if len(t) and (not np.all(np.isfinite(t)) or t[0] < 0):
            raise StreamError("timestamps must be finite and non-negative")
        if len(src) and (src.min() < 0 or dst.min() < 0):
            raise StreamError("node ids must be non-negative")
        object.__setattr__(self, "src", _frozen(src))
        object.__setattr__(self, "dst", _frozen(dst))
        object.__setattr__(self, "t", _frozen(t))

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence]) -> "EdgeStream":
        edges = list(edges)
        if not edges:
            return cls.empty()
        src, dst, t = zip(*edges)
        return cls(np.array(src), np.array(dst), np.array(t, dtype=np.float64))

    @classmethod
    def empty(cls) -> "EdgeStream":
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[TemporalEdge]:
        for u, v, t in zip(self.src.tolist(), self.dst.tolist(), self.t.tolist()):
            yield TemporalEdge(u, v, t)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return EdgeStream(self.src[idx], self.dst[idx], self.t[idx])
        return TemporalEdge(int(self.src[idx]), int(self.dst[idx]), float(self.t[idx]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeStream):
            return NotImplemented
        return (
            np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.t, other.t)
        )

    def pairs(self) -> set[tuple[int, int]]:
        """Distinct directed (src, dst) pairs."""
        return set(zip(self.src.tolist(), self.dst.tolist()))

    def nodes(self) -> np.ndarray:
        return np.union1d(self.src, self.dst)

    @property
    def t_min(self) -> float:
        return float(self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])


def concat(*streams: EdgeStream) -> EdgeStream:
    streams = [s for s in streams if len(s)]
    if not streams:
        return EdgeStream.empty()
    return EdgeStream(
        np.concatenate([s.src for s in streams]),
        np.concatenate([s.dst for s in streams]),
        np.concatenate([s.t for s in streams]),
    )


@dataclass(frozen=True)
class ChronoSplit:
    train: EdgeStream
    val: EdgeStream
    test: EdgeStream
    ratios: tuple[float, float, float] = field(default=DEFAULT_RATIOS)

    def __post_init__(self):
        for name, part in (("train", self.train), ("val", self.val), ("test", self.test)):
            if len(part) == 0:
                raise StreamError(f"{name} split is empty")
        if self.train.t_max > self.val.t_min or self.val.t_max > self.test.t_min:
            raise StreamError("splits overlap in time: train <= val <= test must hold")

    @property
    def full(self) -> EdgeStream:
        return concat(self.train, self.val, self.test)


@dataclass(frozen=True)
class SplitStats:
    n_nodes: int
    n_edges: int
    n_steps: int
    surprise: float


def _parse_node(raw: str, lineno: int, role: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        try:
            f = float(raw)
        except ValueError:
            raise StreamError(f"line {lineno}: {role} {raw!r} is not an integer node id") from None
        if not f.is_integer():
            raise StreamError(f"line {lineno}: {role} {raw!r} is not an integer node id") from None
        value = int(f)
    if value < 0:
        raise StreamError(f"line {lineno}: {role} {value} is negative")
    return value


def _parse_time(raw: str, lineno: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise StreamError(f"line {lineno}: timestamp {raw!r} is not numeric") from None
    if not math.isfinite(value) or value < 0:
        raise StreamError(f"line {lineno}: timestamp {raw!r} must be finite and non-negative")
    return value


def _looks_numeric(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _column_index(header: list[str], names: tuple[str, ...], fallback: int) -> int:
    lowered = [h.strip().lower() for h in header]
    for name in names:
        if name in lowered:
            return lowered.index(name)
    return fallback


def load_edges(path: str | os.PathLike, format: str = "csv") -> EdgeStream:
    """Read an edge list and return it as a time-sorted stream.

    ``format`` is ``"csv"`` (comma separated) or ``"whitespace"`` (any run of
    blanks/tabs). A header row is optional; when present, columns are located
    by name (``src,dst,t`` plus a few common aliases) and extra columns are
    ignored. Without a header the first three columns are ``src, dst, t``.
    Equal timestamps keep their file order.
    """
    if format not in ("csv", "whitespace"):
        raise StreamError(f"unknown edge-list format {format!r}")
    src, dst, ts = [], [], []
    cols = (0, 1, 2)
    with open(path, newline="") as fh:
        if format == "csv":
            rows = csv.reader(fh)
        else:
            rows = (line.split() for line in fh)
        first = True
        for lineno, row in enumerate(rows, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if first:
                first = False
                if not all(_looks_numeric(c) for c in row[:3]):
                    cols = (
                        _column_index(row, _SRC_NAMES, 0),
                        _column_index(row, _DST_NAMES, 1),
                        _column_index(row, _T_NAMES, 2),
                    )
                    continue
            if len(row) <= max(cols):
                raise StreamError(f"line {lineno}: expected at least {max(cols) + 1} columns, got {len(row)}")
            src.append(_parse_node(row[cols[0]].strip(), lineno, "src"))
            dst.append(_parse_node(row[cols[1]].strip(), lineno, "dst"))
            ts.append(_parse_time(row[cols[2]].strip(), lineno))
    if not ts:
        raise StreamError(f"{os.fspath(path)}: no edges found")
    t = np.asarray(ts, dtype=np.float64)
    order = np.argsort(t, kind="stable")
    return EdgeStream(np.asarray(src)[order], np.asarray(dst)[order], t[order])


def load_split_dir(path: str | os.PathLike, format: str = "csv") -> ChronoSplit:
    """Load a pre-split directory holding ``train.csv``, ``val.csv`` and ``test.csv``."""
    parts = [load_edges(os.path.join(path, name), format) for name in SPLIT_FILES]
    n = sum(len(p) for p in parts)
    ratios = tuple(len(p) / n for p in parts)
    return ChronoSplit(*parts, ratios=ratios)


def is_split_dir(path: str | os.PathLike) -> bool:
    return os.path.isdir(path) and all(os.path.isfile(os.path.join(path, f)) for f in SPLIT_FILES)


def chronological_split(
    stream: EdgeStream, ratios: tuple[float, float, float] = DEFAULT_RATIOS
) -> ChronoSplit:
    """Split by edge count: floor(n*train), floor(n*val), remainder to test."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise StreamError(f"ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise StreamError(f"ratios must sum to 1, got {sum(ratios)!r}")
    n = len(stream)
    # the epsilon absorbs representation error, e.g. 100 * 0.29 == 28.999999999999996
    n_train = math.floor(n * ratios[0] + 1e-9)
    n_val = math.floor(n * ratios[1] + 1e-9)
    n_test = n - n_train - n_val
    for name, size in (("train", n_train), ("val", n_val), ("test", n_test)):
        if size <= 0:
            raise StreamError(f"{name} split would be empty ({n} edges, ratios {ratios})")
    return ChronoSplit(
        stream[:n_train],
        stream[n_train : n_train + n_val],
        stream[n_train + n_val :],
        ratios=ratios,
    )


def load_dataset(
    path: str | os.PathLike,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    format: str = "csv",
) -> ChronoSplit:
    """A pre-split directory wins; otherwise split a single edge file by ``ratios``."""
    if is_split_dir(path):
        return load_split_dir(path, format)
    return chronological_split(load_edges(path, format), ratios)


def batches(stream: EdgeStream, batch_size: int = DEFAULT_BATCH_SIZE) -> list[EdgeStream]:
    if batch_size < 1:
        raise StreamError("batch_size must be >= 1")
    return [stream[i : i + batch_size] for i in range(0, len(stream), batch_size)]


def surprise(train: EdgeStream, test: EdgeStream) -> float:
    """Fraction of distinct directed test pairs that never occur in train."""
    test_pairs = test.pairs()
    if not test_pairs:
        raise StreamError("surprise is undefined for an empty test stream")
    return len(test_pairs - train.pairs()) / len(test_pairs)


def split_stats(split: ChronoSplit) -> SplitStats:
    full = split.full
    return SplitStats(
        n_nodes=len(full.nodes()),
        n_edges=len(full),
        n_steps=len(np.unique(full.t)),
        surprise=surprise(split.train, split.test),
    )
