"""Negative destination sampling (random / historical / inductive) and negative-file IO.

Every sampler substitutes the destination of one positive edge: the
negatives are destinations ranked against the true one for the same source.
Samplers are pure functions of their inputs and ``rng_seed``.
"""

from __future__ import annotations

import csv
import os
import pickle
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph_stream import EdgeStream, TemporalEdge

STRATEGIES = ("random", "historical", "inductive")
DEFAULT_N_NEGATIVES = 100


class NegativeSampleError(ValueError):
    pass


@dataclass(frozen=True)
class NegativeQuery:
    positive: TemporalEdge
    negatives: tuple[int, ...]
    strategy: str
    n_filled: int = 0

    def __post_init__(self):
        if self.positive.dst in self.negatives:
            raise NegativeSampleError(f"negatives for {tuple(self.positive)} contain the positive destination")
        if len(set(self.negatives)) != len(self.negatives):
            raise NegativeSampleError(f"negatives for {tuple(self.positive)} are not distinct")

    @property
    def key(self) -> tuple[int, int, float]:
        return query_key(*self.positive)


def query_key(src, dst, t) -> tuple[int, int, float]:
    return (int(src), int(dst), float(t))


class PairIndex:
    """Directed pairs grouped by source: ``src -> set of dst``."""

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        self._by_src: dict[int, set[int]] = {}
        for u, v in pairs:
            self.add(u, v)

    @classmethod
    def from_stream(cls, stream: EdgeStream) -> "PairIndex":
        return cls(zip(stream.src.tolist(), stream.dst.tolist()))

    def add(self, u: int, v: int) -> None:
        self._by_src.setdefault(int(u), set()).add(int(v))

    def partners(self, u: int) -> set[int]:
        return self._by_src.get(int(u), set())

    def __contains__(self, pair) -> bool:
        u, v = pair
        return v in self._by_src.get(u, ())

    def __len__(self) -> int:
        return sum(len(s) for s in self._by_src.values())

    def __iter__(self):
        for u, vs in self._by_src.items():
            for v in vs:
                yield (u, v)

    def difference(self, other: "PairIndex") -> "PairIndex":
        return PairIndex(p for p in self if p not in other)


def _as_index(pairs) -> PairIndex:
    return pairs if isinstance(pairs, PairIndex) else PairIndex(pairs)


def _as_universe(universe) -> np.ndarray:
    """Sorted, duplicate-free int64 array."""
    if isinstance(universe, np.ndarray):
        arr = universe.astype(np.int64, copy=False)
        if arr.ndim == 1 and (len(arr) < 2 or np.all(arr[1:] > arr[:-1])):
            return arr
    else:
        arr = np.fromiter(universe, dtype=np.int64)
    return np.unique(arr)


def _draw_excluding(rng: np.random.Generator, universe: np.ndarray, exclude: np.ndarray, n: int) -> np.ndarray:
    """Draw ``n`` distinct members of sorted ``universe`` not in ``exclude``, uniformly."""
    pos = np.searchsorted(universe, exclude)
    if len(universe):
        hit = (pos < len(universe)) & (universe[np.minimum(pos, len(universe) - 1)] == exclude)
        pos = np.unique(pos[hit])
    else:
        pos = pos[:0]
    available = len(universe) - len(pos)
    if n > available:
        raise NegativeSampleError(f"cannot draw {n} distinct negatives from {available} eligible nodes")
    picks = rng.choice(available, size=n, replace=False)
    # the j-th eligible index is j + #{r : pos[r] - r <= j}
    shifted = pos - np.arange(len(pos))
    return universe[picks + np.searchsorted(shifted, picks, side="right")]


def sample_random(universe, positive: TemporalEdge, n: int, rng_seed) -> NegativeQuery:
    """``n`` distinct destinations drawn uniformly from ``universe`` minus the positive destination."""
    positive = TemporalEdge(*positive)
    universe = _as_universe(universe)
    if len(universe) <= n:
        raise NegativeSampleError(f"universe of {len(universe)} nodes is too small for {n} negatives")
    rng = np.random.default_rng(rng_seed)
    negs = _draw_excluding(rng, universe, np.array([positive.dst], dtype=np.int64), n)
    return NegativeQuery(positive, tuple(negs.tolist()), "random")


def _sample_from_pool(pool_pairs, current_step_pairs, positive, n, rng_seed, universe, strategy):
    positive = TemporalEdge(*positive)
    pool = _as_index(pool_pairs).partners(positive.src)
    active = _as_index(current_step_pairs).partners(positive.src)
    eligible = np.array(sorted(pool - active - {positive.dst}), dtype=np.int64)
    rng = np.random.default_rng(rng_seed)
    if len(eligible) >= n:
        chosen = eligible[rng.choice(len(eligible), size=n, replace=False)]
        return NegativeQuery(positive, tuple(chosen.tolist()), strategy)
    if universe is None:
        raise NegativeSampleError(f"{strategy} pool holds {len(eligible)} < {n} nodes and no universe was given")
    exclude = np.sort(np.append(eligible, positive.dst))
    fill = _draw_excluding(rng, _as_universe(universe), exclude, n - len(eligible))
    negs = np.concatenate([eligible, fill])
    return NegativeQuery(positive, tuple(negs.tolist()), strategy, n_filled=len(fill))


def sample_historical(
    train_pairs, current_step_pairs, positive: TemporalEdge, n: int, rng_seed, universe=None
) -> NegativeQuery:
    """Destinations the source linked to in training but not at the current step.

    Falls back to uniform fill from ``universe`` when the pool is short;
    ``n_filled`` records how many were filled.
    """
    return _sample_from_pool(train_pairs, current_step_pairs, positive, n, rng_seed, universe, "historical")


def sample_inductive(
    test_only_pairs, current_step_pairs, positive: TemporalEdge, n: int, rng_seed, universe=None
) -> NegativeQuery:
    """Destinations the source linked to only at evaluation time, not active at the current step."""
    return _sample_from_pool(test_only_pairs, current_step_pairs, positive, n, rng_seed, universe, "inductive")


def _timestamp_groups(stream: EdgeStream):
    """Yield ``(start, stop)`` index ranges of equal-timestamp runs."""
    t = stream.t
    if not len(t):
        return
    cuts = np.flatnonzero(np.diff(t)) + 1
    bounds = np.concatenate([[0], cuts, [len(t)]])
    yield from zip(bounds[:-1].tolist(), bounds[1:].tolist())


def sample_for_stream(
    stream: EdgeStream,
    strategy: str,
    n: int,
    seed: int,
    universe,
    train_pairs: PairIndex | None = None,
    stream_tag: int = 0,
) -> list[NegativeQuery]:
    """One query per edge of ``stream``.

    The per-query seed is ``(seed, stream_tag, index)``, so queries are
    independent of each other and of evaluation order. The historical pool is
    ``train_pairs``; the inductive pool is the stream's own pairs minus
    ``train_pairs``. "Current step" means all edges sharing the query's timestamp.
    """
    if strategy not in STRATEGIES:
        raise NegativeSampleError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    universe = _as_universe(universe)
    if strategy != "random" and train_pairs is None:
        raise NegativeSampleError(f"{strategy} sampling needs train_pairs")
    if strategy == "historical":
        pool = train_pairs
    elif strategy == "inductive":
        pool = PairIndex.from_stream(stream).difference(train_pairs)
    out = []
    edges = list(stream)
    for start, stop in _timestamp_groups(stream):
        step = PairIndex((e.src, e.dst) for e in edges[start:stop])
        for i in range(start, stop):
            seed_i = (seed, stream_tag, i)
            if strategy == "random":
                out.append(sample_random(universe, edges[i], n, seed_i))
            else:
                out.append(_sample_from_pool(pool, step, edges[i], n, seed_i, universe, strategy))
    return out


def load_negatives(path: str | os.PathLike) -> list[NegativeQuery]:
    """Read ``src,dst,t,neg1;neg2;...`` records (optional header) in file order."""
    queries = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() in ("src", "source"):
                continue
            if len(row) != 4:
                raise NegativeSampleError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                src, dst, t = int(row[0]), int(row[1]), float(row[2])
                negs = tuple(int(x) for x in row[3].split(";") if x.strip())
            except ValueError as exc:
                raise NegativeSampleError(f"line {lineno}: {exc}") from None
            try:
                queries.append(NegativeQuery(TemporalEdge(src, dst, t), negs, "external"))
            except NegativeSampleError as exc:
                raise NegativeSampleError(f"line {lineno}: {exc}") from None
    return queries


def load_tgb_negatives(path: str | os.PathLike) -> list[NegativeQuery]:
    """Adapter for TGB's pickled ``{(src, dst, t): array_of_negative_dsts}`` files.

    Only load files from a trusted source: this unpickles arbitrary objects.
    """
    with open(path, "rb") as fh:
        table = pickle.load(fh)
    queries = []
    for (src, dst, t), negs in table.items():
        edge = TemporalEdge(int(src), int(dst), float(t))
        queries.append(NegativeQuery(edge, tuple(int(x) for x in np.asarray(negs).tolist()), "external"))
    return queries


def load_negative_files(paths: Sequence[str | os.PathLike]) -> dict[tuple[int, int, float], NegativeQuery]:
    """Load one or more negative files (``.pkl`` via the TGB adapter) keyed by positive edge."""
    table = {}
    for path in paths:
        loader = load_tgb_negatives if os.fspath(path).endswith(".pkl") else load_negatives
        for q in loader(path):
            table[q.key] = q
    return table


def write_negatives(queries: Iterable[NegativeQuery], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "t", "negatives"])
        for q in queries:
            writer.writerow([q.positive.src, q.positive.dst, repr(q.positive.t), ";".join(map(str, q.negatives))])
