"""EdgeBank: memorize directed edges and score candidates by (windowed) membership."""

from __future__ import annotations

import csv
import math
import os
from typing import Iterator

import numpy as np

from .graph_stream import EdgeStream


class OutOfOrderError(ValueError):
    """A batch arrived with timestamps older than the memory's current time."""


class EdgeBank:
    """Directed edge memory with a query-anchored time window.

    An edge ``(u, v)`` scores 1 at time ``t`` iff it was seen and
    ``t - last_seen[(u, v)] <= window_length``. ``span_fraction == 1.0``
    means an unlimited window (EdgeBank-infinity).

    Args:
        span_fraction: fraction of the history duration the window covers, in (0, 1].
        history_duration: ``max - min`` train timestamp; the window is
            ``span_fraction * history_duration``.
        prune_every: sweep expired entries every this many batches.
    """

    def __init__(self, span_fraction: float = 1.0, history_duration: float = math.inf, prune_every: int = 64):
        if not 0.0 < span_fraction <= 1.0:
            raise ValueError(f"span_fraction must lie in (0, 1], got {span_fraction}")
        if history_duration < 0:
            raise ValueError("history_duration must be non-negative")
        self.span_fraction = float(span_fraction)
        if self.span_fraction == 1.0:
            self.window_length = math.inf
        else:
            self.window_length = self.span_fraction * float(history_duration)
        self.prune_every = prune_every
        self.current_time = -math.inf
        self._bank: dict[int, dict[int, float]] = {}
        self._n_batches = 0

    @classmethod
    def for_history(cls, history: EdgeStream, span_fraction: float = 1.0, **kwargs) -> "EdgeBank":
        duration = history.t_max - history.t_min if len(history) else 0.0
        return cls(span_fraction, duration, **kwargs)

    def __len__(self) -> int:
        return sum(len(d) for d in self._bank.values())

    def __contains__(self, pair) -> bool:
        u, v = pair
        return v in self._bank.get(u, ())

    def last_seen(self, u: int, v: int) -> float | None:
        return self._bank.get(u, {}).get(v)

    def items(self) -> Iterator[tuple[tuple[int, int], float]]:
        for u in sorted(self._bank):
            row = self._bank[u]
            for v in sorted(row):
                yield (u, v), row[v]

    def update(self, batch: EdgeStream) -> None:
        if not len(batch):
            return
        t_lo = float(batch.t.min())
        if t_lo < self.current_time:
            raise OutOfOrderError(f"batch starts at t={t_lo} before current time {self.current_time}")
        bank = self._bank
        for u, v, t in zip(batch.src.tolist(), batch.dst.tolist(), batch.t.tolist()):
            row = bank.get(u)
            if row is None:
                row = bank[u] = {}
            prev = row.get(v)
            if prev is None or t > prev:
                row[v] = t
        self.current_time = float(batch.t.max())
        self._n_batches += 1
        if self.prune_every and self._n_batches % self.prune_every == 0:
            self.prune()

    def prune(self) -> int:
        """Drop entries that can no longer score 1 at or after ``current_time``."""
        if math.isinf(self.window_length):
            return 0
        cutoff = self.current_time - self.window_length
        dropped = 0
        for u in list(self._bank):
            row = self._bank[u]
            stale = [v for v, ts in row.items() if ts < cutoff]
            for v in stale:
                del row[v]
            dropped += len(stale)
            if not row:
                del self._bank[u]
        return dropped

    def score(self, u: int, v: int, t: float) -> int:
        ts = self._bank.get(u, {}).get(v)
        if ts is None:
            return 0
        return int(t - ts <= self.window_length)

    def score_candidates(self, u: int, dsts: np.ndarray, t: float) -> np.ndarray:
        """Score ``(u, d, t)`` for every ``d`` in ``dsts``."""
        row = self._bank.get(u)
        out = np.zeros(len(dsts), dtype=np.float64)
        if not row:
            return out
        w = self.window_length
        for i, d in enumerate(dsts.tolist()):
            ts = row.get(d)
            if ts is not None and t - ts <= w:
                out[i] = 1.0
        return out

    def dump_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["src", "dst", "last_seen"])
            for (u, v), ts in self.items():
                writer.writerow([u, v, repr(ts)])
