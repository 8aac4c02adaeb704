"""PopTrack: exponentially decayed in-degree per node and a top-K snapshot."""

from __future__ import annotations

import csv
import math
import os

import numpy as np

from .edgebank import OutOfOrderError
from .graph_stream import EdgeStream

DEFAULT_K = 1000
DEFAULT_TAU = 1_000_000.0


class PopTrack:
    """Decayed incoming-interaction counts.

    Each in-edge ``(u, v, t)`` applies
    ``pop[v] = pop[v] * exp(-(t - last_update[v]) / tau) + 1``. Values are
    stored lazily (as of each node's last update) and decayed on read.
    The top-K snapshot is refreshed once per batch, ranking by popularity at
    the batch's last timestamp (descending), ties by ascending node id.
    """

    def __init__(self, k: int = DEFAULT_K, tau: float = DEFAULT_TAU, capacity: int = 1024):
        if k < 1:
            raise ValueError("k must be >= 1")
        if not tau > 0:
            raise ValueError("tau must be positive")
        self.k = int(k)
        self.tau = float(tau)
        self.current_time = -math.inf
        self._pop = np.zeros(capacity, dtype=np.float64)
        self._last = np.zeros(capacity, dtype=np.float64)
        self._known = np.zeros(capacity, dtype=bool)
        self._in_topk = np.zeros(capacity, dtype=bool)
        self.topk: tuple[int, ...] = ()

    def _grow(self, max_id: int) -> None:
        size = len(self._pop)
        if max_id < size:
            return
        new = max(max_id + 1, 2 * size)
        for name in ("_pop", "_last", "_known", "_in_topk"):
            old = getattr(self, name)
            arr = np.zeros(new, dtype=old.dtype)
            arr[:size] = old
            setattr(self, name, arr)

    @property
    def n_nodes(self) -> int:
        return int(self._known.sum())

    def update(self, batch: EdgeStream) -> None:
        if not len(batch):
            return
        if float(batch.t.min()) < self.current_time:
            raise OutOfOrderError(f"batch starts at t={batch.t.min()} before current time {self.current_time}")
        self._grow(int(batch.dst.max()))
        pop, last, known, tau = self._pop, self._last, self._known, self.tau
        for v, t in zip(batch.dst.tolist(), batch.t.tolist()):
            if known[v]:
                dt = t - last[v]
                if dt < 0:
                    raise OutOfOrderError(f"edge into node {v} at t={t} precedes its last update {last[v]}")
                pop[v] = pop[v] * math.exp(-dt / tau) + 1.0
            else:
                pop[v] = 1.0
                known[v] = True
            last[v] = t
        self.current_time = float(batch.t.max())
        self._refresh_topk()

    def _refresh_topk(self) -> None:
        ids = np.flatnonzero(self._known)
        values = self._pop[ids] * np.exp(-(self.current_time - self._last[ids]) / self.tau)
        k = self.k
        if len(ids) > k:
            # k-th largest value; everything strictly above is in, ties at it go by id
            kth = np.partition(values, len(values) - k)[len(values) - k]
            above = values > kth
            tied = np.flatnonzero(values == kth)[: k - int(above.sum())]
            keep = np.concatenate([np.flatnonzero(above), tied])
            ids, values = ids[keep], values[keep]
        order = np.lexsort((ids, -values))
        top = ids[order]
        self._in_topk[:] = False
        self._in_topk[top] = True
        self.topk = tuple(top.tolist())

    def popularity(self, v: int, t: float) -> float:
        """Decayed popularity of ``v`` at time ``t``; 0 for nodes never seen as a destination."""
        if v >= len(self._pop) or not self._known[v]:
            return 0.0
        return float(self._pop[v] * math.exp(-(t - self._last[v]) / self.tau))

    def popularity_many(self, nodes: np.ndarray, t: float) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        out = np.zeros(len(nodes), dtype=np.float64)
        ok = nodes < len(self._pop)
        idx = nodes[ok]
        known = self._known[idx]
        idx = idx[known]
        vals = np.zeros(len(known))
        vals[known] = self._pop[idx] * np.exp(-(t - self._last[idx]) / self.tau)
        out[ok] = vals
        return out

    def score(self, v: int) -> int:
        return int(v < len(self._in_topk) and self._in_topk[v])

    def score_candidates(self, dsts: np.ndarray) -> np.ndarray:
        dsts = np.asarray(dsts, dtype=np.int64)
        out = np.zeros(len(dsts), dtype=np.float64)
        ok = dsts < len(self._in_topk)
        out[ok] = self._in_topk[dsts[ok]]
        return out

    def dump_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "popularity", "last_update"])
            for v in np.flatnonzero(self._known).tolist():
                writer.writerow([v, repr(float(self._pop[v])), repr(float(self._last[v]))])
