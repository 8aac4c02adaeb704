"""t-CoMem: per-source recency queues plus symmetric co-occurrence counts.

Score of a candidate ``(u, v)`` at time ``t``::

    S  = sum over (t_i, n_i) in recent[u], t - t_i <= tw, of
             exp(-(t - t_i) / tw) * popularity(n_i, t)
    i  = lam * c / (1 + c)          c = co-occurrence count of {u, v}
    score = (S + i) / (1 + S + i)

The last line is ``1 / (1 + 1 / (S + i))`` rewritten so that it is defined
(and equal to 0) when ``S + i == 0``.
"""

from __future__ import annotations

import math
from collections import Counter, deque

import numpy as np

from .edgebank import OutOfOrderError
from .graph_stream import EdgeStream
from .poptrack import PopTrack

DEFAULT_TW = 1_000_000.0
DEFAULT_LAMBDA = 1.0
DEFAULT_QUEUE_CAP = 10_000


def pair_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def squash(x):
    """Map [0, inf) onto [0, 1)."""
    return x / (1.0 + x)


class TCoMem:
    """Temporal co-occurrence memory.

    Args:
        tw: time window in raw timestamp units; also the decay constant.
        lam: co-occurrence weight in [0, 1].
        queue_cap: hard per-source bound on queue length (oldest evicted).
    """

    def __init__(self, tw: float = DEFAULT_TW, lam: float = DEFAULT_LAMBDA, queue_cap: int = DEFAULT_QUEUE_CAP):
        if not tw > 0:
            raise ValueError("tw must be positive")
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {lam}")
        self.tw = float(tw)
        self.lam = float(lam)
        self.queue_cap = int(queue_cap)
        self.current_time = -math.inf
        # parallel deques: timestamps and destinations, oldest first
        self._times: dict[int, deque] = {}
        self._dsts: dict[int, deque] = {}
        self.cooc: Counter = Counter()

    def recent(self, u: int) -> list[tuple[float, int]]:
        return list(zip(self._times.get(u, ()), self._dsts.get(u, ())))

    def cooccurrence(self, u: int, v: int) -> int:
        return self.cooc.get(pair_key(u, v), 0)

    def update(self, batch: EdgeStream) -> None:
        if not len(batch):
            return
        if float(batch.t.min()) < self.current_time:
            raise OutOfOrderError(f"batch starts at t={batch.t.min()} before current time {self.current_time}")
        times, dsts, cooc, cap = self._times, self._dsts, self.cooc, self.queue_cap
        touched = set()
        for u, v, t in zip(batch.src.tolist(), batch.dst.tolist(), batch.t.tolist()):
            q = times.get(u)
            if q is None:
                q = times[u] = deque(maxlen=cap)
                dsts[u] = deque(maxlen=cap)
            q.append(t)
            dsts[u].append(v)
            cooc[pair_key(u, v)] += 1
            touched.add(u)
        self.current_time = float(batch.t.max())
        cutoff = self.current_time - self.tw
        for u in touched:
            q, d = times[u], dsts[u]
            while q and q[0] < cutoff:
                q.popleft()
                d.popleft()

    def decayed_neighbor_popularity(self, u: int, t: float, pops: PopTrack) -> float:
        """The ``S`` term: decayed popularity of ``u``'s recent destinations."""
        q = self._times.get(u)
        if not q:
            return 0.0
        ts = np.fromiter(q, dtype=np.float64, count=len(q))
        nb = np.fromiter(self._dsts[u], dtype=np.int64, count=len(q))
        age = t - ts
        live = age <= self.tw
        if not live.all():
            age, nb = age[live], nb[live]
        weights = np.exp(-age / self.tw)
        return float(np.dot(weights, pops.popularity_many(nb, t)))

    def score(self, u: int, v: int, t: float, pops: PopTrack) -> float:
        c = self.cooccurrence(u, v)
        s = self.decayed_neighbor_popularity(u, t, pops) + self.lam * c / (1.0 + c)
        return squash(s)

    def score_candidates(self, u: int, dsts: np.ndarray, t: float, pops: PopTrack) -> np.ndarray:
        base = self.decayed_neighbor_popularity(u, t, pops)
        cooc = self.cooc
        c = np.fromiter(
            (cooc.get(pair_key(u, d), 0) for d in dsts.tolist()), dtype=np.float64, count=len(dsts)
        )
        return squash(base + self.lam * c / (1.0 + c))

    def queue_lengths(self) -> dict[int, int]:
        return {u: len(q) for u, q in self._times.items()}
