"""Common Neighbors and Preferential Attachment over the cumulative undirected graph."""

from __future__ import annotations

import numpy as np

from .graph_stream import EdgeStream

_EMPTY: frozenset = frozenset()


class NeighborIndex:
    """Undirected neighbor sets accumulated over every ingested edge."""

    def __init__(self):
        self.nbrs: dict[int, set[int]] = {}

    def update(self, batch: EdgeStream) -> None:
        nbrs = self.nbrs
        for u, v in zip(batch.src.tolist(), batch.dst.tolist()):
            nbrs.setdefault(u, set()).add(v)
            nbrs.setdefault(v, set()).add(u)

    def neighbors(self, u: int) -> set[int] | frozenset:
        return self.nbrs.get(u, _EMPTY)

    def degree(self, u: int) -> int:
        return len(self.nbrs.get(u, _EMPTY))


def common_neighbors(idx: NeighborIndex, u: int, v: int) -> int:
    a, b = idx.neighbors(u), idx.neighbors(v)
    if len(a) > len(b):
        a, b = b, a
    return sum(1 for x in a if x in b)


def preferential_attachment(idx: NeighborIndex, u: int, v: int) -> int:
    return idx.degree(u) * idx.degree(v)


class CommonNeighbors(NeighborIndex):
    def score_candidates(self, u: int, dsts: np.ndarray, t: float) -> np.ndarray:
        return np.array([common_neighbors(self, u, d) for d in dsts.tolist()], dtype=np.float64)


class PreferentialAttachment(NeighborIndex):
    def score_candidates(self, u: int, dsts: np.ndarray, t: float) -> np.ndarray:
        du = self.degree(u)
        return np.array([du * self.degree(d) for d in dsts.tolist()], dtype=np.float64)
