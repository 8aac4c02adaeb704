"""Uniform ``update(batch)`` / ``score(src, dsts, t)`` wrappers around every predictor."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .base3 import DEFAULT_SCHEME, InterpolationWeights, Scheme, interpolate
from .edgebank import EdgeBank
from .graph_stream import EdgeStream
from .poptrack import PopTrack
from .static_heuristics import CommonNeighbors, PreferentialAttachment
from .tcomem import TCoMem

MODEL_NAMES = ("edgebank", "poptrack", "tcomem", "base3", "cn", "pa")


class Scorer(Protocol):
    def update(self, batch: EdgeStream) -> None: ...

    def score(self, src: int, dsts: np.ndarray, t: float) -> np.ndarray: ...


class EdgeBankScorer:
    def __init__(self, bank: EdgeBank):
        self.bank = bank

    def update(self, batch):
        self.bank.update(batch)

    def score(self, src, dsts, t):
        return self.bank.score_candidates(src, dsts, t)


class PopTrackScorer:
    def __init__(self, pops: PopTrack):
        self.pops = pops

    def update(self, batch):
        self.pops.update(batch)

    def score(self, src, dsts, t):
        return self.pops.score_candidates(dsts)


class TCoMemScorer:
    def __init__(self, memory: TCoMem, pops: PopTrack):
        self.memory = memory
        self.pops = pops

    def update(self, batch):
        self.pops.update(batch)
        self.memory.update(batch)

    def score(self, src, dsts, t):
        return self.memory.score_candidates(src, dsts, t, self.pops)


class Base3Scorer:
    """EdgeBank + PopTrack + t-CoMem sharing one popularity table."""

    def __init__(
        self,
        bank: EdgeBank,
        pops: PopTrack,
        memory: TCoMem,
        scheme: Scheme | str = DEFAULT_SCHEME,
        weights: InterpolationWeights | None = None,
    ):
        self.bank = bank
        self.pops = pops
        self.memory = memory
        self.scheme = Scheme(scheme)
        self.weights = weights

    def update(self, batch):
        self.bank.update(batch)
        self.pops.update(batch)
        self.memory.update(batch)

    def components(self, src, dsts, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.bank.score_candidates(src, dsts, t),
            self.pops.score_candidates(dsts),
            self.memory.score_candidates(src, dsts, t, self.pops),
        )

    def score(self, src, dsts, t):
        return interpolate(*self.components(src, dsts, t), scheme=self.scheme, weights=self.weights)


class HeuristicScorer:
    def __init__(self, index):
        self.index = index

    def update(self, batch):
        self.index.update(batch)

    def score(self, src, dsts, t):
        return self.index.score_candidates(src, dsts, t)


def build_model(
    name: str,
    train: EdgeStream,
    span: float = 0.1,
    lam: float = 1.0,
    tw: float = 1_000_000.0,
    tau_p: float | None = None,
    k: int = 1000,
    scheme: Scheme | str = DEFAULT_SCHEME,
    weights: InterpolationWeights | None = None,
) -> Scorer:
    """Fresh, empty model; the EdgeBank window is sized from ``train``'s duration.

    ``tau_p`` defaults to ``tw``.
    """
    tau = tw if tau_p is None else tau_p
    if name == "edgebank":
        return EdgeBankScorer(EdgeBank.for_history(train, span))
    if name == "poptrack":
        return PopTrackScorer(PopTrack(k, tau))
    if name == "tcomem":
        return TCoMemScorer(TCoMem(tw, lam), PopTrack(k, tau))
    if name == "base3":
        return Base3Scorer(EdgeBank.for_history(train, span), PopTrack(k, tau), TCoMem(tw, lam), scheme, weights)
    if name == "cn":
        return HeuristicScorer(CommonNeighbors())
    if name == "pa":
        return HeuristicScorer(PreferentialAttachment())
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")
