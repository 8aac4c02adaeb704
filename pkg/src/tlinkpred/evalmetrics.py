"""Reciprocal rank / MRR with explicit tie handling, and rank-sum AUROC."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

TIE_MODES = ("mid", "optimistic", "pessimistic")


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class ScoredQuery:
    pos_score: float
    neg_scores: Sequence[float]


def reciprocal_rank(q: ScoredQuery, ties: str = "mid") -> float:
    """1 / rank of the positive among its negatives.

    ``ties="mid"`` counts each tied negative as half a place above the
    positive; ``optimistic`` ranks the positive first among ties and
    ``pessimistic`` last.
    """
    negs = np.asarray(q.neg_scores, dtype=np.float64)
    if negs.size == 0:
        raise MetricError("a ranking query needs at least one negative score")
    if ties not in TIE_MODES:
        raise MetricError(f"unknown tie mode {ties!r}")
    pos = float(q.pos_score)
    if not (math.isfinite(pos) and np.all(np.isfinite(negs))):
        raise MetricError("scores must be finite")
    higher = int(np.count_nonzero(negs > pos))
    equal = int(np.count_nonzero(negs == pos))
    tie_weight = {"mid": 0.5, "optimistic": 0.0, "pessimistic": 1.0}[ties]
    return 1.0 / (1.0 + higher + tie_weight * equal)


def mrr(queries: Sequence[ScoredQuery], ties: str = "mid") -> float:
    if not queries:
        raise MetricError("MRR of an empty query set is undefined")
    return math.fsum(reciprocal_rank(q, ties) for q in queries) / len(queries)


def auroc(pos_scores: Sequence[float], neg_scores: Sequence[float]) -> float:
    """Mann-Whitney AUROC: P(pos > neg) + 0.5 * P(pos == neg), via average ranks."""
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0:
        raise MetricError("AUROC needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    n_pos, n_neg = pos.size, neg.size
    u = math.fsum(ranks[:n_pos]) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass
class MetricReport:
    """Result of one evaluation run.

    ``config`` echoes the run configuration; ``disclosures`` records the
    artifact-chosen settings that can move results (decay constant, tie mode,
    evaluation protocol). ``wall_clock_s`` is only serialized on request so
    that reports stay byte-reproducible.
    """

    config: dict
    mrr_val: float | None = None
    mrr_test: float | None = None
    auroc_val: float | None = None
    auroc_test: float | None = None
    n_queries: dict = field(default_factory=dict)
    fill_counts: dict = field(default_factory=dict)
    disclosures: dict = field(default_factory=dict)
    error: str | None = None
    wall_clock_s: float | None = None

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("wall_clock_s")
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(**d)
