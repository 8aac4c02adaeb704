"""Base3: convex interpolation of EdgeBank, PopTrack and t-CoMem scores."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Scheme(str, enum.Enum):
    UNIFORM = "uniform"
    EB_CONF = "eb_conf"
    MULTI_CONF = "multi_conf"


DEFAULT_SCHEME = Scheme.MULTI_CONF


@dataclass(frozen=True)
class InterpolationWeights:
    alpha: float  # EdgeBank
    beta: float  # PopTrack
    delta: float  # t-CoMem

    def __post_init__(self):
        if min(self.alpha, self.beta, self.delta) < 0:
            raise ValueError(f"weights must be non-negative: {self}")
        if abs(self.alpha + self.beta + self.delta - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1: {self}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.delta)


@dataclass(frozen=True)
class ComponentScores:
    s_eb: int
    s_pt: int
    s_cm: float

    def __post_init__(self):
        if self.s_eb not in (0, 1) or self.s_pt not in (0, 1):
            raise ValueError("s_eb and s_pt must be 0 or 1")
        if not 0.0 <= self.s_cm <= 1.0:
            raise ValueError("s_cm must lie in [0, 1]")


_THIRD = 1.0 / 3.0
UNIFORM_WEIGHTS = InterpolationWeights(_THIRD, _THIRD, _THIRD)

# keyed by s_eb
EB_CONF_WEIGHTS = {
    1: InterpolationWeights(0.5, 0.2, 0.3),
    0: InterpolationWeights(0.2, 0.3, 0.5),
}

# keyed by (s_eb, s_pt)
MULTI_CONF_WEIGHTS = {
    (1, 1): InterpolationWeights(0.35, 0.45, 0.20),
    (1, 0): InterpolationWeights(0.45, 0.25, 0.30),
    (0, 1): InterpolationWeights(0.15, 0.70, 0.15),
    (0, 0): InterpolationWeights(0.20, 0.45, 0.35),
}


def weights_for(scheme: Scheme | str, s_eb: int, s_pt: int) -> InterpolationWeights:
    scheme = Scheme(scheme)
    if scheme is Scheme.UNIFORM:
        return UNIFORM_WEIGHTS
    if scheme is Scheme.EB_CONF:
        return EB_CONF_WEIGHTS[int(s_eb)]
    return MULTI_CONF_WEIGHTS[(int(s_eb), int(s_pt))]


def base3_score(
    scores: ComponentScores,
    scheme: Scheme | str = DEFAULT_SCHEME,
    weights: InterpolationWeights | None = None,
) -> float:
    """Weighted sum of the three component scores.

    ``weights`` overrides the scheme's table when given.
    """
    w = weights if weights is not None else weights_for(scheme, scores.s_eb, scores.s_pt)
    return w.alpha * scores.s_eb + w.beta * scores.s_pt + w.delta * scores.s_cm


def _weight_table(scheme: Scheme) -> np.ndarray:
    """4x3 table indexed by ``2 * s_eb + s_pt``."""
    return np.array(
        [weights_for(scheme, eb, pt).as_tuple() for eb in (0, 1) for pt in (0, 1)],
        dtype=np.float64,
    )


def interpolate(
    s_eb: np.ndarray,
    s_pt: np.ndarray,
    s_cm: np.ndarray,
    scheme: Scheme | str = DEFAULT_SCHEME,
    weights: InterpolationWeights | None = None,
) -> np.ndarray:
    """Vectorized ``base3_score`` over aligned component arrays."""
    if weights is not None:
        a, b, d = weights.as_tuple()
        return a * s_eb + b * s_pt + d * s_cm
    w = _weight_table(Scheme(scheme))[2 * s_eb.astype(np.int64) + s_pt.astype(np.int64)]
    return w[:, 0] * s_eb + w[:, 1] * s_pt + w[:, 2] * s_cm


def parse_weights(text: str) -> InterpolationWeights:
    """Parse ``"a,b,d"`` into weights."""
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3 or not all(math.isfinite(x) for x in parts):
        raise ValueError(f"expected three comma-separated weights, got {text!r}")
    return InterpolationWeights(*parts)
