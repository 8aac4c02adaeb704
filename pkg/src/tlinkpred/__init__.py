"""Training-free temporal link prediction: EdgeBank, PopTrack, t-CoMem and Base3."""

from .base3 import InterpolationWeights, Scheme, base3_score, weights_for
from .edgebank import EdgeBank
from .evalmetrics import MetricReport, ScoredQuery, auroc, mrr, reciprocal_rank
from .graph_stream import EdgeStream, TemporalEdge, batches, chronological_split, load_edges, surprise
from .harness import RunConfig, SweepGrid, emit_report, run_eval, run_sweep
from .poptrack import PopTrack
from .tcomem import TCoMem

__version__ = "0.1.0"

__all__ = [
    "EdgeBank",
    "EdgeStream",
    "InterpolationWeights",
    "MetricReport",
    "PopTrack",
    "RunConfig",
    "Scheme",
    "ScoredQuery",
    "SweepGrid",
    "TCoMem",
    "TemporalEdge",
    "auroc",
    "base3_score",
    "batches",
    "chronological_split",
    "emit_report",
    "load_edges",
    "mrr",
    "reciprocal_rank",
    "run_eval",
    "run_sweep",
    "surprise",
    "weights_for",
]
