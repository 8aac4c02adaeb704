"""Streaming score-then-update evaluation, hyperparameter sweeps and report output."""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import negsample
from .base3 import InterpolationWeights, Scheme
from .evalmetrics import TIE_MODES, MetricReport, ScoredQuery, auroc, reciprocal_rank
from .graph_stream import ChronoSplit, EdgeStream, batches, load_dataset
from .models import MODEL_NAMES, build_model
from .negsample import NegativeQuery, PairIndex

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

PROTOCOL = (
    "memories ingest train (update only), then val and test batch by batch: "
    "each batch is scored against memory as of the previous batch, then ingested; "
    "no reset at the val/test boundary"
)

SPLIT_TAGS = {"val": 1, "test": 2}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    dataset: str
    model: str = "base3"
    scheme: str = "multi_conf"
    weights: tuple[float, float, float] | None = None
    span: float = 0.1
    lam: float = 1.0
    tw: float = 1_000_000.0
    tau_p: float | None = None
    k: int = 1000
    batch_size: int = 200
    neg: str = "random"
    n_neg: int = negsample.DEFAULT_N_NEGATIVES
    seed: int = 0
    split: tuple[float, float, float] = (0.70, 0.15, 0.15)
    metrics: tuple[str, ...] = ("mrr", "auroc")
    ties: str = "mid"
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.model not in MODEL_NAMES:
            raise ConfigError(f"model must be one of {MODEL_NAMES}, got {self.model!r}")
        try:
            Scheme(self.scheme)
        except ValueError:
            raise ConfigError(f"scheme must be one of {[s.value for s in Scheme]}, got {self.scheme!r}") from None
        if self.weights is not None:
            try:
                InterpolationWeights(*self.weights)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid weights {self.weights}: {exc}") from None
        if not 0.0 < self.span <= 1.0:
            raise ConfigError(f"span must lie in (0, 1], got {self.span}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lam}")
        if not (self.tw > 0 and math.isfinite(self.tw)):
            raise ConfigError(f"tw must be positive, got {self.tw}")
        if self.tau_p is not None and not (self.tau_p > 0 and math.isfinite(self.tau_p)):
            raise ConfigError(f"tau_p must be positive, got {self.tau_p}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch size must be >= 1")
        if self.n_neg < 1:
            raise ConfigError("n_neg must be >= 1")
        if not (self.neg in negsample.STRATEGIES or self.neg.startswith("file:")):
            raise ConfigError(f"neg must be random|historical|inductive|file:PATH, got {self.neg!r}")
        if len(self.split) != 3 or any(r <= 0 for r in self.split) or abs(sum(self.split) - 1) > 1e-9:
            raise ConfigError(f"split must be three positive ratios summing to 1, got {self.split}")
        if not self.metrics or any(m not in ("mrr", "auroc") for m in self.metrics):
            raise ConfigError(f"metrics must be a non-empty subset of (mrr, auroc), got {self.metrics}")
        if self.ties not in TIE_MODES:
            raise ConfigError(f"ties must be one of {TIE_MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("workers")  # does not affect results
        d["weights"] = list(self.weights) if self.weights is not None else None
        d["split"] = list(self.split)
        d["metrics"] = list(self.metrics)
        return d

    def effective_tau_p(self) -> float:
        return self.tw if self.tau_p is None else self.tau_p


@dataclass
class SweepGrid:
    """Per-hyperparameter value lists; ``None`` keeps the base config's value.

    Points are enumerated as the Cartesian product in the fixed order
    span, lam, k, scheme (last varies fastest).
    """

    span: list[float] | None = None
    lam: list[float] | None = None
    k: list[int] | None = None
    scheme: list[str] | None = None

    def points(self, base: RunConfig) -> list[RunConfig]:
        axes = [
            (name, values if values is not None else [getattr(base, name)])
            for name, values in (("span", self.span), ("lam", self.lam), ("k", self.k), ("scheme", self.scheme))
        ]
        for name, values in axes:
            if not values:
                raise ConfigError(f"grid axis {name!r} is empty")
        names = [n for n, _ in axes]
        return [
            dataclasses.replace(base, **dict(zip(names, combo)))
            for combo in itertools.product(*(v for _, v in axes))
        ]

    @classmethod
    def wiki_ablation(cls) -> "SweepGrid":
        """3 spans x 4 co-occurrence weights x 2 K values under multi_conf."""
        return cls(span=[0.01, 0.1, 1.0], lam=[0.25, 0.5, 0.75, 1.0], k=[100, 1000], scheme=["multi_conf"])

    @classmethod
    def from_mapping(cls, grid: dict) -> "SweepGrid":
        aliases = {"lambda": "lam", "K": "k", "memory_span": "span"}
        kwargs = {}
        for key, values in grid.items():
            name = aliases.get(key, key)
            if name not in ("span", "lam", "k", "scheme"):
                raise ConfigError(f"unknown grid key {key!r}")
            kwargs[name] = list(values) if isinstance(values, (list, tuple)) else [values]
        return cls(**kwargs)


def load_grid_file(path: str | os.PathLike) -> tuple[SweepGrid, dict]:
    """Read a TOML sweep file: a ``[grid]`` table of value lists and an optional ``[base]`` table."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    if "grid" not in doc:
        raise ConfigError(f"{path}: missing [grid] table")
    base = dict(doc.get("base", {}))
    if "lambda" in base:
        base["lam"] = base.pop("lambda")
    return SweepGrid.from_mapping(doc["grid"]), base


def _negatives_from_file(source: str, split: ChronoSplit) -> dict[str, list[NegativeQuery]]:
    paths = [p for p in source[len("file:"):].split(",") if p]
    table = negsample.load_negative_files(paths)
    out = {}
    for name in ("val", "test"):
        queries = []
        for edge in getattr(split, name):
            q = table.get(negsample.query_key(*edge))
            if q is None:
                raise negsample.NegativeSampleError(f"no negatives for {name} edge {tuple(edge)} in {paths}")
            queries.append(q)
        out[name] = queries
    return out


def prepare_negatives(config: RunConfig, split: ChronoSplit) -> dict[str, list[NegativeQuery]]:
    """Negatives for the val and test positives; a pure function of (data, strategy, n, seed)."""
    if config.neg.startswith("file:"):
        return _negatives_from_file(config.neg, split)
    universe = np.unique(split.full.dst)
    train_pairs = PairIndex.from_stream(split.train)
    return {
        name: negsample.sample_for_stream(
            getattr(split, name), config.neg, config.n_neg, config.seed, universe, train_pairs, SPLIT_TAGS[name]
        )
        for name in ("val", "test")
    }


def _score_query(model, q: NegativeQuery) -> tuple[float, np.ndarray]:
    src, dst, t = q.positive
    cands = np.empty(len(q.negatives) + 1, dtype=np.int64)
    cands[0] = dst
    cands[1:] = q.negatives
    scores = model.score(src, cands, t)
    return float(scores[0]), scores[1:]


def stream_split(model, stream: EdgeStream, queries: Sequence[NegativeQuery], batch_size: int, pool=None):
    """Score-then-update over one evaluation split; returns ``(pos_scores, neg_scores)`` per query."""
    if len(queries) != len(stream):
        raise ValueError(f"{len(queries)} negative queries for {len(stream)} positives")
    pos_scores, neg_scores = [], []
    start = 0
    for batch in batches(stream, batch_size):
        batch_queries = queries[start : start + len(batch)]
        start += len(batch)
        if pool is None:
            results = [_score_query(model, q) for q in batch_queries]
        else:
            results = list(pool.map(lambda q: _score_query(model, q), batch_queries))
        for p, n in results:
            pos_scores.append(p)
            neg_scores.append(n)
        model.update(batch)
    return pos_scores, neg_scores


def _disclosures(config: RunConfig, model) -> dict:
    d = {
        "protocol": PROTOCOL,
        "tie_mode": config.ties,
        "tau_p": config.effective_tau_p(),
        "tau_p_source": "tw (default)" if config.tau_p is None else "user",
        "negatives": config.neg if config.neg.startswith("file:") else f"{config.neg}, n={config.n_neg}, seed={config.seed}",
    }
    bank = getattr(model, "bank", None)
    if bank is not None:
        d["edgebank_window"] = "unlimited" if math.isinf(bank.window_length) else bank.window_length
    return d


def run_eval(
    config: RunConfig,
    split: ChronoSplit | None = None,
    negatives: dict[str, list[NegativeQuery]] | None = None,
) -> MetricReport:
    """Evaluate one model on one dataset.

    ``split`` and ``negatives`` may be passed in to share them across runs
    (as ``run_sweep`` does); otherwise they are loaded / sampled here.
    """
    config.validate()
    started = time.perf_counter()
    if split is None:
        split = load_dataset(config.dataset, config.split)
    if negatives is None:
        negatives = prepare_negatives(config, split)
    weights = InterpolationWeights(*config.weights) if config.weights is not None else None
    model = build_model(
        config.model, split.train, config.span, config.lam, config.tw, config.tau_p, config.k, config.scheme, weights
    )
    for batch in batches(split.train, config.batch_size):
        model.update(batch)

    report = MetricReport(config=config.echo(), disclosures=_disclosures(config, model))
    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for name in ("val", "test"):
            stream, queries = getattr(split, name), negatives[name]
            pos, neg = stream_split(model, stream, queries, config.batch_size, pool)
            report.n_queries[name] = len(queries)
            report.fill_counts[name] = sum(q.n_filled for q in queries)
            if "mrr" in config.metrics:
                rr = [reciprocal_rank(ScoredQuery(p, n), config.ties) for p, n in zip(pos, neg)]
                setattr(report, f"mrr_{name}", math.fsum(rr) / len(rr))
            if "auroc" in config.metrics:
                setattr(report, f"auroc_{name}", auroc(pos, np.concatenate(neg)))
    finally:
        if pool is not None:
            pool.shutdown()
    report.wall_clock_s = time.perf_counter() - started
    log.info("%s on %s: mrr_test=%s auroc_test=%s", config.model, config.dataset, report.mrr_test, report.auroc_test)
    return report


def run_sweep(grid: SweepGrid, base: RunConfig) -> list[MetricReport]:
    """One ``run_eval`` per grid point, sharing data and negatives across points.

    A failing point yields a report with ``error`` set instead of aborting.
    """
    base.validate()
    points = grid.points(base)
    split = load_dataset(base.dataset, base.split)
    negatives = prepare_negatives(base, split)
    reports = []
    for cfg in points:
        try:
            reports.append(run_eval(cfg, split, negatives))
        except Exception as exc:  # recorded per point
            log.warning("grid point %s failed: %s", cfg, exc)
            reports.append(MetricReport(config=cfg.echo(), error=f"{type(exc).__name__}: {exc}"))
    return reports


CSV_COLUMNS = [
    "dataset", "model", "scheme", "weights", "span", "lam", "tw", "tau_p", "k", "batch_size",
    "neg", "n_neg", "seed", "split", "ties",
    "mrr_val", "mrr_test", "auroc_val", "auroc_test",
    "n_queries_val", "n_queries_test", "fill_val", "fill_test",
    "tau_p_effective", "tau_p_source", "error",
]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_cell(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_row(report: MetricReport, include_timing: bool) -> list[str]:
    c = report.config
    row = {key: c.get(key) for key in CSV_COLUMNS if key in c}
    row.update(
        mrr_val=report.mrr_val,
        mrr_test=report.mrr_test,
        auroc_val=report.auroc_val,
        auroc_test=report.auroc_test,
        n_queries_val=report.n_queries.get("val"),
        n_queries_test=report.n_queries.get("test"),
        fill_val=report.fill_counts.get("val"),
        fill_test=report.fill_counts.get("test"),
        tau_p_effective=report.disclosures.get("tau_p"),
        tau_p_source=report.disclosures.get("tau_p_source"),
        error=report.error,
    )
    cells = [_csv_cell(row.get(key)) for key in CSV_COLUMNS]
    if include_timing:
        cells.append(_csv_cell(report.wall_clock_s))
    return cells


def format_reports(reports: Sequence[MetricReport], format: str = "json", include_timing: bool = False) -> str:
    if format == "json":
        return json.dumps([r.to_dict(include_timing) for r in reports], indent=2, sort_keys=True) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS + (["wall_clock_s"] if include_timing else []))
        for r in reports:
            writer.writerow(_csv_row(r, include_timing))
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def emit_report(
    reports: Sequence[MetricReport], path: str | os.PathLike, format: str = "json", include_timing: bool = False
) -> str:
    """Write reports to ``path`` (JSON list or CSV with a stable column order)."""
    if not reports:
        raise ValueError("no reports to emit")
    text = format_reports(reports, format, include_timing)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return os.fspath(path)


def load_reports(path: str | os.PathLike) -> list[MetricReport]:
    with open(path) as fh:
        return [MetricReport.from_dict(d) for d in json.load(fh)]
