"""Replication pipeline: base clustering, missingness grid, aggregation, reports.

Seeding contract
----------------
Every trial gets ``trial_seed(base_seed, strategy, fraction, trial)``, a
splitmix64 chain over the four integers (strategy tag: ocs=1, nps=2;
fraction in basis points). From it the trial derives

* the injection seed ``mix64(trial_seed, 1)`` and
* the run seed ``trial_seed`` (missing-value start values and initial centroids).

``fixed_pattern`` replaces the injection seed with one that depends only on
``(base_seed, fraction)``, so all trials and both strategies see the same
missing cells; ``fixed_init`` runs every trial from ``base_seed``.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import DataSet, Parameters, RunResult
from .data import (InjectionSpec, MixtureSpec, generate_mixture, inject_missing,
                   load_builtin, read_table, zscore)
from .engine import run_pfcm
from .errors import ConfigurationError, PFCMError
from .imputation import Strategy, run_incomplete
from .metrics import (ClusterCountSelection, accuracy, centroid_error, harden,
                      select_cluster_count)

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
STRATEGY_TAGS = {Strategy.OCS: 1, Strategy.NPS: 2}
DEFAULT_FRACTIONS = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
METRICS = ("accuracy", "iterations", "centroid_error")


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix64(*parts: int) -> int:
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h


def fraction_bp(fraction: float) -> int:
    return int(round(float(fraction) * 10000))


def trial_seed(base_seed: int, strategy, fraction: float, trial: int) -> int:
    return mix64(base_seed, STRATEGY_TAGS[Strategy.parse(strategy)], fraction_bp(fraction), trial)


# ------------------------------------------------------------------ records

@dataclass(frozen=True)
class ExperimentSpec:
    data: str | None = None
    mixture: MixtureSpec | None = None
    label_column: object = None
    c: int | None = 2
    c_range: tuple | None = None
    params: Parameters = field(default_factory=Parameters)
    fractions: tuple = DEFAULT_FRACTIONS
    trials: int = 30
    strategies: tuple = (Strategy.OCS, Strategy.NPS)
    base_seed: int = 0
    zscore: bool = False
    harden_by: str = "t"
    fixed_pattern: bool = False
    fixed_init: bool = False

    def __post_init__(self):
        if (self.data is None) == (self.mixture is None):
            raise ConfigurationError("give exactly one data source: a file/builtin name or a mixture")
        if int(self.trials) < 1:
            raise ConfigurationError("trials must be at least 1")
        fr = tuple(float(f) for f in self.fractions)
        for f in fr:
            if not 0.0 <= f < 1.0:
                raise ConfigurationError(f"missing fraction {f} outside [0, 1)")
        object.__setattr__(self, "fractions", tuple(sorted(set(fr))))
        object.__setattr__(self, "strategies",
                           tuple(sorted({Strategy.parse(s) for s in self.strategies},
                                        key=lambda s: s.value)))
        if self.harden_by not in ("t", "u"):
            raise ConfigurationError("harden_by must be 't' or 'u'")
        if self.c is None and not self.c_range:
            raise ConfigurationError("give c or a c range")


@dataclass(frozen=True)
class TrialRecord:
    strategy: str
    fraction: float
    trial: int
    accuracy: float
    iterations: int
    centroid_error: float
    converged: bool
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass(frozen=True)
class AggregateRecord:
    strategy: str
    fraction: float
    trials: int
    used: int
    converged: int
    stats: dict   # metric -> {"mean", "min", "max", "std"}


@dataclass(frozen=True)
class Base:
    data: DataSet
    result: RunResult
    labels: np.ndarray
    c: int
    selection: ClusterCountSelection | None = None


# ----------------------------------------------------------------- pipeline

def load_source(spec: ExperimentSpec) -> DataSet:
    if spec.mixture is not None:
        data, _ = generate_mixture(spec.mixture)
    elif spec.data in ("iris", "wine") and not Path(spec.data).exists():
        data = load_builtin(spec.data).data
    else:
        data = read_table(spec.data, label_column=spec.label_column).data
    if not data.is_complete:
        raise ConfigurationError("the base data set must be complete")
    return zscore(data) if spec.zscore else data


def labels_of(result: RunResult, harden_by: str = "t") -> np.ndarray:
    part = result.partition
    return harden(part.t if harden_by == "t" else part.u)


def run_base(spec: ExperimentSpec, data: DataSet | None = None) -> Base:
    """Cluster the complete data; this partition is the reference for every trial."""
    data = load_source(spec) if data is None else data
    selection = None
    if spec.c_range:
        selection = select_cluster_count(data, spec.c_range, spec.params, spec.base_seed)
        c = selection.c
        log.info("Xie-Beni sweep %s -> c=%d", selection.scores, c)
    else:
        c = int(spec.c)
    params = spec.params.replace(c=c)
    result = run_pfcm(data, params, spec.base_seed)
    return Base(data, result, labels_of(result, spec.harden_by), c, selection)


def _trial(spec: ExperimentSpec, base: Base, strategy: Strategy, fraction: float, trial: int):
    params = spec.params.replace(c=base.c)
    seed = trial_seed(spec.base_seed, strategy, fraction, trial)
    run_seed = spec.base_seed if spec.fixed_init else seed
    if spec.fixed_pattern:
        inj_seed = mix64(spec.base_seed, 0, fraction_bp(fraction))
    else:
        inj_seed = mix64(seed, 1)
    start = time.perf_counter()
    try:
        if fraction == 0.0:
            # reference shares the trial's initialisation
            ref = run_pfcm(base.data, params, run_seed)
            ref_labels = labels_of(ref, spec.harden_by)
        else:
            ref, ref_labels = base.result, base.labels
        incomplete = inject_missing(base.data, InjectionSpec(fraction, inj_seed))
        res = run_incomplete(incomplete, params, strategy, run_seed)
        rec = TrialRecord(
            strategy=strategy.value, fraction=fraction, trial=trial,
            accuracy=accuracy(labels_of(res, spec.harden_by), ref_labels, base.c),
            iterations=res.iterations,
            centroid_error=centroid_error(res.centroids, ref.centroids),
            converged=res.converged,
            wall_time=time.perf_counter() - start)
    except PFCMError as exc:
        log.warning("trial %s/%s/%d failed: %s", strategy.value, fraction, trial, exc)
        rec = TrialRecord(strategy.value, fraction, trial, math.nan, 0, math.nan, False,
                          time.perf_counter() - start, f"{type(exc).__name__}: {exc}")
    return rec


def _trial_args(spec, base):
    for strategy in spec.strategies:
        for fraction in spec.fractions:
            for trial in range(spec.trials):
                yield spec, base, strategy, fraction, trial


def _run_packed(args):
    return _trial(*args)


def run_grid(spec: ExperimentSpec, base: Base, jobs: int = 1) -> list[TrialRecord]:
    """One record per (strategy, fraction, trial), in canonical order."""
    work = list(_trial_args(spec, base))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_packed, work, chunksize=4))
    else:
        records = [_trial(*args) for args in work]
    return sorted(records, key=lambda r: (r.strategy, r.fraction, r.trial))


def _stats(values):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"mean": math.nan, "min": math.nan, "max": math.nan, "std": math.nan}
    return {
        "mean": float(arr.mean()),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "std": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
    }


def aggregate(records) -> list[AggregateRecord]:
    """Per (strategy, fraction) mean/min/max/std over the trials that ran.

    Failed trials count towards ``trials`` but not ``used``.
    """
    records = list(records)
    if not records:
        raise ConfigurationError("nothing to aggregate")
    groups = {}
    for r in records:
        groups.setdefault((r.strategy, r.fraction), []).append(r)
    out = []
    for (strategy, fraction), recs in sorted(groups.items()):
        good = [r for r in recs if r.ok]
        out.append(AggregateRecord(
            strategy=strategy, fraction=fraction, trials=len(recs), used=len(good),
            converged=sum(r.converged for r in good),
            stats={m: _stats([getattr(r, m) for r in good]) for m in METRICS}))
    return out


# ------------------------------------------------------------------ reports

TRIAL_COLUMNS = ("strategy", "fraction", "trial", "accuracy", "iterations",
                 "centroid_error", "converged", "error")
STAT_NAMES = ("mean", "min", "max", "std")


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_trials(path, records) -> None:
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRIAL_COLUMNS)
        for r in records:
            out.writerow([_fmt(getattr(r, col)) for col in TRIAL_COLUMNS])


def read_trials(path) -> list[TrialRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return [TrialRecord(
            strategy=row["strategy"], fraction=float(row["fraction"]),
            trial=int(row["trial"]), accuracy=float(row["accuracy"]),
            iterations=int(row["iterations"]), centroid_error=float(row["centroid_error"]),
            converged=row["converged"] == "true", error=row.get("error", ""))
            for row in rows]
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"{path}: malformed trials file ({exc})") from exc


def emit_report(aggregates, records, out_dir, plots: bool = False) -> list[Path]:
    """Write trials.csv, summary.csv and one plot-data file per metric.

    Per-trial wall times go to timings.csv so that trials.csv stays
    byte-identical across reruns. ``plots`` adds SVG line charts.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "trials.csv"
    write_trials(path, records)
    written.append(path)

    path = out_dir / "timings.csv"
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(("strategy", "fraction", "trial", "wall_time"))
        for r in records:
            out.writerow((r.strategy, _fmt(r.fraction), r.trial, f"{r.wall_time:.6f}"))
    written.append(path)

    path = out_dir / "summary.csv"
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["strategy", "fraction", "trials", "used", "converged"]
                     + [f"{m}_{s}" for m in METRICS for s in STAT_NAMES])
        for a in aggregates:
            out.writerow([a.strategy, _fmt(a.fraction), a.trials, a.used, a.converged]
                         + [_fmt(a.stats[m][s]) for m in METRICS for s in STAT_NAMES])
    written.append(path)

    strategies = sorted({a.strategy for a in aggregates})
    fractions = sorted({a.fraction for a in aggregates})
    table = {(a.strategy, a.fraction): a for a in aggregates}
    for metric in METRICS:
        path = out_dir / f"{metric}.csv"
        with path.open("w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["fraction"] + strategies)
            for f in fractions:
                row = [_fmt(f)]
                for s in strategies:
                    a = table.get((s, f))
                    row.append(_fmt(a.stats[metric]["mean"]) if a else "")
                out.writerow(row)
        written.append(path)

    if plots:
        written.extend(_plot(table, strategies, fractions, out_dir))
    return written


def _plot(table, strategies, fractions, out_dir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = {"accuracy": "mean accuracy (%)", "iterations": "mean iterations",
              "centroid_error": "mean centroid error"}
    paths = []
    for metric in METRICS:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for s in strategies:
            ys = [table[(s, f)].stats[metric]["mean"] if (s, f) in table else math.nan
                  for f in fractions]
            ax.plot([100 * f for f in fractions], ys, marker="o", label=s.upper() + "PFCM")
        ax.set_xlabel("missing values (%)")
        ax.set_ylabel(labels[metric])
        ax.legend()
        fig.tight_layout()
        path = Path(out_dir) / f"{metric}.svg"
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths


__all__ = ["ExperimentSpec", "TrialRecord", "AggregateRecord", "Base", "run_base",
           "run_grid", "aggregate", "emit_report", "read_trials", "trial_seed", "mix64"]
