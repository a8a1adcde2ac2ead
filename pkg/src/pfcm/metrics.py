"""Validity index and evaluation measures.

Accuracy and centroid error compare a trial partition with a reference
("base") partition whose cluster numbering is arbitrary, so both search
all c! relabelings. That is cheap for the small c used here and is capped
at c = 8.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Centroids, DataSet, Parameters, squared_distances
from .engine import run_pfcm
from .errors import ConfigurationError, ContractViolation, DegenerateError

MAX_EXHAUSTIVE_C = 8


@dataclass(frozen=True)
class Alignment:
    """``perm[i]`` is the base cluster matched to trial cluster ``i`` (0-based)."""

    perm: tuple

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ContractViolation(f"not a permutation: {perm}")
        object.__setattr__(self, "perm", perm)

    def apply(self, labels) -> np.ndarray:
        return np.asarray(self.perm)[np.asarray(labels)]


def xie_beni(data, u, centroids, m: float) -> float:
    """Xie-Beni index: compactness over separation, with squared norms throughout."""
    v = centroids.v if isinstance(centroids, Centroids) else np.atleast_2d(np.asarray(centroids, float))
    u = np.asarray(u, dtype=float)
    c = v.shape[0]
    if c < 2:
        raise ContractViolation("Xie-Beni needs at least two clusters")
    d2 = squared_distances(data, v)
    if u.shape != d2.shape:
        raise ContractViolation(f"membership shape {u.shape} != {d2.shape}")
    sep = squared_distances(v, v)
    sep = sep[~np.eye(c, dtype=bool)].min()
    if sep < 1e-12:
        raise DegenerateError("coincident centroids; Xie-Beni undefined")
    n = d2.shape[1]
    return float((u ** m * d2).sum() / (n * sep))


@dataclass(frozen=True)
class ClusterCountSelection:
    c: int
    scores: dict      # c -> XB value, only for c that produced a valid index
    failures: dict    # c -> error message


def select_cluster_count(data: DataSet, c_range, p: Parameters, seed=None) -> ClusterCountSelection:
    """Run PFCM for each c and keep the one with the smallest Xie-Beni index.

    Ties resolve to the smaller c. A c whose run or index degenerates is
    skipped and reported in ``failures``.
    """
    cs = sorted({int(c) for c in c_range})
    if not cs:
        raise ConfigurationError("empty cluster-count range")
    if cs[0] < 2 or cs[-1] >= data.n:
        raise ConfigurationError(f"cluster counts must lie in [2, n-1], got {cs[0]}..{cs[-1]}")
    scores, failures = {}, {}
    for c in cs:
        try:
            res = run_pfcm(data, p.replace(c=c), seed)
            scores[c] = xie_beni(res.imputed, res.partition.u, res.centroids, p.m)
        except DegenerateError as exc:
            failures[c] = str(exc)
    if not scores:
        raise DegenerateError(f"every cluster count degenerated: {failures}")
    best = min(scores, key=lambda c: (scores[c], c))
    return ClusterCountSelection(best, scores, failures)


def harden(memberships) -> np.ndarray:
    """Crisp labels by column argmax; ties go to the lowest cluster index."""
    return np.argmax(np.asarray(memberships), axis=0)


def _check_c(c):
    if c > MAX_EXHAUSTIVE_C:
        raise ConfigurationError(f"exhaustive alignment supports c <= {MAX_EXHAUSTIVE_C}, got {c}")


def align_labels(trial_labels, base_labels, c: int) -> Alignment:
    """Relabeling of the trial clusters that agrees with the base most often.

    Among equally good permutations the lexicographically first wins.
    """
    _check_c(c)
    trial = np.asarray(trial_labels, dtype=int)
    base = np.asarray(base_labels, dtype=int)
    if trial.shape != base.shape:
        raise ContractViolation("label vectors differ in length")
    if trial.size and (trial.min() < 0 or trial.max() >= c or base.min() < 0 or base.max() >= c):
        raise ContractViolation(f"labels must lie in 0..{c - 1}")
    # confusion[i, j] = points with trial label i and base label j
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (trial, base), 1)
    rows = np.arange(c)
    best, best_score = None, -1
    for perm in itertools.permutations(range(c)):
        score = int(confusion[rows, perm].sum())
        if score > best_score:
            best, best_score = perm, score
    return Alignment(best)


def accuracy(trial_labels, base_labels, c: int) -> float:
    """Percentage of points whose aligned trial label equals the base label."""
    trial = np.asarray(trial_labels, dtype=int)
    base = np.asarray(base_labels, dtype=int)
    if trial.shape != base.shape:
        raise ContractViolation("label vectors differ in length")
    if trial.size == 0:
        raise ContractViolation("no labels")
    perm = align_labels(trial, base, c)
    return accuracy_percentage(int((perm.apply(trial) == base).sum()), trial.size)


def accuracy_percentage(correct: int, n: int) -> float:
    return correct / n * 100.0


def centroid_error(trial, base) -> float:
    """Mean Euclidean distance between matched trial and base centroids.

    Matching minimises the summed distance over all row permutations.
    """
    a = trial.v if isinstance(trial, Centroids) else np.atleast_2d(np.asarray(trial, float))
    b = base.v if isinstance(base, Centroids) else np.atleast_2d(np.asarray(base, float))
    if a.shape != b.shape:
        raise ContractViolation(f"centroid shapes differ: {a.shape} vs {b.shape}")
    c = a.shape[0]
    _check_c(c)
    dist = np.sqrt(squared_distances(b, a))   # dist[i, j] = |a_i - b_j|
    rows = np.arange(c)
    best = math.inf
    for perm in itertools.permutations(range(c)):
        total = float(dist[rows, perm].sum())
        if total < best:
            best = total
    return best / c
