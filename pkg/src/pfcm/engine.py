"""Possibilistic fuzzy c-means on complete data.

The alternating optimisation starts from ``c`` distinct data points and
repeats: fuzzy memberships, typicality scales, possibilistic memberships,
centroid update, until the centroid matrix moves less than ``epsilon``
(Frobenius norm) or ``max_iter`` is reached.
"""
from __future__ import annotations

import numpy as np

from . import _kernels
from .core import (Centroids, DataSet, Parameters, Partition, RunResult,
                   squared_distances, validate_parameters)
from .errors import ContractViolation, DegenerateError


def _c_array(a):
    return np.ascontiguousarray(a, dtype=float)


def fuzzy_memberships(d2, m: float) -> np.ndarray:
    """Fuzzy membership matrix U from squared distances.

    Columns sum to one. A column with a (numerically) zero distance puts all
    of its mass on the lowest-index cluster at zero distance.
    """
    return _kernels.fuzzy_memberships(_c_array(d2), float(m))


def typicality_scales(u, d2, m: float) -> np.ndarray:
    """Per-cluster scale: membership-weighted mean squared distance, floored at 1e-10."""
    return _kernels.typicality_scales(_c_array(u), _c_array(d2), float(m))


def possibilistic_memberships(d2, delta, beta: float, tau: float) -> np.ndarray:
    """Typicality matrix T, ``1 / (1 + (beta * d2 / delta) ** (1 / (tau - 1)))``."""
    return _kernels.possibilistic_memberships(
        _c_array(d2), _c_array(delta), float(beta), float(tau))


def centroid_weights(u, t, p: Parameters) -> np.ndarray:
    return _kernels.centroid_weights(
        _c_array(u), _c_array(t), float(p.alpha), float(p.beta),
        float(p.m), float(p.tau), p.literal_weights)


def update_centroids(data, u, t, p: Parameters) -> Centroids:
    """Weighted means of the points under the PFCM centroid weights."""
    x = data.values if isinstance(data, DataSet) else _c_array(np.atleast_2d(data))
    w = centroid_weights(u, t, p)
    if w.shape[1] != x.shape[0]:
        raise ContractViolation(f"memberships cover {w.shape[1]} points, data has {x.shape[0]}")
    totals = w.sum(axis=1)
    empty = np.flatnonzero(~(totals > 0.0))
    if empty.size:
        raise DegenerateError(f"clusters {empty.tolist()} received zero total weight")
    return Centroids(_kernels.weighted_means(w, x))


def objective_value(data, u, t, delta, centroids, p: Parameters) -> float:
    """PFCM objective with the classic interior weights ``alpha*u**m + beta*t**tau``.

    The weight_form switch does not apply here.
    """
    d2 = squared_distances(data, centroids)
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    delta = np.asarray(delta, dtype=float)
    fit = ((p.alpha * u ** p.m + p.beta * t ** p.tau) * d2).sum()
    penalty = (delta * ((1.0 - t) ** p.tau).sum(axis=1)).sum()
    return float(fit + penalty)


def initial_centroids(x: np.ndarray, c: int, seed) -> np.ndarray:
    """``c`` distinct rows of ``x`` chosen uniformly without replacement."""
    rng = np.random.default_rng(_stream(seed, 0))
    idx = rng.choice(x.shape[0], size=c, replace=False)
    return x[idx].copy()


def _stream(seed, tag: int):
    # independent sub-streams of one user seed
    if seed is None:
        return None
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, tag])


def pfcm_step(x: np.ndarray, v: np.ndarray, p: Parameters):
    """One pass of the membership and centroid updates from centroids ``v``.

    Returns (u, t, delta, new_v).
    """
    d2 = _kernels.squared_distances(x, v)
    u = _kernels.fuzzy_memberships(d2, float(p.m))
    delta = _kernels.typicality_scales(u, d2, float(p.m))
    t = _kernels.possibilistic_memberships(d2, delta, float(p.beta), float(p.tau))
    w = _kernels.centroid_weights(u, t, float(p.alpha), float(p.beta),
                                  float(p.m), float(p.tau), p.literal_weights)
    totals = w.sum(axis=1)
    if not np.all(totals > 0.0):
        empty = np.flatnonzero(~(totals > 0.0))
        raise DegenerateError(f"clusters {empty.tolist()} received zero total weight")
    return u, t, delta, _kernels.weighted_means(w, x)


def _objective(x, u, t, delta, v, p):
    d2 = _kernels.squared_distances(x, v)
    fit = ((p.alpha * u ** p.m + p.beta * t ** p.tau) * d2).sum()
    return float(fit + (delta * ((1.0 - t) ** p.tau).sum(axis=1)).sum())


def iterate(data: DataSet, p: Parameters, v0: np.ndarray, impute=None) -> RunResult:
    """Run the alternating optimisation from centroids ``v0``.

    ``impute(x, u, t, v)`` is called after every failed convergence check and
    returns the new working matrix; ``None`` keeps the data fixed.
    """
    x = np.array(data.values, dtype=float, order="C")
    v = np.array(v0, dtype=float, order="C")
    trace = []
    converged = False
    it = 0
    u = t = delta = None
    for it in range(1, p.max_iter + 1):
        u, t, delta, v_new = pfcm_step(x, v, p)
        trace.append(_objective(x, u, t, delta, v_new, p))
        shift = np.sqrt(((v_new - v) ** 2).sum())
        v = v_new
        if not np.all(np.isfinite(v)):
            raise DegenerateError(f"non-finite centroids at iteration {it}")
        if shift < p.epsilon:
            converged = True
            break
        if impute is not None and it < p.max_iter:
            x = impute(x, u, t, v)
    return RunResult(
        partition=Partition(u, t, delta),
        centroids=Centroids(v),
        iterations=it,
        imputed=DataSet.complete(x),
        objective_trace=np.array(trace),
        converged=converged,
    )


def run_pfcm(data: DataSet, p: Parameters, seed=None) -> RunResult:
    """Cluster complete data with PFCM.

    Non-convergence within ``max_iter`` is reported through
    ``RunResult.converged``, not raised.
    """
    if not data.is_complete:
        raise ContractViolation("run_pfcm needs complete data; use run_incomplete")
    validate_parameters(p, data.n)
    v0 = initial_centroids(data.values, p.c, seed)
    return iterate(data, p, v0)
