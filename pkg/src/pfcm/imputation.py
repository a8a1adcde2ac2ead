"""PFCM for incomplete data: optimal completion (OCS) and nearest prototype (NPS).

Both strategies seed every missing cell with an observed value of the same
feature and then run the ordinary PFCM loop; after each failed convergence
check the missing cells are re-estimated from the current centroids.

OCS writes, for point k and missing feature j, the weighted mean of the
centroid coordinates ``v[i, j]`` over clusters i, weighted by that point's
PFCM centroid weights ``w[i, k]``. The update is summed over clusters (not
over points); summing over points would make every imputation in a column
identical.

NPS copies the coordinates of the centroid nearest to the point, measured
with the full squared distance on the currently imputed vector. Ties go to
the lowest cluster index.
"""
from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .core import Centroids, DataSet, Parameters, RunResult, validate_parameters
from .engine import _stream, centroid_weights, initial_centroids, iterate
from .errors import ConfigurationError, ContractViolation, DegenerateError


class Strategy(enum.Enum):
    OCS = "ocs"
    NPS = "nps"

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown strategy {value!r}; expected ocs or nps") from None


def init_missing(data: DataSet, seed=None) -> DataSet:
    """Fill each missing cell with a random observed value from its own column.

    The mask is kept so later steps know which cells are free.
    """
    if data.is_complete:
        return data
    rng = np.random.default_rng(_stream(seed, 1))
    values = np.array(data.values)
    for j in range(data.s):
        holes = np.flatnonzero(~data.mask[:, j])
        if holes.size == 0:
            continue
        pool = data.values[data.mask[:, j], j]
        if pool.size == 0:
            raise ContractViolation(f"feature {j} has no observed values")
        values[holes, j] = pool[rng.integers(0, pool.size, size=holes.size)]
    return data.with_values(values)


def _check_centroids(x, v):
    if x.shape[1] != v.shape[1]:
        raise ContractViolation(
            f"dimension mismatch: data has {x.shape[1]} features, centroids {v.shape[1]}")


def ocs_impute(data: DataSet, u, t, centroids, p: Parameters) -> DataSet:
    v = np.ascontiguousarray(centroids.v if isinstance(centroids, Centroids) else centroids,
                             dtype=float)
    _check_centroids(data.values, v)
    w = centroid_weights(u, t, p)
    rows = np.flatnonzero(data.missing.any(axis=1))
    bad = rows[~(w[:, rows].sum(axis=0) > 0.0)]
    if bad.size:
        raise DegenerateError(f"points {bad[:10].tolist()} have zero total weight")
    out = _kernels.ocs_fill(np.array(data.values, order="C"),
                            np.ascontiguousarray(data.missing), w, v)
    return data.with_values(out)


def nps_impute(data: DataSet, centroids) -> DataSet:
    v = np.ascontiguousarray(centroids.v if isinstance(centroids, Centroids) else centroids,
                             dtype=float)
    _check_centroids(data.values, v)
    out = _kernels.nps_fill(np.array(data.values, order="C"),
                            np.ascontiguousarray(data.missing), v)
    return data.with_values(out)


def _imputer(strategy: Strategy, missing: np.ndarray, p: Parameters):
    missing = np.ascontiguousarray(missing)
    if not missing.any():
        return None
    alpha, beta, m, tau = float(p.alpha), float(p.beta), float(p.m), float(p.tau)
    literal = p.literal_weights

    if strategy is Strategy.OCS:
        rows = np.flatnonzero(missing.any(axis=1))

        def impute(x, u, t, v):
            w = _kernels.centroid_weights(u, t, alpha, beta, m, tau, literal)
            if not np.all(w[:, rows].sum(axis=0) > 0.0):
                raise DegenerateError("an incomplete point has zero total weight")
            return _kernels.ocs_fill(x, missing, w, v)
    else:
        def impute(x, u, t, v):
            return _kernels.nps_fill(x, missing, v)
    return impute


def run_incomplete(data: DataSet, p: Parameters, strategy, seed=None) -> RunResult:
    """Cluster a data set with missing cells using OCSPFCM or NPSPFCM.

    Returns a RunResult whose ``imputed`` data set carries the final
    estimates (mask all-true). With no missing cells this is exactly
    ``run_pfcm`` for the same seed.
    """
    strategy = Strategy.parse(strategy)
    validate_parameters(p, data.n)
    filled = init_missing(data, seed)
    v0 = initial_centroids(filled.values, p.c, seed)
    return iterate(filled, p, v0, impute=_imputer(strategy, data.missing, p))
