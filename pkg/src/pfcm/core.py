"""Shared data types, parameter validation and the distance kernel."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigurationError, ContractViolation, DataError


class WeightForm(enum.Enum):
    """How fuzzy and possibilistic memberships combine into centroid weights.

    ``PAPER_LITERAL`` raises the *weighted* memberships to their exponents,
    ``(alpha*u)**m + (beta*t)**tau``. ``CLASSIC_PFCM`` weights the powered
    memberships, ``alpha*u**m + beta*t**tau``.
    """

    PAPER_LITERAL = "paper"
    CLASSIC_PFCM = "classic"

    @classmethod
    def parse(cls, value) -> "WeightForm":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                f"weight_form must be one of {[f.value for f in cls]}, got {value!r}"
            ) from None


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype, copy=True, order="C")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DataSet:
    """An n x s feature matrix with an aligned observation mask.

    ``mask[k, j]`` is True when cell (k, j) was observed. Missing cells hold
    0.0 until an imputation overwrites them; ``values`` is never NaN.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {values.shape}")
        if mask.shape != values.shape:
            raise DataError(f"mask shape {mask.shape} != values shape {values.shape}")
        n, s = values.shape
        if n < 2 or s < 1:
            raise DataError(f"need n >= 2 and s >= 1, got n={n}, s={s}")
        if not np.all(np.isfinite(values[mask])):
            raise DataError("observed values must be finite")
        empty_rows = np.flatnonzero(~mask.any(axis=1))
        if empty_rows.size:
            raise DataError(f"rows without any observed cell: {empty_rows[:10].tolist()}")
        empty_cols = np.flatnonzero(~mask.any(axis=0))
        if empty_cols.size:
            raise DataError(f"columns without any observed cell: {empty_cols.tolist()}")
        values = np.where(mask, values, 0.0)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "mask", _frozen(mask, dtype=bool))

    @classmethod
    def complete(cls, values) -> "DataSet":
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.shape, dtype=bool))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def s(self) -> int:
        return self.values.shape[1]

    @property
    def missing(self) -> np.ndarray:
        return ~self.mask

    @property
    def n_missing(self) -> int:
        return int(self.missing.sum())

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    @property
    def complete_rows(self) -> np.ndarray:
        """Indices of points with every feature observed."""
        return np.flatnonzero(self.mask.all(axis=1))

    def with_values(self, values) -> "DataSet":
        """Same mask, new values (imputed cells included)."""
        out = object.__new__(DataSet)
        values = _frozen(values)
        if values.shape != self.values.shape:
            raise ContractViolation("replacement values change the shape")
        object.__setattr__(out, "values", values)
        object.__setattr__(out, "mask", self.mask)
        return out

    def filled(self, values) -> "DataSet":
        """Fully imputed copy: ``values`` with an all-true mask."""
        return DataSet.complete(values)

    def __eq__(self, other):
        if not isinstance(other, DataSet):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.values.tobytes(), self.mask.tobytes()))


@dataclass(frozen=True)
class Parameters:
    """PFCM configuration. Bounds are checked at construction."""

    c: int = 2
    m: float = 2.0
    tau: float = 2.0
    alpha: float = 1.0
    beta: float = 1.0
    epsilon: float = 1e-5
    max_iter: int = 1000
    weight_form: WeightForm = WeightForm.PAPER_LITERAL

    def __post_init__(self):
        object.__setattr__(self, "weight_form", WeightForm.parse(self.weight_form))
        problems = parameter_problems(self)
        if problems:
            raise ConfigurationError("; ".join(problems))

    @property
    def literal_weights(self) -> bool:
        return self.weight_form is WeightForm.PAPER_LITERAL

    def replace(self, **changes) -> "Parameters":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return Parameters(**values)


def parameter_problems(p, n=None) -> list[str]:
    problems = []

    def number(name):
        val = getattr(p, name)
        if isinstance(val, bool) or not isinstance(val, (int, float, np.integer, np.floating)):
            problems.append(f"{name} must be a number, got {val!r}")
            return None
        if not np.isfinite(val):
            problems.append(f"{name} must be finite")
            return None
        return val

    m, tau, alpha, beta, eps = (number(k) for k in ("m", "tau", "alpha", "beta", "epsilon"))
    if m is not None and m <= 1:
        problems.append("m must exceed 1")
    if tau is not None and tau <= 1:
        problems.append("tau must exceed 1")
    if alpha is not None and alpha <= 0:
        problems.append("alpha must be positive")
    if beta is not None and beta < 0:
        problems.append("beta must be non-negative")
    if eps is not None and eps <= 0:
        problems.append("epsilon must be positive")
    for name, low in (("c", 1), ("max_iter", 1)):
        val = getattr(p, name)
        if isinstance(val, bool) or not isinstance(val, (int, np.integer)):
            problems.append(f"{name} must be an integer, got {val!r}")
        elif name == "c" and val <= low:
            problems.append("c must exceed 1")
        elif name == "max_iter" and val < low:
            problems.append("max_iter must be at least 1")
    if n is not None and isinstance(p.c, (int, np.integer)) and p.c >= n:
        problems.append("c must be less than n")
    return problems


def validate_parameters(p: Parameters, n: int | None = None) -> None:
    """Raise ConfigurationError naming every violated bound.

    ``n`` (the point count) enables the ``c < n`` check.
    """
    problems = parameter_problems(p, n)
    if problems:
        raise ConfigurationError("; ".join(problems))


@dataclass(frozen=True, eq=False)
class Partition:
    u: np.ndarray
    t: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        for name in ("u", "t", "delta"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.u.shape != self.t.shape or self.delta.shape != (self.u.shape[0],):
            raise ContractViolation("inconsistent partition shapes")

    @property
    def c(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True, eq=False)
class Centroids:
    v: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if v.ndim != 2:
            raise ContractViolation(f"centroids must be 2-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ContractViolation("centroids must be finite")
        object.__setattr__(self, "v", v)

    @property
    def c(self) -> int:
        return self.v.shape[0]

    @property
    def s(self) -> int:
        return self.v.shape[1]


@dataclass(frozen=True, eq=False)
class RunResult:
    partition: Partition
    centroids: Centroids
    iterations: int
    imputed: DataSet
    objective_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    converged: bool = True

    def __post_init__(self):
        object.__setattr__(self, "objective_trace", _frozen(self.objective_trace))

    def __eq__(self, other):
        if not isinstance(other, RunResult):
            return NotImplemented
        a, b = self.partition, other.partition
        return (self.iterations == other.iterations
                and self.converged == other.converged
                and np.array_equal(a.u, b.u) and np.array_equal(a.t, b.t)
                and np.array_equal(a.delta, b.delta)
                and np.array_equal(self.centroids.v, other.centroids.v)
                and self.imputed == other.imputed
                and np.array_equal(self.objective_trace, other.objective_trace))

    __hash__ = None


def _as_matrix(x):
    if isinstance(x, DataSet):
        return x.values
    if isinstance(x, Centroids):
        return x.v
    return np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=float)))


def squared_distances(data, centroids) -> np.ndarray:
    """c x n matrix of squared Euclidean distances from each centroid to each point."""
    x = _as_matrix(data)
    v = _as_matrix(centroids)
    if x.shape[1] != v.shape[1]:
        raise ContractViolation(
            f"dimension mismatch: data has {x.shape[1]} features, centroids {v.shape[1]}"
        )
    return _kernels.squared_distances(np.ascontiguousarray(x), np.ascontiguousarray(v))
