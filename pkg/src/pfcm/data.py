"""Data ingestion, synthetic Gaussian mixtures and missingness injection."""
from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import _kernels
from .core import DataSet
from .errors import ConfigurationError, DataError, InjectionError

DEFAULT_MISSING_TOKENS = frozenset({"", "?", "NaN"})
MISSING_OUT = "?"
BUILTIN_DATASETS = ("iris", "wine")


# ---------------------------------------------------------------- CSV files

@dataclass(frozen=True)
class Table:
    data: DataSet
    columns: list | None
    labels: list | None


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _resolve_label_column(label_column, header, width):
    if label_column is None:
        return None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None or label_column not in header:
            raise DataError(f"label column {label_column!r} not found in header")
        return header.index(label_column)
    idx = int(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DataError(f"label column {label_column} out of range for {width} columns")
    return idx


def read_table(path, missing_tokens=DEFAULT_MISSING_TOKENS, delimiter=",",
               header=None, label_column=None) -> Table:
    """Parse a delimited numeric table.

    ``header=None`` auto-detects a header row: the first row is a header
    when one of its feature cells is neither a number nor a missing token.
    ``label_column`` (index, negative allowed, or header name) is split off
    and returned as strings.
    """
    tokens = {t.strip() for t in missing_tokens}
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    width = len(rows[0])

    if header is None:
        first = [c.strip() for c in rows[0]]
        probe_label = None
        try:
            probe_label = _resolve_label_column(label_column, first, width)
        except DataError:
            pass
        header = any(not _is_number(c) and c not in tokens
                     for i, c in enumerate(first) if i != probe_label)
    columns = [c.strip() for c in rows[0]] if header else None
    body = rows[1:] if header else rows
    label_idx = _resolve_label_column(label_column, columns, width)

    values, mask, labels = [], [], []
    for r, row in enumerate(body, start=2 if header else 1):
        if len(row) != width:
            raise DataError(f"{path}:{r}: expected {width} fields, got {len(row)}")
        vals, obs = [], []
        for col, cell in enumerate(row):
            cell = cell.strip()
            if col == label_idx:
                labels.append(cell)
                continue
            if cell in tokens:
                vals.append(0.0)
                obs.append(False)
                continue
            try:
                num = float(cell)
            except ValueError:
                raise DataError(f"{path}:{r}: column {col + 1}: non-numeric value {cell!r}") from None
            if not math.isfinite(num):
                vals.append(0.0)
                obs.append(False)
            else:
                vals.append(num)
                obs.append(True)
        values.append(vals)
        mask.append(obs)
    if label_idx is not None and columns is not None:
        columns = [c for i, c in enumerate(columns) if i != label_idx]
    try:
        data = DataSet(np.array(values, dtype=float), np.array(mask, dtype=bool))
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return Table(data, columns, labels if label_idx is not None else None)


def load_csv(path, missing_tokens=DEFAULT_MISSING_TOKENS, delimiter=",",
             header=None, label_column=None) -> DataSet:
    return read_table(path, missing_tokens, delimiter, header, label_column).data


def write_csv(path, data: DataSet, columns=None, labels=None, delimiter=",") -> None:
    """Write ``data`` with missing cells as ``?``; values print with full precision."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        if columns is not None:
            out.writerow(list(columns) + (["class"] if labels is not None else []))
        for k in range(data.n):
            row = [repr(float(v)) if ok else MISSING_OUT
                   for v, ok in zip(data.values[k], data.mask[k])]
            if labels is not None:
                row.append(labels[k])
            out.writerow(row)


def builtin_path(name: str) -> Path:
    if name not in BUILTIN_DATASETS:
        raise DataError(f"no bundled data set called {name!r}")
    return Path(str(resources.files("pfcm") / "datasets" / f"{name}.csv"))


def load_builtin(name: str) -> Table:
    """The bundled UCI iris (150 x 4) or wine (178 x 13) table, class column split off."""
    return read_table(builtin_path(name), header=True, label_column="class")


def zscore(data: DataSet) -> DataSet:
    """Standardise each feature using its observed cells only."""
    vals = np.where(data.mask, data.values, np.nan)
    mu = np.nanmean(vals, axis=0)
    sd = np.nanstd(vals, axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return DataSet((data.values - mu) / sd, data.mask)


# ------------------------------------------------------- Gaussian mixtures

@dataclass(frozen=True)
class Component:
    mean: np.ndarray
    cov: np.ndarray
    weight: float


@dataclass(frozen=True)
class MixtureSpec:
    components: tuple
    n: int
    seed: int | None = None

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, Component) else Component(*c) for c in self.components)
        if not comps:
            raise ConfigurationError("mixture needs at least one component")
        fixed = []
        s = None
        for i, comp in enumerate(comps):
            mean = np.atleast_1d(np.asarray(comp.mean, dtype=float))
            cov = np.asarray(comp.cov, dtype=float)
            if cov.ndim == 0:
                cov = float(cov) * np.eye(mean.size)
            s = mean.size if s is None else s
            if mean.shape != (s,) or cov.shape != (s, s):
                raise ConfigurationError(f"component {i}: mean/covariance dimensions disagree")
            if not np.allclose(cov, cov.T):
                raise ConfigurationError(f"component {i}: covariance is not symmetric")
            try:
                np.linalg.cholesky(cov)
            except np.linalg.LinAlgError:
                raise ConfigurationError(
                    f"component {i}: covariance is not positive definite") from None
            if not comp.weight >= 0:
                raise ConfigurationError(f"component {i}: weight must be non-negative")
            fixed.append(Component(mean, cov, float(comp.weight)))
        total = sum(c.weight for c in fixed)
        if abs(total - 1.0) > 1e-12:
            raise ConfigurationError(f"component weights sum to {total!r}, not 1")
        if int(self.n) < 2:
            raise ConfigurationError("mixture needs n >= 2")
        object.__setattr__(self, "components", tuple(fixed))
        object.__setattr__(self, "n", int(self.n))

    @property
    def s(self) -> int:
        return self.components[0].mean.size


def generate_mixture(spec: MixtureSpec):
    """Sample ``spec.n`` points; returns (DataSet, component labels).

    Components are drawn from the categorical weights, then each point from
    its component via the Cholesky factor of the covariance.
    """
    rng = np.random.default_rng(spec.seed)
    weights = np.array([c.weight for c in spec.components])
    labels = rng.choice(len(weights), size=spec.n, p=weights)
    z = rng.standard_normal((spec.n, spec.s))
    x = np.empty((spec.n, spec.s))
    for i, comp in enumerate(spec.components):
        sel = labels == i
        x[sel] = comp.mean + z[sel] @ np.linalg.cholesky(comp.cov).T
    return DataSet.complete(x), labels


def default_mixture(s: int = 2, n: int = 1000, seed: int = 2021) -> MixtureSpec:
    """Two equally weighted unit-covariance blobs, means 0 and 5 in every coordinate."""
    return MixtureSpec(
        components=(Component(np.zeros(s), np.eye(s), 0.5),
                    Component(np.full(s, 5.0), np.eye(s), 0.5)),
        n=n, seed=seed)


# ------------------------------------------------------ missing injection

@dataclass(frozen=True)
class InjectionSpec:
    fraction: float
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= float(self.fraction) < 1.0:
            raise ConfigurationError(f"missing fraction must be in [0, 1), got {self.fraction}")


def inject_missing(data: DataSet, spec: InjectionSpec) -> DataSet:
    """Hide exactly ``round(fraction * n * s)`` cells.

    Cells are visited in a uniformly random order and skipped whenever
    hiding them would empty their row or column. Values are left in place
    under the mask.
    """
    if not data.is_complete:
        raise DataError("inject_missing expects a complete data set")
    n, s = data.n, data.s
    count = int(round(spec.fraction * n * s))
    if count == 0:
        return data
    if count > n * s - max(n, s):
        raise InjectionError(
            f"cannot hide {count} of {n * s} cells and keep every row and column observed")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n * s).astype(np.int64)
    picked = _kernels.pick_missing(order, n, s, count)
    if picked.size < count:
        raise InjectionError(f"only {picked.size} of {count} cells could be hidden")
    mask = np.ones(n * s, dtype=bool)
    mask[picked] = False
    out = object.__new__(DataSet)
    object.__setattr__(out, "values", data.values)
    object.__setattr__(out, "mask", _readonly(mask.reshape(n, s)))
    return out


def _readonly(a):
    a.setflags(write=False)
    return a


# ---------------------------------------------------------- config files

def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys are lower-cased."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string("[top]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    return dict(parser["top"])


def _floats(text, what):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigurationError(f"bad number list for {what}: {text!r}") from None


def mixture_from_config(cfg: dict) -> MixtureSpec:
    """Build a MixtureSpec from flat keys.

    Keys: ``n``, ``seed``, ``components`` and per component ``i``:
    ``mean.i`` (comma list), ``weight.i`` (default 1/components) and either
    ``cov.i`` (rows separated by ``|``) or ``var.i`` (isotropic variance,
    default 1).
    """
    try:
        k = int(cfg.get("components", 2))
        n = int(cfg.get("n", 1000))
        seed = int(cfg["seed"]) if "seed" in cfg else None
    except ValueError as exc:
        raise ConfigurationError(f"mixture config: {exc}") from exc
    comps = []
    for i in range(k):
        if f"mean.{i}" not in cfg:
            raise ConfigurationError(f"mixture config: missing mean.{i}")
        mean = np.array(_floats(cfg[f"mean.{i}"], f"mean.{i}"))
        if f"cov.{i}" in cfg:
            rows = [_floats(r, f"cov.{i}") for r in cfg[f"cov.{i}"].split("|")]
            cov = np.array(rows)
        else:
            cov = float(cfg.get(f"var.{i}", 1.0)) * np.eye(mean.size)
        weight = float(cfg.get(f"weight.{i}", 1.0 / k))
        comps.append(Component(mean, cov, weight))
    return MixtureSpec(tuple(comps), n, seed)


def injection_from_config(cfg: dict) -> InjectionSpec:
    try:
        return InjectionSpec(float(cfg.get("fraction", 0.0)),
                             int(cfg["seed"]) if "seed" in cfg else None)
    except ValueError as exc:
        raise ConfigurationError(f"injection config: {exc}") from exc


def builtin_mixture_config(name: str) -> Path:
    return Path(str(resources.files("pfcm") / "datasets" / f"{name}.cfg"))
