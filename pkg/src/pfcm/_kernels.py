"""Hot numeric kernels for the PFCM iteration.

Every kernel exists twice: a loop-based version compiled with numba and a
vectorised numpy version. ``USE_NUMBA`` picks one at import time; set
``PFCM_DISABLE_NUMBA=1`` in the environment to force the numpy path (the
numba path is also skipped when numba cannot be imported). Both paths take
and return float64 C-contiguous arrays and agree to rounding error.

Shapes: data is (n, s), centroids (c, s), distance and membership matrices
(c, n).
"""
import os

import numpy as np

ZERO_DISTANCE = 1e-12
DELTA_FLOOR = 1e-10


def _numba_requested():
    flag = os.environ.get("PFCM_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by PFCM_DISABLE_NUMBA")
    from numba import njit
    USE_NUMBA = True
except ImportError:
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def squared_distances_np(x, v):
    diff = v[:, None, :] - x[None, :, :]
    return np.einsum("ikj,ikj->ik", diff, diff)


def fuzzy_memberships_np(d2, m):
    c, n = d2.shape
    u = np.empty((c, n))
    singular = d2 < ZERO_DISTANCE
    hit = singular.any(axis=0)
    regular = ~hit
    if regular.any():
        inv = d2[:, regular] ** (-1.0 / (m - 1.0))
        u[:, regular] = inv / inv.sum(axis=0)
    if hit.any():
        cols = np.flatnonzero(hit)
        u[:, cols] = 0.0
        u[np.argmax(singular[:, cols], axis=0), cols] = 1.0
    return u


def typicality_scales_np(u, d2, m):
    um = u ** m
    den = um.sum(axis=1)
    num = (um * d2).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        delta = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    return np.maximum(delta, DELTA_FLOOR)


def possibilistic_memberships_np(d2, delta, beta, tau):
    scaled = (beta / delta)[:, None] * d2
    return 1.0 / (1.0 + scaled ** (1.0 / (tau - 1.0)))


def centroid_weights_np(u, t, alpha, beta, m, tau, literal):
    if literal:
        return (alpha * u) ** m + (beta * t) ** tau
    return alpha * u ** m + beta * t ** tau


def weighted_means_np(w, x):
    # rows of w index the output; columns index the rows of x
    return (w @ x) / w.sum(axis=1)[:, None]


def ocs_fill_np(y, missing, w, v):
    # w: (c, n) weights, v: (c, s) centroids
    est = (w.T @ v) / w.sum(axis=0)[:, None]
    out = y.copy()
    out[missing] = est[missing]
    return out


def nps_fill_np(y, missing, v):
    d2 = squared_distances_np(y, v)
    nearest = np.argmin(d2, axis=0)
    out = y.copy()
    rows, cols = np.nonzero(missing)
    out[rows, cols] = v[nearest[rows], cols]
    return out


def pick_missing_np(order, n, s, count):
    """Walk ``order`` (flat cell indices) and accept cells whose removal keeps
    at least one observed cell in their row and column. Returns accepted
    flat indices; fewer than ``count`` means the request is unsatisfiable."""
    row_left = np.full(n, s)
    col_left = np.full(s, n)
    picked = []
    for cell in order:
        k, j = divmod(int(cell), s)
        if row_left[k] > 1 and col_left[j] > 1:
            row_left[k] -= 1
            col_left[j] -= 1
            picked.append(cell)
            if len(picked) == count:
                break
    return np.array(picked, dtype=np.int64)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if USE_NUMBA:

    @njit(inline="always")
    def _pow(b, e):
        # the exponents used in practice are small integers; numpy has the
        # same fast paths, so results stay bit-identical
        if e == 2.0:
            return b * b
        if e == 1.0:
            return b
        if e == -1.0:
            return 1.0 / b
        return b ** e

    @njit(cache=True)
    def squared_distances_nb(x, v):
        n, s = x.shape
        c = v.shape[0]
        d2 = np.empty((c, n))
        for i in range(c):
            for k in range(n):
                acc = 0.0
                for j in range(s):
                    diff = x[k, j] - v[i, j]
                    acc += diff * diff
                d2[i, k] = acc
        return d2

    @njit(cache=True)
    def fuzzy_memberships_nb(d2, m):
        c, n = d2.shape
        u = np.empty((c, n))
        expo = -1.0 / (m - 1.0)
        for k in range(n):
            hit = -1
            for i in range(c):
                if d2[i, k] < ZERO_DISTANCE:
                    hit = i
                    break
            if hit >= 0:
                for i in range(c):
                    u[i, k] = 0.0
                u[hit, k] = 1.0
                continue
            total = 0.0
            for i in range(c):
                u[i, k] = _pow(d2[i, k], expo)
                total += u[i, k]
            for i in range(c):
                u[i, k] /= total
        return u

    @njit(cache=True)
    def typicality_scales_nb(u, d2, m):
        c, n = u.shape
        delta = np.empty(c)
        for i in range(c):
            num = 0.0
            den = 0.0
            for k in range(n):
                um = _pow(u[i, k], m)
                num += um * d2[i, k]
                den += um
            val = num / den if den > 0.0 else 0.0
            delta[i] = max(val, DELTA_FLOOR)
        return delta

    @njit(cache=True)
    def possibilistic_memberships_nb(d2, delta, beta, tau):
        c, n = d2.shape
        t = np.empty((c, n))
        expo = 1.0 / (tau - 1.0)
        for i in range(c):
            scale = beta / delta[i]
            for k in range(n):
                t[i, k] = 1.0 / (1.0 + _pow(scale * d2[i, k], expo))
        return t

    @njit(cache=True)
    def centroid_weights_nb(u, t, alpha, beta, m, tau, literal):
        c, n = u.shape
        w = np.empty((c, n))
        for i in range(c):
            for k in range(n):
                if literal:
                    w[i, k] = _pow(alpha * u[i, k], m) + _pow(beta * t[i, k], tau)
                else:
                    w[i, k] = alpha * _pow(u[i, k], m) + beta * _pow(t[i, k], tau)
        return w

    @njit(cache=True)
    def weighted_means_nb(w, x):
        c, n = w.shape
        s = x.shape[1]
        out = np.zeros((c, s))
        for i in range(c):
            total = 0.0
            for k in range(n):
                wk = w[i, k]
                total += wk
                for j in range(s):
                    out[i, j] += wk * x[k, j]
            for j in range(s):
                out[i, j] /= total
        return out

    @njit(cache=True)
    def ocs_fill_nb(y, missing, w, v):
        n, s = y.shape
        c = v.shape[0]
        out = y.copy()
        for k in range(n):
            total = -1.0
            for j in range(s):
                if not missing[k, j]:
                    continue
                if total < 0.0:
                    total = 0.0
                    for i in range(c):
                        total += w[i, k]
                acc = 0.0
                for i in range(c):
                    acc += w[i, k] * v[i, j]
                out[k, j] = acc / total
        return out

    @njit(cache=True)
    def nps_fill_nb(y, missing, v):
        n, s = y.shape
        c = v.shape[0]
        out = y.copy()
        for k in range(n):
            incomplete = False
            for j in range(s):
                if missing[k, j]:
                    incomplete = True
                    break
            if not incomplete:
                continue
            best = 0
            best_d = np.inf
            for i in range(c):
                acc = 0.0
                for j in range(s):
                    diff = y[k, j] - v[i, j]
                    acc += diff * diff
                if acc < best_d:
                    best_d = acc
                    best = i
            for j in range(s):
                if missing[k, j]:
                    out[k, j] = v[best, j]
        return out

    @njit(cache=True)
    def pick_missing_nb(order, n, s, count):
        row_left = np.full(n, s)
        col_left = np.full(s, n)
        picked = np.empty(count, dtype=np.int64)
        got = 0
        for idx in range(order.shape[0]):
            if got == count:
                break
            cell = order[idx]
            k = cell // s
            j = cell % s
            if row_left[k] > 1 and col_left[j] > 1:
                row_left[k] -= 1
                col_left[j] -= 1
                picked[got] = cell
                got += 1
        return picked[:got]

    squared_distances = squared_distances_nb
    fuzzy_memberships = fuzzy_memberships_nb
    typicality_scales = typicality_scales_nb
    possibilistic_memberships = possibilistic_memberships_nb
    centroid_weights = centroid_weights_nb
    weighted_means = weighted_means_nb
    ocs_fill = ocs_fill_nb
    nps_fill = nps_fill_nb
    pick_missing = pick_missing_nb
else:
    squared_distances = squared_distances_np
    fuzzy_memberships = fuzzy_memberships_np
    typicality_scales = typicality_scales_np
    possibilistic_memberships = possibilistic_memberships_np
    centroid_weights = centroid_weights_np
    weighted_means = weighted_means_np
    ocs_fill = ocs_fill_np
    nps_fill = nps_fill_np
    pick_missing = pick_missing_np
