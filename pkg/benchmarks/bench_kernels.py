"""Time the numba and numpy backends on the same workloads.

Each backend runs in its own interpreter because the backend is fixed at
import time. Usage:

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
import pfcm
from pfcm import _kernels
from pfcm.data import InjectionSpec, default_mixture, generate_mixture, inject_missing

n, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
x = rng.normal(size=(n, 8))
v = rng.normal(size=(4, 8))
missing = rng.random((n, 8)) < 0.2
d2 = _kernels.squared_distances(x, v)
u = _kernels.fuzzy_memberships(d2, 2.0)
delta = _kernels.typicality_scales(u, d2, 2.0)
t = _kernels.possibilistic_memberships(d2, delta, 1.0, 2.0)
w = _kernels.centroid_weights(u, t, 1.0, 1.0, 2.0, 2.0, True)

mix, _ = generate_mixture(default_mixture(n=n))
holed = inject_missing(mix, InjectionSpec(0.2, 1))
params = pfcm.Parameters(max_iter=50)

cases = {
    "squared_distances": lambda: _kernels.squared_distances(x, v),
    "fuzzy_memberships": lambda: _kernels.fuzzy_memberships(d2, 2.0),
    "possibilistic_memberships": lambda: _kernels.possibilistic_memberships(d2, delta, 1.0, 2.0),
    "centroid_weights": lambda: _kernels.centroid_weights(u, t, 1.0, 1.0, 2.0, 2.0, True),
    "weighted_means": lambda: _kernels.weighted_means(w, x),
    "ocs_fill": lambda: _kernels.ocs_fill(x, missing, w, v),
    "nps_fill": lambda: _kernels.nps_fill(x, missing, v),
    "run_pfcm (50 it)": lambda: pfcm.run_pfcm(mix, params, 0),
    "run_incomplete ocs": lambda: pfcm.run_incomplete(holed, params, "ocs", 0),
    "run_incomplete nps": lambda: pfcm.run_incomplete(holed, params, "nps", 0),
}
out = {"backend": pfcm.BACKEND, "times": {}}
for name, fn in cases.items():
    fn()  # compile / warm caches
    out["times"][name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def measure(disable, n, repeat):
    env = dict(os.environ, PFCM_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="points per workload")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast = measure(False, args.n, args.repeat)
    slow = measure(True, args.n, args.repeat)
    if fast["backend"] != "numba":
        print("numba is not installed; only the numpy backend is available")
    print(f"n={args.n}, best of {args.repeat}")
    print(f"{'workload':28s} {fast['backend']:>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:28s} {t_fast * 1e3:8.2f}ms {t_slow * 1e3:8.2f}ms {t_slow / t_fast:7.2f}x")


if __name__ == "__main__":
    main()
