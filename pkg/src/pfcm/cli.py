"""Command line interface.

Subcommands: cluster, validity, generate, inject, experiment, report.
Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime
(degenerate) error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .core import Parameters
from .data import (BUILTIN_DATASETS, DEFAULT_MISSING_TOKENS, InjectionSpec, generate_mixture,
                   inject_missing, injection_from_config, load_builtin, mixture_from_config,
                   read_config, read_table, write_csv, zscore, default_mixture)
from .engine import run_pfcm
from .errors import ConfigurationError, DataError, PFCMError
from .experiment import (ExperimentSpec, DEFAULT_FRACTIONS, aggregate, emit_report, labels_of,
                         read_trials, run_base, run_grid)
from .imputation import run_incomplete
from .metrics import select_cluster_count

log = logging.getLogger("pfcm")


def _c_range(text):
    try:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return tuple(range(lo, hi + 1))


def _fractions(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from None
    # accept percentages
    return tuple(v / 100.0 if v >= 1.0 else v for v in vals)


def _add_params(p):
    g = p.add_argument_group("algorithm")
    g.add_argument("--c", type=int, default=2, help="number of clusters (default 2)")
    g.add_argument("--m", type=float, default=2.0, help="fuzzifier m > 1")
    g.add_argument("--tau", type=float, default=2.0, help="possibilistic exponent tau > 1")
    g.add_argument("--alpha", type=float, default=1.0, help="fuzzy weight alpha > 0")
    g.add_argument("--beta", type=float, default=1.0, help="possibilistic weight beta >= 0")
    g.add_argument("--epsilon", type=float, default=1e-5, help="centroid-shift tolerance")
    g.add_argument("--max-iter", type=int, default=1000)
    g.add_argument("--weight-form", choices=("paper", "classic"), default="paper")
    g.add_argument("--seed", type=int, default=0)


def _add_data(p, required=True):
    g = p.add_argument_group("data")
    g.add_argument("--data", required=required,
                   help=f"CSV path, or a bundled name: {', '.join(BUILTIN_DATASETS)}")
    g.add_argument("--label-column", default=None,
                   help="index or header name of a class column to drop")
    g.add_argument("--delimiter", default=",")
    g.add_argument("--missing-tokens", default=None,
                   help="comma-separated tokens read as missing (default: '', ?, NaN)")
    g.add_argument("--zscore", action="store_true", help="standardise features first")


def _params(args, c=None):
    return Parameters(c=args.c if c is None else c, m=args.m, tau=args.tau, alpha=args.alpha,
                      beta=args.beta, epsilon=args.epsilon, max_iter=args.max_iter,
                      weight_form=args.weight_form)


def _load(args):
    if args.data in BUILTIN_DATASETS and not Path(args.data).exists():
        table = load_builtin(args.data)
    else:
        tokens = DEFAULT_MISSING_TOKENS
        if args.missing_tokens is not None:
            tokens = frozenset(t.strip() for t in args.missing_tokens.split(",")) | {""}
        table = read_table(args.data, tokens, args.delimiter, label_column=args.label_column)
    data = zscore(table.data) if args.zscore else table.data
    return data, table


def cmd_cluster(args):
    data, table = _load(args)
    strategy = args.strategy
    params = _params(args)
    if strategy == "pfcm":
        if not data.is_complete:
            raise DataError("data has missing cells; use --strategy ocs or nps")
        res = run_pfcm(data, params, args.seed)
    else:
        res = run_incomplete(data, params, strategy, args.seed)
    labels = labels_of(res, args.harden_by)
    sizes = np.bincount(labels, minlength=params.c)
    print(f"algorithm: {strategy}  c={params.c}  n={data.n}  s={data.s}  "
          f"missing={data.n_missing}")
    print(f"iterations: {res.iterations}  converged: {str(res.converged).lower()}")
    print(f"objective: {res.objective_trace[-1]:.10g}")
    print("cluster sizes: " + " ".join(str(int(x)) for x in sizes))
    print("centroids:")
    for row in res.centroids.v:
        print("  " + " ".join(f"{x:.6f}" for x in row))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "imputed.csv", res.imputed, table.columns)
        np.savetxt(out / "labels.csv", labels, fmt="%d")
        np.savetxt(out / "centroids.csv", res.centroids.v, delimiter=",", fmt="%.17g")
    return 0


def cmd_validity(args):
    data, _ = _load(args)
    sel = select_cluster_count(data, args.c_range, _params(args, c=2), args.seed)
    print("c,xie_beni")
    for c in args.c_range:
        if c in sel.scores:
            print(f"{c},{sel.scores[c]!r}")
        else:
            print(f"{c},failed: {sel.failures.get(c, '')}")
    print(f"selected c: {sel.c}")
    return 0


def _mixture(args):
    if args.mixture:
        spec = mixture_from_config(read_config(args.mixture))
    else:
        spec = default_mixture(s=args.dim, n=args.n)
    if args.seed is not None:
        spec = type(spec)(spec.components, spec.n, args.seed)
    return spec


def cmd_generate(args):
    spec = _mixture(args)
    data, labels = generate_mixture(spec)
    columns = [f"x{j + 1}" for j in range(data.s)]
    write_csv(args.out, data, columns, [str(int(x)) for x in labels] if args.labels else None)
    print(f"wrote {data.n} x {data.s} mixture to {args.out}")
    return 0


def cmd_inject(args):
    data, table = _load(args)
    if args.config:
        spec = injection_from_config(read_config(args.config))
    else:
        spec = InjectionSpec(args.fraction, args.seed)
    out = inject_missing(data, spec)
    write_csv(args.out, out, table.columns, table.labels)
    print(f"hid {out.n_missing} of {out.n * out.s} cells; wrote {args.out}")
    return 0


def cmd_experiment(args):
    if bool(args.data) == bool(args.mixture):
        raise ConfigurationError("give exactly one of --data or --mixture")
    mixture = mixture_from_config(read_config(args.mixture)) if args.mixture else None
    spec = ExperimentSpec(
        data=args.data, mixture=mixture, label_column=args.label_column,
        c=None if args.c_range else args.c, c_range=args.c_range,
        params=_params(args), fractions=args.fractions, trials=args.trials,
        strategies=args.strategies, base_seed=args.seed, zscore=args.zscore,
        harden_by=args.harden_by, fixed_pattern=args.fixed_pattern,
        fixed_init=args.fixed_init)
    base = run_base(spec)
    sizes = np.bincount(base.labels, minlength=base.c)
    print(f"base: c={base.c} sizes={' '.join(str(int(x)) for x in sizes)} "
          f"iterations={base.result.iterations}")
    records = run_grid(spec, base, jobs=args.jobs)
    aggs = aggregate(records)
    emit_report(aggs, records, args.out, plots=args.plots)
    _print_summary(aggs)
    print(f"wrote reports to {args.out}")
    return 0


def cmd_report(args):
    records = read_trials(Path(args.trials))
    aggs = aggregate(records)
    emit_report(aggs, records, args.out, plots=args.plots)
    _print_summary(aggs)
    return 0


def _print_summary(aggs):
    print("strategy fraction  accuracy  iterations  centroid_error  used/trials")
    for a in aggs:
        st = a.stats
        print(f"{a.strategy:8s} {a.fraction:8.2f}  {st['accuracy']['mean']:8.3f}  "
              f"{st['iterations']['mean']:10.2f}  {st['centroid_error']['mean']:14.6f}  "
              f"{a.used}/{a.trials}")


def build_parser():
    parser = argparse.ArgumentParser(prog="pfcm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster one data set with PFCM, OCSPFCM or NPSPFCM")
    _add_data(p)
    _add_params(p)
    p.add_argument("--strategy", choices=("pfcm", "ocs", "nps"), default="pfcm")
    p.add_argument("--harden-by", choices=("t", "u"), default="t")
    p.add_argument("--out", help="directory for imputed.csv, labels.csv, centroids.csv")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("validity", help="Xie-Beni sweep over cluster counts")
    _add_data(p)
    _add_params(p)
    p.add_argument("--c-range", type=_c_range, default=_c_range("2..5"))
    p.set_defaults(func=cmd_validity)

    p = sub.add_parser("generate", help="sample a Gaussian mixture to CSV")
    p.add_argument("--mixture", help="mixture config file (flat key = value)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--labels", action="store_true", help="append the component column")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("inject", help="hide a fraction of cells in a complete data set")
    _add_data(p)
    p.add_argument("--fraction", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="injection config file (fraction, seed)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("experiment", help="base run + missingness grid + reports")
    _add_data(p, required=False)
    _add_params(p)
    p.add_argument("--mixture", help="mixture config file instead of --data")
    p.add_argument("--c-range", type=_c_range, default=None)
    p.add_argument("--fractions", type=_fractions, default=DEFAULT_FRACTIONS)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--strategy", dest="strategies", action="append",
                   choices=("ocs", "nps"), help="repeatable; default both")
    p.add_argument("--harden-by", choices=("t", "u"), default="t")
    p.add_argument("--fixed-pattern", action="store_true",
                   help="same missing cells for every trial and strategy")
    p.add_argument("--fixed-init", action="store_true",
                   help="same initialisation seed for every trial")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plots", action="store_true", help="also write SVG charts")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="re-aggregate an existing trials.csv")
    p.add_argument("--trials", required=True, help="path to trials.csv")
    p.add_argument("--plots", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "command", None) == "experiment" and not args.strategies:
        args.strategies = ["ocs", "nps"]
    try:
        return args.func(args)
    except PFCMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
