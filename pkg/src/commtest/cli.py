"""Command-line interface.

Exit codes: 0 success (``test``: H0 accepted), 3 ``test`` rejected H0,
1 numerical or I/O failure (JSON error on stderr), 2 usage error.
"""
import argparse
import json
import sys
import time
import warnings

import numpy as np

from . import baselines, dataio, spectra, synthetic, tracy_widom
from .core_matrix import normalize_t, pipeline_te
from .inference import TestConfig, run_test

EXIT_ACCEPT = 0
EXIT_ERROR = 1
EXIT_REJECT = 3


def _cmd_test(args):
    cfg = TestConfig(alpha=args.alpha, t0=args.t0,
                     critical_method="permutation" if args.critical == "perm" else "tw",
                     permutations=args.permutations, seed=args.seed)
    W = dataio.load_matrix(args.input, args.format, n=args.n)
    table = None
    if cfg.critical_method == "tw":
        table = tracy_widom.load_table(args.tw_table) if args.tw_table else tracy_widom.cached_table()
    start = time.perf_counter()
    report = run_test(W, cfg, table=table)
    doc = dataio.report_document(report, cfg, args.input, args.format,
                                 elapsed=time.perf_counter() - start)
    dataio.write_report(doc, args.output)
    for st in report.subtests:
        print(f"{st.name:7s} statistic={st.statistic:+.6f} critical={st.critical:+.6f} "
              f"{'REJECT' if st.reject else 'accept'}")
    print("H0 rejected" if report.overall_reject else "H0 accepted")
    return EXIT_REJECT if report.overall_reject else EXIT_ACCEPT


def _cmd_generate(args):
    with open(args.model) as fh:
        model = synthetic.CommunityModel.from_dict(json.load(fh))
    W, labels = synthetic.generate(model, args.seed)
    dataio.save_dense(W, args.output)
    if args.labels:
        np.savetxt(args.labels, labels, fmt="%d")
    return 0


def _cmd_power(args):
    levels = [float(x) for x in args.levels.split(",") if x.strip()]
    cfg = TestConfig(alpha=args.alpha, t0=args.t0)
    curve = synthetic.power_experiment(levels, args.mode, args.s, args.replicates,
                                       cfg=cfg, seed=args.seed)
    dataio.write_power_curve(curve, args.output)
    return 0


def _cmd_spectrum(args):
    W = dataio.load_matrix(args.input, args.format, n=args.n)
    M = normalize_t(W) if args.transform == "t" else pipeline_te(W, args.t0)
    ev = spectra.eigvals_sym(M)
    m = ev.size
    np.savetxt(args.output,
               np.column_stack([ev, np.arange(1, m + 1) / m, spectra.semicircle_cdf(ev),
                                spectra.semicircle_pdf(ev)]),
               delimiter=",", fmt="%.17g", comments="",
               header="eigenvalue,empirical_cdf,semicircle_cdf,semicircle_pdf")
    print(json.dumps({"n": m, "transform": args.transform,
                      "lambda_min": float(ev[0]), "lambda_max": float(ev[-1]),
                      "ks_distance": spectra.esd_ks_distance(ev)}))
    return 0


def _cmd_baseline(args):
    W = dataio.load_matrix(args.input, args.format, n=args.n)
    res = baselines.ce_test(W, args.k, method=args.method, contaminations=args.contaminations,
                            nulls=args.nulls, alpha=args.alpha, seed=args.seed)
    with open(args.output, "w") as fh:
        json.dump(res.to_dict(), fh, indent=2)
        fh.write("\n")
    print(f"CE={res.statistic:.6f} p={res.p_value:.4f} {'REJECT' if res.reject else 'accept'}")
    return 0


def _cmd_twtable(args):
    table = tracy_widom.build_tw1(args.tolerance)
    tracy_widom.save_table(table, args.output)
    if args.cache:
        path = tracy_widom.cache_path()
        path.parent.mkdir(parents=True, exist_ok=True)
        tracy_widom.save_table(table, path)
    return 0


def _add_input(p):
    p.add_argument("--input", required=True,
                   help="matrix file, or builtin:karate for the bundled karate graph")
    p.add_argument("--format", choices=("dense", "edgelist"), default="dense")
    p.add_argument("--n", type=int, default=None, help="node count for edge lists")


def build_parser():
    parser = argparse.ArgumentParser(prog="commtest",
                                     description="Spectral test for community structure.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the four-way eigenvalue test")
    _add_input(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--critical", choices=("tw", "perm"), default="tw")
    p.add_argument("--permutations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tw-table", default=None, help="F1 table CSV (default: on-disk cache)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("generate", help="draw a matrix from a block model")
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--labels", default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("power", help="Monte Carlo power curve")
    p.add_argument("--mode", choices=("mean", "variance"), required=True)
    p.add_argument("--levels", required=True, help="comma-separated effect levels")
    p.add_argument("--s", type=int, default=5)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("spectrum", help="full spectrum and semicircle comparison")
    _add_input(p)
    p.add_argument("--transform", choices=("t", "te"), default="t")
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("baseline", help="clustering-entropy test")
    _add_input(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("conv", "signed"), default="signed")
    p.add_argument("--contaminations", type=int, default=100)
    p.add_argument("--nulls", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("twtable", help="build and cache the Tracy-Widom F1 table")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--output", required=True)
    p.add_argument("--no-cache", dest="cache", action="store_false",
                   help="do not also refresh the on-disk cache")
    p.set_defaults(func=_cmd_twtable)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except Exception as exc:  # every failure maps to exit 1 with a JSON payload
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
