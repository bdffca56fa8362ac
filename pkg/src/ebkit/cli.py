"""``ebkit`` command-line interface.

Exit codes: 0 success, 1 failed self-check, 2 bad usage or unreadable input,
3 numerical failure (the error class name is printed).
"""

from __future__ import annotations

import argparse
import os
import re
import sys

import numpy as np

from . import io as eio
from . import linear_eb as le
from . import ranking as rk
from . import saddlepoint as sp
from . import symbolic_cluster as sc
from . import tweedie as tw
from .checks import run_checks
from .datasets import DATASET_URLS
from .errors import EbkitError
from .moments import MomentSummary, classical_moments, symbolic_mean, symbolic_variance
from .pearson import fit_pearson, fit_sample, reconstruct_density

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    """Bad input that argparse cannot detect (file content, flag combinations)."""


def _seed(args) -> int:
    env = os.environ.get("EBKIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"EBKIT_SEED must be an integer, got {env!r}") from None
    return args.seed


def _emit(args, header, rows, payload=None):
    if args.json:
        eio.write_json(args.output, payload if payload is not None else [dict(zip(header, r)) for r in rows])
    else:
        eio.write_table(args.output, header, rows)


def _column(args):
    col = args.column
    if col is not None and col.isdigit():
        col = int(col)
    return eio.read_column(args.input, 0 if col is None else col)


def _bound_columns(header):
    """Indices of ``l_j``/``u_j`` pairs (or a single ``l``/``u`` pair)."""
    if "l" in header and "u" in header:
        return [(header.index("l"), header.index("u"))]
    pairs = []
    j = 1
    while f"l_{j}" in header and f"u_{j}" in header:
        pairs.append((header.index(f"l_{j}"), header.index(f"u_{j}")))
        j += 1
    if not pairs:
        raise UsageError("interval CSV needs columns l,u or l_1,u_1,...")
    return pairs


def _interval_arrays(header, rows):
    pairs = _bound_columns(header)
    try:
        lo = np.array([[float(r[a]) for a, _ in pairs] for r in rows])
        hi = np.array([[float(r[b]) for _, b in pairs] for r in rows])
    except (TypeError, ValueError) as exc:
        raise UsageError("non-numeric interval bound") from exc
    return lo, hi


# ---- commands -------------------------------------------------------------


def cmd_moments(args):
    if args.intervals:
        header, rows = eio.read_table(args.input)
        lo, hi = _interval_arrays(header, rows)
        if lo.shape[1] != 1:
            raise UsageError("--intervals expects one l,u pair")
        iv = (lo[:, 0], hi[:, 0])
        out = {"n": lo.shape[0], "symbolic_mean": symbolic_mean(iv), "symbolic_variance": symbolic_variance(iv)}
    else:
        out = classical_moments(_column(args)).to_dict()
    _emit(args, list(out), [list(out.values())], out)


def cmd_pearson(args):
    given = [args.mu2, args.beta1, args.beta2]
    if any(v is not None for v in given):
        if any(v is None for v in given):
            raise UsageError("--mu2, --beta1 and --beta2 must be given together")
        m = MomentSummary.from_standardized(args.mu2, args.beta1, args.beta2, mu1=args.mu1)
    elif args.input is None:
        raise UsageError("give an input file or --mu2/--beta1/--beta2")
    else:
        m = classical_moments(_column(args))
    fit = fit_pearson(m)
    if args.plot_data:
        sd = np.sqrt(m.mu2)
        lo, hi = (args.grid[0], args.grid[1]) if args.grid else (m.mu1 - 6 * sd, m.mu1 + 6 * sd)
        n = int(args.grid[2]) if args.grid else 1201
        x, f = reconstruct_density(fit, lo, hi, n)
        eio.emit_plot_data(args.plot_data, x, density=f)
    d = fit.to_dict()
    row = {k: d[k] for k in ("a", "c0", "c1", "c2", "A")}
    _emit(args, list(row), [list(row.values())], d)


def cmd_tweedie(args):
    if args.model == "normal":
        z = _column(args)
        grid = tuple(args.grid[:2]) + (int(args.grid[2]),) if args.grid else None
        table = tw.normal_tweedie(z, sigma2=args.sigma2, level=args.level, pi0=args.pi0)
        if grid is not None:
            table.fdr = np.atleast_1d(tw.local_fdr(z, table.fit, args.pi0, grid))
        if table.n_clamped:
            print(f"warning: {table.n_clamped} negative posterior variances clamped to 0", file=sys.stderr)
        if args.plot_data:
            order = np.argsort(table.z)
            eio.emit_plot_data(args.plot_data, table.z[order], post_mean=table.post_mean[order],
                               post_var=table.post_var[order])
        header = list(table.columns)
        _emit(args, header, list(table.rows()),
              {"fit": table.fit.to_dict(), "sigma2": args.sigma2, "level": args.level, "pi0": args.pi0,
               "n_clamped": table.n_clamped, "rows": [dict(zip(header, r)) for r in table.rows()]})
    elif args.model == "variance":
        if args.nu is None:
            raise UsageError("tweedie variance needs --nu")
        u = _column(args)
        est = tw.normal_variance_posterior(u, args.nu, fit_sample(u))
        _emit(args, ["u", "post_mean"], list(zip(u, np.atleast_1d(est))))
    else:
        if args.n is None:
            raise UsageError("tweedie binomial needs --n")
        x = _column(args)
        fit = fit_sample(x)
        rows = []
        for xi in x:
            theta, p = tw.binomial_posterior(xi, args.n, fit)
            rows.append((xi, theta, tw.binomial_posterior_var(xi, args.n, fit), p))
        _emit(args, ["x", "post_logit", "post_var", "p"], rows)


def cmd_linear_eb(args):
    header, rows = eio.read_table(args.input)
    if len(header) < 2 or header[0] != "group":
        raise UsageError("grouped CSV needs columns group,x_1,...")
    labels = [r[0] for r in rows]
    try:
        X = np.array([[float(v) for v in r[1:]] for r in rows])
    except (TypeError, ValueError) as exc:
        raise UsageError("non-numeric observation") from exc
    data = le.GroupedSample.from_long(labels, X)
    est = le.estimate(data, ridge=args.ridge)
    out_header = ["group"] + [f"t_{j + 1}" for j in range(data.p)]
    _emit(args, out_header, [[g, *e] for g, e in zip(data.labels, est)])


def cmd_linear_eb_interval(args):
    header, rows = eio.read_table(args.input)
    if not header or header[0] != "group":
        raise UsageError("interval grouped CSV needs columns group,l_1,u_1,...")
    lo, hi = _interval_arrays(header, rows)
    data = le.IntervalGroupedSample.from_long([r[0] for r in rows], lo, hi)
    if data.p == 1 and not args.vector:
        est = le.estimate_interval_scalar(data)[:, None]
    else:
        est = le.estimate_interval_vector(data, ridge=args.ridge)
    out_header = ["group"] + [f"t_{j + 1}" for j in range(data.p)]
    _emit(args, out_header, [[g, *e] for g, e in zip(data.labels, est)])


def cmd_cluster(args):
    header, rows = eio.read_table(args.input)
    lo, hi = _interval_arrays(header, rows)
    names = [r[0] for r in rows] if header[0] not in {"l", "l_1"} else list(range(len(rows)))
    lo, hi = sc.standardize(lo, hi, args.standardize)
    seed = _seed(args)
    part = sc.dca(lo, hi, args.k, args.distance, seed=seed, max_iter=args.max_iter, squared=args.squared)
    report = {"distance": args.distance, "standardize": args.standardize, "squared": args.squared,
              **part.report()}
    rows_out = list(zip(names, part.assignments.tolist()))
    if args.json:
        eio.write_json(args.output, {**report, "assignments": [{"object": o, "cluster": c} for o, c in rows_out]})
    else:
        eio.write_table(args.output, ["object", "cluster"], rows_out)
    if args.report:
        eio.write_json(args.report, report)
    elif not args.json:
        print(f"seed={seed} iterations={part.iterations} W={part.criterion:.17g}", file=sys.stderr)


def cmd_rank_eb(args):
    header, rows = eio.read_table(args.input)
    if args.group_col is not None:
        if args.group_col not in header:
            raise UsageError(f"no column {args.group_col!r}")
        gi = header.index(args.group_col)
        groups = [r[gi] for r in rows]
        cols = [j for j in range(len(header)) if j != gi]
    else:
        groups = ["all"] * len(rows)
        cols = list(range(len(header)))
    R = np.array([[r[j] for j in cols] for r in rows], dtype=float)
    xs = rk.standardize_rankings(R)
    Sigma = "identity" if args.sigma == "identity" else None
    objects = [header[j] for j in cols]
    labels = np.asarray(groups)
    post = np.empty_like(xs)
    consensus_rows = []
    for g in dict.fromkeys(groups):
        mask = labels == g
        p = rk.rank_posterior(xs[mask], args.carrier, Sigma=Sigma)
        post[mask] = p
        consensus_rows.append([g, *rk.consensus_ranking(p).tolist()])
    if args.posterior_out:
        eio.write_table(args.posterior_out, ["judge", "group", *objects],
                        [[i, g, *p] for i, (g, p) in enumerate(zip(groups, post))])
    _emit(args, ["group", *objects], consensus_rows)


def _parse_params(s: str | None) -> dict:
    out = {}
    if not s:
        return out
    for part in s.split(","):
        if "=" not in part:
            raise UsageError(f"bad parameter {part!r}; expected k=v")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"parameter {k!r} is not numeric") from None
    if "n" in out:
        out["n"] = int(out["n"])
    return out


def _parse_grid(s: str) -> np.ndarray:
    m = re.fullmatch(r"\s*([-+0-9.eE]+):([-+0-9.eE]+):(\d+)\s*", s)
    try:
        if m:
            return np.linspace(float(m[1]), float(m[2]), int(m[3]))
        return np.array([float(v) for v in s.split(",")])
    except ValueError:
        raise UsageError(f"bad --x grid {s!r}; use a,b,c or lo:hi:n") from None


def cmd_saddlepoint(args):
    model = sp.get_model(args.dist, **_parse_params(args.params))
    rows = []
    for x in _parse_grid(args.x):
        res = sp.saddle_density(model, float(x))
        exact = model.exact(float(x)) if model.exact is not None else float("nan")
        rows.append((x, res.density, exact, res.density / exact if model.exact is not None else float("nan")))
    _emit(args, ["x", "approx", "exact", "ratio"], rows)


def cmd_check(args):
    results = run_checks()
    if args.json:
        eio.write_json(args.output, [r.__dict__ for r in results])
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {
    "moments": cmd_moments,
    "pearson": cmd_pearson,
    "tweedie": cmd_tweedie,
    "linear-eb": cmd_linear_eb,
    "linear-eb-interval": cmd_linear_eb_interval,
    "cluster": cmd_cluster,
    "rank-eb": cmd_rank_eb,
    "saddlepoint": cmd_saddlepoint,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    urls = "\n".join(f"  {k}: {v}" for k, v in DATASET_URLS.items())
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default="-", help="output path (default stdout)")
    common.add_argument("--json", action="store_true", help="structured JSON output")
    common.add_argument("--seed", type=int, default=0, help="random seed (EBKIT_SEED overrides)")

    p = argparse.ArgumentParser(prog="ebkit", description="Empirical Bayes toolkit.",
                                epilog=f"public datasets:\n{urls}",
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("moments", parents=[common], help="sample or symbolic interval moments")
    s.add_argument("input")
    s.add_argument("--column")
    s.add_argument("--intervals", action="store_true", help="input has l,u columns")

    s = sub.add_parser("pearson", parents=[common], help="fit a Pearson system")
    s.add_argument("input", nargs="?")
    s.add_argument("--column")
    s.add_argument("--mu1", type=float, default=0.0)
    s.add_argument("--mu2", type=float)
    s.add_argument("--beta1", type=float)
    s.add_argument("--beta2", type=float)
    s.add_argument("--grid", type=float, nargs=3, metavar=("LO", "HI", "N"))
    s.add_argument("--plot-data", help="write reconstructed density as x,series,value CSV")

    s = sub.add_parser("tweedie", parents=[common], help="Tweedie posterior estimates")
    s.add_argument("model", choices=["normal", "variance", "binomial"])
    s.add_argument("input")
    s.add_argument("--column")
    s.add_argument("--sigma2", type=float, default=1.0)
    s.add_argument("--level", type=float, default=0.95)
    s.add_argument("--pi0", type=float, default=1.0)
    s.add_argument("--grid", type=float, nargs=3, metavar=("LO", "HI", "N"), help="fdr density grid")
    s.add_argument("--nu", type=int, help="degrees of freedom (variance model)")
    s.add_argument("--n", type=int, help="trials (binomial model)")
    s.add_argument("--plot-data", help="write z vs posterior mean/variance as x,series,value CSV")

    s = sub.add_parser("linear-eb", parents=[common], help="linear EB on grouped data")
    s.add_argument("input")
    s.add_argument("--ridge", type=float, default=0.0)

    s = sub.add_parser("linear-eb-interval", parents=[common], help="linear EB on grouped interval data")
    s.add_argument("input")
    s.add_argument("--vector", action="store_true", help="use the matrix form even for p=1")
    s.add_argument("--ridge", type=float, default=0.0)

    s = sub.add_parser("cluster", parents=[common], help="dynamic clustering of interval data")
    s.add_argument("input")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--distance", choices=[k.value for k in sc.DistanceKind], default="l2")
    s.add_argument("--standardize", choices=["none", "centers", "bounds", "range"], default="none")
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--squared", action="store_true", help="squared L2/Wasserstein distances")
    s.add_argument("--report", help="write the JSON run report here")

    s = sub.add_parser("rank-eb", parents=[common], help="ranking posteriors and group consensus")
    s.add_argument("input")
    s.add_argument("--carrier", choices=list(rk.CARRIERS), default="uniform")
    s.add_argument("--group-col")
    s.add_argument("--sigma", choices=["sample", "identity"], default="sample")
    s.add_argument("--posterior-out", help="write per-judge posterior CSV here")

    s = sub.add_parser("saddlepoint", parents=[common], help="saddlepoint density approximation")
    s.add_argument("--dist", required=True)
    s.add_argument("--params", help="k=v,... e.g. lam=2")
    s.add_argument("--x", required=True, help="comma list or lo:hi:n")

    sub.add_parser("check", parents=[common], help="run the built-in validation suite")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        code = COMMANDS[args.command](args)
        return EXIT_OK if code is None else code
    except EbkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, OSError, ValueError, KeyError, IndexError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
