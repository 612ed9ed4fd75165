"""Command-line interface: ``onebit-ci {solve-one,ber-sweep,user-sweep,time-bench,validate}``.

Sweep commands accept ``--config FILE`` with flat ``key = value`` lines
(``#`` starts a comment); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import MAX_BRUTE_FORCE_N, brute_force, zf_quantized
from .estimators import PRECODERS
from .model import build_model, ci_margin, ci_objective
from .numerics import RngStream
from .plotting import ber_svg
from .sim import BIT_MAP, ExperimentConfig, rayleigh_channel, run_sweep, worker_count
from .solvers import default_ao_params, default_homotopy_params, nl1p

CSV_SCHEMA_VERSION = "1"
DEFAULT_PRECODERS = ("nl1p", "anl1p", "zf_quantized", "zf_unquantized")
BER_HEADER = ["precoder", "snr_db", "bits_sent", "bit_errors", "ber", "mean_solve_seconds"]
USER_HEADER = ["precoder", "k", "ber", "bits_sent", "bit_errors", "mean_solve_seconds"]
TIME_HEADER = ["precoder", "k", "nt", "mean_solve_seconds", "iters_mean"]

log = logging.getLogger("onebit_ci")


class UsageError(Exception):
    pass


def _floats(text):
    try:
        vals = [float(v) for v in str(text).replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    return vals


def _ints(text):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    return [int(v) for v in vals]


def _names(text):
    return [v for v in str(text).replace(" ", "").split(",") if v]


def read_config(path):
    """Parse a flat ``key = value`` file into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# (config key, parser, default) for options shared by the sweep commands
_SWEEP_KEYS = {
    "k": (int, 16),
    "nt": (int, 128),
    "m": (int, 8),
    "snr": (_floats, None),
    "block_len": (int, 10),
    "trials": (int, 1000),
    "seed": (int, 0),
    "precoders": (_names, None),
    "lambda0": (float, None),
    "delta": (float, 5.0),
    "max_outer": (int, 20),
    "max_iter": (int, 500),
    "tol": (float, 1e-3),
    "stop_norm": (str, "l2"),
    "k_grid": (_ints, None),
    "nt_grid": (_ints, None),
    "instances": (int, 20),
    "workers": (int, None),
}


def _resolve(args, **command_defaults):
    """Merge defaults < config file < explicit flags."""
    file_vals = read_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_vals) - set(_SWEEP_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, (parse, default) in _SWEEP_KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in file_vals:
            try:
                out[key] = parse(file_vals[key])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value for {key}: {exc}") from None
        else:
            out[key] = command_defaults.get(key, default)
    return out


def _solver_kwargs(opts):
    return dict(
        lambda0=opts["lambda0"],
        delta=opts["delta"],
        max_outer=opts["max_outer"],
        max_iter=opts["max_iter"],
        tol=opts["tol"],
        stop_norm=opts["stop_norm"],
    )


def _write_manifest(path, opts, outputs, started, finished, extra=None):
    lines = [
        f"artifact_version={__version__}",
        f"csv_schema_version={CSV_SCHEMA_VERSION}",
        f"bit_map={BIT_MAP}",
        f"started={started}",
        f"finished={finished}",
        f"seed={opts.get('seed')}",
    ]
    for key in sorted(opts):
        val = opts[key]
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        lines.append(f"config.{key}={val}")
    for key, val in (extra or {}).items():
        lines.append(f"{key}={val}")
    for i, p in enumerate(outputs):
        lines.append(f"output.{i}={p}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _fmt(x):
    return f"{x:.9g}" if isinstance(x, float) else str(x)


def _write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _manifest_path(csv_path):
    return Path(csv_path).with_suffix(".manifest")


def _config(opts, K=None, snr=None):
    return ExperimentConfig(
        K=opts["k"] if K is None else K,
        Nt=opts["nt"],
        M=opts["m"],
        snr_db_grid=opts["snr"] if snr is None else snr,
        block_len=opts["block_len"],
        trials=opts["trials"],
        seed=opts["seed"],
        precoders=opts["precoders"],
        solver=_solver_kwargs(opts),
    )


# ---------------------------------------------------------------- commands
def cmd_solve_one(args):
    rng = RngStream(args.seed)
    H = rayleigh_channel(args.k, args.nt, rng.child(0))
    s = rng.child(1).integers(0, args.m, size=args.k)
    model = build_model(H, s, args.m)
    hp = default_homotopy_params(args.m)
    if args.lambda0 is not None or args.delta is not None:
        hp = type(hp)(args.lambda0 or hp.lambda0, args.delta or hp.delta, hp.max_outer, hp.feas_tol)
    ap = default_ao_params(model, max_iter=args.max_iter, tol=args.tol, stop_norm=args.stop_norm)
    variant = "accelerated" if args.variant == "anl1p" else "standard"
    report = nl1p(model, hp, ap, variant=variant)
    feasible = bool(np.all(np.abs(report.x) == 1))
    print(f"system        K={args.k} Nt={args.nt} M={args.m} seed={args.seed} variant={args.variant}")
    print(f"objective     {report.objective:.9g}")
    print(f"ci_margin     {ci_margin(model, report.x):.9g}")
    print(f"one_bit       {feasible}")
    print(f"inner_feasible {report.feasible_at_exit}")
    print(f"outer_iters   {len(report.outer_trace)}")
    print(f"inner_iters   {report.inner_iterations}")
    print(f"seconds       {report.elapsed:.6f}")
    try:
        zq = ci_objective(model, zf_quantized(H, s, args.m))
        print(f"zf_quantized  {zq:.9g}")
    except (ValueError, np.linalg.LinAlgError):
        pass
    if args.oracle:
        if model.n > MAX_BRUTE_FORCE_N:
            raise UsageError(f"--oracle needs 2*Nt <= {MAX_BRUTE_FORCE_N}")
        _, v = brute_force(model)
        print(f"oracle        {v:.9g}")
        print(f"gap           {report.objective - v:.9g}")
    if args.print_x:
        print("x             " + " ".join(str(int(v)) for v in report.x))
    return 0 if feasible else 1


def cmd_ber_sweep(args):
    opts = _resolve(args, snr=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0], precoders=list(DEFAULT_PRECODERS))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    started = _now()
    records = run_sweep(_config(opts), workers=opts["workers"])
    rows = [
        [r.precoder, float(r.snr_db), r.bits_sent, r.bit_errors, float(r.ber), float(r.mean_solve_seconds)]
        for r in records
    ]
    _write_csv(out, BER_HEADER, rows)
    outputs = [str(out)]
    if args.plot:
        series = {}
        for r in records:
            series.setdefault(r.precoder, []).append((r.snr_db, r.ber))
        plot = out.with_suffix(".svg")
        title = f"(K, Nt, M) = ({opts['k']}, {opts['nt']}, {opts['m']})"
        plot.write_text(ber_svg(series, title=title), encoding="utf-8")
        outputs.append(str(plot))
    failures = {r.precoder: r.failures for r in records}
    _write_manifest(_manifest_path(out), opts, outputs, started, _now(),
                    {f"failures.{k}": v for k, v in failures.items()})
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_user_sweep(args):
    opts = _resolve(args, snr=[20.0], k_grid=[8, 16, 24, 32], precoders=list(DEFAULT_PRECODERS))
    if not opts["k_grid"]:
        raise UsageError("K grid is empty")
    if len(opts["snr"]) != 1:
        raise UsageError("user-sweep takes a single SNR value")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    started = _now()
    rows = {}
    for K in opts["k_grid"]:
        for r in run_sweep(_config(opts, K=K), workers=opts["workers"]):
            rows.setdefault(r.precoder, []).append(
                [r.precoder, K, float(r.ber), r.bits_sent, r.bit_errors, float(r.mean_solve_seconds)]
            )
    flat = [row for name in opts["precoders"] for row in rows[name]]
    _write_csv(out, USER_HEADER, flat)
    _write_manifest(_manifest_path(out), opts, [str(out)], started, _now())
    print(f"wrote {len(flat)} rows to {out}")
    return 0


def time_bench(K_grid, Nt_grid, M, precoders, instances, seed, solver_kwargs):
    """Mean solve time and inner iterations per (precoder, K, Nt)."""
    from .estimators import make_precoder

    rows = []
    for K in K_grid:
        for Nt in Nt_grid:
            if K > Nt:
                continue
            root = RngStream(seed).child(K, Nt)
            draws = []
            for i in range(instances):
                r = root.child(i)
                draws.append((rayleigh_channel(K, Nt, r.child(0)), r.child(1).integers(0, M, size=K)))
            for name in precoders:
                secs, iters = [], []
                for H, s in draws:
                    pre = make_precoder(name, M, **solver_kwargs).fit(H)
                    pre.predict(s)
                    secs.append(pre.solve_seconds_[0])
                    iters.append(pre.iterations_[0])
                rows.append([name, K, Nt, float(np.mean(secs)), float(np.mean(iters))])
    return rows


def cmd_time_bench(args):
    opts = _resolve(args, precoders=["nl1p", "anl1p"], instances=20)
    K_grid = opts["k_grid"] if opts["k_grid"] is not None else [opts["k"]]
    Nt_grid = opts["nt_grid"] if opts["nt_grid"] is not None else [opts["nt"]]
    if opts["k_grid"] is None and opts["nt_grid"] is None:
        Nt_grid = [64, 128, 256]
    if not K_grid or not Nt_grid:
        raise UsageError("empty grid")
    precoders = opts["precoders"]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    started = _now()
    rows = time_bench(K_grid, Nt_grid, opts["m"], precoders, opts["instances"], opts["seed"], _solver_kwargs(opts))
    rows.sort(key=lambda r: (precoders.index(r[0]), r[1], r[2]))
    _write_csv(out, TIME_HEADER, rows)
    _write_manifest(_manifest_path(out), opts, [str(out)], started, _now())
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_validate(args):
    from .validation import run_all

    results = run_all(seed=args.seed, scale=args.scale)
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.cases - len(res.failures)}/{res.cases} cases")
        for key, msg in res.failures[:10]:
            print(f"    seed={key}: {msg}")
        ok &= res.passed
    print("all suites passed" if ok else "validation FAILED")
    return 0 if ok else 1


# ---------------------------------------------------------------- parser
def _add_solver_flags(p):
    p.add_argument("--lambda0", type=float, help="initial penalty (default 0.001*M/8)")
    p.add_argument("--delta", type=float, help="penalty growth factor (default 5)")
    p.add_argument("--max-outer", dest="max_outer", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int, help="inner iteration cap (default 500)")
    p.add_argument("--tol", type=float, help="inner stopping threshold (default 1e-3)")
    p.add_argument("--stop-norm", dest="stop_norm", choices=["l2", "inf"])


def _add_sweep_flags(p, out_default):
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--k", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--snr", type=_floats, help="comma-separated SNR values in dB")
    p.add_argument("--block-len", dest="block_len", type=int)
    p.add_argument("--trials", type=int, help="channel realizations (default 1000)")
    p.add_argument("--seed", type=int)
    p.add_argument("--precoders", type=_names, help=f"comma-separated subset of {','.join(PRECODERS)}")
    p.add_argument("--workers", type=int, help="worker processes (default $ONEBIT_CI_WORKERS or CPU count)")
    p.add_argument("--out", default=out_default, help="output CSV path")
    _add_solver_flags(p)


def build_parser():
    parser = argparse.ArgumentParser(prog="onebit-ci", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-one", help="solve one random instance and print the report")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nt", type=int, required=True)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["nl1p", "anl1p"], default="nl1p")
    p.add_argument("--oracle", action="store_true", help="also run exhaustive search (2*Nt <= 26)")
    p.add_argument("--print-x", dest="print_x", action="store_true")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve_one, max_iter=500, tol=1e-3, stop_norm="l2")

    p = sub.add_parser("ber-sweep", help="BER versus SNR")
    _add_sweep_flags(p, "ber_sweep.csv")
    p.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")
    p.set_defaults(func=cmd_ber_sweep)

    p = sub.add_parser("user-sweep", help="BER versus number of users at one SNR")
    _add_sweep_flags(p, "user_sweep.csv")
    p.add_argument("--k-grid", dest="k_grid", type=_ints, help="comma-separated K values")
    p.set_defaults(func=cmd_user_sweep)

    p = sub.add_parser("time-bench", help="mean solve time over a K or Nt grid")
    _add_sweep_flags(p, "time_bench.csv")
    p.add_argument("--k-grid", dest="k_grid", type=_ints)
    p.add_argument("--nt-grid", dest="nt_grid", type=_ints)
    p.add_argument("--instances", type=int, help="instances per grid point (default 20)")
    p.set_defaults(func=cmd_time_bench)

    p = sub.add_parser("validate", help="run the oracle and property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="multiply the per-suite case counts")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except ValueError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"onebit-ci: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
