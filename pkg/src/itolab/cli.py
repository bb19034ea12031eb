"""Command-line front end.

Every run resolves one master seed (flag, then ITOLAB_SEED, then 0) and
writes each output file next to a manifest recording the subcommand, the
resolved flags, the seed, input digests and the package version.  Outputs
are written to a temporary file and renamed, so a failed run leaves nothing
half-written, and a repeated run with the same manifest reproduces every
byte.

Exit codes: 0 success, 1 malformed flags, 2 input validation, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .brownian import sample_paths
from .calibrate import MODES, calibrate, log_returns, read_price_csv
from .grid import TimeGrid, uniform_grid
from .ito import (
    AdaptedIntegrand,
    ConstantIntegrand,
    CurrentValueIntegrand,
    SinCurrentValueIntegrand,
    convergence_diagnostic,
    isometry_check,
)
from .montecarlo import trace_from_levels
from .rng import SeedSpec
from .sde import GbmParams

SEED_ENV_VAR = "ITOLAB_SEED"

INTEGRANDS: dict[str, AdaptedIntegrand] = {
    "one": ConstantIntegrand(1.0),
    "bm": CurrentValueIntegrand(),
    "sin-bm": SinCurrentValueIntegrand(),
}


class UsageError(Exception):
    """Malformed command line; maps to exit code 1."""


class InputError(Exception):
    """Invalid input data or flag value; maps to exit code 2."""


class NumericalError(Exception):
    """Non-finite or degenerate numerical result; maps to exit code 3."""


@dataclass(frozen=True)
class RunManifest:
    """Reproduction record paired with every output file."""

    cmd: str
    flags: dict
    seed: int
    inputs: list
    version: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D102  argparse hook
        raise UsageError(message)


def _fmt(x: float) -> str:
    """17 significant digits: parsing the text recovers the exact double."""
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        value = args.seed
    else:
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None:
            value = 0
        else:
            try:
                value = int(raw)
            except ValueError:
                raise InputError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    if not 0 <= value < 2**64:
        raise InputError(f"seed must fit in an unsigned 64-bit word, got {value}")
    return value


def _check_positive_int(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return value


def _flags_dict(args: argparse.Namespace) -> dict:
    skip = {"cmd", "func"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = value
    return out


def _emit(path: str, text: str, cmd: str, args: argparse.Namespace, seed: int,
          input_paths: list[str]) -> None:
    """Write an output file and its manifest, both atomically."""
    inputs = [{"path": p, "sha256": _sha256(p)} for p in input_paths]
    manifest = RunManifest(cmd=cmd, flags=_flags_dict(args), seed=seed,
                           inputs=inputs, version=__version__)
    _atomic_write(path, text)
    _atomic_write(path + ".manifest.json", manifest.to_json())


def _paths_csv(times: np.ndarray, rows: np.ndarray) -> str:
    """Grid in the first column, one column per path."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"path_{i}" for i in range(rows.shape[0])])
    for k in range(times.size):
        writer.writerow([_fmt(times[k])] + [_fmt(v) for v in rows[:, k]])
    return buf.getvalue()


def _read_paths_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of _paths_csv: (times, rows) with one row per path."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "t" or len(header) < 2:
            raise InputError(f"{path}: expected header 't,path_0,...', got {header!r}")
        n_cols = len(header)
        times: list[float] = []
        cols: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != n_cols:
                raise InputError(f"{path}:{lineno}: expected {n_cols} fields, got {len(row)}")
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric field") from None
            times.append(values[0])
            cols.append(values[1:])
    if len(times) < 2:
        raise InputError(f"{path}: need at least 2 rows")
    t = np.array(times)
    rows = np.array(cols).T
    if not np.all(np.isfinite(rows)) or not np.all(np.isfinite(t)):
        raise InputError(f"{path}: non-finite values")
    if not np.all(np.diff(t) > 0):
        raise InputError(f"{path}: time column must be strictly increasing")
    return t, rows


def _require_finite(name: str, arr: np.ndarray, positive: bool = False) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains non-finite values; refusing to write")
    if positive and not np.all(arr > 0.0):
        raise NumericalError(f"{name} contains non-positive values; refusing to write")


# ---------------------------------------------------------------- subcommands


def _cmd_simulate_bm(args: argparse.Namespace) -> None:
    _check_positive_int("--steps", args.steps)
    _check_positive_int("--paths", args.paths)
    _check_positive_int("--threads", args.threads)
    if not args.t_end > 0:
        raise InputError(f"--t-end must be > 0, got {args.t_end}")
    seed = _resolve_seed(args)
    grid = uniform_grid(0.0, args.t_end, args.steps)
    rows = sample_paths(grid, seed, args.paths, threads=args.threads)
    _require_finite("paths", rows)
    _emit(args.out, _paths_csv(grid.times, rows), "simulate-bm", args, seed, [])


def _cmd_ito_demo(args: argparse.Namespace) -> None:
    _check_positive_int("--steps", args.steps)
    _check_positive_int("--levels", args.levels, minimum=2)
    _check_positive_int("--paths", args.paths, minimum=2)
    _check_positive_int("--threads", args.threads)
    if not args.t_end > 0:
        raise InputError(f"--t-end must be > 0, got {args.t_end}")
    seed = _resolve_seed(args)
    f = INTEGRANDS[args.integrand]
    grid = uniform_grid(0.0, args.t_end, args.steps)
    iso = isometry_check(f, grid, args.paths, SeedSpec(seed, 0), threads=args.threads)
    # Disjoint stream block so the two diagnostics share no draws.
    diag = convergence_diagnostic(f, grid, args.levels, args.paths,
                                  SeedSpec(seed, args.paths), threads=args.threads)
    report = {
        "integrand": args.integrand,
        "t_end": args.t_end,
        "steps": args.steps,
        "levels": args.levels,
        "n_paths": args.paths,
        "mesh": [mesh for mesh, _ in diag],
        "l2_distance": [dist for _, dist in diag],
        "isometry": {"lhs": iso.lhs, "rhs": iso.rhs, "rel_err": iso.rel_err},
    }
    for key in ("lhs", "rhs", "rel_err"):
        if not math.isfinite(report["isometry"][key]):
            raise NumericalError(f"isometry {key} is non-finite; refusing to write")
    if not all(math.isfinite(v) for v in report["l2_distance"]):
        raise NumericalError("l2_distance contains non-finite values; refusing to write")
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(args.out, text, "ito-demo", args, seed, [])


def _cmd_calibrate(args: argparse.Namespace) -> None:
    series = read_price_csv(args.input)
    result = calibrate(log_returns(series), mode=args.mode)
    if not (math.isfinite(result.gamma) and math.isfinite(result.sigma)):
        raise NumericalError("calibration produced non-finite parameters")
    payload = {
        "gamma": result.gamma,
        "sigma": result.sigma,
        "mode": result.mode,
        "n_returns": result.n_returns,
        "start_date": result.start_date.isoformat(),
        "end_date": result.end_date.isoformat(),
    }
    seed = _resolve_seed(args)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    _emit(args.out, text, "calibrate", args, seed, [args.input])


def _cmd_project(args: argparse.Namespace) -> None:
    _check_positive_int("--days", args.days)
    _check_positive_int("--paths", args.paths)
    _check_positive_int("--threads", args.threads)
    if not math.isfinite(args.gamma):
        raise InputError(f"--gamma must be finite, got {args.gamma}")
    if not (math.isfinite(args.sigma) and args.sigma >= 0.0):
        raise InputError(f"--sigma must be >= 0, got {args.sigma}")
    if not (math.isfinite(args.initial) and args.initial > 0.0):
        raise InputError(f"--initial must be > 0, got {args.initial}")
    seed = _resolve_seed(args)
    params = GbmParams(gamma=args.gamma, sigma=args.sigma)
    grid = uniform_grid(0.0, float(args.days), args.days)
    prices = _price_rows(params, grid, args.initial, args.paths, seed, args.threads)
    _emit(args.out, _paths_csv(grid.times, prices), "project", args, seed, [])


def _price_rows(params: GbmParams, grid: TimeGrid, initial: float, n_paths: int,
                seed: int, threads: int) -> np.ndarray:
    """Exact-scheme price matrix; numerical failure if exp over/underflows."""
    w = sample_paths(grid, seed, n_paths, threads=threads)
    drift = params.gamma * (grid.times - grid.times[0])
    with np.errstate(over="ignore", under="ignore"):
        prices = np.exp(np.log(initial) + drift + params.sigma * w)
    _require_finite("prices", prices, positive=True)
    return prices


def _cmd_correlate(args: argparse.Namespace) -> None:
    times, rows = _read_paths_csv(args.ensemble)
    try:
        series = read_price_csv(args.historical)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if len(series) != times.size:
        raise InputError(
            f"historical has {len(series)} rows but the ensemble grid has "
            f"{times.size}; the two must align point-for-point"
        )
    try:
        trace = trace_from_levels(rows, series.closes, on=args.on)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    seed = _resolve_seed(args)
    _emit(args.out, _trace_csv(trace), "correlate", args, seed,
          [args.ensemble, args.historical])


def _trace_csv(trace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "cor_n", "cum_mean"])
    for n in range(len(trace)):
        writer.writerow([str(n + 1), _fmt(trace.per_path[n]), _fmt(trace.cumulative[n])])
    return buf.getvalue()


def _cmd_experiment(args: argparse.Namespace) -> None:
    _check_positive_int("--paths", args.paths)
    _check_positive_int("--threads", args.threads)
    seed = _resolve_seed(args)
    try:
        calib_series = read_price_csv(args.calibration_input)
        target = read_price_csv(args.historical)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    result = calibrate(log_returns(calib_series), mode=args.mode)
    if not (math.isfinite(result.gamma) and math.isfinite(result.sigma)):
        raise NumericalError("calibration produced non-finite parameters")
    if result.sigma < 0.0:
        raise NumericalError(f"calibrated sigma is negative: {result.sigma}")
    params = GbmParams(gamma=result.gamma, sigma=result.sigma)
    days = len(target) - 1
    grid = uniform_grid(0.0, float(days), days)
    initial = float(target.closes[0])
    prices = _price_rows(params, grid, initial, args.paths, seed, args.threads)
    trace = trace_from_levels(prices, target.closes)

    os.makedirs(args.out_dir, exist_ok=True)
    inputs = [args.calibration_input, args.historical]
    params_payload = {
        "gamma": result.gamma,
        "sigma": result.sigma,
        "mode": result.mode,
        "n_returns": result.n_returns,
        "start_date": result.start_date.isoformat(),
        "end_date": result.end_date.isoformat(),
    }
    _emit(os.path.join(args.out_dir, "params.json"),
          json.dumps(params_payload, indent=2, sort_keys=True) + "\n",
          "experiment", args, seed, inputs)
    _emit(os.path.join(args.out_dir, "ensemble.csv"),
          _paths_csv(grid.times, prices), "experiment", args, seed, inputs)
    _emit(os.path.join(args.out_dir, "trace.csv"),
          _trace_csv(trace), "experiment", args, seed, inputs)


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ito-lab",
                     description="Brownian paths, stochastic integrals and "
                                 "log-price projections")
    sub = parser.add_subparsers(dest="cmd", metavar="SUBCOMMAND")
    sub.required = True

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None,
                       help=f"master seed (default: ${SEED_ENV_VAR} or 0)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; results do not depend on it")

    p = sub.add_parser("simulate-bm", help="sample Brownian paths to CSV")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_simulate_bm)

    p = sub.add_parser("ito-demo", help="isometry and refinement report as JSON")
    p.add_argument("--integrand", choices=sorted(INTEGRANDS), default="bm")
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--paths", type=int, default=20000)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_ito_demo)

    p = sub.add_parser("calibrate", help="estimate drift/volatility from closes")
    p.add_argument("--input", required=True, help="CSV with header date,close")
    p.add_argument("--mode", choices=MODES, default="standard")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("project", help="simulate price paths to CSV")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--initial", type=float, required=True)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("correlate", help="per-path correlation trace to CSV")
    p.add_argument("--ensemble", required=True, help="CSV from project")
    p.add_argument("--historical", required=True, help="CSV with header date,close")
    p.add_argument("--on", choices=("levels", "log"), default="levels",
                   help="correlate raw price levels or their logs")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("experiment",
                       help="calibrate, project and correlate in one run")
    p.add_argument("--calibration-input", required=True,
                   help="CSV with header date,close used for calibration")
    p.add_argument("--historical", required=True,
                   help="CSV with header date,close to correlate against")
    p.add_argument("--mode", choices=MODES, default="standard")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"ito-lab: error: {exc}", file=sys.stderr)
        return 1
    try:
        args.func(args)
    except InputError as exc:
        print(f"ito-lab: invalid input: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"ito-lab: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"ito-lab: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
