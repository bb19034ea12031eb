"""Figure rendering for simulation outputs.

Reads the CSV files written by the ito-lab command line tool and turns
them into static images: a spaghetti plot of simulated paths over the
historical series, a min-max envelope band, or the cumulative mean
correlation trace. All statistics are taken from the files as written;
nothing is recomputed here.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np
from matplotlib.figure import Figure

KINDS = ("ensemble", "envelope", "correlation-trace")

_REQUIRED = {
    "ensemble": ("ensemble", "historical"),
    "envelope": ("ensemble",),
    "correlation-trace": ("trace",),
}


class UsageError(Exception):
    """Malformed command line."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    out: str
    ensemble: str | None = None
    historical: str | None = None
    trace: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        for field in _REQUIRED[self.kind]:
            if getattr(self, field) is None:
                raise ValueError(
                    f"--{field} is required for kind {self.kind!r}")


def _rows(path: str) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: file is empty")
    return rows


def _floats(path: str, lineno: int, fields: list[str]) -> list[float]:
    out = []
    for field in fields:
        try:
            value = float(field)
        except ValueError:
            raise ValueError(
                f"{path}:{lineno}: expected a number, got {field!r}") from None
        if not math.isfinite(value):
            raise ValueError(f"{path}:{lineno}: non-finite value {field!r}")
        out.append(value)
    return out


def read_ensemble(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a path-ensemble CSV into (times, matrix of shape rows x paths)."""
    rows = _rows(path)
    header = rows[0]
    if len(header) < 2 or header[0] != "t" \
            or not all(name.startswith("path_") for name in header[1:]):
        raise ValueError(f"{path}: expected header t,path_0,... "
                         f"got {','.join(header)!r}")
    if len(rows) < 3:
        raise ValueError(f"{path}: need at least 2 data rows to draw a curve")
    parsed = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} "
                             f"fields, got {len(row)}")
        parsed.append(_floats(path, lineno, row))
    data = np.asarray(parsed)
    return data[:, 0], data[:, 1:]


def read_history(path: str) -> np.ndarray:
    """Parse a date,close CSV into the close values."""
    rows = _rows(path)
    if rows[0] != ["date", "close"]:
        raise ValueError(f"{path}: expected header date,close "
                         f"got {','.join(rows[0])!r}")
    closes = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected 2 fields, "
                             f"got {len(row)}")
        closes.extend(_floats(path, lineno, row[1:]))
    if not closes:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(closes)


def read_trace(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse a correlation-trace CSV into (N, per-run, cumulative) arrays."""
    rows = _rows(path)
    if rows[0] != ["N", "cor_n", "cum_mean"]:
        raise ValueError(f"{path}: expected header N,cor_n,cum_mean "
                         f"got {','.join(rows[0])!r}")
    if len(rows) < 2:
        raise ValueError(f"{path}: no data rows")
    counts, per, cum = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 fields, "
                             f"got {len(row)}")
        try:
            counts.append(int(row[0]))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected an integer N, "
                             f"got {row[0]!r}") from None
        values = _floats(path, lineno, row[1:])
        per.append(values[0])
        cum.append(values[1])
    return np.asarray(counts), np.asarray(per), np.asarray(cum)


def build_figure(spec: FigureSpec) -> Figure:
    """Parse the referenced inputs and lay out the figure.

    All file reading happens before the figure object exists, so a bad
    input can never leave a half-built canvas behind. The figure is
    constructed directly rather than through the pyplot state machine,
    which keeps repeated renders independent of each other.
    """
    if spec.kind in ("ensemble", "envelope"):
        times, matrix = read_ensemble(spec.ensemble)
        history = read_history(spec.historical) if spec.historical else None
    else:
        counts, _, cumulative = read_trace(spec.trace)

    fig = Figure(figsize=(8.0, 4.5), dpi=150)
    ax = fig.add_subplot(111)
    ax.grid(alpha=0.3)

    if spec.kind == "ensemble":
        for j in range(matrix.shape[1]):
            ax.plot(times, matrix[:, j], lw=0.6, alpha=0.5)
        ax.plot(np.arange(history.size), history, color="black", lw=1.8,
                label="historical")
        ax.set_title(f"{matrix.shape[1]} simulated price paths over history")
        ax.set_ylabel("price")
        ax.set_xlabel("trading day")
        ax.legend()
    elif spec.kind == "envelope":
        lo = matrix.min(axis=1)
        hi = matrix.max(axis=1)
        ax.fill_between(times, lo, hi, alpha=0.35, color="tab:blue",
                        label="path envelope")
        if history is not None:
            ax.plot(np.arange(history.size), history, color="black", lw=1.8,
                    label="historical")
        ax.set_title(f"Envelope of {matrix.shape[1]} simulated price paths")
        ax.set_ylabel("price")
        ax.set_xlabel("trading day")
        ax.legend()
    else:
        final = float(cumulative[-1])
        ax.plot(counts, cumulative, lw=1.5, color="tab:blue",
                label="cumulative mean")
        ax.axhline(final, color="black", ls="--", lw=1.0, label="final value")
        ax.set_title("Cumulative mean correlation against ensemble size")
        ax.set_ylabel("correlation")
        ax.set_xlabel("ensemble size N")
        ax.legend()
    return fig


def render(spec: FigureSpec) -> None:
    """Write the figure to spec.out, atomically and without timestamps."""
    fig = build_figure(spec)
    directory = os.path.dirname(os.path.abspath(spec.out))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".png")
    os.close(fd)
    try:
        # Software metadata carries no date but is dropped anyway so the
        # bytes depend only on the inputs and the library version.
        fig.savefig(tmp, format="png", metadata={"Software": None})
        os.replace(tmp, spec.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="render.py",
                     description="Render figures from ito-lab CSV outputs")
    parser.add_argument("--kind", required=True,
                        choices=KINDS + ("trace",),
                        help="figure to produce; 'trace' is shorthand for "
                             "correlation-trace")
    parser.add_argument("--ensemble", help="path-ensemble CSV")
    parser.add_argument("--historical", help="date,close CSV")
    parser.add_argument("--trace", help="correlation-trace CSV")
    parser.add_argument("--out", required=True, help="image file to write")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    kind = "correlation-trace" if args.kind == "trace" else args.kind
    try:
        spec = FigureSpec(kind=kind, out=args.out, ensemble=args.ensemble,
                          historical=args.historical, trace=args.trace)
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
