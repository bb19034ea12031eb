import csv

import numpy as np
import pytest

import render
from render import FigureSpec, build_figure, main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _last_cum_mean(trace_path) -> float:
    with open(trace_path, newline="") as fh:
        body = list(csv.reader(fh))[1:]
    return float(body[-1][2])


def _line_by_label(ax, label):
    matches = [ln for ln in ax.lines if ln.get_label() == label]
    assert len(matches) == 1, f"expected one line labelled {label!r}"
    return matches[0]


def test_envelope_image_from_pipeline_outputs(experiment_outputs,
                                              historical_csv, tmp_path):
    out = tmp_path / "fig1.png"
    code = main(["--kind", "envelope",
                 "--ensemble", str(experiment_outputs / "ensemble.csv"),
                 "--historical", str(historical_csv),
                 "--out", str(out)])
    assert code == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_trace_image_from_pipeline_outputs(experiment_outputs, tmp_path):
    out = tmp_path / "fig2.png"
    code = main(["--kind", "trace",
                 "--trace", str(experiment_outputs / "trace.csv"),
                 "--out", str(out)])
    assert code == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_ensemble_image_from_pipeline_outputs(experiment_outputs,
                                              historical_csv, tmp_path):
    out = tmp_path / "fig0.png"
    code = main(["--kind", "ensemble",
                 "--ensemble", str(experiment_outputs / "ensemble.csv"),
                 "--historical", str(historical_csv),
                 "--out", str(out)])
    assert code == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_trace_final_plotted_value_matches_csv(experiment_outputs, tmp_path):
    trace_path = experiment_outputs / "trace.csv"
    final = _last_cum_mean(trace_path)
    fig = build_figure(FigureSpec(kind="correlation-trace",
                                  out=str(tmp_path / "x.png"),
                                  trace=str(trace_path)))
    ax = fig.axes[0]
    curve = _line_by_label(ax, "cumulative mean")
    assert curve.get_ydata()[-1] == final
    reference = _line_by_label(ax, "final value")
    assert all(y == final for y in reference.get_ydata())


def test_constant_trace_renders_flat_line(tmp_path):
    trace = tmp_path / "trace.csv"
    rows = [f"{n},{0.3 + 0.01 * n},0.35999999999999999\n" for n in range(1, 6)]
    trace.write_text("N,cor_n,cum_mean\n" + "".join(rows))
    fig = build_figure(FigureSpec(kind="correlation-trace",
                                  out=str(tmp_path / "x.png"),
                                  trace=str(trace)))
    ax = fig.axes[0]
    curve = _line_by_label(ax, "cumulative mean")
    assert np.all(curve.get_ydata() == 0.35999999999999999)
    assert list(curve.get_xdata()) == [1, 2, 3, 4, 5]


def test_single_path_envelope_band_coincides_with_path(tmp_path):
    ensemble = tmp_path / "one.csv"
    ensemble.write_text("t,path_0\n0,100\n1,101.5\n2,99.25\n")
    values = {0.0: 100.0, 1.0: 101.5, 2.0: 99.25}
    fig = build_figure(FigureSpec(kind="envelope",
                                  out=str(tmp_path / "x.png"),
                                  ensemble=str(ensemble)))
    ax = fig.axes[0]
    assert len(ax.collections) == 1
    for x, y in ax.collections[0].get_paths()[0].vertices:
        assert y == values[x]


def test_ensemble_overlay_uses_distinct_style(experiment_outputs,
                                              historical_csv, tmp_path):
    fig = build_figure(FigureSpec(
        kind="ensemble", out=str(tmp_path / "x.png"),
        ensemble=str(experiment_outputs / "ensemble.csv"),
        historical=str(historical_csv)))
    ax = fig.axes[0]
    assert len(ax.lines) == 41
    overlay = _line_by_label(ax, "historical")
    path_widths = {ln.get_linewidth() for ln in ax.lines if ln is not overlay}
    assert all(overlay.get_linewidth() > w for w in path_widths)


def test_rerun_is_byte_identical(experiment_outputs, historical_csv, tmp_path):
    args = ["--kind", "envelope",
            "--ensemble", str(experiment_outputs / "ensemble.csv"),
            "--historical", str(historical_csv)]
    first, second = tmp_path / "a.png", tmp_path / "b.png"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()

    targs = ["--kind", "trace",
             "--trace", str(experiment_outputs / "trace.csv")]
    third, fourth = tmp_path / "c.png", tmp_path / "d.png"
    assert main(targs + ["--out", str(third)]) == 0
    assert main(targs + ["--out", str(fourth)]) == 0
    assert third.read_bytes() == fourth.read_bytes()


def test_missing_input_file_fails_without_image(tmp_path):
    out = tmp_path / "fig.png"
    code = main(["--kind", "trace", "--trace", str(tmp_path / "nope.csv"),
                 "--out", str(out)])
    assert code == 2
    assert not out.exists()
    assert not list(tmp_path.glob("*.png"))


def test_empty_input_file_fails_without_image(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "fig.png"
    code = main(["--kind", "trace", "--trace", str(empty),
                 "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_wrong_header_fails_without_image(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("day,price\n2020-01-02,100\n")
    ensemble = tmp_path / "e.csv"
    ensemble.write_text("t,path_0\n0,100\n1,101\n")
    out = tmp_path / "fig.png"
    code = main(["--kind", "envelope", "--ensemble", str(ensemble),
                 "--historical", str(bad), "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_non_numeric_cell_fails_without_image(tmp_path):
    ensemble = tmp_path / "e.csv"
    ensemble.write_text("t,path_0\n0,100\n1,oops\n")
    out = tmp_path / "fig.png"
    code = main(["--kind", "envelope", "--ensemble", str(ensemble),
                 "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_kind_without_its_input_fails(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["--kind", "trace", "--out", str(out)]) == 2
    assert main(["--kind", "ensemble", "--out", str(out)]) == 2
    assert not out.exists()


def test_malformed_flags_exit_1(tmp_path):
    assert main(["--kind", "scatter", "--out", str(tmp_path / "f.png")]) == 1
    assert main(["--kind", "trace"]) == 1


def test_spec_validation_messages():
    with pytest.raises(ValueError, match="--trace"):
        FigureSpec(kind="correlation-trace", out="x.png")
    with pytest.raises(ValueError, match="--historical"):
        FigureSpec(kind="ensemble", out="x.png", ensemble="e.csv")
    with pytest.raises(ValueError, match="kind"):
        FigureSpec(kind="pie", out="x.png")


def test_reader_roundtrip(experiment_outputs):
    times, matrix = render.read_ensemble(str(experiment_outputs / "ensemble.csv"))
    assert times[0] == 0.0
    assert matrix.shape == (times.size, 40)
    counts, per, cum = render.read_trace(str(experiment_outputs / "trace.csv"))
    assert counts[0] == 1
    assert per.size == cum.size == counts.size
    # The cumulative column is the running mean of the per-run column.
    assert np.allclose(np.cumsum(per) / np.arange(1, per.size + 1), cum,
                       rtol=0, atol=1e-12)
