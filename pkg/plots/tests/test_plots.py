"""The figure scripts must run cleanly on the committed golden data and
produce byte-identical output on every invocation (pinned style config)."""

import os
import sys
from glob import glob

import numpy as np
import pytest

PLOTS_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GOLDEN = os.path.join(PLOTS_DIR, "golden")
sys.path.insert(0, PLOTS_DIR)

import plot_convergence
import plot_error_vs_time
import plot_trajectories
from plotlib import DataError, fitted_slope, read_table


def golden(name):
    path = os.path.join(GOLDEN, name)
    assert os.path.exists(path), f"golden file {name} missing"
    return path


def _render_twice(render, out_dir, name):
    outs = []
    for k in (1, 2):
        out = os.path.join(out_dir, f"{name}_{k}.png")
        render(out)
        assert os.path.getsize(out) > 2000
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1], "output bytes differ between reruns"


def test_strong_convergence_figure_deterministic(tmp_path):
    inputs = [golden("bd_strong_lie.csv"), golden("dim_strong_lie.csv")]
    _render_twice(
        lambda out: plot_convergence.main(["--in", *inputs, "--kind", "strong", "--out", out]),
        tmp_path, "strong",
    )


def test_strang_figure(tmp_path):
    inputs = [golden("bd_strong_strang.csv"), golden("dim_strong_strang.csv")]
    plot_convergence.main(["--in", *inputs, "--kind", "strong", "--out",
                           str(tmp_path / "strang.png")])
    assert (tmp_path / "strang.png").exists()


def test_weak_convergence_figure_deterministic(tmp_path):
    inputs = [
        golden("bd_weak_second_factorial.csv"),
        golden("dim_weak_second_factorial.csv"),
    ]
    _render_twice(
        lambda out: plot_convergence.main(["--in", *inputs, "--kind", "weak", "--out", out]),
        tmp_path, "weak",
    )


def test_error_vs_time_figure_deterministic(tmp_path):
    inputs = sorted(glob(os.path.join(GOLDEN, "bimol_timewise_h*.csv")))
    assert len(inputs) == 6
    _render_twice(
        lambda out: plot_error_vs_time.main(["--in", *inputs, "--out", out]),
        tmp_path, "timewise",
    )


def test_trajectories_figure(tmp_path):
    out = tmp_path / "samples.svg"
    plot_trajectories.main(["--in", golden("bd_samples.csv"), "--out", str(out)])
    assert out.exists() and out.stat().st_size > 2000
    again = tmp_path / "samples2.svg"
    plot_trajectories.main(["--in", golden("bd_samples.csv"), "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_scripts_are_read_only_over_inputs(tmp_path):
    path = golden("bd_strong_lie.csv")
    before = open(path, "rb").read()
    plot_convergence.main(["--in", path, "--kind", "strong", "--out",
                           str(tmp_path / "x.png")])
    assert open(path, "rb").read() == before


def test_synthetic_slope_one(tmp_path):
    # M = h exactly: the annotated fit must be 1
    rows = "\n".join(f"{h},{h},0.0,100,0.0" for h in (1.0, 0.5, 0.25, 0.125))
    p = tmp_path / "synth.csv"
    p.write_text("# model=synthetic\nh,M,S,N,half_width\n" + rows + "\n")
    table = read_table(p)
    h, value, _ = plot_convergence.series_from_table(table, "strong")
    assert fitted_slope(h, value) == pytest.approx(1.0)
    plot_convergence.main(["--in", str(p), "--kind", "strong", "--out",
                           str(tmp_path / "synth.png")])
    assert (tmp_path / "synth.png").exists()


def test_single_row_renders_point_plot(tmp_path):
    p = tmp_path / "single.csv"
    p.write_text("# model=single\nh,M,S,N,half_width\n0.5,1.25,0.1,10,0.03\n")
    out = tmp_path / "single.png"
    plot_convergence.main(["--in", str(p), "--kind", "strong", "--out", str(out)])
    assert out.exists()


def test_missing_column_is_named(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("h,mean\n0.5,1.0\n")
    with pytest.raises(DataError, match="'M'"):
        plot_convergence.main(["--in", str(p), "--kind", "strong", "--out",
                               str(tmp_path / "bad.png")])


def test_weak_drops_sign_indeterminate_rows(tmp_path):
    p = tmp_path / "weak.csv"
    p.write_text(
        "h,estimate,S,N,half_width,sign_indeterminate\n"
        "1.0,-2.0,1.0,100,0.1,0\n"
        "0.5,-1.0,1.0,100,0.1,0\n"
        "0.25,0.01,1.0,100,0.1,1\n"
    )
    table = read_table(p)
    h, value, _ = plot_convergence.series_from_table(table, "weak")
    assert h.tolist() == [0.5, 1.0]
    assert value.tolist() == [1.0, 2.0]


def test_timewise_requires_h_metadata(tmp_path):
    p = tmp_path / "tw.csv"
    p.write_text("t,M,S,N,half_width\n1.0,0.5,0.1,10,0.03\n")
    with pytest.raises(DataError, match="'h' metadata"):
        plot_error_vs_time.main(["--in", str(p), "--out", str(tmp_path / "tw.png")])


def test_golden_weak_tables_have_resolved_signs():
    # the committed weak tables must carry at least two usable rows each,
    # otherwise the weak figure cannot show an order
    for name in ("bd_weak_second_factorial.csv", "dim_weak_second_factorial.csv"):
        table = read_table(golden(name))
        assert np.sum(table.column("sign_indeterminate") == 0.0) >= 2
