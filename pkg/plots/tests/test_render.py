from pathlib import Path

import pytest
from matplotlib.ticker import MaxNLocator

from hapsplan_plots.cli import main
from hapsplan_plots.render import FigureSpec, SchemaError, build_figure, render

DATA = Path(__file__).parent / "data"
GOLDEN_FIG5 = DATA / "fig5_golden.csv"

HEADER = "sweep,metric,grid_value,rate_target_bps,mean,std,runs,seed"


def spec_for(csv_path, kind, tmp_path, name="out.png"):
    return FigureSpec(input_csv=csv_path, kind=kind, output_path=tmp_path / name)


def test_golden_fig5_stepped_with_integer_ticks(tmp_path):
    spec = spec_for(GOLDEN_FIG5, "fig5", tmp_path)
    fig = build_figure(spec)
    ax = fig.axes[0]
    lines = ax.get_lines()
    # one curve per rate target, stepped
    assert len(lines) == 3
    assert {l.get_drawstyle() for l in lines} == {"steps-post"}
    labels = [l.get_label() for l in lines]
    assert labels == ["2 Mbit/s", "4 Mbit/s", "8 Mbit/s"]
    assert isinstance(ax.yaxis.get_major_locator(), MaxNLocator)
    fig.canvas.draw()
    ticks = [t for t in ax.get_yticks() if ax.get_ylim()[0] <= t <= ax.get_ylim()[1]]
    assert all(float(t).is_integer() for t in ticks)
    path = render(spec)
    assert path.exists() and path.stat().st_size > 0


def test_render_is_deterministic(tmp_path):
    a = render(spec_for(GOLDEN_FIG5, "fig5", tmp_path, "a.png"))
    b = render(spec_for(GOLDEN_FIG5, "fig5", tmp_path, "b.png"))
    assert a.read_bytes() == b.read_bytes()


def test_schema_violation_names_offending_column(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        HEADER.replace("rate_target_bps", "rate") + "\n"
        "fig5,min_uavs,100000,2000000.0,1.0,0.0,3,1\n"
    )
    with pytest.raises(SchemaError, match="rate_target_bps"):
        build_figure(spec_for(bad, "fig5", tmp_path))


def test_missing_and_extra_columns_rejected(tmp_path):
    short = tmp_path / "short.csv"
    short.write_text("sweep,metric,grid_value\nfig5,min_uavs,1\n")
    with pytest.raises(SchemaError, match="rate_target_bps"):
        build_figure(spec_for(short, "fig5", tmp_path))
    extra = tmp_path / "extra.csv"
    extra.write_text(HEADER + ",bogus\n")
    with pytest.raises(SchemaError, match="bogus"):
        build_figure(spec_for(extra, "fig5", tmp_path))


def test_kind_must_match_sweep_column(tmp_path):
    with pytest.raises(SchemaError, match="sweep"):
        build_figure(spec_for(GOLDEN_FIG5, "fig2", tmp_path))


def test_single_point_flat_step(tmp_path):
    one = tmp_path / "one.csv"
    one.write_text(
        HEADER + "\n" + "fig5,min_uavs,100000,8000000.0,2.0,0.5,10,1\n"
    )
    fig = build_figure(spec_for(one, "fig5", tmp_path))
    (line,) = fig.axes[0].get_lines()
    assert line.get_drawstyle() == "steps-post"
    assert list(line.get_ydata()) == [2.0]


def test_zero_std_band_collapses_to_mean(tmp_path):
    flat = tmp_path / "flat.csv"
    flat.write_text(
        HEADER + "\n"
        "fig2,coverage,50000,64000.0,0.5,0.0,10,1\n"
        "fig2,coverage,100000,64000.0,0.75,0.0,10,1\n"
    )
    fig = build_figure(spec_for(flat, "fig2", tmp_path))
    ax = fig.axes[0]
    (band,) = ax.collections
    ys = band.get_paths()[0].vertices[:, 1]
    assert set(round(y, 12) for y in ys) <= {0.5, 0.75}


def test_fig2_three_curves_lowest_rate_on_top(tmp_path):
    csv_path = tmp_path / "fig2.csv"
    rows = [HEADER]
    for m, c64, c128, c256 in [
        (50000, 0.6, 0.16, 0.02),
        (100000, 1.0, 0.55, 0.2),
        (200000, 1.0, 0.9, 0.5),
    ]:
        rows.append(f"fig2,coverage,{m},64000.0,{c64},0.05,10,1")
        rows.append(f"fig2,coverage,{m},128000.0,{c128},0.05,10,1")
        rows.append(f"fig2,coverage,{m},256000.0,{c256},0.05,10,1")
    csv_path.write_text("\n".join(rows) + "\n")
    fig = build_figure(spec_for(csv_path, "fig2", tmp_path))
    lines = {l.get_label(): l for l in fig.axes[0].get_lines()}
    assert set(lines) == {"64 kbit/s", "128 kbit/s", "256 kbit/s"}
    assert all(
        a >= b >= c
        for a, b, c in zip(
            lines["64 kbit/s"].get_ydata(),
            lines["128 kbit/s"].get_ydata(),
            lines["256 kbit/s"].get_ydata(),
        )
    )


def test_fig4_is_log_log(tmp_path):
    csv_path = tmp_path / "fig4.csv"
    csv_path.write_text(
        HEADER + "\n"
        "fig4,min_elements,32000.0,32000.0,40000.0,2000.0,10,1\n"
        "fig4,min_elements,64000.0,64000.0,57000.0,2800.0,10,1\n"
    )
    fig = build_figure(spec_for(csv_path, "fig4", tmp_path))
    ax = fig.axes[0]
    assert ax.get_xscale() == "log" and ax.get_yscale() == "log"


def test_cli_round_trip(tmp_path, capsys):
    out = tmp_path / "fig5.png"
    code = main(["--csv", str(GOLDEN_FIG5), "--kind", "fig5", "--out", str(out)])
    assert code == 0 and out.exists()
    code = main(["--csv", str(GOLDEN_FIG5), "--kind", "fig2", "--out", str(out)])
    assert code == 1
    err = capsys.readouterr().err
    assert "sweep" in err
