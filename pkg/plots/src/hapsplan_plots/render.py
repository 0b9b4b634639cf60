"""Render one sweep CSV into a publication-style figure.

One curve per rate target: mean line plus a shaded +/-1 std band. The UAV
figure uses a stepped (post) line and integer y ticks; the min-elements
figure is log-log. Styling is pinned so the same CSV always produces the
same image bytes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

EXPECTED_COLUMNS = (
    "sweep",
    "metric",
    "grid_value",
    "rate_target_bps",
    "mean",
    "std",
    "runs",
    "seed",
)

KINDS = ("fig2", "fig3", "fig4", "fig5")

# (x label, y label, x scale, y scale)
_AXES = {
    "fig2": ("RIS elements", "covered user fraction", "log", "linear"),
    "fig3": ("CS transmit power (dBm)", "covered user fraction", "linear", "linear"),
    "fig4": ("rate target (bit/s)", "RIS elements for full coverage", "log", "log"),
    "fig5": ("RIS elements", "minimum UAV count", "log", "linear"),
}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
}


class SchemaError(ValueError):
    """CSV does not match the sweep schema; message names the column."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: str
    output_path: Path
    x_scale: str = ""
    y_scale: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")

    def scales(self) -> tuple[str, str]:
        _, _, xs, ys = _AXES[self.kind]
        return self.x_scale or xs, self.y_scale or ys


def _parse_rows(path: Path, kind: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty CSV: missing header row") from None
        for i, expected in enumerate(EXPECTED_COLUMNS):
            if i >= len(header) or header[i] != expected:
                got = header[i] if i < len(header) else "<missing>"
                raise SchemaError(
                    f"column {i + 1} must be '{expected}', found '{got}'"
                )
        if len(header) > len(EXPECTED_COLUMNS):
            raise SchemaError(f"unexpected extra column '{header[len(EXPECTED_COLUMNS)]}'")
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != len(EXPECTED_COLUMNS):
                raise SchemaError(f"line {line_no}: expected 8 fields, got {len(record)}")
            row = dict(zip(EXPECTED_COLUMNS, record))
            if row["sweep"] != kind:
                raise SchemaError(
                    f"column 'sweep': expected '{kind}', found '{row['sweep']}'"
                )
            try:
                rows.append(
                    {
                        "grid_value": float(row["grid_value"]),
                        "rate_target_bps": float(row["rate_target_bps"]),
                        "mean": float(row["mean"]),
                        "std": float(row["std"]),
                    }
                )
            except ValueError as exc:
                raise SchemaError(f"line {line_no}: non-numeric field ({exc})") from None
    if not rows:
        raise SchemaError("CSV has a header but no data rows")
    return rows


def _rate_label(rate_bps: float) -> str:
    if rate_bps >= 1e6:
        return f"{rate_bps / 1e6:g} Mbit/s"
    return f"{rate_bps / 1e3:g} kbit/s"


def build_figure(spec: FigureSpec) -> Figure:
    """Figure object for the CSV; render() saves it to disk."""
    rows = _parse_rows(Path(spec.input_csv), spec.kind)
    x_label, y_label, _, _ = _AXES[spec.kind]
    x_scale, y_scale = spec.scales()

    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        targets = sorted({r["rate_target_bps"] for r in rows})
        for rate in targets:
            series = sorted(
                (r for r in rows if r["rate_target_bps"] == rate),
                key=lambda r: r["grid_value"],
            )
            x = np.array([r["grid_value"] for r in series])
            mean = np.array([r["mean"] for r in series])
            std = np.array([r["std"] for r in series])
            style = "steps-post" if spec.kind == "fig5" else "default"
            ax.plot(x, mean, drawstyle=style, marker="o", markersize=3,
                    label=_rate_label(rate))
            ax.fill_between(
                x, mean - std, mean + std,
                step="post" if spec.kind == "fig5" else None, alpha=0.2,
            )
        ax.set_xscale(x_scale)
        ax.set_yscale(y_scale)
        ax.set_xlabel(x_label)
        ax.set_ylabel(y_label)
        if spec.kind == "fig5":
            ax.yaxis.set_major_locator(MaxNLocator(integer=True))
        ax.legend()
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure as PNG and return its path."""
    fig = build_figure(spec)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, format="png", metadata={"Software": "hapsplan-plots"})
    finally:
        plt.close(fig)
    return out
