"""Monte-Carlo sweep harness emitting the four result tables as CSV.

Each grid point is evaluated over ``runs_per_point`` independent user
layouts; the per-run seed is a splitmix64 digest of (base seed, grid
index, run index), so results are deterministic, platform-stable, and
independent of worker scheduling. Rate-target curves within one figure
share per-run seeds, which makes cross-curve orderings comparable
run by run.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .follower import scan_uav_counts
from .geometry import partition_zones
from .leader import layout_for, min_elements_for_full_coverage, solve_leader
from .scenario import Scenario
from .seeding import TAG_SWEEP, derive_seed

Number = Union[int, float]

CSV_HEADER = "sweep,metric,grid_value,rate_target_bps,mean,std,runs,seed"

CSV_FILENAMES = {
    "fig2": "fig2_coverage_vs_M.csv",
    "fig3": "fig3_coverage_vs_P.csv",
    "fig4": "fig4_M_vs_rate.csv",
    "fig5": "fig5_N_vs_M.csv",
}

FIG2_ELEMENT_GRID = (50000, 100000, 200000, 350000, 500000, 750000, 1000000)
FIG3_POWER_GRID_DBM = (30.0, 32.0, 34.0, 36.0, 38.0, 40.0, 42.0, 44.0, 46.0)
FIG4_RATE_GRID_BPS = (32000.0, 64000.0, 128000.0, 256000.0, 512000.0, 1024000.0)
FIG5_ELEMENT_GRID = (
    100000, 177828, 316228, 562341, 1000000, 1778279, 3162278, 5623413, 10000000
)
COVERAGE_RATES_BPS = (64000.0, 128000.0, 256000.0)
UAV_RATES_BPS = (2000000.0, 4000000.0, 8000000.0)

_SWEPT_KINDS = ("element_count", "cs_power_dbm", "rate_target")


@dataclass(frozen=True)
class SweepSpec:
    swept: str
    grid: tuple[Number, ...]
    base: Scenario
    rate_targets: tuple[float, ...]
    runs_per_point: int
    base_seed: int

    def __post_init__(self) -> None:
        if self.swept not in _SWEPT_KINDS:
            raise ValueError(f"swept must be one of {_SWEPT_KINDS}")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if self.runs_per_point < 1:
            raise ValueError("runs_per_point must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    sweep: str
    metric: str
    grid_value: Number
    rate_target_bps: float
    mean: float
    std: float
    runs: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    sweep: str
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                ",".join(
                    (
                        r.sweep,
                        r.metric,
                        _fmt(r.grid_value),
                        _fmt(r.rate_target_bps),
                        _fmt(r.mean),
                        _fmt(r.std),
                        str(r.runs),
                        str(r.seed),
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def curve(self, rate_target_bps: float) -> list[SweepRow]:
        return [r for r in self.rows if r.rate_target_bps == rate_target_bps]


def _fmt(value: Number) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


def write_csv(result: SweepResult, out_dir: Union[str, Path]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / CSV_FILENAMES[result.sweep]
    path.write_text(result.to_csv(), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Per-run metric workers (top level: must pickle across processes)
# ---------------------------------------------------------------------------

def _coverage_run(task: tuple[int, int, int, tuple[Scenario, ...]]) -> tuple[int, int, list[float]]:
    gi, run, seed, scenarios = task
    try:
        values = [
            solve_leader(sc).coverage_fraction(sc.user_count) for sc in scenarios
        ]
    except Exception as exc:
        raise RuntimeError(f"sweep run failed (seed {seed}): {exc}") from exc
    return gi, run, values


def _min_elements_run(task: tuple[int, int, int, tuple[Scenario, ...]]) -> tuple[int, int, list[float]]:
    gi, run, seed, scenarios = task
    (scenario,) = scenarios
    try:
        m = min_elements_for_full_coverage(scenario, scenario.rate_target_bps)
    except Exception as exc:
        raise RuntimeError(f"sweep run failed (seed {seed}): {exc}") from exc
    if m is None:
        raise RuntimeError(f"min-element search hit its cap (seed {seed})")
    return gi, run, [float(m)]


def _uav_count_run(task: tuple[int, int, int, tuple[Scenario, ...]]) -> tuple[int, int, list[float]]:
    """Minimum UAV count per rate target, sharing the deployment scan.

    Deployments and their rates do not depend on the rate target, so
    scenarios that lead to the same inner-zone population reuse one scan.
    """
    gi, run, seed, scenarios = task
    values: list[float] = []
    scans: dict[tuple[int, ...], list] = {}
    try:
        for sc in scenarios:
            lead = solve_leader(sc)
            users = layout_for(sc)
            inner = partition_zones(users, sc.region, lead.r_star).uav_zone_users
            key = tuple(sorted(inner))
            if not key:
                values.append(0.0)
                continue
            if key not in scans:
                scans[key] = scan_uav_counts({i: users[i] for i in key}, sc)
            best = None
            for n, deployment, rates in scans[key]:
                if deployment is None:
                    continue
                if all(r >= sc.rate_target_bps for r in rates.values()):
                    best = n
            if best is None:
                raise RuntimeError("no feasible UAV deployment in the scan")
            values.append(float(best))
    except Exception as exc:
        raise RuntimeError(f"sweep run failed (seed {seed}): {exc}") from exc
    return gi, run, values


# ---------------------------------------------------------------------------
# Grid driver
# ---------------------------------------------------------------------------

def _scenario_at(spec: SweepSpec, grid_value: Number, rate: float, seed: int) -> Scenario:
    sc = spec.base.with_seed(seed).with_rate_target(rate)
    if spec.swept == "element_count":
        return sc.with_elements(int(grid_value))
    if spec.swept == "cs_power_dbm":
        return sc.with_cs_power(float(grid_value))
    return sc  # rate_target: already applied


def raw_metric_values(
    spec: SweepSpec,
    run_fn: Callable[[tuple], tuple[int, int, list[float]]],
    rates_for_rows: Sequence[float],
    workers: int,
) -> dict[tuple[int, int], list[float]]:
    """Per-(grid index, run index) metric values, one entry per rate target.

    Scheduling-order independent: results are keyed, not appended.
    """
    tasks = []
    for gi, gval in enumerate(spec.grid):
        for run in range(spec.runs_per_point):
            seed = derive_seed(spec.base_seed, TAG_SWEEP, gi, run)
            scenarios = tuple(
                _scenario_at(spec, gval, rate, seed) for rate in rates_for_rows
            )
            tasks.append((gi, run, seed, scenarios))

    results: dict[tuple[int, int], list[float]] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for gi, run, values in pool.map(run_fn, tasks, chunksize=8):
                results[(gi, run)] = values
    else:
        for task in tasks:
            gi, run, values = run_fn(task)
            results[(gi, run)] = values
    return results


def _run_grid(
    spec: SweepSpec,
    sweep_name: str,
    metric: str,
    run_fn: Callable[[tuple], tuple[int, int, list[float]]],
    rates_for_rows: Sequence[float],
    workers: int,
) -> SweepResult:
    results = raw_metric_values(spec, run_fn, rates_for_rows, workers)
    rows = []
    for gi, gval in enumerate(spec.grid):
        per_rate = np.array(
            [results[(gi, run)] for run in range(spec.runs_per_point)]
        )  # shape (runs, n_rates)
        for ri, rate in enumerate(rates_for_rows):
            col = per_rate[:, ri]
            rows.append(
                SweepRow(
                    sweep=sweep_name,
                    metric=metric,
                    grid_value=gval,
                    rate_target_bps=float(rate),
                    mean=float(col.mean()),
                    std=float(col.std()),
                    runs=spec.runs_per_point,
                    seed=spec.base_seed,
                )
            )
    return SweepResult(sweep=sweep_name, rows=tuple(rows))


def coverage_vs_elements(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Ring coverage fraction vs RIS element count, one curve per rate."""
    return _run_grid(spec, "fig2", "coverage", _coverage_run, spec.rate_targets, workers)


def coverage_vs_power(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Ring coverage fraction vs CS transmit power, one curve per rate."""
    return _run_grid(spec, "fig3", "coverage", _coverage_run, spec.rate_targets, workers)


def elements_vs_rate(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Minimum element count for full ring coverage vs rate target."""
    return _run_grid_rate_swept(spec, workers)


def _run_grid_rate_swept(spec: SweepSpec, workers: int) -> SweepResult:
    tasks = []
    for gi, r0 in enumerate(spec.grid):
        for run in range(spec.runs_per_point):
            seed = derive_seed(spec.base_seed, TAG_SWEEP, gi, run)
            scenario = spec.base.with_seed(seed).with_rate_target(float(r0))
            tasks.append((gi, run, seed, (scenario,)))
    results: dict[tuple[int, int], list[float]] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for gi, run, values in pool.map(_min_elements_run, tasks, chunksize=4):
                results[(gi, run)] = values
    else:
        for task in tasks:
            gi, run, values = _min_elements_run(task)
            results[(gi, run)] = values
    rows = []
    for gi, r0 in enumerate(spec.grid):
        col = np.array([results[(gi, run)][0] for run in range(spec.runs_per_point)])
        rows.append(
            SweepRow(
                sweep="fig4",
                metric="min_elements",
                grid_value=r0,
                rate_target_bps=float(r0),
                mean=float(col.mean()),
                std=float(col.std()),
                runs=spec.runs_per_point,
                seed=spec.base_seed,
            )
        )
    return SweepResult(sweep="fig4", rows=tuple(rows))


def uavs_vs_elements(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Minimum UAV count vs RIS element count, one curve per rate."""
    return _run_grid(spec, "fig5", "min_uavs", _uav_count_run, spec.rate_targets, workers)


def default_sweep_spec(
    kind: str,
    base: Scenario,
    runs_per_point: int = 500,
    base_seed: int | None = None,
) -> SweepSpec:
    """The stock grids for the four figures."""
    seed = base.seed if base_seed is None else base_seed
    if kind == "fig2":
        return SweepSpec(
            swept="element_count",
            grid=FIG2_ELEMENT_GRID,
            base=base,
            rate_targets=COVERAGE_RATES_BPS,
            runs_per_point=runs_per_point,
            base_seed=seed,
        )
    if kind == "fig3":
        return SweepSpec(
            swept="cs_power_dbm",
            grid=FIG3_POWER_GRID_DBM,
            base=base,
            rate_targets=COVERAGE_RATES_BPS,
            runs_per_point=runs_per_point,
            base_seed=seed,
        )
    if kind == "fig4":
        return SweepSpec(
            swept="rate_target",
            grid=FIG4_RATE_GRID_BPS,
            base=base,
            rate_targets=(),
            runs_per_point=runs_per_point,
            base_seed=seed,
        )
    if kind == "fig5":
        return SweepSpec(
            swept="element_count",
            grid=FIG5_ELEMENT_GRID,
            base=base,
            rate_targets=UAV_RATES_BPS,
            runs_per_point=runs_per_point,
            base_seed=seed,
        )
    raise ValueError(f"unknown sweep kind {kind!r}")


def run_sweep(kind: str, spec: SweepSpec, workers: int = 1) -> SweepResult:
    fn = {
        "fig2": coverage_vs_elements,
        "fig3": coverage_vs_power,
        "fig4": elements_vs_rate,
        "fig5": uavs_vs_elements,
    }.get(kind)
    if fn is None:
        raise ValueError(f"unknown sweep kind {kind!r}")
    return fn(spec, workers=workers)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
