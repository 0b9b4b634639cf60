"""Command-line entry point.

Subcommands:
    leader    solve the zone boundary and report ring coverage
    follower  solve the minimum UAV count for the inner zone
    plan      leader then follower (the full pipeline)
    sweep     run one of the fig2/fig3/fig4/fig5 Monte-Carlo sweeps

Exit codes: 0 success, 1 validation/usage error, 2 infeasible (with
diagnostics). With --json, stdout carries only the machine-readable
result; everything else goes to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .experiments import default_sweep_spec, default_workers, run_sweep, write_csv
from .follower import FollowerSolution, solve_follower
from .leader import LeaderSolution, solve_leader
from .scenario import (
    Scenario,
    ScenarioError,
    default_scenario,
    load_scenario,
    scenario_to_json_dict,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hapsplan", description=__doc__ and __doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, runs: bool = False) -> None:
        p.add_argument("--config", type=Path, help="scenario TOML (defaults apply)")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        p.add_argument(
            "--dump-allocation",
            action="store_true",
            help="write the RIS allocation to <out>/allocation.json",
        )
        if runs:
            p.add_argument("--runs", type=int, help="Monte-Carlo runs per grid point")
        p.add_argument(
            "--workers",
            type=int,
            default=default_workers(),
            help="parallel worker processes (default: hardware parallelism)",
        )

    for name in ("leader", "follower", "plan"):
        common(sub.add_parser(name))
    sweep = sub.add_parser("sweep")
    sweep.add_argument("figure", choices=("fig2", "fig3", "fig4", "fig5"))
    common(sweep, runs=True)
    return parser


def _load(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.config) if args.config else default_scenario()
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    return scenario


def _leader_dict(scenario: Scenario, lead: LeaderSolution) -> dict:
    return {
        "r_star_m": lead.r_star,
        "covered_count": lead.covered_count,
        "coverage_fraction": lead.coverage_fraction(scenario.user_count),
        "iterations_used": lead.iterations_used,
        "per_user_rate_bps": {str(u): r for u, r in sorted(lead.per_user_rate.items())},
    }


def _follower_dict(foll: FollowerSolution) -> dict:
    return {
        "n_star": foll.n_star,
        "feasible": foll.feasible,
        "uav_positions_m": [[p.x, p.y, p.z] for p in foll.deployment.uav_positions],
        "association": {str(u): j for u, j in sorted(foll.deployment.association.items())},
        "per_user_rate_bps": {str(u): r for u, r in sorted(foll.per_user_rate.items())},
    }


def _allocation_dict(lead: LeaderSolution) -> dict:
    alloc = lead.allocation
    return {
        "n_users": alloc.n_users,
        "total_elements": alloc.total_elements,
        "total_subcarriers": alloc.total_subcarriers,
        "cluster_size": alloc.cluster_size,
        "subcarriers_per_user": alloc.subcarriers_per_user,
        "elements_per_subcarrier": alloc.elements_per_subcarrier,
        "unassigned_elements": alloc.unassigned_elements,
        "unassigned_subcarriers": alloc.unassigned_subcarriers,
        "user_cluster": {str(u): c for u, c in sorted(alloc.user_cluster.items())},
        "user_subcarriers": {
            str(u): list(s) for u, s in sorted(alloc.user_subcarriers.items())
        },
    }


def _emit(payload: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _maybe_dump_allocation(args: argparse.Namespace, lead: LeaderSolution) -> None:
    if args.dump_allocation:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "allocation.json"
        path.write_text(
            json.dumps(_allocation_dict(lead), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"allocation written to {path}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = _load(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "sweep":
        runs = args.runs if args.runs else 500
        try:
            spec = default_sweep_spec(args.figure, scenario, runs_per_point=runs)
            result = run_sweep(args.figure, spec, workers=max(1, args.workers))
        except (ValueError, RuntimeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        path = write_csv(result, args.out)
        if args.json:
            print(json.dumps({"csv": str(path), "rows": len(result.rows)}))
        else:
            print(f"wrote {path} ({len(result.rows)} rows)")
        return EXIT_OK

    lead = solve_leader(scenario)
    _maybe_dump_allocation(args, lead)

    if args.command == "leader":
        payload = {
            "scenario": scenario_to_json_dict(scenario),
            "leader": _leader_dict(scenario, lead),
        }
        _emit(
            payload,
            args.json,
            [
                f"zone boundary R* = {lead.r_star:g} m",
                f"ring users served: {lead.covered_count}/{scenario.user_count}"
                f" ({lead.coverage_fraction(scenario.user_count):.1%})",
            ],
        )
        return EXIT_OK

    foll = solve_follower(scenario, lead)
    payload = {
        "scenario": scenario_to_json_dict(scenario),
        "leader": _leader_dict(scenario, lead),
        "follower": _follower_dict(foll),
    }
    text = [
        f"zone boundary R* = {lead.r_star:g} m",
        f"ring users served: {lead.covered_count}/{scenario.user_count}"
        f" ({lead.coverage_fraction(scenario.user_count):.1%})",
        f"UAVs required N* = {foll.n_star}" + ("" if foll.feasible else " (INFEASIBLE)"),
    ]
    if args.command == "follower":
        payload.pop("leader")
    _emit(payload, args.json, text)
    if not foll.feasible:
        print(
            "error: no feasible UAV deployment at the initial count; "
            "see per-user rates in the result",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
