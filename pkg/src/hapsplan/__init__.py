"""Hybrid aerial coverage planner.

Splits a circular service area between a RIS-backed high-altitude relay
(outer ring) and a fleet of hovering UAV base stations (inner zone), then
sizes both: the widest servable ring first, the fewest UAVs second.
"""

from .follower import FollowerSolution, solve_follower
from .leader import LeaderSolution, haps_only_coverage, min_elements_for_full_coverage, solve_leader
from .scenario import Scenario, default_scenario, load_scenario

__all__ = [
    "FollowerSolution",
    "LeaderSolution",
    "Scenario",
    "default_scenario",
    "haps_only_coverage",
    "load_scenario",
    "min_elements_for_full_coverage",
    "solve_follower",
    "solve_leader",
]

__version__ = "0.1.0"
