"""Zone-boundary solver: smallest inner radius whose outer ring is servable.

The boundary shrinks from the region radius in fixed steps. At each step
the outer-ring users get a fresh RIS allocation and their rates are
evaluated; the scan keeps the last radius at which every ring user meets
the rate target and stops at the first failure. Shrinking the boundary
monotonically grows the ring, so the stop point maximizes the served ring
population for the given resources.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Position3, partition_zones, place_users
from .linkbudget import LinkGain, cascade_amplitude, haps_user_rate
from .ris_alloc import AllocationInfeasible, RisAllocation, build_allocation
from .scenario import Scenario
from .seeding import TAG_ALLOCATION, TAG_LAYOUT, derive_seed

# Search ceiling for the full-coverage element search.
ELEMENT_SEARCH_CAP = 10**9
BISECTION_STEPS = 20


@dataclass(frozen=True)
class LeaderSolution:
    r_star: float
    allocation: RisAllocation
    per_user_rate: dict[int, float]
    covered_count: int
    iterations_used: int

    def coverage_fraction(self, user_count: int) -> float:
        return self.covered_count / user_count


def layout_for(scenario: Scenario) -> list[Position3]:
    """The scenario's user layout (deterministic in the scenario seed)."""
    return place_users(
        derive_seed(scenario.seed, TAG_LAYOUT), scenario.user_count, scenario.region
    )


def _ring_rates(
    amplitudes: dict[int, float],
    allocation: RisAllocation,
    scenario: Scenario,
) -> dict[int, float]:
    """Per-user rate over the user's subcarrier block, closed form.

    With phase-aligned elements each subcarrier carries n coherently
    combined contributions: rate = L_user * B_l * log2(1 + P_l (n mu |h|)^2 / N).
    """
    radio = scenario.radio
    p_l = radio.cs_subcarrier_power_w
    b_l = radio.subcarrier_bandwidth_hz
    noise = radio.snr_noise_power_w
    n = allocation.elements_per_subcarrier
    mu = scenario.ris_mu
    rates = {}
    for user in allocation.user_subcarriers:
        amp = n * mu * amplitudes[user]
        snr = p_l * amp * amp / noise
        rates[user] = allocation.subcarriers_per_user * b_l * math.log2(1.0 + snr)
    return rates


def solve_leader(scenario: Scenario, users: list[Position3] | None = None) -> LeaderSolution:
    """Scan the boundary grid and return the widest feasible outer ring."""
    if users is None:
        users = layout_for(scenario)
    radio = scenario.radio
    amplitudes = {
        i: cascade_amplitude(u, scenario.cs_position, scenario.haps_position, radio).amplitude
        for i, u in enumerate(users)
    }
    r0 = scenario.region.radius_R0
    delta = scenario.leader_delta_m

    best_r = r0
    best_alloc = build_allocation(frozenset(), scenario.ris_element_count,
                                  radio.cs_subcarriers, scenario.seed)
    best_rates: dict[int, float] = {}
    iterations = 0
    for t in range(1, scenario.leader_max_iters + 1):
        r_t = r0 - t * delta
        if r_t < 0:
            break
        iterations = t
        ring = partition_zones(users, scenario.region, r_t).haps_zone_users
        if not ring:
            best_r, best_rates = r_t, {}
            best_alloc = build_allocation(
                frozenset(), scenario.ris_element_count, radio.cs_subcarriers,
                scenario.seed)
            continue
        try:
            alloc = build_allocation(
                ring,
                scenario.ris_element_count,
                radio.cs_subcarriers,
                derive_seed(scenario.seed, TAG_ALLOCATION, t),
            )
        except AllocationInfeasible:
            break
        rates = _ring_rates(amplitudes, alloc, scenario)
        if all(r >= scenario.rate_target_bps for r in rates.values()):
            best_r, best_alloc, best_rates = r_t, alloc, rates
        else:
            break

    covered = len(partition_zones(users, scenario.region, best_r).haps_zone_users)
    return LeaderSolution(
        r_star=best_r,
        allocation=best_alloc,
        per_user_rate=best_rates,
        covered_count=covered,
        iterations_used=iterations,
    )


def haps_only_coverage(scenario: Scenario) -> float:
    """Fraction of users servable by the HAPS-RIS ring alone."""
    return solve_leader(scenario).coverage_fraction(scenario.user_count)


def recheck_rates(
    scenario: Scenario,
    solution: LeaderSolution,
    users: list[Position3] | None = None,
) -> dict[int, float]:
    """Independent re-evaluation of the returned ring rates.

    Goes through the per-subcarrier link-budget functions instead of the
    solver's closed form; used to audit every returned solution.
    """
    if users is None:
        users = layout_for(scenario)
    rates = {}
    for user in solution.allocation.user_subcarriers:
        amp: LinkGain = cascade_amplitude(
            users[user], scenario.cs_position, scenario.haps_position, scenario.radio
        )
        rates[user] = haps_user_rate(
            solution.allocation.subcarrier_elements(user),
            amp,
            scenario.ris_mu,
            scenario.radio,
        )
    return rates


def min_elements_for_full_coverage(scenario: Scenario, rate_target_bps: float) -> int | None:
    """Smallest element count for which the ring swallows the whole disc.

    Doubles from the user count up to the search cap, then bisects.
    Returns None when full coverage is unreachable at the cap.
    """
    if rate_target_bps <= 0:
        raise ValueError("rate target must be > 0")
    base = scenario.with_rate_target(rate_target_bps)
    users = layout_for(base)

    def full(m: int) -> bool:
        return solve_leader(base.with_elements(m), users).r_star == 0.0

    lo = None
    m = max(base.user_count, 1)
    while m <= ELEMENT_SEARCH_CAP:
        if full(m):
            break
        lo = m
        m *= 2
    else:
        return None
    hi = m
    if lo is None:
        return hi
    for _ in range(BISECTION_STEPS):
        if hi - lo <= 1:
            break
        mid = (lo + hi) // 2
        if full(mid):
            hi = mid
        else:
            lo = mid
    return hi
