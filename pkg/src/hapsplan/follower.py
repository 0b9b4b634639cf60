"""Minimum-UAV solver for the inner zone.

UAV count starts at its ceiling and decreases stepwise; at each count the
inner-zone users are clustered with k-means, one hovering UAV is placed
over each centroid, subcarriers are dealt orthogonally inside each cell,
and per-user rates (with cross-cell co-channel interference) decide
feasibility. Co-channel reuse makes feasibility non-monotone in the UAV
count, so the whole descending range is scanned and the smallest feasible
count wins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Position3, partition_zones
from .leader import LeaderSolution, layout_for
from .linkbudget import db_to_linear, dbm_to_watts
from .scenario import Scenario
from .seeding import TAG_KMEANS, derive_seed, rng_from


class SubcarrierInfeasible(Exception):
    """A cell holds more users than there are subcarriers."""


@dataclass(frozen=True)
class UavDeployment:
    """Hovering UAV positions plus the user/subcarrier bookkeeping.

    ``uav_used_subcarriers[j]`` is the contiguous block {0..n-1} that cell j
    transmits on; reuse across cells is what creates interference.
    """

    uav_positions: tuple[Position3, ...]
    association: dict[int, int]
    user_subcarriers: dict[int, tuple[int, ...]]
    uav_used_subcarriers: tuple[frozenset[int], ...]
    uav_subcarrier_power_w: tuple[float, ...]
    users: dict[int, Position3]

    def orthogonality_ok(self) -> bool:
        """Within each UAV, every subcarrier serves at most one user."""
        seen: set[tuple[int, int]] = set()
        for user, subs in self.user_subcarriers.items():
            j = self.association[user]
            for sc in subs:
                if (j, sc) in seen:
                    return False
                seen.add((j, sc))
        return True


EMPTY_DEPLOYMENT = UavDeployment(
    uav_positions=(),
    association={},
    user_subcarriers={},
    uav_used_subcarriers=(),
    uav_subcarrier_power_w=(),
    users={},
)


@dataclass(frozen=True)
class FollowerSolution:
    n_star: int
    deployment: UavDeployment
    per_user_rate: dict[int, float]
    feasible: bool


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------

def _wcss(points: np.ndarray, centroids: np.ndarray, assignment: np.ndarray) -> float:
    return float(((points - centroids[assignment]) ** 2).sum())


def _kmeans_once(
    points: np.ndarray, k: int, rng: np.random.Generator, max_iters: int
) -> tuple[np.ndarray, np.ndarray]:
    n = len(points)
    # k-means++ seeding
    centroids = np.empty((k, 2))
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centroids[c:] = points[rng.integers(n, size=k - c)]
            break
        probs = d2 / total
        centroids[c] = points[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, ((points - centroids[c]) ** 2).sum(axis=1))

    assignment = np.full(n, -1)
    for _ in range(max_iters):
        dists = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = dists.argmin(axis=1)
        counts = np.bincount(new_assignment, minlength=k)
        # re-home the farthest point into each empty cell
        moved: set[int] = set()
        for c in np.flatnonzero(counts == 0):
            own = dists[np.arange(n), new_assignment].copy()
            if moved:
                own[list(moved)] = -1.0
            far = int(own.argmax())
            new_assignment[far] = c
            moved.add(far)
        if moved:
            counts = np.bincount(new_assignment, minlength=k)
        sums = np.zeros((k, 2))
        np.add.at(sums, new_assignment, points)
        centroids = sums / counts[:, None]
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return centroids, assignment


def kmeans_cluster(
    points: np.ndarray,
    k: int,
    rng_seed: int,
    n_restarts: int = 10,
    max_iters: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Best-of-restarts Lloyd clustering of 2-D points.

    Returns (centroids (k,2), assignment (n,)). Deterministic for a fixed
    seed; restarts draw independent sub-seeds and the lowest
    within-cluster sum of squares wins.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) == 0:
        raise ValueError("points must be a nonempty (n, 2) array")
    if not (1 <= k <= len(points)):
        raise ValueError(f"k={k} outside [1, {len(points)}]")
    if k == 1:
        return points.mean(axis=0, keepdims=True), np.zeros(len(points), dtype=int)
    if k == len(points):
        return points.copy(), np.arange(len(points))
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for r in range(n_restarts):
        rng = rng_from(rng_seed, TAG_KMEANS, r)
        centroids, assignment = _kmeans_once(points, k, rng, max_iters)
        score = _wcss(points, centroids, assignment)
        if best is None or score < best[0]:
            best = (score, centroids, assignment)
    assert best is not None
    return best[1], best[2]


# ---------------------------------------------------------------------------
# Subcarrier assignment
# ---------------------------------------------------------------------------

def assign_subcarriers(
    association: dict[int, int], n_uavs: int, uav_subcarriers: int
) -> dict[int, tuple[int, ...]]:
    """Deal each cell's subcarriers round-robin from index 0.

    Users of one UAV get disjoint sets of floor(L / cell_size) indices;
    every cell reuses indices starting at 0, the worst case for
    cross-cell interference.
    """
    per_cell: dict[int, list[int]] = {j: [] for j in range(n_uavs)}
    for user in sorted(association):
        per_cell[association[user]].append(user)
    result: dict[int, tuple[int, ...]] = {}
    for j, members in per_cell.items():
        size = len(members)
        if size == 0:
            continue
        if size > uav_subcarriers:
            raise SubcarrierInfeasible(
                f"UAV {j} has {size} users but only {uav_subcarriers} subcarriers"
            )
        quota = uav_subcarriers // size
        for rank, user in enumerate(members):
            result[user] = tuple(rank + t * size for t in range(quota))
    return result


# ---------------------------------------------------------------------------
# Feasibility and the descending scan
# ---------------------------------------------------------------------------

def _deployment_rates(
    deployment: UavDeployment, scenario: Scenario
) -> dict[int, float]:
    """Vectorized per-user rates including co-channel interference."""
    users = sorted(deployment.users)
    if not users:
        return {}
    radio = scenario.radio
    atg = scenario.atg
    pos = np.array([[deployment.users[u].x, deployment.users[u].y] for u in users])
    uxy = np.array([[p.x, p.y] for p in deployment.uav_positions])
    alt = np.array([p.z for p in deployment.uav_positions])

    d = np.sqrt(((pos[:, None, :] - uxy[None, :, :]) ** 2).sum(axis=2) + alt**2)
    theta = np.degrees(np.arcsin(alt / d))
    p_los = 1.0 / (1.0 + atg.psi * np.exp(-atg.beta * (theta - atg.psi)))
    k = 4.0 * math.pi * radio.carrier_hz / radio.wave_speed_mps
    lbar = (k * d) ** atg.alpha * (p_los * atg.eta_los + (1.0 - p_los) * atg.eta_nlos)
    gains = db_to_linear(radio.uav_antenna_gain_db) * db_to_linear(
        radio.user_antenna_gain_db
    )
    rx = gains / lbar * np.asarray(deployment.uav_subcarrier_power_w)[None, :]

    used_count = np.array(
        [len(s) for s in deployment.uav_used_subcarriers], dtype=int
    )
    noise = radio.snr_noise_power_w
    b_l = radio.subcarrier_bandwidth_hz
    rates: dict[int, float] = {}
    for row, user in enumerate(users):
        j = deployment.association[user]
        subs = np.asarray(deployment.user_subcarriers[user])
        # active[j'] on subcarrier l  <=>  used_count[j'] > l (contiguous use)
        active = used_count[None, :] > subs[:, None]
        interference = active @ rx[row] - rx[row, j]
        sinr = rx[row, j] / (noise + interference)
        rates[user] = float(b_l * np.log2(1.0 + sinr).sum())
    return rates


def build_deployment(
    n_uavs: int,
    b_users: dict[int, Position3],
    scenario: Scenario,
    rng_seed: int,
) -> UavDeployment | None:
    """Cluster, place and assign for one candidate UAV count.

    Returns None when some cell would outgrow the half-band (pigeonhole).
    The result is independent of the rate target.
    """
    if n_uavs < 1:
        raise ValueError("n_uavs must be >= 1 for a nonempty zone")
    order = sorted(b_users)
    points = np.array([[b_users[u].x, b_users[u].y] for u in order])
    centroids, labels = kmeans_cluster(
        points,
        n_uavs,
        rng_seed,
        n_restarts=scenario.follower_kmeans_restarts,
        max_iters=scenario.follower_kmeans_max_iters,
    )
    association = {u: int(c) for u, c in zip(order, labels)}
    try:
        user_subcarriers = assign_subcarriers(
            association, n_uavs, scenario.radio.uav_subcarriers
        )
    except SubcarrierInfeasible:
        return None

    cell_sizes = [0] * n_uavs
    for u in order:
        cell_sizes[association[u]] += 1
    used, powers = [], []
    p_total = dbm_to_watts(scenario.radio.uav_power_dbm)
    for j in range(n_uavs):
        if cell_sizes[j] == 0:
            used.append(frozenset())
            powers.append(0.0)
            continue
        count = (scenario.radio.uav_subcarriers // cell_sizes[j]) * cell_sizes[j]
        used.append(frozenset(range(count)))
        powers.append(p_total / count)

    deployment = UavDeployment(
        uav_positions=tuple(
            Position3(float(x), float(y), scenario.uav_altitude_m) for x, y in centroids
        ),
        association=association,
        user_subcarriers=user_subcarriers,
        uav_used_subcarriers=tuple(used),
        uav_subcarrier_power_w=tuple(powers),
        users=dict(b_users),
    )
    assert deployment.orthogonality_ok()  # structural: disjoint deal per cell
    return deployment


def check_feasible(
    n_uavs: int,
    b_users: dict[int, Position3],
    scenario: Scenario,
    rng_seed: int,
) -> tuple[bool, UavDeployment, dict[int, float]]:
    """Cluster, place, assign, and rate-check one candidate UAV count."""
    if not b_users:
        return True, EMPTY_DEPLOYMENT, {}
    deployment = build_deployment(n_uavs, b_users, scenario, rng_seed)
    if deployment is None:
        return False, EMPTY_DEPLOYMENT, {}
    rates = _deployment_rates(deployment, scenario)
    ok = all(r >= scenario.rate_target_bps for r in rates.values())
    return ok, deployment, rates


def scan_uav_counts(
    b_users: dict[int, Position3], scenario: Scenario
) -> list[tuple[int, UavDeployment | None, dict[int, float]]]:
    """Deployments and rates for every count in the descending scan.

    Rates do not depend on the rate target, so one scan can be reused to
    answer feasibility for several targets (the sweep harness does).
    """
    out: list[tuple[int, UavDeployment | None, dict[int, float]]] = []
    if not b_users:
        return out
    n = initial_uav_count(scenario, len(b_users))
    while n >= 1:
        deployment = build_deployment(
            n, b_users, scenario, derive_seed(scenario.seed, TAG_KMEANS, n)
        )
        rates = {} if deployment is None else _deployment_rates(deployment, scenario)
        out.append((n, deployment, rates))
        n -= scenario.follower_delta_prime
    return out


def initial_uav_count(scenario: Scenario, n_zone_users: int) -> int:
    """Scan start: never more UAVs than users or than the half-band size."""
    cap = min(n_zone_users, scenario.radio.uav_subcarriers)
    policy = scenario.uav_initial_count_policy
    if policy == "auto":
        return cap
    return min(int(policy), cap)


def solve_follower(scenario: Scenario, leader_solution: LeaderSolution) -> FollowerSolution:
    """Descending scan over UAV counts for the leader's inner zone.

    Every count from the ceiling down to 1 is evaluated (interference can
    make mid-range counts fail while smaller ones succeed); the smallest
    feasible count and its deployment are returned. When no count is
    feasible the result carries the initial-count draft as diagnostics.
    """
    users = layout_for(scenario)
    inner = partition_zones(users, scenario.region, leader_solution.r_star).uav_zone_users
    b_users = {i: users[i] for i in sorted(inner)}
    if not b_users:
        return FollowerSolution(
            n_star=0, deployment=EMPTY_DEPLOYMENT, per_user_rate={}, feasible=True
        )
    n0 = initial_uav_count(scenario, len(b_users))
    scan = scan_uav_counts(b_users, scenario)
    best: tuple[int, UavDeployment, dict[int, float]] | None = None
    for n, deployment, rates in scan:
        if deployment is None:
            continue
        if all(r >= scenario.rate_target_bps for r in rates.values()):
            best = (n, deployment, rates)
    if best is None:
        draft, rates = (EMPTY_DEPLOYMENT, {})
        if scan and scan[0][1] is not None:
            draft, rates = scan[0][1], scan[0][2]
        return FollowerSolution(
            n_star=n0, deployment=draft, per_user_rate=rates, feasible=False
        )
    return FollowerSolution(
        n_star=best[0], deployment=best[1], per_user_rate=best[2], feasible=True
    )
