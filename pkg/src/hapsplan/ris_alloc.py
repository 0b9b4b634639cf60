"""RIS cluster and subcarrier allocation for the HAPS-RIS zone.

Every user in the outer zone receives its own RIS cluster of
floor(M / |C|) elements and a private block of floor(L_cs / |C|)
subcarriers; inside a cluster the elements split into equal per-subcarrier
subgroups. Floor remainders stay idle. Users are matched to clusters by a
uniformly random injection; with the collapsed RIS geometry this choice
does not affect rates, but it is kept for fidelity and for unrelaxed
channel models.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .seeding import rng_from


class AllocationInfeasible(Exception):
    """Raised when some zone user would receive zero elements or subcarriers."""


@dataclass(frozen=True)
class RisAllocation:
    """Resource map for one HAPS-RIS zone population.

    ``user_cluster`` maps user index -> cluster id (a random injection into
    range(n_users)); ``user_subcarriers`` maps user index -> its block of
    subcarrier indices within the CS half-band.
    """

    n_users: int
    total_elements: int
    total_subcarriers: int
    cluster_size: int
    subcarriers_per_user: int
    elements_per_subcarrier: int
    user_cluster: dict[int, int] = field(default_factory=dict)
    user_subcarriers: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def unassigned_elements(self) -> int:
        """Global floor remainder left outside all clusters."""
        return self.total_elements - self.n_users * self.cluster_size

    @property
    def unassigned_subcarriers(self) -> int:
        return self.total_subcarriers - self.n_users * self.subcarriers_per_user

    @property
    def idle_elements_per_cluster(self) -> int:
        """Cluster elements not attached to any subcarrier subgroup."""
        return self.cluster_size - self.subcarriers_per_user * self.elements_per_subcarrier

    def subcarrier_elements(self, user: int) -> dict[int, int]:
        """Per-subcarrier serving element counts for one user."""
        return {sc: self.elements_per_subcarrier for sc in self.user_subcarriers[user]}


def build_allocation(
    haps_zone_users: frozenset[int] | set[int],
    element_count: int,
    cs_subcarriers: int,
    rng_seed: int,
) -> RisAllocation:
    """Construct the cluster/subcarrier map for the given zone population.

    An empty population yields a valid empty allocation (full-UAV coverage).
    Raises AllocationInfeasible when users outnumber elements or subcarriers.
    """
    users = sorted(haps_zone_users)
    n = len(users)
    if n == 0:
        return RisAllocation(
            n_users=0,
            total_elements=element_count,
            total_subcarriers=cs_subcarriers,
            cluster_size=0,
            subcarriers_per_user=0,
            elements_per_subcarrier=0,
        )
    if element_count < n:
        raise AllocationInfeasible(
            f"{n} zone users but only {element_count} RIS elements"
        )
    if cs_subcarriers < n:
        raise AllocationInfeasible(
            f"{n} zone users but only {cs_subcarriers} CS subcarriers"
        )
    cluster_size = element_count // n
    subs_per_user = cs_subcarriers // n
    per_subcarrier = cluster_size // subs_per_user

    rng = rng_from(rng_seed)
    cluster_ids = rng.permutation(n)
    user_cluster = {u: int(c) for u, c in zip(users, cluster_ids)}
    user_subcarriers = {
        u: tuple(range(k * subs_per_user, (k + 1) * subs_per_user))
        for k, u in enumerate(users)
    }
    return RisAllocation(
        n_users=n,
        total_elements=element_count,
        total_subcarriers=cs_subcarriers,
        cluster_size=cluster_size,
        subcarriers_per_user=subs_per_user,
        elements_per_subcarrier=per_subcarrier,
        user_cluster=user_cluster,
        user_subcarriers=user_subcarriers,
    )
