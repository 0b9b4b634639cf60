"""Coordinate types, random user placement, and zone partitioning.

The served region is a disc of radius ``radius_R0`` on the ground plane.
An inner circle of radius ``R`` splits it into the UAV zone (horizontal
distance <= R from the centre) and the outer HAPS-RIS ring (> R).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import rng_from


@dataclass(frozen=True)
class Position3:
    """Cartesian position in meters; ground plane is z = 0."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"Position3.{name} must be finite")

    def distance_to(self, other: "Position3") -> float:
        return math.sqrt(
            (self.x - other.x) ** 2
            + (self.y - other.y) ** 2
            + (self.z - other.z) ** 2
        )

    def horizontal_distance_to(self, other: "Position3") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class CoverageRegion:
    """Circular service area on the ground plane."""

    center: Position3
    radius_R0: float

    def __post_init__(self) -> None:
        if not (self.radius_R0 > 0):
            raise ValueError("radius_R0 must be > 0")


@dataclass(frozen=True)
class ZonePartition:
    """Split of the user set at boundary radius R.

    ``uav_zone_users`` holds indices at horizontal distance <= R from the
    region centre (ties go inward); ``haps_zone_users`` holds the rest.
    """

    boundary_R: float
    uav_zone_users: frozenset[int]
    haps_zone_users: frozenset[int]


def place_users(rng_seed: int, count: int, region: CoverageRegion) -> list[Position3]:
    """Draw ``count`` user positions, area-uniform over the region's disc.

    Radial coordinate uses the square-root transform so density is uniform
    per unit area. Deterministic for a fixed seed (PCG64).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = rng_from(rng_seed)
    radius = region.radius_R0 * np.sqrt(rng.random(count))
    angle = 2.0 * np.pi * rng.random(count)
    xs = region.center.x + radius * np.cos(angle)
    ys = region.center.y + radius * np.sin(angle)
    return [Position3(float(x), float(y), 0.0) for x, y in zip(xs, ys)]


def partition_zones(
    users: list[Position3], region: CoverageRegion, R: float
) -> ZonePartition:
    """Partition users at boundary radius R (inner disc inclusive)."""
    if not (0.0 <= R <= region.radius_R0):
        raise ValueError(
            f"boundary R={R} outside [0, {region.radius_R0}]"
        )
    inner = frozenset(
        i
        for i, u in enumerate(users)
        if u.horizontal_distance_to(region.center) <= R
    )
    outer = frozenset(range(len(users))) - inner
    return ZonePartition(boundary_R=R, uav_zone_users=inner, haps_zone_users=outer)
