"""Channel, path-loss, SNR/SINR and rate computations for both links.

Unit policy: all internal math is linear (watts, linear gains); dB and dBm
appear only at conversion boundaries. The reflected CS signal combines
coherently across the RIS elements that serve a subcarrier, so received
amplitude scales linearly (and SNR quadratically) with the element count.

Free-space losses follow the classic (4*pi*f*d/c)^2 law per hop; the
air-to-ground link adds an elevation-dependent mix of line-of-sight and
non-line-of-sight excess losses.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .geometry import Position3

if TYPE_CHECKING:  # pragma: no cover
    from .follower import UavDeployment

# Friis is a far-field model; link geometry below this is rejected.
MIN_LINK_DISTANCE_M = 1.0


# ---------------------------------------------------------------------------
# Unit conversions
# ---------------------------------------------------------------------------

def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(linear: float) -> float:
    if linear <= 0:
        raise ValueError("linear value must be > 0 to convert to dB")
    return 10.0 * math.log10(linear)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be > 0 W to convert to dBm")
    return 10.0 * math.log10(watts / 1e-3)


def noise_power_w(noise_psd_dbm_per_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power integrated over ``bandwidth_hz``."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be > 0")
    return dbm_to_watts(noise_psd_dbm_per_hz) * bandwidth_hz


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadioParams:
    """Shared radio-layer constants.

    The total band is split in half between the CS/HAPS-RIS network and the
    UAV network; each half carries ``total_subcarriers / 2`` subcarriers.
    ``snr_noise_bandwidth_hz`` is the bandwidth over which thermal noise is
    integrated in SNR/SINR denominators (defaults, at scenario level, to the
    half-band each network operates in).
    """

    carrier_hz: float
    wave_speed_mps: float
    total_bandwidth_hz: float
    total_subcarriers: int
    noise_psd_dbm_per_hz: float
    cs_power_dbm: float
    uav_power_dbm: float
    cs_antenna_gain_db: float
    user_antenna_gain_db: float
    uav_antenna_gain_db: float
    snr_noise_bandwidth_hz: float

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be > 0")
        if self.wave_speed_mps <= 0:
            raise ValueError("wave_speed_mps must be > 0")
        if self.total_bandwidth_hz <= 0:
            raise ValueError("total_bandwidth_hz must be > 0")
        if self.total_subcarriers < 2 or self.total_subcarriers % 2 != 0:
            raise ValueError("total_subcarriers must be even and >= 2")
        if self.snr_noise_bandwidth_hz <= 0:
            raise ValueError("snr_noise_bandwidth_hz must be > 0")
        for name in (
            "noise_psd_dbm_per_hz",
            "cs_power_dbm",
            "uav_power_dbm",
            "cs_antenna_gain_db",
            "user_antenna_gain_db",
            "uav_antenna_gain_db",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"RadioParams.{name} must be finite")

    @property
    def subcarrier_bandwidth_hz(self) -> float:
        return self.total_bandwidth_hz / self.total_subcarriers

    @property
    def cs_subcarriers(self) -> int:
        return self.total_subcarriers // 2

    @property
    def uav_subcarriers(self) -> int:
        return self.total_subcarriers // 2

    @property
    def cs_subcarrier_power_w(self) -> float:
        """CS power split uniformly across its half-band subcarriers."""
        return dbm_to_watts(self.cs_power_dbm) / self.cs_subcarriers

    @property
    def uav_power_w(self) -> float:
        return dbm_to_watts(self.uav_power_dbm)

    @property
    def snr_noise_power_w(self) -> float:
        return noise_power_w(self.noise_psd_dbm_per_hz, self.snr_noise_bandwidth_hz)


@dataclass(frozen=True)
class AtgParams:
    """Air-to-ground propagation constants (excess losses are linear)."""

    alpha: float
    eta_los: float
    eta_nlos: float
    psi: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if not (self.eta_nlos >= self.eta_los >= 1.0):
            raise ValueError("require eta_nlos >= eta_los >= 1")
        if self.psi <= 0:
            raise ValueError("psi must be > 0")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True)
class LinkGain:
    """Unitless linear amplitude of a channel (per RIS element for cascades)."""

    amplitude: float

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")


@dataclass(frozen=True)
class ReflectionCoefficient:
    """RIS element response: magnitude ``mu`` and the three phase terms."""

    mu: float
    ris_phase: float
    cs_side_phase: float
    user_side_phase: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.mu <= 1.0):
            raise ValueError("mu must be in [0, 1]")
        for name in ("ris_phase", "cs_side_phase", "user_side_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"ReflectionCoefficient.{name} must be finite")

    def value(self) -> complex:
        """mu * exp(-j(phi - xi - omega))."""
        return self.mu * cmath.exp(
            -1j * (self.ris_phase - self.cs_side_phase - self.user_side_phase)
        )


# ---------------------------------------------------------------------------
# CS -> RIS -> user link
# ---------------------------------------------------------------------------

def friis_path_loss(distance_m: float, radio: RadioParams) -> float:
    """Free-space power loss factor (4*pi*f*d/c)^2, linear."""
    if distance_m <= 0:
        raise ValueError("friis_path_loss: distance must be > 0")
    k = 4.0 * math.pi * radio.carrier_hz / radio.wave_speed_mps
    return (k * distance_m) ** 2


def cascade_amplitude(
    user: Position3, cs: Position3, haps: Position3, radio: RadioParams
) -> LinkGain:
    """Per-element amplitude of the CS -> RIS -> user cascade.

    The RIS aperture is small against the platform altitude, so every
    element sits at the platform position and all elements of a cluster
    share this amplitude.
    """
    d_cs_ris = cs.distance_to(haps)
    d_ris_user = haps.distance_to(user)
    for d, leg in ((d_cs_ris, "CS-RIS"), (d_ris_user, "RIS-user")):
        if d < MIN_LINK_DISTANCE_M:
            raise ValueError(
                f"cascade_amplitude: {leg} distance {d:.3g} m below "
                f"far-field minimum {MIN_LINK_DISTANCE_M} m"
            )
    loss = friis_path_loss(d_cs_ris, radio) * friis_path_loss(d_ris_user, radio)
    gains = db_to_linear(radio.cs_antenna_gain_db) * db_to_linear(
        radio.user_antenna_gain_db
    )
    return LinkGain(amplitude=math.sqrt(gains / loss))


def optimal_phase(cs_side_phase: float, user_side_phase: float) -> float:
    """Element phase that turns the reflection coefficient real-positive.

    Any 2*pi*k offset is equivalent; k = 0 is the canonical representative.
    """
    return cs_side_phase + user_side_phase


def haps_snr_per_subcarrier(
    user_amplitude: LinkGain,
    elements_on_subcarrier: int,
    mu: float,
    subcarrier_power_w: float,
    radio: RadioParams,
) -> float:
    """Linear SNR on one subcarrier with n phase-aligned elements.

    Coherent combining: received amplitude n * mu * |h|, hence
    SNR = P * (n * mu * |h|)^2 / N.
    """
    if elements_on_subcarrier < 0:
        raise ValueError("element count must be >= 0")
    if subcarrier_power_w <= 0:
        raise ValueError("subcarrier power must be > 0")
    if elements_on_subcarrier == 0:
        return 0.0
    amp = elements_on_subcarrier * mu * user_amplitude.amplitude
    return subcarrier_power_w * amp * amp / radio.snr_noise_power_w


def haps_user_rate(
    subcarrier_elements: Mapping[int, int],
    user_amplitude: LinkGain,
    mu: float,
    radio: RadioParams,
) -> float:
    """Shannon rate summed over the user's allocated CS subcarriers.

    ``subcarrier_elements`` maps subcarrier index (within the CS half-band)
    to the number of RIS elements serving that subcarrier.
    """
    p_l = radio.cs_subcarrier_power_w
    b_l = radio.subcarrier_bandwidth_hz
    rate = 0.0
    for sc, n_elems in subcarrier_elements.items():
        if not (0 <= sc < radio.cs_subcarriers):
            raise ValueError(
                f"subcarrier {sc} outside CS half-band [0, {radio.cs_subcarriers})"
            )
        snr = haps_snr_per_subcarrier(user_amplitude, n_elems, mu, p_l, radio)
        rate += b_l * math.log2(1.0 + snr)
    return rate


# ---------------------------------------------------------------------------
# UAV -> user link
# ---------------------------------------------------------------------------

def elevation_angle_deg(user: Position3, uav: Position3) -> float:
    """Elevation of the platform as seen from the user, in degrees."""
    d = user.distance_to(uav)
    if d <= 0:
        raise ValueError("elevation_angle_deg: coincident positions")
    return math.degrees(math.asin((uav.z - user.z) / d))


def los_probability(theta_deg: float, atg: AtgParams) -> float:
    """Sigmoid line-of-sight probability vs elevation angle."""
    return 1.0 / (1.0 + atg.psi * math.exp(-atg.beta * (theta_deg - atg.psi)))


def uav_avg_path_loss(
    user: Position3, uav: Position3, radio: RadioParams, atg: AtgParams
) -> float:
    """LoS/NLoS-averaged power loss of the air-to-ground link, linear."""
    d = user.distance_to(uav)
    if d < MIN_LINK_DISTANCE_M:
        raise ValueError(
            f"uav_avg_path_loss: distance {d:.3g} m below far-field minimum"
        )
    theta = elevation_angle_deg(user, uav)
    p_los = los_probability(theta, atg)
    k = 4.0 * math.pi * radio.carrier_hz / radio.wave_speed_mps
    fs = (k * d) ** atg.alpha
    return fs * (p_los * atg.eta_los + (1.0 - p_los) * atg.eta_nlos)


def uav_channel_gain(
    user: Position3, uav: Position3, radio: RadioParams, atg: AtgParams
) -> LinkGain:
    """Amplitude of the UAV-user channel: sqrt(G_uav * G_user / Lbar)."""
    gains = db_to_linear(radio.uav_antenna_gain_db) * db_to_linear(
        radio.user_antenna_gain_db
    )
    return LinkGain(amplitude=math.sqrt(gains / uav_avg_path_loss(user, uav, radio, atg)))


def uav_sinr(
    user: int,
    serving_uav: int,
    subcarrier: int,
    deployment: "UavDeployment",
    radio: RadioParams,
    atg: AtgParams,
) -> float:
    """Linear SINR of a user on one subcarrier of its serving UAV.

    Interference sums over every other UAV transmitting on the same
    subcarrier index, with that UAV's per-subcarrier power and its own
    channel gain to this user.
    """
    if deployment.association.get(user) != serving_uav:
        raise ValueError(f"user {user} is not served by UAV {serving_uav}")
    if subcarrier not in deployment.user_subcarriers[user]:
        raise ValueError(f"user {user} has no assignment on subcarrier {subcarrier}")
    pos = deployment.users[user]
    own = deployment.uav_subcarrier_power_w[serving_uav] * (
        uav_channel_gain(pos, deployment.uav_positions[serving_uav], radio, atg).amplitude
        ** 2
    )
    interference = 0.0
    for j, used in enumerate(deployment.uav_used_subcarriers):
        if j == serving_uav or subcarrier not in used:
            continue
        gain = uav_channel_gain(pos, deployment.uav_positions[j], radio, atg).amplitude
        interference += deployment.uav_subcarrier_power_w[j] * gain * gain
    return own / (radio.snr_noise_power_w + interference)


def uav_user_rate(
    user: int,
    deployment: "UavDeployment",
    radio: RadioParams,
    atg: AtgParams,
) -> float:
    """Shannon rate summed over the user's assigned UAV subcarriers."""
    j = deployment.association.get(user)
    if j is None:
        return 0.0
    b_l = radio.subcarrier_bandwidth_hz
    rate = 0.0
    for sc in deployment.user_subcarriers[user]:
        rate += b_l * math.log2(1.0 + uav_sinr(user, j, sc, deployment, radio, atg))
    return rate
