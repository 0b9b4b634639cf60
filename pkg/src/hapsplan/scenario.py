"""Scenario record: the single validated input to every solver and sweep.

Scenarios are human-editable TOML with nested sections. Every key has a
default matching the reference simulation setup, so an empty file is a
valid scenario. Unknown keys are rejected; validation errors name the
offending field.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Union

if sys.version_info >= (3, 11):  # pragma: no cover
    import tomllib
else:
    import tomli as tomllib

from .geometry import CoverageRegion, Position3
from .linkbudget import AtgParams, RadioParams


class ScenarioError(ValueError):
    """Invalid scenario input; message names the field and constraint."""


@dataclass(frozen=True)
class Scenario:
    seed: int
    user_count: int
    region: CoverageRegion
    cs_position: Position3
    haps_position: Position3
    radio: RadioParams
    atg: AtgParams
    ris_element_count: int
    ris_mu: float
    rate_target_bps: float
    uav_altitude_m: float
    uav_initial_count_policy: Union[str, int]
    leader_delta_m: float
    leader_max_iters: int
    follower_kmeans_restarts: int
    follower_kmeans_max_iters: int
    follower_delta_prime: int

    def with_elements(self, element_count: int) -> "Scenario":
        return replace(self, ris_element_count=element_count)

    def with_rate_target(self, rate_bps: float) -> "Scenario":
        return replace(self, rate_target_bps=rate_bps)

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    def with_cs_power(self, cs_power_dbm: float) -> "Scenario":
        return replace(self, radio=replace(self.radio, cs_power_dbm=cs_power_dbm))


# Reference setup: 20 users uniform in a 500 m disc, CS 10 km out, platform
# at 20 km altitude, 100 MHz split into 64 subcarriers across two networks.
_DEFAULTS: dict[str, dict[str, Any]] = {
    "": {
        "seed": 1,
        "user_count": 20,
        "rate_target_bps": 64000.0,
    },
    "region": {
        "center_x_m": 0.0,
        "center_y_m": 0.0,
        "radius_m": 500.0,
    },
    "cs": {"x_m": -10000.0, "y_m": 0.0, "z_m": 1000.0},
    "haps": {"x_m": -5000.0, "y_m": 100.0, "z_m": 20000.0},
    "radio": {
        "carrier_hz": 2.0e9,
        "wave_speed_mps": 3.0e8,
        "total_bandwidth_hz": 1.0e8,
        "total_subcarriers": 64,
        "noise_psd_dbm_per_hz": -174.0,
        "cs_power_dbm": 40.0,
        "uav_power_dbm": 20.0,
        "cs_antenna_gain_db": 43.2,
        "user_antenna_gain_db": 0.0,
        "uav_antenna_gain_db": 0.0,
        # noise integration bandwidth; 0.0 means "half of the total band"
        "snr_noise_bandwidth_hz": 0.0,
    },
    "atg": {
        "alpha": 2.0,
        "eta_los": 1.0,
        "eta_nlos": 31.0,
        "psi": 5.0,
        "beta": 0.5,
    },
    "ris": {"element_count": 350000, "mu": 1.0},
    "uav": {"altitude_m": 100.0, "initial_count_policy": "auto"},
    "leader": {"delta_m": 50.0, "max_iters": 0},
    "follower": {
        "kmeans_restarts": 10,
        "kmeans_max_iters": 100,
        "delta_prime": 1,
    },
}


def _merge(data: dict[str, Any]) -> dict[str, dict[str, Any]]:
    """Overlay file data onto the defaults, rejecting unknown keys."""
    merged = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}
    for key, value in data.items():
        if isinstance(value, dict):
            if key not in merged or key == "":
                raise ScenarioError(f"unknown section [{key}]")
            for sub, subval in value.items():
                if sub not in merged[key]:
                    raise ScenarioError(f"unknown key {key}.{sub}")
                merged[key][sub] = subval
        else:
            if key not in merged[""]:
                raise ScenarioError(f"unknown key {key}")
            merged[""][key] = value
    return merged


def _num(merged: dict, section: str, key: str) -> float:
    value = merged[section][key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{_path(section, key)} must be a number")
    return float(value)


def _int(merged: dict, section: str, key: str) -> int:
    value = merged[section][key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{_path(section, key)} must be an integer")
    return value


def _path(section: str, key: str) -> str:
    return f"{section}.{key}" if section else key


def _require(cond: bool, section: str, key: str, constraint: str) -> None:
    if not cond:
        raise ScenarioError(f"{_path(section, key)} {constraint}")


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    merged = _merge(data)

    seed = _int(merged, "", "seed")
    _require(seed >= 0, "", "seed", "must be >= 0")
    user_count = _int(merged, "", "user_count")
    _require(user_count >= 1, "", "user_count", "must be >= 1")
    rate = _num(merged, "", "rate_target_bps")
    _require(rate > 0, "", "rate_target_bps", "must be > 0")

    radius = _num(merged, "region", "radius_m")
    _require(radius > 0, "region", "radius_m", "must be > 0")
    region = CoverageRegion(
        center=Position3(
            _num(merged, "region", "center_x_m"),
            _num(merged, "region", "center_y_m"),
            0.0,
        ),
        radius_R0=radius,
    )
    cs = Position3(
        _num(merged, "cs", "x_m"), _num(merged, "cs", "y_m"), _num(merged, "cs", "z_m")
    )
    haps = Position3(
        _num(merged, "haps", "x_m"),
        _num(merged, "haps", "y_m"),
        _num(merged, "haps", "z_m"),
    )

    total_bw = _num(merged, "radio", "total_bandwidth_hz")
    _require(total_bw > 0, "radio", "total_bandwidth_hz", "must be > 0")
    total_sc = _int(merged, "radio", "total_subcarriers")
    _require(
        total_sc >= 2 and total_sc % 2 == 0,
        "radio",
        "total_subcarriers",
        "must be even and >= 2",
    )
    noise_bw = _num(merged, "radio", "snr_noise_bandwidth_hz")
    _require(noise_bw >= 0, "radio", "snr_noise_bandwidth_hz", "must be >= 0")
    if noise_bw == 0.0:
        noise_bw = total_bw / 2.0
    carrier = _num(merged, "radio", "carrier_hz")
    _require(carrier > 0, "radio", "carrier_hz", "must be > 0")
    wave_speed = _num(merged, "radio", "wave_speed_mps")
    _require(wave_speed > 0, "radio", "wave_speed_mps", "must be > 0")
    try:
        radio = RadioParams(
            carrier_hz=carrier,
            wave_speed_mps=wave_speed,
            total_bandwidth_hz=total_bw,
            total_subcarriers=total_sc,
            noise_psd_dbm_per_hz=_num(merged, "radio", "noise_psd_dbm_per_hz"),
            cs_power_dbm=_num(merged, "radio", "cs_power_dbm"),
            uav_power_dbm=_num(merged, "radio", "uav_power_dbm"),
            cs_antenna_gain_db=_num(merged, "radio", "cs_antenna_gain_db"),
            user_antenna_gain_db=_num(merged, "radio", "user_antenna_gain_db"),
            uav_antenna_gain_db=_num(merged, "radio", "uav_antenna_gain_db"),
            snr_noise_bandwidth_hz=noise_bw,
        )
        atg = AtgParams(
            alpha=_num(merged, "atg", "alpha"),
            eta_los=_num(merged, "atg", "eta_los"),
            eta_nlos=_num(merged, "atg", "eta_nlos"),
            psi=_num(merged, "atg", "psi"),
            beta=_num(merged, "atg", "beta"),
        )
    except ValueError as exc:  # re-tag with config context
        raise ScenarioError(str(exc)) from exc

    elements = _int(merged, "ris", "element_count")
    _require(elements >= 0, "ris", "element_count", "must be >= 0")
    mu = _num(merged, "ris", "mu")
    _require(0.0 <= mu <= 1.0, "ris", "mu", "must be in [0, 1]")

    altitude = _num(merged, "uav", "altitude_m")
    _require(altitude > 0, "uav", "altitude_m", "must be > 0")
    policy = merged["uav"]["initial_count_policy"]
    if isinstance(policy, bool) or not isinstance(policy, (str, int)):
        raise ScenarioError('uav.initial_count_policy must be "auto" or an integer')
    if isinstance(policy, str) and policy != "auto":
        raise ScenarioError('uav.initial_count_policy must be "auto" or an integer')
    if isinstance(policy, int):
        _require(policy >= 1, "uav", "initial_count_policy", "must be >= 1")

    delta = _num(merged, "leader", "delta_m")
    _require(delta > 0, "leader", "delta_m", "must be > 0")
    max_iters = _int(merged, "leader", "max_iters")
    _require(max_iters >= 0, "leader", "max_iters", "must be >= 0")
    if max_iters == 0:
        max_iters = math.ceil(radius / delta)

    restarts = _int(merged, "follower", "kmeans_restarts")
    _require(restarts >= 1, "follower", "kmeans_restarts", "must be >= 1")
    kmeans_iters = _int(merged, "follower", "kmeans_max_iters")
    _require(kmeans_iters >= 1, "follower", "kmeans_max_iters", "must be >= 1")
    delta_prime = _int(merged, "follower", "delta_prime")
    _require(delta_prime >= 1, "follower", "delta_prime", "must be >= 1")

    return Scenario(
        seed=seed,
        user_count=user_count,
        region=region,
        cs_position=cs,
        haps_position=haps,
        radio=radio,
        atg=atg,
        ris_element_count=elements,
        ris_mu=mu,
        rate_target_bps=rate,
        uav_altitude_m=altitude,
        uav_initial_count_policy=policy,
        leader_delta_m=delta,
        leader_max_iters=max_iters,
        follower_kmeans_restarts=restarts,
        follower_kmeans_max_iters=kmeans_iters,
        follower_delta_prime=delta_prime,
    )


def default_scenario() -> Scenario:
    return scenario_from_dict({})


def load_scenario(path: Union[str, Path]) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"config parse error in {path}: {exc}") from exc
    return scenario_from_dict(data)


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):  # pragma: no cover - no bool fields today
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return f'"{value}"'


def dump_scenario(scenario: Scenario) -> str:
    """Canonical TOML text; load(dump(s)) reproduces ``s`` exactly."""
    sections: dict[str, dict[str, Any]] = {
        "": {
            "seed": scenario.seed,
            "user_count": scenario.user_count,
            "rate_target_bps": scenario.rate_target_bps,
        },
        "region": {
            "center_x_m": scenario.region.center.x,
            "center_y_m": scenario.region.center.y,
            "radius_m": scenario.region.radius_R0,
        },
        "cs": {
            "x_m": scenario.cs_position.x,
            "y_m": scenario.cs_position.y,
            "z_m": scenario.cs_position.z,
        },
        "haps": {
            "x_m": scenario.haps_position.x,
            "y_m": scenario.haps_position.y,
            "z_m": scenario.haps_position.z,
        },
        "radio": {
            "carrier_hz": scenario.radio.carrier_hz,
            "wave_speed_mps": scenario.radio.wave_speed_mps,
            "total_bandwidth_hz": scenario.radio.total_bandwidth_hz,
            "total_subcarriers": scenario.radio.total_subcarriers,
            "noise_psd_dbm_per_hz": scenario.radio.noise_psd_dbm_per_hz,
            "cs_power_dbm": scenario.radio.cs_power_dbm,
            "uav_power_dbm": scenario.radio.uav_power_dbm,
            "cs_antenna_gain_db": scenario.radio.cs_antenna_gain_db,
            "user_antenna_gain_db": scenario.radio.user_antenna_gain_db,
            "uav_antenna_gain_db": scenario.radio.uav_antenna_gain_db,
            "snr_noise_bandwidth_hz": scenario.radio.snr_noise_bandwidth_hz,
        },
        "atg": {
            "alpha": scenario.atg.alpha,
            "eta_los": scenario.atg.eta_los,
            "eta_nlos": scenario.atg.eta_nlos,
            "psi": scenario.atg.psi,
            "beta": scenario.atg.beta,
        },
        "ris": {"element_count": scenario.ris_element_count, "mu": scenario.ris_mu},
        "uav": {
            "altitude_m": scenario.uav_altitude_m,
            "initial_count_policy": scenario.uav_initial_count_policy,
        },
        "leader": {
            "delta_m": scenario.leader_delta_m,
            "max_iters": scenario.leader_max_iters,
        },
        "follower": {
            "kmeans_restarts": scenario.follower_kmeans_restarts,
            "kmeans_max_iters": scenario.follower_kmeans_max_iters,
            "delta_prime": scenario.follower_delta_prime,
        },
    }
    lines: list[str] = []
    for sec, vals in sections.items():
        if sec:
            lines.append(f"[{sec}]")
        for key, value in vals.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def scenario_to_json_dict(scenario: Scenario) -> dict[str, Any]:
    """Nested plain-dict view (for --json output)."""
    return {
        "seed": scenario.seed,
        "user_count": scenario.user_count,
        "rate_target_bps": scenario.rate_target_bps,
        "region": {
            "center_x_m": scenario.region.center.x,
            "center_y_m": scenario.region.center.y,
            "radius_m": scenario.region.radius_R0,
        },
        "cs": [scenario.cs_position.x, scenario.cs_position.y, scenario.cs_position.z],
        "haps": [
            scenario.haps_position.x,
            scenario.haps_position.y,
            scenario.haps_position.z,
        ],
        "ris": {"element_count": scenario.ris_element_count, "mu": scenario.ris_mu},
        "uav": {
            "altitude_m": scenario.uav_altitude_m,
            "initial_count_policy": scenario.uav_initial_count_policy,
        },
        "leader": {
            "delta_m": scenario.leader_delta_m,
            "max_iters": scenario.leader_max_iters,
        },
    }
