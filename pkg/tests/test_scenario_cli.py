import json

import pytest

from hapsplan.cli import main
from hapsplan.scenario import (
    ScenarioError,
    default_scenario,
    dump_scenario,
    load_scenario,
    scenario_from_dict,
)


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------

def test_empty_file_yields_reference_defaults(tmp_path):
    path = tmp_path / "empty.toml"
    path.write_text("")
    sc = load_scenario(path)
    assert sc == default_scenario()
    assert sc.user_count == 20
    assert sc.region.radius_R0 == 500.0
    assert sc.cs_position.x == -10000.0
    assert sc.haps_position.z == 20000.0
    assert sc.radio.cs_antenna_gain_db == 43.2
    assert sc.radio.noise_psd_dbm_per_hz == -174.0
    assert sc.radio.total_subcarriers == 64
    assert sc.radio.snr_noise_bandwidth_hz == 50e6  # half of the total band
    assert sc.atg.eta_nlos == 31.0
    assert sc.atg.psi == 5.0 and sc.atg.beta == 0.5
    assert sc.ris_element_count == 350_000
    assert sc.ris_mu == 1.0
    assert sc.radio.cs_power_dbm == 40.0 and sc.radio.uav_power_dbm == 20.0
    assert sc.leader_delta_m == 50.0 and sc.leader_max_iters == 10


def test_validation_error_names_field():
    with pytest.raises(ScenarioError, match="ris.element_count"):
        scenario_from_dict({"ris": {"element_count": -1}})
    with pytest.raises(ScenarioError, match="rate_target_bps"):
        scenario_from_dict({"rate_target_bps": 0})
    with pytest.raises(ScenarioError, match="region.radius_m"):
        scenario_from_dict({"region": {"radius_m": -5.0}})


def test_unknown_keys_rejected():
    with pytest.raises(ScenarioError, match="unknown key nonsense"):
        scenario_from_dict({"nonsense": 1})
    with pytest.raises(ScenarioError, match="unknown key ris.shape"):
        scenario_from_dict({"ris": {"shape": "square"}})


def test_initial_count_policy_accepts_auto_or_int():
    sc = scenario_from_dict({"uav": {"initial_count_policy": 4}})
    assert sc.uav_initial_count_policy == 4
    with pytest.raises(ScenarioError, match="initial_count_policy"):
        scenario_from_dict({"uav": {"initial_count_policy": "many"}})
    with pytest.raises(ScenarioError, match="initial_count_policy"):
        scenario_from_dict({"uav": {"initial_count_policy": 0}})


def test_parse_error_carries_location(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("seed = = 4\n")
    with pytest.raises(ScenarioError, match="line 1"):
        load_scenario(path)


def test_dump_load_round_trip_fixed_point(tmp_path):
    path = tmp_path / "custom.toml"
    path.write_text('seed = 9\n[ris]\nelement_count = 12345\n')
    once = dump_scenario(load_scenario(path))
    path2 = tmp_path / "dumped.toml"
    path2.write_text(once)
    twice = dump_scenario(load_scenario(path2))
    assert once == twice
    assert load_scenario(path2) == load_scenario(path)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_plan_json_pipeline(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "plan", "--json", "--seed", "7", "--out", str(tmp_path))
    assert code == 0
    payload = json.loads(out)  # stdout is pure JSON
    assert payload["leader"]["r_star_m"] == 0.0
    assert payload["follower"]["n_star"] == 0
    assert payload["scenario"]["seed"] == 7
    assert payload["leader"]["coverage_fraction"] == 1.0


def test_cli_deterministic_output(capsys, tmp_path):
    a = run_cli(capsys, "leader", "--json", "--seed", "3", "--out", str(tmp_path))
    b = run_cli(capsys, "leader", "--json", "--seed", "3", "--out", str(tmp_path))
    assert a == b


def test_leader_subcommand_text_mode(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "leader", "--seed", "2", "--out", str(tmp_path))
    assert code == 0
    assert "zone boundary" in out


def test_dump_allocation_writes_file(capsys, tmp_path):
    code, _, _ = run_cli(
        capsys, "leader", "--seed", "2", "--out", str(tmp_path), "--dump-allocation"
    )
    assert code == 0
    data = json.loads((tmp_path / "allocation.json").read_text())
    assert data["total_subcarriers"] == 32
    assert data["n_users"] == len(data["user_cluster"])


def test_sweep_writes_schema_conformant_csv(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "sweep",
        "fig2",
        "--runs",
        "2",
        "--out",
        str(tmp_path),
        "--workers",
        "2",
        "--seed",
        "11",
    )
    assert code == 0
    csv_path = tmp_path / "fig2_coverage_vs_M.csv"
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "sweep,metric,grid_value,rate_target_bps,mean,std,runs,seed"
    assert len(lines) == 1 + 7 * 3
    assert all(line.split(",")[0] == "fig2" for line in lines[1:])


def test_invalid_config_exits_one(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[ris]\nelement_count = -3\n")
    code, out, err = run_cli(capsys, "plan", "--config", str(bad))
    assert code == 1
    assert "ris.element_count" in err


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["plan", "--frobnicate"])
    assert exc.value.code == 1


def test_infeasible_follower_exits_two(capsys, tmp_path):
    cfg = tmp_path / "hard.toml"
    cfg.write_text("rate_target_bps = 1e15\n[ris]\nelement_count = 0\n")
    code, out, err = run_cli(capsys, "plan", "--config", str(cfg), "--json")
    assert code == 2
    payload = json.loads(out)
    assert payload["follower"]["feasible"] is False
    assert "feasible" in err or "INFEASIBLE" in err or "error" in err
