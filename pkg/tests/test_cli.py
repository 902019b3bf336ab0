import json

import numpy as np
import pytest
from click.testing import CliRunner

from qrevival import BUILTIN_SCENARIOS, ScenarioConfig, load_scenario
from qrevival.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def rows(csv_text):
    lines = [ln for ln in csv_text.strip().splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


# --- scenarios ------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(BUILTIN_SCENARIOS))
def test_scenario_json_round_trip(name):
    cfg = BUILTIN_SCENARIOS[name]
    assert ScenarioConfig.from_json(cfg.to_json()) == cfg


def test_scenario_file_loading(tmp_path):
    path = tmp_path / "custom.json"
    cfg = BUILTIN_SCENARIOS["fig1a"]
    path.write_text(cfg.to_json(), encoding="utf-8")
    assert load_scenario(str(path)) == cfg


def test_unknown_scenario_is_rejected():
    with pytest.raises(ValueError):
        load_scenario("fig99")


def test_scenario_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(name="bad", tau_max=1.0, tau_step=1e-4, horizon=10.0)
    data = BUILTIN_SCENARIOS["fig1a"].to_dict()
    data["tau_step"] = -1.0
    with pytest.raises(ValueError):
        ScenarioConfig.from_dict(data)


# --- spectrum command -------------------------------------------------------


def test_spectrum_row_count_and_residuals(runner):
    result = runner.invoke(main, ["spectrum", "--epsilon", "12"])
    assert result.exit_code == 0
    header, body = rows(result.stdout)
    assert header == ["n", "parity", "alpha", "beta", "energy", "residual"]
    assert len(body) == 8
    assert all(abs(float(r[5])) < 1e-10 for r in body)


def test_spectrum_single_even_state(runner):
    result = runner.invoke(main, ["spectrum", "--epsilon", "1"])
    _, body = rows(result.stdout)
    assert len(body) == 1
    assert body[0][1] == "even"


def test_spectrum_rejects_bad_strength(runner):
    result = runner.invoke(main, ["spectrum", "--epsilon", "-4"])
    assert result.exit_code == 2
    assert "error" in result.stderr


def test_spectrum_json_payload(runner):
    result = runner.invoke(main, ["spectrum", "--epsilon", "15",
                                  "--format", "json"])
    payload = json.loads(result.stdout)
    assert payload["predicted_count"] == 10
    assert len(payload["states"]) == 10


# --- autocorr command --------------------------------------------------------


def test_autocorr_starts_at_squared_completeness(runner):
    result = runner.invoke(main, ["autocorr", "--scenario", "fig1a"])
    assert result.exit_code == 0
    header, body = rows(result.stdout)
    assert header == ["tau", "autocorr"]
    assert float(body[0][0]) == 0.0
    assert abs(float(body[0][1]) - 1.0) < 1e-3


def test_autocorr_output_is_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        result = runner.invoke(main, ["autocorr", "--scenario", "fig1b",
                                      "--tau-max", "0.05", "--out", str(path)])
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_autocorr_reference_column(runner):
    result = runner.invoke(main, ["autocorr", "--scenario", "fig1a",
                                  "--tau-max", "0.02", "--reference"])
    header, body = rows(result.stdout)
    assert header == ["tau", "autocorr", "reference"]
    assert abs(float(body[0][2]) - 1.0) < 1e-6


def test_autocorr_centered_scenario_warns_but_succeeds(runner):
    result = runner.invoke(main, ["autocorr", "--scenario", "fig2",
                                  "--tau-max", "0.1"])
    assert result.exit_code == 0
    _, body = rows(result.stdout)
    assert min(float(r[1]) for r in body) > 0.0


def test_autocorr_flag_conflicts(runner):
    result = runner.invoke(main, ["autocorr", "--epsilon", "12",
                                  "--beta", "0.002"])
    assert result.exit_code == 2
    result = runner.invoke(main, ["autocorr"])
    assert result.exit_code == 2


def test_autocorr_oscillator_flags(runner):
    result = runner.invoke(main, ["autocorr", "--beta", "0.002",
                                  "--squeeze", "10", "--tau-max", "0.01"])
    assert result.exit_code == 0
    _, body = rows(result.stdout)
    assert abs(float(body[0][1]) - 1.0) < 1e-12


def test_scenario_parameter_overrides(runner):
    result = runner.invoke(main, ["autocorr", "--scenario", "fig1a",
                                  "--sigma", "0.12", "--tau-max", "0.01",
                                  "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["scenario"]["packet"]["sigma"] == 0.12
    assert payload["scenario"]["well"]["epsilon"] == 12.0

    result = runner.invoke(main, ["autocorr", "--scenario", "fig5",
                                  "--epsilon", "12"])
    assert result.exit_code == 2


def test_all_builtin_scenarios_run_quickly(runner, tmp_path):
    import time
    for name in sorted(BUILTIN_SCENARIOS):
        out = tmp_path / f"{name}.csv"
        start = time.perf_counter()
        result = runner.invoke(main, ["autocorr", "--scenario", name,
                                      "--out", str(out)])
        elapsed = time.perf_counter() - start
        assert result.exit_code == 0, name
        assert elapsed < 60.0, f"{name} took {elapsed:.1f}s"
        assert out.stat().st_size > 0


# --- table1 command -----------------------------------------------------------


def test_table1_reference_rows(runner):
    result = runner.invoke(main, ["table1"])
    assert result.exit_code == 0
    header, body = rows(result.stdout)
    assert [r[0].split(".")[0] for r in body] == ["1", "3", "1"]  # 12, 30, 100
    detected = [float(r[1]) for r in body]
    barker = [float(r[2]) for r in body]
    assert abs(detected[0] - 1.185) < 0.006
    assert abs(barker[1] - 1.06778) < 1e-5
    errors = [float(r[3]) for r in body]
    assert errors[0] > errors[1] > errors[2]


def test_table1_json(runner):
    result = runner.invoke(main, ["table1", "--epsilons", "12",
                                  "--format", "json"])
    payload = json.loads(result.stdout)
    assert len(payload) == 1
    assert abs(payload[0]["barker"] - (13.0 / 12.0) ** 2) < 1e-12


# --- revivals command -----------------------------------------------------------


def test_revivals_fig1a(runner):
    result = runner.invoke(main, ["revivals", "--scenario", "fig1a"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert abs(payload["detected_revival"] - 1.1865) < 0.001
    assert payload["detected_superrevival"] is None
    assert payload["superrevival_scanned"] is False


def test_revivals_box_reference_has_no_superrevival(runner):
    result = runner.invoke(main, ["revivals", "--scenario", "infinite",
                                  "--horizon", "8", "--superrevival"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert abs(payload["detected_revival"] - 1.0) < 1e-12
    assert payload["detected_superrevival"] is None
    assert payload["superrevival_scanned"] is True


def test_revivals_finite_well_superrevival(runner):
    result = runner.invoke(main, ["revivals", "--scenario", "fig2",
                                  "--superrevival"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["detected_superrevival"] == pytest.approx(5.738, abs=2e-3)


def test_revivals_horizon_validation(runner):
    result = runner.invoke(main, ["revivals", "--scenario", "fig2",
                                  "--horizon", "1"])
    assert result.exit_code == 2


def test_revivals_short_horizon_exit_code(runner):
    result = runner.invoke(main, ["revivals", "--scenario", "fig2",
                                  "--horizon", "4", "--superrevival"])
    assert result.exit_code == 4


# --- snapshot command ------------------------------------------------------------


def test_snapshot_density_peaks_at_packet_center(runner):
    result = runner.invoke(main, ["snapshot", "--scenario", "fig1a",
                                  "--tau", "0", "--grid", "251"])
    assert result.exit_code == 0
    header, body = rows(result.stdout)
    xs = np.array([float(r[0]) for r in body])
    dens = np.array([float(r[1]) for r in body])
    assert abs(xs[np.argmax(dens)] - 0.2) < 0.02


def test_snapshot_centered_scenario_density_is_even(runner):
    result = runner.invoke(main, ["snapshot", "--scenario", "fig2",
                                  "--tau", "0,0.3", "--grid", "200"])
    assert result.exit_code == 0
    sections = result.stdout.split("# tau = ")[1:]
    assert len(sections) == 2
    for section in sections:
        _, body = rows("\n".join(section.splitlines()[1:]))
        dens = np.array([float(r[1]) for r in body])
        assert np.abs(dens - dens[::-1]).max() < 1e-10


def test_snapshot_splits_at_half_revival(runner):
    result = runner.invoke(main, ["snapshot", "--scenario", "fig1a",
                                  "--tau", "0.59323", "--grid", "600"])
    _, body = rows(result.stdout.split("# tau = ")[1].split("\n", 1)[1])
    dens = np.array([float(r[1]) for r in body])
    peaks = np.flatnonzero((dens[1:-1] > dens[:-2]) & (dens[1:-1] > dens[2:])) + 1
    # the reflected main hump plus genuine low replicas; discard numeric dust
    tall = [p for p in peaks if dens[p] > 1e-3 * dens.max()]
    assert len(tall) >= 2


def test_snapshot_grid_floor(runner):
    result = runner.invoke(main, ["snapshot", "--scenario", "fig1a",
                                  "--tau", "0", "--grid", "8"])
    assert result.exit_code == 2


def test_snapshot_rejects_oscillator_scenarios(runner):
    result = runner.invoke(main, ["snapshot", "--scenario", "fig5",
                                  "--tau", "0"])
    assert result.exit_code == 2


# --- oscillator command ------------------------------------------------------------


def test_oscillator_json_timescales(runner):
    result = runner.invoke(main, ["oscillator", "--beta", "0.002",
                                  "--squeeze", "10"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    scales = payload["timescales"]
    assert abs(scales["superrevival_closed_form"] - 500.0) < 1e-12
    assert abs(scales["t_superrevival"] - 500.0) < 1e-7
    assert abs(payload["mean_n"] - 2.025) < 1e-6


def test_oscillator_csv_weights(runner):
    result = runner.invoke(main, ["oscillator", "--beta", "0", "--alpha", "2",
                                  "--format", "csv"])
    header, body = rows(result.stdout)
    assert header == ["n", "weight"]
    total = sum(float(r[1]) for r in body)
    assert abs(total - 1.0) < 1e-12


def test_oscillator_zero_beta_reports_no_superrevival_scale(runner):
    result = runner.invoke(main, ["oscillator", "--beta", "0", "--alpha", "2"])
    payload = json.loads(result.stdout)
    assert payload["timescales"]["superrevival_closed_form"] is None
