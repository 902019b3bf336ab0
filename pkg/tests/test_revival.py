import warnings

import numpy as np
import pytest

from qrevival import (AmbiguousWindowError, AutocorrSeries, GaussianSpec,
                      HorizonTooShortError, WellConfig, autocorrelation,
                      barker, detect_revival, detect_superrevival,
                      detection_grid, infinite_project, phase_rates, project,
                      solve_spectrum, table1_report, timescales)

PAPER_PACKET = GaussianSpec(x0=0.2, sigma=0.1)


def well_inputs(epsilon, packet):
    states = solve_spectrum(WellConfig(epsilon=epsilon))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        decomp = project(packet, states)
    weights = np.abs(decomp.coefficients) ** 2
    return weights, phase_rates(states), decomp


@pytest.fixture(scope="module")
def box_state():
    return infinite_project(PAPER_PACKET)


# --- series ------------------------------------------------------------


def test_autocorr_at_zero_is_total_weight_squared():
    w = np.array([0.5, 0.3, 0.1])
    series = autocorrelation(w, np.array([1.0, 4.0, 9.0]), np.array([0.0]))
    assert abs(series.values[0] - w.sum() ** 2) < 1e-15


def test_single_weight_gives_flat_series():
    taus = np.linspace(0.0, 3.0, 100)
    series = autocorrelation([0.7], [5.0], taus)
    assert np.ptp(series.values) < 1e-15


def test_box_spectrum_revives_at_unit_time(box_state):
    w = box_state.weights / box_state.weights.sum()
    series = autocorrelation(w, box_state.phase_rates, np.array([1.0]))
    assert abs(series.values[0] - 1.0) < 1e-12


def test_autocorr_validates_inputs():
    with pytest.raises(ValueError):
        autocorrelation([0.5, -0.1], [1.0, 2.0], [0.0])
    with pytest.raises(ValueError):
        autocorrelation([0.5], [1.0, 2.0], [0.0])
    with pytest.raises(ValueError):
        AutocorrSeries(tau=np.array([0.0, 0.0]), values=np.array([1.0, 1.0]))


def test_time_reversal_symmetry_is_exact():
    w, rates, _ = well_inputs(12.0, PAPER_PACKET)
    taus = np.arange(1, 400, dtype=float) * 1e-3
    fwd = autocorrelation(w, rates, taus).values
    bwd = autocorrelation(w, rates, -taus[::-1]).values[::-1]
    assert np.array_equal(fwd, bwd)


def test_box_series_is_periodic(box_state):
    taus = np.arange(0, 1000, dtype=float) * 1e-3
    a = autocorrelation(box_state.weights, box_state.phase_rates, taus).values
    b = autocorrelation(box_state.weights, box_state.phase_rates, taus + 1.0).values
    assert np.abs(a - b).max() < 1e-12


def test_finite_well_breaks_the_box_symmetry(box_state):
    deltas = np.arange(1, 500, dtype=float) * 1e-4

    def reflect(weights, rates, center):
        up = autocorrelation(weights, rates, center + deltas).values
        down = autocorrelation(weights, rates, (center - deltas)[::-1]).values
        return np.abs(up - down[::-1]).max()

    assert reflect(box_state.weights, box_state.phase_rates, 1.0) < 1e-12

    w, rates, _ = well_inputs(12.0, PAPER_PACKET)
    assert reflect(w, rates, 1.1864599470705903) > 1e-3


def test_centered_packet_never_fully_decorrelates():
    w, rates, _ = well_inputs(12.0, GaussianSpec(x0=0.0, sigma=0.1))
    taus = np.arange(0, 20001, dtype=float) * 1e-4
    series = autocorrelation(w, rates, taus)
    assert series.values.min() > 0.0


def test_offcenter_packet_reaches_near_zero():
    w, rates, _ = well_inputs(12.0, PAPER_PACKET)
    taus = np.arange(0, 12001, dtype=float) * 1e-4
    series = autocorrelation(w, rates, taus)
    assert series.values.min() < 0.01


def test_box_partial_revivals_at_thirds(box_state):
    taus = np.arange(0, 10001, dtype=float) * 1e-4
    vals = autocorrelation(box_state.weights, box_state.phase_rates, taus).values
    for target in (1.0 / 3.0, 2.0 / 3.0):
        m = (taus > target - 0.05) & (taus < target + 0.05)
        sub = vals[m]
        peaks = np.flatnonzero((sub[1:-1] > sub[:-2]) & (sub[1:-1] > sub[2:])) + 1
        best = peaks[np.argmax(sub[peaks])]
        assert abs(taus[m][best] - target) < 0.01
        assert sub[best] > 0.5


# --- revival detection --------------------------------------------------


@pytest.mark.parametrize("epsilon, window, expected, tol", [
    (12.0, (1.0, 1.4), 1.185, 0.006),
    (30.0, (1.0, 1.2), 1.068, 0.005),
    (100.0, (0.95, 1.1), 1.020, 0.003),
])
def test_detected_revivals_match_reference_values(epsilon, window, expected, tol):
    w, rates, _ = well_inputs(epsilon, PAPER_PACKET)
    taus = detection_grid(window[0], window[1], 1e-4)
    series = autocorrelation(w, rates, taus)
    tau_star, height = detect_revival(series, window)
    assert abs(tau_star - expected) < tol
    assert 0.9 < height <= 1.0 + 1e-9


def test_box_revival_detected_exactly_on_grid(box_state):
    w = box_state.weights / box_state.weights.sum()
    taus = detection_grid(0.9, 1.1, 1e-4)
    series = autocorrelation(w, box_state.phase_rates, taus)
    tau_star, height = detect_revival(series, (0.9, 1.1))
    assert tau_star == 1.0
    assert abs(height - 1.0) < 1e-9


def test_weight_rescaling_leaves_peak_bit_identical():
    w, rates, _ = well_inputs(12.0, PAPER_PACKET)
    taus = detection_grid(1.0, 1.4, 1e-4)
    base = detect_revival(autocorrelation(w, rates, taus), (1.0, 1.4))
    # powers of two rescale float weights exactly
    scaled = detect_revival(autocorrelation(4.0 * w, rates, taus), (1.0, 1.4))
    assert scaled[0] == base[0]
    assert scaled[1] == 16.0 * base[1]
    # arbitrary positive factors keep the argmax and agree to rounding
    odd_scale = detect_revival(autocorrelation(3.0 * w, rates, taus), (1.0, 1.4))
    assert abs(odd_scale[0] - base[0]) < 1e-12


def test_ambiguous_window_is_refused():
    taus = detection_grid(1.0, 1.02, 1e-4)
    bump = lambda c: np.exp(-((taus - c) / 2e-3) ** 2)
    series = AutocorrSeries(tau=taus, values=0.9 * bump(1.005) + 0.899 * bump(1.015))
    with pytest.raises(AmbiguousWindowError):
        detect_revival(series, (1.0, 1.02))


def test_detection_rejects_coarse_grids():
    taus = np.arange(0, 200, dtype=float) * 1e-2
    series = AutocorrSeries(tau=taus, values=np.ones_like(taus))
    with pytest.raises(ValueError):
        detect_revival(series, (0.5, 1.5))


def test_detection_requires_coverage():
    taus = detection_grid(0.0, 0.5, 1e-4)
    series = AutocorrSeries(tau=taus, values=np.ones_like(taus))
    with pytest.raises(ValueError):
        detect_revival(series, (0.4, 0.9))


# --- superrevival detection ---------------------------------------------


def envelope_scan(epsilon, horizon):
    w, rates, _ = well_inputs(epsilon, GaussianSpec(x0=0.0, sigma=0.1))
    period = barker(WellConfig(epsilon=epsilon)).approx_revival_time
    taus = np.arange(0, int(horizon / 1e-3) + 1, dtype=float) * 1e-3
    series = autocorrelation(w, rates, taus)
    return series, period


def test_superrevival_regression_values():
    series12, period12 = envelope_scan(12.0, 40.0)
    tau12 = detect_superrevival(series12, period12)
    assert tau12 == pytest.approx(5.738, abs=2e-3)

    series15, period15 = envelope_scan(15.0, 60.0)
    tau15 = detect_superrevival(series15, period15)
    assert tau15 == pytest.approx(10.110, abs=2e-3)

    assert tau15 > tau12


def test_box_envelope_never_dips(box_state):
    taus = np.arange(0, 8001, dtype=float) * 1e-3
    series = autocorrelation(box_state.weights, box_state.phase_rates, taus)
    assert detect_superrevival(series, 1.0) is None


def test_short_horizon_is_distinguished_from_absence():
    series, period = envelope_scan(12.0, 4.0)
    with pytest.raises(HorizonTooShortError):
        detect_superrevival(series, period)


def test_superrevival_validates_period():
    series, _ = envelope_scan(12.0, 4.0)
    with pytest.raises(ValueError):
        detect_superrevival(series, 0.0)


# --- timescales ----------------------------------------------------------


def test_quadratic_spectrum_timescales():
    n = np.arange(1, 40)
    energies = 2.0 * np.pi * n ** 2
    w = np.exp(-((n - 8.0) / 3.0) ** 2)
    scales = timescales(w, energies, indices=n)
    assert abs(scales.t_revival - 1.0) < 1e-12
    assert scales.t_superrevival == np.inf
    assert abs(scales.t_classical - 1.0 / (2.0 * scales.n_center)) < 1e-12


def test_cubic_term_sets_the_long_timescale():
    beta = 0.01
    n = np.arange(0, 80)
    energies = 2.0 * np.pi * n ** 2 + 2.0 * np.pi * beta * n ** 3
    w = np.exp(-((n - 4.0) / 2.0) ** 2)
    scales = timescales(w, energies)
    assert abs(scales.t_superrevival - 1.0 / beta) < 1e-9
    assert abs(scales.t_revival - 1.0 / (1.0 + 3.0 * scales.n_center * beta)) < 1e-12


def test_timescales_validate_inputs():
    with pytest.raises(ValueError):
        timescales([1.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        timescales(np.ones(6), np.arange(6), indices=np.array([0, 1, 2, 4, 5, 6]))
    with pytest.raises(ValueError):
        timescales(np.zeros(6), np.arange(6))


def test_stencil_center_shifts_inward_at_the_spectrum_edge():
    n = np.arange(1, 9)
    w = np.zeros(8)
    w[0] = 1.0  # nbar = 1, but differences need two levels on each side
    scales = timescales(w, 2.0 * np.pi * n ** 2, indices=n)
    assert scales.n_center == 3
    assert abs(scales.t_revival - 1.0) < 1e-12


# --- comparison report ----------------------------------------------------


@pytest.fixture(scope="module")
def reports():
    return table1_report(PAPER_PACKET, [12.0, 30.0, 100.0])


def test_report_prediction_column_is_closed_form(reports):
    for r in reports:
        exact = (1.0 + 1.0 / r.epsilon) ** 2
        assert abs(r.barker_predicted - exact) < 1e-12


def test_report_errors_shrink_with_depth(reports):
    errors = [r.percent_error for r in reports]
    assert errors[0] > errors[1] > errors[2]


def test_report_detected_times_drop_toward_unity(reports):
    detected = [r.detected_revival for r in reports]
    assert detected[0] > detected[1] > detected[2] > 1.0


def test_report_percent_error_definition(reports):
    r = reports[0]
    manual = 100.0 * abs(r.detected_revival - r.barker_predicted) / r.detected_revival
    assert abs(r.percent_error - manual) < 1e-12


def test_report_carries_scan_metadata(reports):
    for r in reports:
        assert r.grid_step == 1e-4
        assert r.completeness >= 0.999
        assert r.detected_superrevival is None
