import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ascpg.errors import InvalidArgument
from ascpg.metrics import (AggregateSeries, NonpositiveSeries, aggregate, default_window, field_values,
                           fit_slope, read_aggregate_csv, write_aggregate_csv, write_slope_json)
from ascpg.solver import COLUMNS, RunTrace

KS = np.unique(np.round(np.logspace(0, 5, 60)))


def trace(values, ks=None):
    ks = np.arange(1, len(values) + 1) if ks is None else ks
    cols = {c: np.full(len(values), np.nan) for c in COLUMNS}
    cols["k"] = np.asarray(ks, dtype=float)
    cols["queries"] = 3 * cols["k"] + 1
    cols["dist_sq"] = np.asarray(values, dtype=float)
    cols["grad_norm_sq"] = np.asarray(values, dtype=float)
    return RunTrace(cols)


def power_law(c, scale=1.0):
    return AggregateSeries(KS, scale * KS ** -c, np.zeros_like(KS), 1)


def test_single_trace_aggregate():
    s = aggregate([trace([3.0, 2.0, 1.0])])
    np.testing.assert_array_equal(s.mean, [3.0, 2.0, 1.0])
    np.testing.assert_array_equal(s.stderr, 0.0)
    assert s.n_seeds == 1


def test_symmetric_values_average_to_zero():
    s = aggregate([trace([1.0, -2.5]), trace([-1.0, 2.5])])
    np.testing.assert_array_equal(s.mean, [0.0, 0.0])


def test_stderr_of_unit_noise(rng):
    traces = [trace(rng.standard_normal(50)) for _ in range(100)]
    s = aggregate(traces)
    assert np.median(s.stderr) == pytest.approx(0.1, rel=0.3)


def test_aggregate_on_query_axis():
    s = aggregate([trace([1.0, 0.5])], axis="queries")
    assert s.ks.tolist() == [4.0, 7.0]


def test_mismatched_grids_rejected():
    with pytest.raises(InvalidArgument):
        aggregate([trace([1.0, 2.0]), trace([1.0, 2.0, 3.0])])
    with pytest.raises(InvalidArgument):
        aggregate([trace([1.0, 2.0]), trace([1.0, 2.0], ks=[1, 3])])
    with pytest.raises(InvalidArgument):
        aggregate([])
    with pytest.raises(InvalidArgument):
        aggregate([trace([1.0])], axis="time")
    with pytest.raises(InvalidArgument):
        aggregate([trace([1.0])], field="speed")


def test_permutation_invariance(rng):
    traces = [trace(rng.lognormal(size=30)) for _ in range(17)]
    a = aggregate(traces)
    order = rng.permutation(17)
    b = aggregate([traces[i] for i in order])
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.stderr, b.stderr)


def test_running_average_field():
    t = trace([4.0, 2.0, 0.0])
    np.testing.assert_allclose(field_values(t, "grad_norm_sq_avg"), [4.0, 3.0, 2.0])


@pytest.mark.parametrize("c", [4 / 9, 1 / 2, 4 / 5, 1.0])
def test_recovers_regime_exponents(c):
    fit = fit_slope(power_law(c))
    assert fit.slope == pytest.approx(-c, abs=1e-6)
    assert fit.r2 == pytest.approx(1.0, abs=1e-9)


def test_prefactor_drops_out():
    assert fit_slope(power_law(0.8, scale=7.0)).slope == pytest.approx(-0.8, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(1e-6, 1e6))
def test_rescaling_invariance(c, scale):
    noisy = power_law(c).mean * np.exp(0.1 * np.sin(np.arange(KS.size)))
    base = fit_slope(AggregateSeries(KS, noisy, noisy * 0, 1))
    scaled = fit_slope(AggregateSeries(KS, scale * noisy, noisy * 0, 1))
    assert abs(base.slope - scaled.slope) <= 1e-12
    assert scaled.intercept == pytest.approx(base.intercept + np.log10(scale), abs=1e-9)


def test_default_window_is_geometric_upper_half():
    assert default_window(np.array([1.0, 100.0, 10_000.0])) == (100.0, 10_000.0)
    fit = fit_slope(power_law(1.0))
    assert fit.window == (pytest.approx(np.sqrt(KS[-1])), KS[-1])
    assert fit.n_points == np.sum(KS >= np.sqrt(KS[-1]))


def test_nonpositive_values_rejected():
    s = power_law(1.0)
    s.mean[-3] = 0.0
    with pytest.raises(NonpositiveSeries):
        fit_slope(s)
    s.mean[-3] = np.nan
    with pytest.raises(NonpositiveSeries):
        fit_slope(s)
    # outside the window is fine
    s = power_law(1.0)
    s.mean[0] = -1.0
    assert fit_slope(s).slope == pytest.approx(-1.0)


def test_bad_windows():
    with pytest.raises(InvalidArgument):
        fit_slope(power_law(1.0), (10.0, 10.0))
    with pytest.raises(InvalidArgument):
        fit_slope(power_law(1.0), (2e5, 3e5))


def test_csv_and_json_round_trip(tmp_path):
    s = aggregate([trace([1.0, 0.5, 0.25, 0.125]), trace([2.0, 1.0, 0.5, 0.25])])
    write_aggregate_csv(s, tmp_path / "agg.csv")
    assert (tmp_path / "agg.csv").read_text().splitlines()[0] == "axis,mean,stderr"
    back = read_aggregate_csv(tmp_path / "agg.csv")
    np.testing.assert_array_equal(back.mean, s.mean)
    np.testing.assert_array_equal(back.ks, s.ks)
    fit = fit_slope(back)
    assert fit.slope == fit_slope(s).slope
    write_slope_json(fit, tmp_path / "s.json", method="ascpg")
    d = json.loads((tmp_path / "s.json").read_text())
    assert d["slope"] == fit.slope and d["method"] == "ascpg" and d["window"] == list(fit.window)


def test_malformed_csv(tmp_path):
    (tmp_path / "bad.csv").write_text("axis,mean\n1,2\n")
    with pytest.raises(InvalidArgument):
        read_aggregate_csv(tmp_path / "bad.csv")
    (tmp_path / "empty.csv").write_text("axis,mean,stderr\n")
    with pytest.raises(InvalidArgument):
        read_aggregate_csv(tmp_path / "empty.csv")
