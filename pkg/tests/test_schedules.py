import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ascpg.errors import InvalidArgument
from ascpg.schedules import REGIMES, Schedule, alpha, beta, regime, weights, weights_from_betas


@pytest.mark.parametrize("c_a, a, k, expected", [
    (1.0, 5 / 9, 1, 1.0),
    (1.0, 1.0, 10, 0.1),
    (2.0, 0.5, 4, 1.0),
])
def test_alpha_values(c_a, a, k, expected):
    assert alpha(Schedule(c_a=c_a, a=a), k) == pytest.approx(expected, rel=1e-15)


def test_beta_clamping():
    assert beta(Schedule(c_b=2.0, b=4 / 9), 1) == 1.0
    assert beta(Schedule(c_b=2.0, b=4 / 9, clamp_beta=False), 1) == 2.0
    s = Schedule(c_b=1.0, b=1.0)
    for k in (1, 2, 7, 1000):
        assert beta(s, k) == pytest.approx(1 / k, rel=1e-15)


def test_clamp_only_affects_early_iterations():
    c, u = Schedule(c_b=4.0, b=0.8), Schedule(c_b=4.0, b=0.8, clamp_beta=False)
    cutoff = 4.0 ** (1 / 0.8)
    for k in range(1, 50):
        if k > cutoff:
            assert beta(c, k) == beta(u, k)
        else:
            assert beta(c, k) == 1.0


@pytest.mark.parametrize("fn", [alpha, beta])
def test_k_zero_rejected(fn):
    with pytest.raises(InvalidArgument):
        fn(Schedule(), 0)


def test_regimes():
    assert REGIMES["nonconvex_general"] == (5 / 9, 4 / 9)
    assert REGIMES["nonconvex_linear"] == (0.5, 0.5)
    assert REGIMES["stronglyconvex_general"] == (1.0, 0.8)
    assert REGIMES["stronglyconvex_linear"] == (1.0, 1.0)
    s = Schedule.from_regime("stronglyconvex_general", c_a=3.0, c_b=5.0)
    assert (s.a, s.b, s.c_a, s.c_b) == (1.0, 0.8, 3.0, 5.0)
    with pytest.raises(InvalidArgument):
        regime("convex")


@pytest.mark.parametrize("kwargs", [{"c_a": 0.0}, {"c_b": -1.0}, {"a": 0.0}, {"b": 1.5}])
def test_invalid_schedule(kwargs):
    with pytest.raises(InvalidArgument):
        Schedule(**kwargs)


@pytest.mark.parametrize("name", sorted(REGIMES))
def test_monotone(name):
    s = Schedule.from_regime(name, c_a=1.5, c_b=3.0)
    a = [s.alpha(k) for k in range(1, 300)]
    b = [s.beta(k) for k in range(1, 300)]
    assert np.all(np.diff(a) <= 0) and np.all(np.diff(b) <= 0)


def test_uniform_weights():
    k = 9
    w = weights_from_betas([1 / (i + 1) for i in range(k + 1)])
    np.testing.assert_allclose(w, np.full(k + 1, 1 / (k + 1)), rtol=1e-14)
    # the same through a schedule: beta(t + 1) = 1 / (t + 1)
    np.testing.assert_allclose(weights(Schedule(c_b=1.0, b=1.0), k), w, rtol=1e-14)


def test_beta_one_kills_history():
    w = weights_from_betas(np.ones(6))
    np.testing.assert_array_equal(w, [0, 0, 0, 0, 0, 1])


def test_weights_sum_to_one(rng):
    for k in range(51):
        betas = np.concatenate([[1.0], rng.uniform(1e-3, 1.0, size=k)])
        w = weights_from_betas(betas)
        assert abs(w.sum() - 1.0) <= 1e-13
        assert np.all(w >= 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=60))
def test_telescoping_identity(betas):
    w = weights_from_betas(betas)
    assert np.all(w >= 0)
    assert w.sum() == pytest.approx(1 - np.prod(1 - np.array(betas)), abs=1e-12)
    assert w.sum() <= 1 + 1e-12


def test_recursion_equivalence(rng):
    for k in (1, 5, 40, 100):
        betas = np.concatenate([[1.0], rng.uniform(0.01, 1.0, size=k)])
        samples = rng.normal(size=(k + 1, 3))
        u = rng.normal(size=3)  # overwritten by beta_0 = 1
        for b, s in zip(betas, samples):
            u = (1 - b) * u + b * s
        np.testing.assert_allclose(u, weights_from_betas(betas) @ samples, atol=1e-12)


def test_weights_rejects_negative_k():
    with pytest.raises(InvalidArgument):
        weights(Schedule(), -1)
    with pytest.raises(InvalidArgument):
        weights_from_betas([])
