import numpy as np
import pytest

from ascpg.errors import InvalidArgument, UnsupportedOperation
from ascpg.oracle import CompositionOracle, IdentityOracle, InnerSample, as_point
from ascpg.problems import (BellmanOracle, MeanVarianceOracle, bellman_grad_f, build_random_mdp,
                            random_linear_problem)


def test_identity_query():
    o = IdentityOracle(3)
    x = np.array([1.0, -2.0, 0.5])
    s = o.query_inner(x)
    np.testing.assert_array_equal(s.value, x)
    np.testing.assert_array_equal(s.jacobian, np.eye(3))
    np.testing.assert_array_equal(o.query_outer(x).grad, x)


def test_seed_tags_count_queries():
    o = IdentityOracle(2, noise=1.0, seed=0)
    tags = [o.query_inner(np.zeros(2)).seed_tag, o.query_outer(np.zeros(2)).seed_tag,
            o.query_inner(np.zeros(2)).seed_tag]
    assert tags == [0, 1, 2] and o.draws == 3


@pytest.mark.parametrize("bad", [np.zeros(2), np.zeros((3, 1)), [1.0, np.nan, 0.0], [np.inf, 0, 0]])
def test_query_rejects_bad_points(bad):
    o = IdentityOracle(3)
    with pytest.raises(InvalidArgument):
        o.query_inner(bad)
    with pytest.raises(InvalidArgument):
        o.query_outer(bad)


def test_as_point_converts_lists():
    p = as_point([1, 2], 2)
    assert p.dtype == np.float64 and p.tolist() == [1.0, 2.0]


def test_lazy_jacobian_evaluated_once():
    calls = []

    def jac():
        calls.append(1)
        return np.eye(2)

    s = InnerSample(np.zeros(2), jac, 0)
    assert s.jacobian is s.jacobian
    assert len(calls) == 1


def test_same_seed_same_stream():
    a = build_random_mdp(10, 3, seed=4)
    o1, o2 = BellmanOracle(a, seed=9), BellmanOracle(a, seed=9)
    w = np.ones(3)
    for _ in range(20):
        s1, s2 = o1.query_inner(w), o2.query_inner(w)
        np.testing.assert_array_equal(s1.value, s2.value)
        np.testing.assert_array_equal(s1.jacobian, s2.jacobian)
    assert not np.array_equal(BellmanOracle(a, seed=10).query_inner(w).value, o1.query_inner(w).value)


def test_bellman_zero_weights_return_rewards():
    spec = build_random_mdp(8, 3, seed=1)
    o = BellmanOracle(spec, seed=0)
    for _ in range(50):
        v = o.query_inner(np.zeros(3)).value
        assert np.all(v[0::2] == 0.0)
        for s in range(spec.S):
            support = np.flatnonzero(spec.P[s] > 0)
            assert v[2 * s + 1] in spec.R[s, support]


def test_bellman_inner_mean_within_three_standard_errors():
    # S = 10 keeps the number of random components small; the phi^T w slots are exact
    spec = build_random_mdp(10, 4, seed=2)
    o = BellmanOracle(spec, seed=5)
    w = np.array([0.3, -1.0, 0.5, 2.0])
    vals = np.stack([o.query_inner(w).value for _ in range(100_000)])
    g = o.truth.g(w)
    se = vals.std(axis=0, ddof=1) / np.sqrt(vals.shape[0])
    dev = np.abs(vals.mean(axis=0) - g)
    assert np.all(dev[0::2] <= 1e-10)
    assert np.all(dev[1::2] <= 3 * se[1::2])


def test_bellman_outer_gradient_examples():
    np.testing.assert_array_equal(bellman_grad_f(np.zeros(4)), np.zeros(4))
    np.testing.assert_array_equal(bellman_grad_f(np.array([1.0, 0.0])), [2.0, -2.0])


def test_mean_variance_outer_gradient():
    o = MeanVarianceOracle(np.ones((3, 2)), np.zeros(3), lam=1.0)
    np.testing.assert_array_equal(o.query_outer(np.array([1.0, 1.0])).grad, [-1.0, 1.0])


def test_true_gradient_vanishes_at_least_squares_solution():
    o = random_linear_problem(6, 4, data_seed=3)
    x_star = np.linalg.lstsq(o.A, o.c, rcond=None)[0]
    assert np.linalg.norm(o.true_gradient(x_star)) <= 1e-10


def test_true_gradient_needs_truth():
    o = IdentityOracle(2).without_truth()
    with pytest.raises(UnsupportedOperation):
        o.true_gradient(np.zeros(2))


def test_base_oracle_is_abstract():
    o = CompositionOracle(2, 2)
    with pytest.raises(NotImplementedError):
        o.query_inner(np.zeros(2))


def test_identity_noise_is_unbiased():
    o = IdentityOracle(2, noise=0.5, seed=3)
    x = np.array([1.0, -1.0])
    vals = np.stack([o.query_inner(x).value for _ in range(20_000)])
    assert np.all(np.abs(vals.mean(axis=0) - x) <= 4 * 0.5 / np.sqrt(20_000))
