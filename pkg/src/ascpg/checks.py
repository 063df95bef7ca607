"""Empirical checks of the oracle assumptions and problem structure.

Each check returns a :class:`CheckResult`; :func:`run_checks` picks the checks
that apply to an oracle (by its exact model and family) and runs them all.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .problems.bellman import BellmanOracle
from .problems.mdp import ROW_SUM_TOL
from .problems.meanvariance import MeanVarianceOracle

SE_BOUND = 4.0
FD_STEP = 1e-6
FD_RTOL = 1e-4


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)

    def line(self):
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}" + (f" ({self.detail})" if self.detail else "")

    def to_dict(self):
        return asdict(self)


def _points(oracle, n_points, rng, scale=1.0):
    return [scale * rng.standard_normal(oracle.inner_dim) / np.sqrt(oracle.inner_dim) for _ in range(n_points)]


def _inner_stats(oracle, x, n_draws):
    vals = np.stack([oracle.query_inner(x).value for _ in range(n_draws)])
    return vals.mean(axis=0), vals.std(axis=0, ddof=1) / np.sqrt(n_draws), vals


def check_stochastic(P):
    worst = float(np.max(np.abs(P.sum(axis=1) - 1.0)))
    ok = worst <= ROW_SUM_TOL and bool(np.all(P >= 0))
    return CheckResult("transition matrix stochastic", ok, f"max row-sum deviation {worst:.2e}")


def check_unbiased_inner(oracle, points, n_draws):
    worst = 0.0
    for x in points:
        mean, se, _ = _inner_stats(oracle, x, n_draws)
        g = oracle.truth.g(x)
        slack = 1e-10 * (1.0 + np.abs(g))
        ratio = np.abs(mean - g) / np.maximum(se, 1e-300)
        ratio[np.abs(mean - g) <= slack] = 0.0
        worst = max(worst, float(ratio.max()))
    return CheckResult("inner samples unbiased", worst <= SE_BOUND,
                       f"worst deviation {worst:.2f} standard errors over {len(points)} points")


def check_bounded_variance(oracle, points, n_draws, rtol=0.5):
    """``E|g_w(x) - g(x)|^2`` is finite and its two half-sample estimates agree at every point."""
    var, worst = [], 0.0
    for x in points:
        _, _, vals = _inner_stats(oracle, x, n_draws)
        dev = vals - oracle.truth.g(x)
        sq = np.sum(dev * dev, axis=1)
        half = sq.size // 2
        v1, v2 = sq[:half].mean(), sq[half:].mean()
        var.append(float(sq.mean()))
        if max(v1, v2) > 0:
            worst = max(worst, abs(v1 - v2) / max(v1, v2))
    var = np.array(var)
    ok = bool(np.isfinite(var).all()) and worst <= rtol
    return CheckResult("inner variance bounded", ok,
                       f"E|g_w - g|^2 in [{var.min():.3g}, {var.max():.3g}], split-half disagreement {worst:.2f}")


def check_unbiased_quasi_gradient(oracle, points, n_draws):
    """Sampled ``grad g_w(x)^T grad f_v(y)`` averages to ``grad g(x)^T grad f(y)``."""
    worst = 0.0
    for x in points:
        y = oracle.truth.g(x) + 0.1 * np.ones(oracle.outer_dim)
        samples = np.stack([oracle.query_inner(x).jacobian.T @ oracle.query_outer(y).grad for _ in range(n_draws)])
        exact = oracle.truth.jacobian(x).T @ oracle.truth.grad_f(y)
        se = samples.std(axis=0, ddof=1) / np.sqrt(n_draws)
        diff = np.abs(samples.mean(axis=0) - exact)
        ratio = diff / np.maximum(se, 1e-300)
        ratio[diff <= 1e-10 * (1.0 + np.abs(exact))] = 0.0
        worst = max(worst, float(ratio.max()))
    return CheckResult("quasi-gradient samples unbiased", worst <= SE_BOUND,
                       f"worst deviation {worst:.2f} standard errors")


def fd_gradient(F, x, h=FD_STEP):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (F(x + e) - F(x - e)) / (2 * h)
    return g


def check_fd_gradient(oracle, points):
    worst = 0.0
    for x in points:
        g = oracle.true_gradient(x)
        fd = fd_gradient(oracle.truth.F, x)
        worst = max(worst, float(np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1.0)))
    return CheckResult("true gradient matches finite differences", worst <= FD_RTOL, f"max relative error {worst:.2e}")


def check_affine_inner(oracle, rng):
    g = oracle.truth.g
    w1, w2 = rng.standard_normal((2, oracle.inner_dim))
    g0 = g(np.zeros(oracle.inner_dim))
    lhs = g(w1 + w2) - g0
    rhs = (g(w1) - g0) + (g(w2) - g0)
    scale = 1.0 + max(np.abs(lhs).max(), np.abs(rhs).max())
    err = float(np.abs(lhs - rhs).max())
    return CheckResult("inner map affine", err <= 1e-12 * scale, f"max deviation {err:.2e}")


def check_optimal_strong_convexity(oracle, points):
    sol = oracle.solutions
    F = oracle.truth.F
    worst = np.inf
    for x in points:
        px = sol.project(x)
        d2 = float((x - px) @ (x - px))
        if d2 == 0:
            continue
        worst = min(worst, (F(x) - F(px)) / d2)
    ok = worst >= sol.curvature * (1 - 1e-8)
    return CheckResult("optimally strongly convex", ok, f"min (H(x)-H(P(x)))/|x-P(x)|^2 = {worst:.4g} vs {sol.curvature:.4g}")


def check_mean_variance_composition(oracle, points):
    err = max(abs(oracle.truth.F(x) - oracle.objective(x)) for x in points)
    return CheckResult("composition equals mean + lam*var", err <= 1e-10, f"max deviation {err:.2e}")


def check_least_squares_gradient(oracle, points):
    err = 0.0
    for x in points:
        ls = 2.0 / oracle.n_samples * oracle.a.T @ (oracle.a @ x - oracle.b)
        err = max(err, float(np.linalg.norm(oracle.true_gradient(x) - ls)))
    return CheckResult("gradient matches least-squares gradient", err <= 1e-10, f"max deviation {err:.2e}")


def run_checks(oracle, seed=0, n_draws=10_000, n_points=5):
    """Run every check applicable to ``oracle``; returns a list of results."""
    rng = np.random.default_rng(seed)
    results = []
    if isinstance(oracle, BellmanOracle):
        results.append(check_stochastic(oracle.spec.P))
    if oracle.truth is None:
        return results
    points = _points(oracle, n_points, rng)
    results.append(check_unbiased_inner(oracle, points, n_draws))
    results.append(check_bounded_variance(oracle, points, n_draws))
    results.append(check_unbiased_quasi_gradient(oracle, points, n_draws))
    results.append(check_fd_gradient(oracle, points))
    if hasattr(oracle, "solutions"):
        results.append(check_affine_inner(oracle, rng))
        results.append(check_optimal_strong_convexity(oracle, points))
    if isinstance(oracle, MeanVarianceOracle):
        results.append(check_mean_variance_composition(oracle, points))
        if oracle.lam == 0:
            results.append(check_least_squares_gradient(oracle, points))
    return results
