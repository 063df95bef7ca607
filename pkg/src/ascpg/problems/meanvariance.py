"""Risk-averse least squares: minimize ``E[h] + lam * Var[h]`` over a finite dataset.

With ``h(x; a, b) = (a^T x - b)^2`` the problem is written as a composition
with inner map ``g(x) = (E h, E h^2)`` and outer
``f(u1, u2) = u1 + lam * (u2 - u1^2)``, since ``Var h = E h^2 - (E h)^2``.
The sampling oracle draws one data index per inner query, so the value
``(h_i, h_i^2)`` and its Jacobian ``(grad h_i, 2 h_i grad h_i)`` share a draw.
"""
import numpy as np

from ..errors import ConstructionError, InvalidArgument
from ..oracle import CompositionOracle, Truth


class MeanVarianceOracle(CompositionOracle):
    def __init__(self, a, b, lam, seed=None):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.ndim != 2 or b.shape != (a.shape[0],):
            raise InvalidArgument("a must be (N, dim) and b must be (N,)")
        if not lam >= 0:
            raise InvalidArgument(f"lam must be nonnegative, got {lam}")
        self.a, self.b, self.lam = a, b, float(lam)
        self._solution = None
        truth = Truth(g=self.g, jacobian=self.jacobian, f=self.f, grad_f=self.grad_f,
                      project=lambda x: self.solution.copy())
        super().__init__(a.shape[1], 2, seed=seed, truth=truth)

    @property
    def n_samples(self):
        return self.a.shape[0]

    def losses(self, x):
        return (self.a @ x - self.b) ** 2

    def g(self, x):
        h = self.losses(x)
        return np.array([h.mean(), (h * h).mean()])

    def jacobian(self, x):
        r = self.a @ x - self.b
        dh = 2.0 * r[:, None] * self.a
        return np.vstack([dh.mean(axis=0), (2.0 * (r * r)[:, None] * dh).mean(axis=0)])

    def f(self, u):
        return float(u[0] + self.lam * (u[1] - u[0] ** 2))

    def grad_f(self, u):
        return np.array([1.0 - 2.0 * self.lam * u[0], self.lam])

    def objective(self, x):
        """``mean(h) + lam * var(h)`` evaluated directly on the losses."""
        h = self.losses(x)
        return float(h.mean() + self.lam * h.var())

    def hessian(self, x):
        r = self.a @ x - self.b
        aa = self.a[:, :, None] * self.a[:, None, :]
        m1 = (r * r).mean()
        dm1 = (2.0 * r[:, None] * self.a).mean(axis=0)
        H1 = 2.0 * aa.mean(axis=0)
        H2 = (12.0 * (r * r)[:, None, None] * aa).mean(axis=0)
        return H1 + self.lam * (H2 - 2.0 * np.outer(dm1, dm1) - 2.0 * m1 * H1)

    @property
    def solution(self):
        """Minimizer found by damped Newton from the least-squares fit (cached)."""
        if self._solution is None:
            self._solution = self._solve()
        return self._solution

    def _solve(self, tol=1e-13, max_iter=100):
        x = np.linalg.lstsq(self.a, self.b, rcond=None)[0]
        F = self.truth.F
        for _ in range(max_iter):
            grad = self.truth.grad_F(x)
            if np.linalg.norm(grad) <= tol * max(1.0, abs(F(x))):
                break
            H = self.hessian(x)
            try:
                step = np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                step = grad
            if grad @ step <= 0:
                step = grad
            t, fx = 1.0, F(x)
            while F(x - t * step) > fx and t > 1e-12:
                t *= 0.5
            x = x - t * step
        if np.linalg.eigvalsh(self.hessian(x)).min() <= 0:
            raise ConstructionError("mean-variance objective is not locally strongly convex at the computed minimizer")
        return x

    def _sample_inner(self, x):
        i = self.rng.integers(self.n_samples)
        ai = self.a[i]
        r = ai @ x - self.b[i]
        h = r * r
        dh = (2.0 * r) * ai
        return np.array([h, h * h]), np.vstack([dh, (2.0 * h) * dh])

    def _sample_outer(self, u):
        return self.grad_f(u)


def mean_variance_oracle(dim, lam, data_seed=None, n_samples=50, noise=0.5, seed=None):
    """Gaussian regression data ``b = a^T x_true + noise * eps`` wrapped as a :class:`MeanVarianceOracle`."""
    if not lam >= 0:
        raise InvalidArgument(f"lam must be nonnegative, got {lam}")
    rng = np.random.default_rng(data_seed)
    a = rng.standard_normal((n_samples, dim))
    x_true = rng.standard_normal(dim) / np.sqrt(dim)
    b = a @ x_true + noise * rng.standard_normal(n_samples)
    return MeanVarianceOracle(a, b, lam, seed=seed)
