"""Synthetic compositions with exact models.

``LinearCompositionOracle`` has a noisy affine inner map and a quadratic
outer function, so its solution set is available in closed form.
``NonconvexOracle`` composes a finite average of ``tanh`` layers with a noisy
quadratic; it has an exact gradient but no known solution set.
"""
import numpy as np

from ..errors import InvalidArgument
from ..oracle import CompositionOracle, Truth
from .linalg import LeastSquaresSolution


class LinearCompositionOracle(CompositionOracle):
    """``g_w(x) = (A + sA E_w) x - (c + sc e_w)``, ``f(u) = |u|^2 / 2``.

    ``E_w`` and ``e_w`` are standard Gaussian and come from the same draw.
    """

    def __init__(self, A, c, noise_A=0.1, noise_c=0.1, seed=None):
        A = np.asarray(A, dtype=float)
        c = np.asarray(c, dtype=float)
        if A.ndim != 2 or c.shape != (A.shape[0],):
            raise InvalidArgument("A must be (m, n) and c must be (m,)")
        self.A, self.c = A, c
        self.noise_A, self.noise_c = float(noise_A), float(noise_c)
        self.solutions = LeastSquaresSolution(A, c)
        truth = Truth(
            g=lambda x: A @ x - c,
            jacobian=lambda x: A,
            f=lambda u: 0.5 * float(u @ u),
            grad_f=lambda u: u,
            project=self.solutions.project,
        )
        super().__init__(A.shape[1], A.shape[0], seed=seed, truth=truth)

    def _sample_inner(self, x):
        m, n = self.A.shape
        jac = self.A
        shift = self.c
        if self.noise_A:
            jac = self.A + self.noise_A * self.rng.standard_normal((m, n))
        if self.noise_c:
            shift = self.c + self.noise_c * self.rng.standard_normal(m)
        return jac @ x - shift, jac

    def _sample_outer(self, u):
        return u.copy()


def random_linear_problem(m, n, seed=None, data_seed=None, noise_A=0.1, noise_c=0.1, rank=None):
    """Random instance with singular values in ``[0.5, 1]``; ``rank < n`` makes ``X*`` a subspace."""
    rng = np.random.default_rng(data_seed)
    r = min(m, n) if rank is None else rank
    U = np.linalg.qr(rng.standard_normal((m, r)))[0]
    V = np.linalg.qr(rng.standard_normal((n, r)))[0]
    s = np.linspace(1.0, 0.5, r)
    A = (U * s) @ V.T
    c = rng.standard_normal(m)
    return LinearCompositionOracle(A, c, noise_A=noise_A, noise_c=noise_c, seed=seed)


class NonconvexOracle(CompositionOracle):
    """``g_i(x) = tanh(B_i x)`` for a uniformly drawn ``i``; ``f_v(u) = |u - c - s v|^2 / 2``."""

    def __init__(self, B, c, noise_f=0.1, seed=None):
        B = np.asarray(B, dtype=float)
        c = np.asarray(c, dtype=float)
        if B.ndim != 3 or c.shape != (B.shape[1],):
            raise InvalidArgument("B must be (N, m, n) and c must be (m,)")
        self.B, self.c, self.noise_f = B, c, float(noise_f)
        truth = Truth(g=self.g, jacobian=self.jacobian,
                      f=lambda u: 0.5 * float((u - c) @ (u - c)), grad_f=lambda u: u - c)
        super().__init__(B.shape[2], B.shape[1], seed=seed, truth=truth)

    def g(self, x):
        return np.tanh(self.B @ x).mean(axis=0)

    def jacobian(self, x):
        t = np.tanh(self.B @ x)
        return ((1.0 - t * t)[:, :, None] * self.B).mean(axis=0)

    def _sample_inner(self, x):
        Bi = self.B[self.rng.integers(self.B.shape[0])]
        t = np.tanh(Bi @ x)
        return t, (1.0 - t * t)[:, None] * Bi

    def _sample_outer(self, u):
        return u - self.c - self.noise_f * self.rng.standard_normal(u.shape[0])


def nonconvex_problem(n=4, m=3, n_samples=20, seed=None, data_seed=None, spread=0.3, noise_f=0.1):
    rng = np.random.default_rng(data_seed)
    B0 = rng.standard_normal((m, n))
    B = B0 + spread * rng.standard_normal((n_samples, m, n))
    c = 0.8 * np.tanh(rng.standard_normal(m))
    return NonconvexOracle(B, c, noise_f=noise_f, seed=seed)
