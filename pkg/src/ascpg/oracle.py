"""Stochastic sampling oracles for two-level composition problems.

A problem ``min_x f(g(x)) + R(x)`` with ``f = E_v f_v`` and ``g = E_w g_w`` is
seen by the solvers only through a :class:`CompositionOracle`, which hands out
random realizations of the inner value/Jacobian and the outer gradient.
Families with a computable noise-free model attach a :class:`Truth` so that
metrics (distance to the solution set, true gradient, tracking error) can be
evaluated.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnsupportedOperation


class InnerSample:
    """One draw ``(g_w(x), grad g_w(x))``; both fields come from the same ``w``.

    ``jacobian`` may be passed as a zero-argument callable, in which case the
    (m, n) matrix is built on first access. Solvers that only need the value
    then skip the cost of forming it.
    """

    __slots__ = ("value", "_jacobian", "seed_tag")

    def __init__(self, value, jacobian, seed_tag):
        self.value = value  # (m,)
        self._jacobian = jacobian
        self.seed_tag = seed_tag

    @property
    def jacobian(self):
        if callable(self._jacobian):
            self._jacobian = self._jacobian()
        return self._jacobian

    def __repr__(self):
        return f"InnerSample(value={self.value!r}, jacobian={self.jacobian!r}, seed_tag={self.seed_tag})"


@dataclass(frozen=True, slots=True)
class OuterGradSample:
    grad: np.ndarray  # (m,)
    seed_tag: int


def as_point(x, dim, name="x"):
    """Validate ``x`` as a finite 1-D float vector of length ``dim``."""
    if type(x) is not np.ndarray or x.dtype != np.float64:
        x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise InvalidArgument(f"{name} must have shape ({dim},), got {x.shape}")
    # a nonfinite (or overflowing) sum flags any inf/nan entry
    if not math.isfinite(x.sum()) and not np.isfinite(x).all():
        raise InvalidArgument(f"{name} has nonfinite entries")
    return x


class Truth:
    """Exact accessor for the expected maps ``g``, ``f`` and their derivatives.

    ``project`` is the Euclidean projection onto the solution set ``X*`` of the
    unregularized problem; it may be omitted when the set is not known.
    """

    def __init__(self, g, jacobian, f, grad_f, project=None):
        self.g = g
        self.jacobian = jacobian
        self.f = f
        self.grad_f = grad_f
        self._project = project

    def F(self, x):
        return float(self.f(self.g(x)))

    def grad_F(self, x):
        return self.jacobian(x).T @ self.grad_f(self.g(x))

    @property
    def has_solution_set(self):
        return self._project is not None

    def project(self, x):
        if self._project is None:
            raise UnsupportedOperation("solution-set projection is not available")
        return self._project(x)


class CompositionOracle:
    """Base class of a seeded sampling oracle.

    Subclasses implement ``_sample_inner(x) -> (value, jacobian)`` and
    ``_sample_outer(y) -> grad``, drawing all randomness from ``self.rng``.
    Every public query advances ``draws`` by one, which is reported back as the
    sample's ``seed_tag``.

    Instances own mutable RNG state and must not be shared between threads.
    """

    def __init__(self, inner_dim, outer_dim, seed=None, truth=None):
        self.inner_dim = int(inner_dim)
        self.outer_dim = int(outer_dim)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.truth = truth
        self.draws = 0

    def _sample_inner(self, x):
        raise NotImplementedError

    def _sample_outer(self, y):
        raise NotImplementedError

    def query_inner(self, x):
        x = as_point(x, self.inner_dim, "x")
        value, jac = self._sample_inner(x)
        tag = self.draws
        self.draws += 1
        return InnerSample(value, jac, tag)

    def query_outer(self, y):
        y = as_point(y, self.outer_dim, "y")
        grad = self._sample_outer(y)
        tag = self.draws
        self.draws += 1
        return OuterGradSample(grad, tag)

    def true_gradient(self, x):
        """Exact ``grad F(x) = grad g(x)^T grad f(g(x))``."""
        if self.truth is None:
            raise UnsupportedOperation(f"{type(self).__name__} has no exact model")
        return self.truth.grad_F(as_point(x, self.inner_dim, "x"))

    def without_truth(self):
        """Return ``self`` with the exact model detached (simulates a black-box problem)."""
        self.truth = None
        return self


class IdentityOracle(CompositionOracle):
    """``g_w(x) = x + noise * e_w``, ``f(u) = |u|^2 / 2``; minimized at 0."""

    def __init__(self, n, noise=0.0, seed=None):
        eye = np.eye(n)
        truth = Truth(
            g=lambda x: x,
            jacobian=lambda x: eye,
            f=lambda u: 0.5 * float(u @ u),
            grad_f=lambda u: u,
            project=lambda x: np.zeros_like(x),
        )
        super().__init__(n, n, seed=seed, truth=truth)
        self.noise = float(noise)
        self._eye = eye

    def _sample_inner(self, x):
        if self.noise:
            return x + self.noise * self.rng.standard_normal(self.inner_dim), self._eye
        return x.copy(), self._eye

    def _sample_outer(self, y):
        return y.copy()
