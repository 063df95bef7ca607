import numpy as np

from ..oracle import CompositionOracle, Truth
from .mdp import solution_set


def interleave(a, b):
    """Stack ``a`` and ``b`` row-wise as ``(a_0, b_0, a_1, b_1, ...)``."""
    out = np.empty((2 * a.shape[0],) + a.shape[1:])
    out[0::2] = a
    out[1::2] = b
    return out


def bellman_f(u):
    r = u[0::2] - u[1::2]
    return float(r @ r)


def bellman_grad_f(u):
    r = 2.0 * (u[0::2] - u[1::2])
    return interleave(r, -r)


class BellmanOracle(CompositionOracle):
    """Sampling oracle for Bellman residual minimization on an :class:`MdpSpec`.

    The inner map ``g(w) = (phi_1^T w, q_1(w), ..., phi_S^T w, q_S(w))`` is
    affine in ``w``. One inner query draws a single successor ``s'`` for every
    state and returns ``r[s, s'] + gamma phi_s'^T w`` in the ``q`` slots. The
    outer function ``f(u) = sum_s (u_{2s} - u_{2s+1})^2`` is deterministic.

    ``exact=True`` replaces the samples by their expectations (zero noise).
    """

    def __init__(self, spec, seed=None, exact=False):
        self.spec = spec
        self.exact = exact
        S, d = spec.S, spec.d
        Phi, P, gamma = spec.Phi, spec.P, spec.gamma
        _, c = spec.residual_map()
        self.solutions = solution_set(spec)
        self._jac = interleave(Phi, gamma * (P @ Phi))
        self._offset = interleave(np.zeros(S), c)
        truth = Truth(
            g=lambda w: self._jac @ w + self._offset,
            jacobian=lambda w: self._jac,
            f=bellman_f,
            grad_f=bellman_grad_f,
            project=self.solutions.project,
        )
        super().__init__(d, 2 * S, seed=seed, truth=truth)
        # successor tables restricted to each row's support, padded with cdf = 1
        width = int((P > 0).sum(axis=1).max())
        succ = np.zeros((S, width), dtype=np.intp)
        cdf = np.ones((S, width))
        for s in range(S):
            support = np.flatnonzero(P[s] > 0)
            succ[s, :support.size] = support
            succ[s, support.size:] = support[-1]
            cdf[s, :support.size - 1] = np.cumsum(P[s, support])[:-1]
        self._succ, self._cdf = succ, cdf
        self._gPhi = gamma * Phi
        self._rows = np.arange(S)

    def sample_successors(self):
        """One successor state per state, ``s' ~ P[s, :]``."""
        u = self.rng.random(self.spec.S)
        idx = (self._cdf <= u[:, None]).sum(axis=1)
        return self._succ[self._rows, idx]

    def _sample_inner(self, w):
        if self.exact:
            return self._jac @ w + self._offset, self._jac
        nxt = self.sample_successors()
        gPhi = self._gPhi

        def jacobian():
            jac = np.empty_like(self._jac)
            jac[0::2] = self.spec.Phi
            jac[1::2] = gPhi[nxt]
            return jac

        Phi_w = self.spec.Phi @ w
        value = np.empty(2 * self.spec.S)
        value[0::2] = Phi_w
        value[1::2] = self.spec.R[self._rows, nxt] + self.spec.gamma * Phi_w[nxt]
        return value, jacobian

    def _sample_outer(self, u):
        return bellman_grad_f(u)
