"""Step-size laws for the two timescales and the induced smoothing weights.

The main iterate moves with ``alpha_k = c_a * k**-a`` and the inner-value
tracker with ``beta_k = c_b * k**-b``. With ``clamp_beta`` (default) the
tracker step is capped at 1, so the first update overwrites the initial
estimate and every later one is a convex combination.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

# (a, b) exponent pairs
REGIMES = {
    "nonconvex_general": (5 / 9, 4 / 9),
    "nonconvex_linear": (1 / 2, 1 / 2),
    "stronglyconvex_general": (1.0, 4 / 5),
    "stronglyconvex_linear": (1.0, 1.0),
}


@dataclass(frozen=True)
class Regime:
    name: str
    a: float
    b: float


def regime(name):
    try:
        a, b = REGIMES[name]
    except KeyError:
        raise InvalidArgument(f"unknown regime {name!r}; expected one of {sorted(REGIMES)}") from None
    return Regime(name, a, b)


@dataclass(frozen=True)
class Schedule:
    c_a: float = 1.0
    a: float = 1.0
    c_b: float = 2.0
    b: float = 1.0
    clamp_beta: bool = True

    def __post_init__(self):
        if not self.c_a > 0 or not self.c_b > 0:
            raise InvalidArgument(f"c_a and c_b must be positive, got {self.c_a}, {self.c_b}")
        for name in ("a", "b"):
            e = getattr(self, name)
            if not 0 < e <= 1:
                raise InvalidArgument(f"exponent {name} must lie in (0, 1], got {e}")

    @classmethod
    def from_regime(cls, name, c_a=1.0, c_b=2.0, clamp_beta=True):
        r = regime(name)
        return cls(c_a=c_a, a=r.a, c_b=c_b, b=r.b, clamp_beta=clamp_beta)

    def alpha(self, k):
        return alpha(self, k)

    def beta(self, k):
        return beta(self, k)


def _check_k(k):
    if k < 1:
        raise InvalidArgument(f"iteration index must be >= 1, got {k}")


def alpha(s, k):
    _check_k(k)
    return s.c_a * k ** -s.a


def beta(s, k):
    _check_k(k)
    raw = s.c_b * k ** -s.b
    return min(raw, 1.0) if s.clamp_beta else raw


def weights_from_betas(betas):
    """Smoothing weights ``xi_t = beta_t * prod_{i=t+1..k} (1 - beta_i)``, ``xi_k = beta_k``.

    A recursion ``u <- (1 - beta_t) u + beta_t s_t`` run over ``betas`` with
    ``betas[0] == 1`` ends at ``sum_t xi_t s_t``. Computed in O(k) with a
    backward running product; a product that underflows is below the double
    range and is returned as 0.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1 or betas.size == 0:
        raise InvalidArgument("betas must be a nonempty 1-D sequence")
    tail = np.ones_like(betas)
    if betas.size > 1:
        tail[:-1] = np.cumprod((1.0 - betas[1:])[::-1])[::-1]
    return betas * tail


def weights(s, k):
    """Weights ``(xi_0, ..., xi_k)`` for schedule ``s``.

    Weight index ``t`` is paired with solver iteration ``t + 1``, so
    ``beta_0`` here is ``s.beta(1)`` (equal to 1 whenever clamping is active
    and ``c_b >= 1``).
    """
    if k < 0:
        raise InvalidArgument(f"k must be nonnegative, got {k}")
    return weights_from_betas([beta(s, t + 1) for t in range(k + 1)])
