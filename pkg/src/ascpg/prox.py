"""Penalties with closed-form proximal mappings.

``prox(reg, step, u)`` returns ``argmin_x 0.5*|x - u|^2 + step*R(x)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

KINDS = ("zero", "l1", "box")


@dataclass(frozen=True)
class Regularizer:
    kind: str = "zero"
    lam: float = 0.0
    lo: np.ndarray | float | None = None
    hi: np.ndarray | float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown regularizer kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "l1" and not (np.isfinite(self.lam) and self.lam >= 0):
            raise InvalidArgument(f"l1 weight must be a finite nonnegative number, got {self.lam}")
        if self.kind == "box":
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            if np.any(lo > hi):
                raise InvalidArgument("box bounds require lo <= hi in every coordinate")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def l1(cls, lam):
        return cls("l1", lam=float(lam))

    @classmethod
    def box(cls, lo, hi):
        return cls("box", lo=lo, hi=hi)

    def describe(self):
        if self.kind == "l1":
            return f"l1(lam={self.lam:g})"
        if self.kind == "box":
            return f"box(lo={self.lo}, hi={self.hi})"
        return "zero"


def soft_threshold(u, t):
    # |u_i| == t maps to exactly 0
    return np.sign(u) * np.maximum(np.abs(u) - t, 0.0)


def prox(reg, step, u):
    if not step > 0:
        raise InvalidArgument(f"prox step must be positive, got {step}")
    u = np.asarray(u, dtype=float)
    if reg.kind == "zero":
        return u
    if reg.kind == "l1":
        return soft_threshold(u, step * reg.lam)
    return np.clip(u, reg.lo, reg.hi)


def value(reg, x):
    """``R(x)``; the box indicator is ``inf`` outside ``[lo, hi]``."""
    x = np.asarray(x, dtype=float)
    if reg.kind == "zero":
        return 0.0
    if reg.kind == "l1":
        return reg.lam * float(np.abs(x).sum())
    inside = np.all((x >= reg.lo) & (x <= reg.hi))
    return 0.0 if inside else np.inf


def optimality_residual(reg, step, u, p):
    """Max-norm distance of ``u - p`` from ``step * dR(p)``.

    Zero (up to rounding) exactly when ``p = prox(reg, step, u)``.
    """
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    r = u - p
    if reg.kind == "zero":
        return float(np.max(np.abs(r), initial=0.0))
    if reg.kind == "l1":
        t = step * reg.lam
        dist = np.where(p != 0, np.abs(r - t * np.sign(p)), np.maximum(np.abs(r) - t, 0.0))
        return float(np.max(dist, initial=0.0))
    lo = np.broadcast_to(reg.lo, p.shape)
    hi = np.broadcast_to(reg.hi, p.shape)
    outside = np.maximum(lo - p, 0.0) + np.maximum(p - hi, 0.0)
    # normal cone of [lo, hi]: (-inf, 0] at lo, [0, inf) at hi, {0} inside
    at_lo = p == lo
    at_hi = p == hi
    dist = np.abs(r)
    dist = np.where(at_lo & ~at_hi, np.maximum(r, 0.0), dist)
    dist = np.where(at_hi & ~at_lo, np.maximum(-r, 0.0), dist)
    dist = np.where(at_lo & at_hi, 0.0, dist)
    return float(np.max(dist + outside, initial=0.0))
