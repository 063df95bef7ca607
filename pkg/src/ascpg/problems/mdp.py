"""Fixed-policy Markov chains with linear value features.

An :class:`MdpSpec` holds the on-policy transition matrix ``P``, the
per-transition rewards ``R[s, s']``, the discount ``gamma`` and the feature
matrix ``Phi`` (one row per state). Policy evaluation is posed as Bellman
residual minimization

    min_w  sum_s (phi_s^T w - q_s(w))^2,   q_s(w) = sum_s' P[s, s'] (R[s, s'] + gamma phi_s'^T w),

which is the linear least-squares problem ``|(Phi - gamma P Phi) w - rbar|^2``
with ``rbar_s = sum_s' P[s, s'] R[s, s']``.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ConstructionError, InvalidArgument
from .linalg import LeastSquaresSolution

ROW_SUM_TOL = 1e-12
MAX_FEATURE_REDRAWS = 100


@dataclass
class MdpSpec:
    P: np.ndarray
    R: np.ndarray
    gamma: float
    Phi: np.ndarray
    w_star: np.ndarray | None = None
    P_actions: np.ndarray | None = None  # (A, S, S) per-action kernels, when generated

    @property
    def S(self):
        return self.P.shape[0]

    @property
    def d(self):
        return self.Phi.shape[1]

    def validate(self):
        S = self.P.shape[0]
        if self.P.shape != (S, S) or self.R.shape != (S, S):
            raise InvalidArgument(f"P and R must be square of the same size, got {self.P.shape}, {self.R.shape}")
        if self.Phi.ndim != 2 or self.Phi.shape[0] != S:
            raise InvalidArgument(f"Phi must have {S} rows, got shape {self.Phi.shape}")
        if not 0 < self.gamma < 1:
            raise InvalidArgument(f"gamma must lie in (0, 1), got {self.gamma}")
        check_stochastic(self.P)
        return self

    @property
    def expected_rewards(self):
        return (self.P * self.R).sum(axis=1)

    def residual_map(self):
        """``(A, c)`` with Bellman residual ``A w - c``."""
        A = self.Phi - self.gamma * (self.P @ self.Phi)
        return A, self.expected_rewards


def check_stochastic(P, tol=ROW_SUM_TOL):
    if np.any(P < 0):
        raise InvalidArgument("transition matrix has negative entries")
    worst = float(np.max(np.abs(P.sum(axis=1) - 1.0)))
    if worst > tol:
        raise InvalidArgument(f"transition matrix rows must sum to 1 (max deviation {worst:.3g})")


def random_features(rng, S, d):
    """Gaussian features scaled to unit expected row norm, redrawn until rank ``d``."""
    for _ in range(MAX_FEATURE_REDRAWS):
        Phi = rng.standard_normal((S, d)) / np.sqrt(d)
        if np.linalg.matrix_rank(Phi) == d:
            return Phi
    raise ConstructionError(f"could not draw a rank-{d} feature matrix with {S} states")


def planted_rewards(P, Phi, gamma, w_star, noise_rewards):
    """Shift ``noise_rewards`` row-wise so that ``Phi @ w_star`` solves the Bellman equation."""
    target = (Phi - gamma * (P @ Phi)) @ w_star
    mean = (P * noise_rewards).sum(axis=1)
    return noise_rewards + (target - mean)[:, None]


def build_random_mdp(S, d, actions_per_state=3, next_states=4, gamma=0.9, seed=None,
                     w_star=None, policy=None):
    """Random chain in the style of the Experiment-2 benchmark.

    Each state gets ``next_states`` reachable successors shared by all its
    actions; each action's probabilities over them are uniform draws
    normalized to one, and ``P`` mixes the action kernels with ``policy``
    (``(S, A)`` action probabilities, uniform by default). Rewards are
    uniform on ``[0, 1]``. With ``w_star`` the rewards are shifted per row so
    that ``Phi @ w_star`` is the exact value function.
    """
    if S < 2 or d < 1 or not 1 <= next_states <= S or actions_per_state < 1:
        raise InvalidArgument(f"invalid sizes S={S}, d={d}, next_states={next_states}, actions={actions_per_state}")
    rng = np.random.default_rng(seed)
    A = actions_per_state
    kernels = np.zeros((A, S, S))
    for s in range(S):
        support = rng.choice(S, size=next_states, replace=False)
        probs = rng.random((A, next_states))
        probs /= probs.sum(axis=1, keepdims=True)
        kernels[:, s, support] = probs
    if policy is None:
        policy = np.full((S, A), 1.0 / A)
    policy = np.asarray(policy, dtype=float)
    P = np.einsum("sa,ast->st", policy, kernels)
    P /= P.sum(axis=1, keepdims=True)
    R = rng.random((S, S)) * (P > 0)
    Phi = random_features(rng, S, d)
    if w_star is not None:
        w_star = np.asarray(w_star, dtype=float)
        if w_star.shape != (d,):
            raise InvalidArgument(f"w_star must have shape ({d},)")
        R = planted_rewards(P, Phi, gamma, w_star, R) * (P > 0)
    return MdpSpec(P, R, float(gamma), Phi, w_star, kernels).validate()


def sparse_weights(d, n_nonzero=4, value=1.0):
    """``(value, ..., value, 0, ..., 0)`` with ``n_nonzero`` leading entries."""
    w = np.zeros(d)
    w[:n_nonzero] = value
    return w


def build_baird(seed=None, gamma=0.99, p_solid=0.5):
    """Six-state star chain in the style of Baird's counterexample.

    Five outer states and one center state (index 5). The "dashed" action
    moves to one of the outer states uniformly, the "solid" action moves to
    the center; the evaluated policy takes solid with probability
    ``p_solid``. Rewards are zero, so the true value function is 0.
    Features (7 weights): outer state ``i`` has value ``2 w_i + w_6``, the
    center has ``w_5 + 2 w_6``. ``seed`` is accepted for interface symmetry;
    the instance is deterministic.
    """
    S, d = 6, 7
    dashed = np.zeros((S, S))
    dashed[:, :5] = 1.0 / 5
    solid = np.zeros((S, S))
    solid[:, 5] = 1.0
    P = (1 - p_solid) * dashed + p_solid * solid
    Phi = np.zeros((S, d))
    for i in range(5):
        Phi[i, i] = 2.0
        Phi[i, 6] = 1.0
    Phi[5, 5] = 1.0
    Phi[5, 6] = 2.0
    return MdpSpec(P, np.zeros((S, S)), float(gamma), Phi, P_actions=np.stack([dashed, solid])).validate()


def bellman_residual_objective(spec, w):
    w = np.asarray(w, dtype=float)
    if w.shape != (spec.d,):
        raise InvalidArgument(f"w must have shape ({spec.d},), got {w.shape}")
    A, c = spec.residual_map()
    r = A @ w - c
    return float(r @ r)


def solution_set(spec):
    A, c = spec.residual_map()
    return LeastSquaresSolution(A, c)


def exact_solution(spec):
    """Minimum-norm minimizer of the Bellman residual."""
    return solution_set(spec).point


# --- plain-text fixture format -------------------------------------------------
#
#   # ascpg-mdp v1
#   S <int>
#   d <int>
#   gamma <float>
#   P            followed by S rows of S floats
#   R            followed by S rows of S floats
#   PHI          followed by S rows of d floats
#   W_STAR       (optional) followed by one row of d floats
#
# Floats are written with 17 significant digits so a round trip is exact.

def _rows(M):
    return ["  ".join(format(v, ".17g") for v in row) for row in np.atleast_2d(M)]


def dumps_mdp(spec):
    lines = ["# ascpg-mdp v1", f"S {spec.S}", f"d {spec.d}", f"gamma {spec.gamma!r}"]
    for name, M in (("P", spec.P), ("R", spec.R), ("PHI", spec.Phi)):
        lines.append(name)
        lines += _rows(M)
    if spec.w_star is not None:
        lines.append("W_STAR")
        lines += _rows(spec.w_star)
    return "\n".join(lines) + "\n"


def save_mdp(spec, path):
    with open(path, "w") as fh:
        fh.write(dumps_mdp(spec))


def loads_mdp(text, validate=True):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    header = {}
    i = 0
    while i < len(lines) and lines[i].split()[0] in ("S", "d", "gamma"):
        key, val = lines[i].split()
        header[key] = val
        i += 1
    try:
        S, d, gamma = int(header["S"]), int(header["d"]), float(header["gamma"])
    except KeyError as err:
        raise InvalidArgument(f"mdp fixture header is missing {err.args[0]!r}") from None

    def block(name, nrows, ncols):
        nonlocal i
        if i >= len(lines) or lines[i] != name:
            raise InvalidArgument(f"mdp fixture: expected section {name!r}")
        rows = [[float(v) for v in ln.split()] for ln in lines[i + 1:i + 1 + nrows]]
        M = np.array(rows, dtype=float)
        if M.shape != (nrows, ncols):
            raise InvalidArgument(f"mdp fixture: section {name} has shape {M.shape}, expected {(nrows, ncols)}")
        i += 1 + nrows
        return M

    P = block("P", S, S)
    R = block("R", S, S)
    Phi = block("PHI", S, d)
    w_star = block("W_STAR", 1, d)[0] if i < len(lines) else None
    spec = MdpSpec(P, R, gamma, Phi, w_star)
    return spec.validate() if validate else spec


def load_mdp(path, validate=True):
    with open(path) as fh:
        return loads_mdp(fh.read(), validate=validate)
