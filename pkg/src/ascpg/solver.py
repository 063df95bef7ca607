"""ASC-PG and SCGD main loops.

Both methods keep a main iterate ``x`` and a running estimate ``y`` of the
inner value ``g(x)``. Per iteration they spend three oracle queries: the inner
Jacobian at ``x_k``, the outer gradient at ``y_k`` and an inner value used to
refresh ``y``. ASC-PG samples that value at the extrapolated point
``z_{k+1} = x_k + (x_{k+1} - x_k) / beta_k``; SCGD samples it at ``x_{k+1}``.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidArgument
from .prox import Regularizer, prox, value as reg_value
from .schedules import Schedule

QUERIES_PER_ITER = 3
DIVERGENCE_THRESHOLD = 1e12
METHODS = ("ascpg", "scgd")

# trace CSV column order; metric columns are NaN (empty cell) without an exact model
COLUMNS = ("k", "queries", "dist", "dist_sq", "grad_norm_sq", "tracking_err_sq", "step_len", "objective")


@dataclass
class SolverState:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    k: int = 1
    oracle_queries: int = 0


@dataclass(frozen=True)
class SolverConfig:
    schedule: Schedule = field(default_factory=Schedule)
    regularizer: Regularizer = field(default_factory=Regularizer.zero)
    max_iters: int = 1000
    seed: int | None = None
    trace_stride: int = 1
    warm_start_y: bool = True
    method: str = "ascpg"
    x0: np.ndarray | None = None
    y0: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgument(f"max_iters must be >= 1, got {self.max_iters}")
        if self.trace_stride < 1:
            raise InvalidArgument(f"trace_stride must be >= 1, got {self.trace_stride}")
        if self.method not in METHODS:
            raise InvalidArgument(f"unknown method {self.method!r}; expected one of {METHODS}")


class RunTrace:
    """Per-iteration records of one run, one array per column of ``COLUMNS``.

    Row ``i`` describes iterate ``x_k`` (with ``k = self.k[i]``) before step
    ``k``: its distance to the solution set, true gradient norm, tracking error
    of ``y_k``, objective, the length of the step it takes, and the cumulative
    oracle queries after that step.
    """

    def __init__(self, columns=None, method="ascpg", seed=None):
        self.columns = {c: np.asarray(columns[c], dtype=float) for c in COLUMNS} if columns else None
        self._rows = [] if columns is None else None
        self.method = method
        self.seed = seed
        self.max_step_ratio = 0.0  # max_k |x_{k+1} - x_k| / alpha_k over every iteration
        self.final_state = None

    def _append(self, row):
        self._rows.append(row)

    def _freeze(self):
        if self._rows is not None:
            data = np.array(self._rows, dtype=float).reshape(-1, len(COLUMNS))
            self.columns = {c: data[:, i] for i, c in enumerate(COLUMNS)}
            self._rows = None
        return self

    def __getitem__(self, name):
        self._freeze()
        return self.columns[name]

    def __len__(self):
        self._freeze()
        return len(self.columns["k"])

    def has(self, name):
        col = self[name]
        return col.size > 0 and bool(np.isfinite(col).all())

    def to_csv(self, path):
        self._freeze()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for i in range(len(self)):
                w.writerow(_fmt(c, self.columns[c][i]) for c in COLUMNS)

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        cols = {c: [float(r[c]) if r[c] != "" else math.nan for r in rows] for c in COLUMNS}
        return cls(cols)


def _fmt(col, v):
    if col in ("k", "queries"):
        return str(int(v))
    return "" if math.isnan(v) else repr(float(v))


def _check_finite(k, *arrays):
    for a in arrays:
        # |a|^2 below the threshold squared bounds every coordinate; NaN fails both tests
        if a @ a <= DIVERGENCE_THRESHOLD ** 2:
            continue
        if not np.abs(a).max(initial=0.0) <= DIVERGENCE_THRESHOLD:
            raise DivergenceError(k)


def _advance(state, oracle, cfg, extrapolate):
    k = state.k
    a_k = cfg.schedule.alpha(k)
    b_k = cfg.schedule.beta(k)
    x = state.x
    jac = oracle.query_inner(x).jacobian
    grad_f = oracle.query_outer(state.y).grad
    x_next = prox(cfg.regularizer, a_k, x - a_k * (jac.T @ grad_f))
    if extrapolate:
        z_next = (1.0 - 1.0 / b_k) * x + (1.0 / b_k) * x_next
    else:
        z_next = x_next
    y_next = (1.0 - b_k) * state.y + b_k * oracle.query_inner(z_next).value
    _check_finite(k, x_next, y_next, z_next)
    return SolverState(x_next, y_next, z_next, k + 1, state.oracle_queries + QUERIES_PER_ITER)


def ascpg_step(state, oracle, cfg):
    """One ASC-PG iteration: prox step on ``x``, then extrapolate ``z`` and smooth ``y``."""
    if state.k < 1:
        raise InvalidArgument(f"state.k must be >= 1, got {state.k}")
    return _advance(state, oracle, cfg, extrapolate=True)


def scgd_step(state, oracle, cfg):
    """Baseline iteration without extrapolation: ``y`` is refreshed at ``x_{k+1}``."""
    if state.k < 1:
        raise InvalidArgument(f"state.k must be >= 1, got {state.k}")
    return _advance(state, oracle, cfg, extrapolate=False)


def initial_state(oracle, cfg):
    """Build ``(x_1, y_1, z_1)``; spends one query when ``warm_start_y`` is set."""
    n, m = oracle.inner_dim, oracle.outer_dim
    x = np.zeros(n) if cfg.x0 is None else np.array(cfg.x0, dtype=float)
    if x.shape != (n,):
        raise InvalidArgument(f"x0 must have shape ({n},), got {x.shape}")
    queries = 0
    if cfg.warm_start_y:
        y = oracle.query_inner(x).value.copy()
        queries = 1
    else:
        y = np.zeros(m) if cfg.y0 is None else np.array(cfg.y0, dtype=float)
        if y.shape != (m,):
            raise InvalidArgument(f"y0 must have shape ({m},), got {y.shape}")
    return SolverState(x, y, x.copy(), 1, queries)


def run(oracle, cfg, reference=None):
    """Run ``cfg.max_iters`` iterations and return the :class:`RunTrace`.

    If ``cfg.seed`` is set the oracle's generator is reseeded first, so equal
    seeds give bit-identical traces. Distances are measured to ``reference``
    when given, otherwise to the projection onto the exact solution set (if the
    oracle has one).
    """
    if cfg.seed is not None:
        oracle.rng = np.random.default_rng(cfg.seed)
        oracle.draws = 0
    extrapolate = cfg.method == "ascpg"
    truth = oracle.truth
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        project = lambda x: reference  # noqa: E731
    elif truth is not None and truth.has_solution_set:
        project = truth.project
    else:
        project = None

    trace = RunTrace(method=cfg.method, seed=cfg.seed)
    state = initial_state(oracle, cfg)
    K, stride, sched = cfg.max_iters, cfg.trace_stride, cfg.schedule
    nan = math.nan
    for k in range(1, K + 1):
        try:
            new = _advance(state, oracle, cfg, extrapolate)
        except DivergenceError as err:
            err.trace = trace._freeze()
            trace.final_state = state
            raise
        dx = new.x - state.x
        step_len = math.sqrt(dx @ dx)
        ratio = step_len / sched.alpha(k)
        if ratio > trace.max_step_ratio:
            trace.max_step_ratio = ratio
        if k == 1 or k % stride == 0 or k == K:
            x = state.x
            dist = dist_sq = grad_sq = track_sq = obj = nan
            if project is not None:
                dist = float(np.linalg.norm(x - project(x)))
                dist_sq = dist * dist
            if truth is not None:
                gx = truth.g(x)
                gF = truth.jacobian(x).T @ truth.grad_f(gx)
                grad_sq = float(gF @ gF)
                e = state.y - gx
                track_sq = float(e @ e)
                obj = float(truth.f(gx)) + reg_value(cfg.regularizer, x)
            trace._append((k, new.oracle_queries, dist, dist_sq, grad_sq, track_sq, step_len, obj))
        state = new
    trace.final_state = state
    return trace._freeze()
