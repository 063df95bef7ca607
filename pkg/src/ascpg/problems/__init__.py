"""Benchmark problem families and a by-name registry used by the harness and CLI."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument
from ..oracle import IdentityOracle
from .bellman import BellmanOracle, bellman_f, bellman_grad_f
from .linalg import LeastSquaresSolution
from .mdp import (
    MdpSpec,
    bellman_residual_objective,
    build_baird,
    build_random_mdp,
    dumps_mdp,
    exact_solution,
    load_mdp,
    loads_mdp,
    save_mdp,
    solution_set,
    sparse_weights,
)
from .meanvariance import MeanVarianceOracle, mean_variance_oracle
from .synthetic import LinearCompositionOracle, NonconvexOracle, nonconvex_problem, random_linear_problem

# every family's parameters with their defaults; the default's type is the parameter's type
FAMILY_DEFAULTS = {
    "identity": {"n": 2, "noise": 0.0},
    "linear": {"m": 6, "n": 4, "noise_A": 0.1, "noise_c": 0.1, "rank": 0, "data_seed": 0},
    "random_mdp": {
        "S": 100, "d": 20, "actions": 3, "next_states": 4, "gamma": 0.9, "data_seed": 0,
        "planted": "none", "n_nonzero": 4, "exact": False,
    },
    "baird": {"gamma": 0.99, "p_solid": 0.5, "exact": False},
    "meanvariance": {"dim": 5, "lam": 0.1, "n_samples": 50, "noise": 0.5, "data_seed": 0},
    "nonconvex": {"n": 4, "m": 3, "n_samples": 20, "data_seed": 0},
}
PLANTED = ("none", "gaussian", "sparse")


def coerce(value, like):
    """Convert ``value`` (often a string from a config file) to the type of ``like``."""
    if isinstance(like, bool):
        if isinstance(value, bool):
            return value
        s = str(value).strip().lower()
        if s in ("1", "true", "yes", "on"):
            return True
        if s in ("0", "false", "no", "off"):
            return False
        raise InvalidArgument(f"expected a boolean, got {value!r}")
    try:
        return type(like)(value)
    except (TypeError, ValueError):
        raise InvalidArgument(f"expected {type(like).__name__}, got {value!r}") from None


def make_mdp(p):
    if p["planted"] not in PLANTED:
        raise InvalidArgument(f"planted must be one of {PLANTED}, got {p['planted']!r}")
    w_star = None
    if p["planted"] == "gaussian":
        w_star = np.random.default_rng([p["data_seed"], 1]).standard_normal(p["d"])
    elif p["planted"] == "sparse":
        w_star = sparse_weights(p["d"], p["n_nonzero"])
    return build_random_mdp(p["S"], p["d"], p["actions"], p["next_states"], p["gamma"],
                            seed=p["data_seed"], w_star=w_star)


@dataclass(frozen=True)
class ProblemSpec:
    """A problem family name plus parameters; ``build(seed)`` returns a fresh oracle.

    Picklable, so it can be shipped to worker processes.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILY_DEFAULTS:
            raise InvalidArgument(f"unknown problem family {self.family!r}; expected one of {sorted(FAMILY_DEFAULTS)}")
        defaults = FAMILY_DEFAULTS[self.family]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise InvalidArgument(f"unknown parameter(s) for {self.family}: {', '.join(sorted(unknown))}")
        merged = {k: coerce(self.params[k], v) if k in self.params else v for k, v in defaults.items()}
        object.__setattr__(self, "params", merged)

    def build(self, seed=None):
        p, fam = self.params, self.family
        if fam == "identity":
            return IdentityOracle(p["n"], noise=p["noise"], seed=seed)
        if fam == "linear":
            return random_linear_problem(p["m"], p["n"], seed=seed, data_seed=p["data_seed"],
                                         noise_A=p["noise_A"], noise_c=p["noise_c"], rank=p["rank"] or None)
        if fam == "random_mdp":
            return BellmanOracle(make_mdp(p), seed=seed, exact=p["exact"])
        if fam == "baird":
            return BellmanOracle(build_baird(gamma=p["gamma"], p_solid=p["p_solid"]), seed=seed, exact=p["exact"])
        if fam == "meanvariance":
            return mean_variance_oracle(p["dim"], p["lam"], data_seed=p["data_seed"],
                                        n_samples=p["n_samples"], noise=p["noise"], seed=seed)
        return nonconvex_problem(p["n"], p["m"], p["n_samples"], seed=seed, data_seed=p["data_seed"])

    def __call__(self, seed=None):
        return self.build(seed)


__all__ = [
    "BellmanOracle", "FAMILY_DEFAULTS", "LeastSquaresSolution", "LinearCompositionOracle", "MdpSpec",
    "MeanVarianceOracle", "NonconvexOracle", "ProblemSpec", "bellman_f", "bellman_grad_f",
    "bellman_residual_objective", "build_baird", "build_random_mdp", "dumps_mdp", "exact_solution",
    "load_mdp", "loads_mdp", "make_mdp", "mean_variance_oracle", "nonconvex_problem",
    "random_linear_problem", "save_mdp", "solution_set", "sparse_weights",
]
