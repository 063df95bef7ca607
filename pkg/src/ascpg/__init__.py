"""Stochastic compositional proximal gradient methods (ASC-PG, SCGD) and benchmarks."""
from .errors import ConstructionError, DivergenceError, InvalidArgument, UnsupportedOperation
from .oracle import CompositionOracle, IdentityOracle, InnerSample, OuterGradSample, Truth
from .prox import Regularizer, prox
from .schedules import REGIMES, Schedule, alpha, beta, regime, weights, weights_from_betas
from .solver import RunTrace, SolverConfig, SolverState, ascpg_step, run, scgd_step

__version__ = "0.1.0"
