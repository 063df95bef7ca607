"""
Mean-variance portfolio
=======================

Minimise E[loss] + lam * Var[loss] over a box. The variance term is a
nonlinear function of two expectations, which is exactly the compositional
structure ASC-PG handles with one running estimate of (E h, E h^2).
"""
import numpy as np

from ascpg import Regularizer, Schedule, SolverConfig, run
from ascpg.problems import ProblemSpec

problem = ProblemSpec("meanvariance", {"dim": 5, "lam": 0.1})
oracle = problem(0)
x_star = oracle.solution
print("minimiser:", np.round(x_star, 4))

cfg = SolverConfig(Schedule.from_regime("stronglyconvex_general", c_a=0.4, c_b=4.0),
                   regularizer=Regularizer.box(-1.0, 1.0), max_iters=50_000, trace_stride=10_000, seed=0)
trace = run(oracle, cfg)
for k, d, obj in zip(trace["k"], trace["dist"], trace["objective"]):
    print(f"k = {int(k):6d}   |x - x*| = {d:.3e}   objective {obj:.6f}")
print("final iterate:", np.round(trace.final_state.x, 4))
