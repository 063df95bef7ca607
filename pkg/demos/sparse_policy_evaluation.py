"""
Sparse value functions with an l1 penalty
=========================================

100 features, of which only the first four carry the planted value function.
Adding lam * |w|_1 makes ASC-PG a proximal method: each step ends with a soft
threshold, which zeroes most of the irrelevant weights.
"""
import numpy as np

from ascpg import Regularizer, Schedule, SolverConfig, run
from ascpg.problems import ProblemSpec

problem = ProblemSpec("random_mdp", {"S": 100, "d": 100, "planted": "sparse"})
schedule = Schedule.from_regime("stronglyconvex_linear", c_a=0.5, c_b=4.0)

for lam in (0.0, 0.03, 0.1):
    reg = Regularizer.l1(lam) if lam else Regularizer.zero()
    cfg = SolverConfig(schedule, regularizer=reg, max_iters=20_000, trace_stride=20_000, seed=0)
    w = run(problem(0), cfg).final_state.x
    top = sorted(np.argsort(-np.abs(w))[:4].tolist())
    print(f"lam={lam:<5g} largest |w_i| at {top}, exact zeros {np.sum(w == 0):3d}/100, "
          f"|w_rest|_1 = {np.abs(w[4:]).sum():.3f}")
