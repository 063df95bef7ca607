"""
A nonconvex composition
=======================

Without convexity the guarantee is about stationarity: the running average
of |grad F(x_k)|^2 should shrink like a power of k.
"""
from ascpg import Schedule, SolverConfig
from ascpg.harness import run_seeds
from ascpg.metrics import aggregate, fit_slope
from ascpg.problems import ProblemSpec

cfg = SolverConfig(Schedule.from_regime("nonconvex_general", c_a=0.5, c_b=1.0), max_iters=5000, trace_stride=1)
res = run_seeds(ProblemSpec("nonconvex"), cfg, seeds=range(5))
series = aggregate([r.trace for r in res], "grad_norm_sq_avg", "k")
for k in (10, 100, 1000, 5000):
    print(f"k = {k:5d}   mean of |grad F|^2 so far: {series.mean[k - 1]:.4e}")
print(f"slope {fit_slope(series).slope:.3f}")
