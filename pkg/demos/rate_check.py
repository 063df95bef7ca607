"""
Measuring a convergence rate
============================

Run ASC-PG on a small random policy-evaluation problem with a planted
solution, average the squared distance to the solution set over seeds and
read off the log-log slope. With the linear-inner schedule the slope should
sit near -1.
"""
import numpy as np

from ascpg import Schedule, SolverConfig
from ascpg.harness import run_seeds
from ascpg.metrics import aggregate, fit_slope
from ascpg.problems import ProblemSpec

# 20 states, 8 features, rewards chosen so some w has zero Bellman residual
problem = ProblemSpec("random_mdp", {"S": 20, "d": 8, "planted": "gaussian"})
schedule = Schedule.from_regime("stronglyconvex_linear", c_a=1.0, c_b=4.0)
print("step sizes:", schedule)

cfg = SolverConfig(schedule, max_iters=20_000, trace_stride=100)
results = run_seeds(problem, cfg, seeds=range(8))

# mean over seeds at every recorded k, then a least-squares fit in log-log
series = aggregate([r.trace for r in results], "dist_sq", "k")
for k, m in zip(series.ks[::40], series.mean[::40]):
    print(f"k = {int(k):6d}   E|x - P(x)|^2 = {m:.3e}")

fit = fit_slope(series)
print(f"slope {fit.slope:.3f} (r2 {fit.r2:.3f}) over k in [{fit.window[0]:g}, {fit.window[1]:g}]")

# the fitted line predicts the error one decade further out
print("extrapolated error at k = 2e5:", f"{10 ** (fit.intercept + fit.slope * np.log10(2e5)):.2e}")
