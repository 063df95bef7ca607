"""Cross-seed aggregation and log-log rate fitting of run traces."""
import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidArgument

AXES = ("k", "queries")


class NonpositiveSeries(InvalidArgument):
    """A log-log fit met a zero, negative or missing value."""

# trace columns plus derived series
FIELDS = ("dist", "dist_sq", "grad_norm_sq", "tracking_err_sq", "step_len", "objective", "grad_norm_sq_avg")


@dataclass
class AggregateSeries:
    ks: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_seeds: int
    field: str = ""
    axis: str = "k"


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    window: tuple
    n_points: int

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def field_values(trace, field):
    """Values of ``field`` on the trace's recorded grid.

    ``grad_norm_sq_avg`` is the running mean of ``grad_norm_sq`` over recorded
    iterations (the exact running average when ``trace_stride == 1``).
    """
    if field == "grad_norm_sq_avg":
        g = trace["grad_norm_sq"]
        return np.cumsum(g) / np.arange(1, g.size + 1)
    if field not in FIELDS:
        raise InvalidArgument(f"unknown field {field!r}; expected one of {FIELDS}")
    return trace[field]


def aggregate(traces, field="dist_sq", axis="k"):
    """Pointwise mean and standard error of ``field`` across traces.

    Values are sorted per grid point before summation, so the result does not
    depend on the order of ``traces`` (bit for bit).
    """
    traces = list(traces)
    if not traces:
        raise InvalidArgument("aggregate needs at least one trace")
    if axis not in AXES:
        raise InvalidArgument(f"axis must be one of {AXES}, got {axis!r}")
    ks = traces[0][axis]
    for t in traces[1:]:
        if t[axis].shape != ks.shape or not np.array_equal(t[axis], ks):
            raise InvalidArgument("traces were recorded on different grids")
    vals = np.sort(np.stack([field_values(t, field) for t in traces]), axis=0)
    n = len(traces)
    mean = vals.sum(axis=0) / n
    if n > 1:
        stderr = np.sqrt(((vals - mean) ** 2).sum(axis=0) / (n - 1) / n)
    else:
        stderr = np.zeros_like(mean)
    return AggregateSeries(ks.copy(), mean, stderr, n, field, axis)


def default_window(ks):
    """Geometric upper half ``[sqrt(k_min * k_max), k_max]`` of the grid."""
    lo, hi = float(np.min(ks)), float(np.max(ks))
    return (math.sqrt(lo * hi), hi)


def fit_slope(series, window=None):
    """Least-squares line through ``(log10 k, log10 mean)`` restricted to ``window``."""
    ks = np.asarray(series.ks, dtype=float)
    lo, hi = default_window(ks) if window is None else window
    if not lo < hi:
        raise InvalidArgument(f"window must satisfy lo < hi, got ({lo}, {hi})")
    sel = (ks >= lo) & (ks <= hi)
    if sel.sum() < 2:
        raise InvalidArgument(f"window ({lo}, {hi}) holds fewer than two grid points")
    y = np.asarray(series.mean, dtype=float)[sel]
    if not np.all(y > 0):
        raise NonpositiveSeries("series has nonpositive (or missing) values inside the fit window")
    lx, ly = np.log10(ks[sel]), np.log10(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), max(0.0, min(1.0, r2)), (float(lo), float(hi)), int(sel.sum()))


def write_aggregate_csv(series, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("axis", "mean", "stderr"))
        for k, m, s in zip(series.ks, series.mean, series.stderr):
            w.writerow((repr(float(k)), repr(float(m)), repr(float(s))))


def read_aggregate_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InvalidArgument(f"{path}: aggregate file has no rows")
    try:
        cols = {c: np.array([float(r[c]) for r in rows]) for c in ("axis", "mean", "stderr")}
    except (KeyError, ValueError) as err:
        raise InvalidArgument(f"{path}: malformed aggregate CSV ({err})") from None
    return AggregateSeries(cols["axis"], cols["mean"], cols["stderr"], n_seeds=0)


def write_slope_json(fit, path, **extra):
    with open(path, "w") as fh:
        json.dump({**fit.to_dict(), **extra}, fh, indent=2, sort_keys=True)
        fh.write("\n")
