"""Experiment configuration: a strict, sectioned ``key = value`` text format.

Example::

    [problem]
    family = random_mdp
    S = 20
    d = 8

    [solver]
    methods = ascpg, scgd
    K = 100000
    trace_stride = 100

    [schedule]
    regime = stronglyconvex_linear
    c_a = 1.0
    c_b = 4

    [regularizer]
    kind = zero

    [run]
    seeds = 0:50

    [metrics]
    field = dist_sq
    axis = queries

Blank lines and ``#`` comments are ignored. Every section except ``[problem]``
is optional. Unknown sections, unknown keys, duplicates and malformed values
are rejected with the file name and line number of the offending entry.
"""
from dataclasses import dataclass, replace

from .errors import InvalidArgument
from .metrics import FIELDS
from .problems import FAMILY_DEFAULTS, PLANTED, ProblemSpec, coerce
from .prox import Regularizer
from .schedules import REGIMES, Schedule
from .solver import METHODS, SolverConfig

AXIS_NAMES = {"iters": "k", "queries": "queries"}
REFERENCES = ("auto", "projection", "exact", "long")

SCHEMA = {
    "problem": None,  # family plus that family's parameters
    "solver": {"methods", "K", "trace_stride", "warm_start_y"},
    "schedule": {"regime", "c_a", "a", "c_b", "b", "clamp_beta"},
    "regularizer": {"kind", "lam", "lo", "hi"},
    "run": {"seeds", "n_seeds", "workers", "reference", "reference_iters"},
    "metrics": {"field", "axis", "window"},
    "sweep": {"c_a", "c_b", "seeds", "K"},
}


class ConfigError(InvalidArgument):
    def __init__(self, msg, source="<config>", line=None):
        self.source, self.line = source, line
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {msg}")


@dataclass
class Entry:
    value: str
    line: int


@dataclass(frozen=True)
class Sweep:
    c_a: tuple
    c_b: tuple
    seeds: tuple
    K: int


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    solver: SolverConfig
    methods: tuple = ("ascpg",)
    seeds: tuple = (0,)
    workers: int = 1
    reference: str = "auto"
    reference_iters: int = 100_000
    field: str = "dist_sq"
    axis: str = "queries"
    window: tuple | None = None
    sweep: Sweep | None = None


def parse_sections(text, source="<config>"):
    """Split ``text`` into ``{section: {key: Entry}}`` without interpreting values."""
    sections, current = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", source, n)
            current = line[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"unknown section [{current}]; expected one of {', '.join(SCHEMA)}", source, n)
            if current in sections:
                raise ConfigError(f"duplicate section [{current}]", source, n)
            sections[current] = {}
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", source, n)
        if current is None:
            raise ConfigError("key outside of any section", source, n)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", source, n)
        allowed = SCHEMA[current]
        if current == "problem":
            fam = sections["problem"].get("family")
            allowed = {"family"} | (set(FAMILY_DEFAULTS[fam.value]) if fam else set())
            if key != "family" and fam is None:
                raise ConfigError("'family' must be the first key of [problem]", source, n)
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{current}]", source, n)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r} in [{current}]", source, n)
        if key == "family" and value not in FAMILY_DEFAULTS:
            raise ConfigError(f"unknown problem family {value!r}; expected one of {sorted(FAMILY_DEFAULTS)}", source, n)
        sections[current][key] = Entry(value, n)
    return sections


def _list(s):
    return [p.strip() for p in s.split(",") if p.strip()]


def parse_seeds(s):
    """``"0, 3, 10:13"`` -> ``(0, 3, 10, 11, 12)``; ``lo:hi`` is half open."""
    out = []
    for part in _list(s):
        if ":" in part:
            lo, hi = (int(v) for v in part.split(":", 1))
            if hi <= lo:
                raise InvalidArgument(f"empty seed range {part!r}")
            out.extend(range(lo, hi))
        else:
            out.append(int(part))
    if not out:
        raise InvalidArgument("no seeds given")
    if len(set(out)) != len(out):
        raise InvalidArgument("seeds repeat")
    if min(out) < 0:
        raise InvalidArgument("seeds must be nonnegative")
    return tuple(out)


def format_seeds(seeds):
    """Inverse of :func:`parse_seeds`; runs of three or more become ``lo:hi``."""
    seeds, parts, i = list(seeds), [], 0
    while i < len(seeds):
        j = i
        while j + 1 < len(seeds) and seeds[j + 1] == seeds[j] + 1:
            j += 1
        if j - i >= 2:
            parts.append(f"{seeds[i]}:{seeds[j] + 1}")
        else:
            parts.extend(str(v) for v in seeds[i:j + 1])
        i = j + 1
    return ", ".join(parts)


def parse_window(s):
    try:
        lo, hi = (float(v) for v in s.split(","))
    except ValueError:
        raise InvalidArgument(f"window must be 'lo,hi', got {s!r}") from None
    if not 0 < lo < hi:
        raise InvalidArgument(f"window must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return (lo, hi)


class _Reader:
    """Typed access to one section that attributes conversion errors to the key's line."""

    def __init__(self, entries, section, source):
        self.entries, self.section, self.source = entries, section, source

    def line(self, key=None):
        if key in self.entries:
            return self.entries[key].line
        return min((e.line for e in self.entries.values()), default=None)

    def get(self, key, default, conv=None):
        if key not in self.entries:
            return default
        e = self.entries[key]
        try:
            return conv(e.value) if conv else coerce(e.value, default)
        except (InvalidArgument, ValueError, TypeError) as err:
            raise ConfigError(f"[{self.section}] {key}: {err}", self.source, e.line) from None

    def build(self, fn, key=None):
        """Call ``fn``; its validation errors are reported at ``key``'s line (or the section's first)."""
        try:
            return fn()
        except InvalidArgument as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(f"[{self.section}] {err}", self.source, self.line(key)) from None


def _floats(s):
    vals = tuple(float(v) for v in _list(s))
    if not vals:
        raise InvalidArgument("empty list")
    return vals


def loads_config(text, source="<config>"):
    sec = parse_sections(text, source)
    if "problem" not in sec or "family" not in sec["problem"]:
        raise ConfigError("missing [problem] section with a 'family' key", source)
    r = {name: _Reader(sec.get(name, {}), name, source) for name in SCHEMA}

    p = sec["problem"]
    family = p["family"].value
    rp, defaults = r["problem"], FAMILY_DEFAULTS[family]
    params = {k: rp.get(k, defaults[k]) for k in p if k != "family"}
    if family == "random_mdp" and params.get("planted", "none") not in PLANTED:
        raise ConfigError(f"[problem] planted must be one of {PLANTED}", source, rp.line("planted"))
    problem = rp.build(lambda: ProblemSpec(family, params))

    rs = r["schedule"]
    if "regime" in sec.get("schedule", {}):
        name = rs.get("regime", "", str)
        if name not in REGIMES:
            raise ConfigError(f"unknown regime {name!r}; expected one of {sorted(REGIMES)}", source, rs.line("regime"))
        for k in ("a", "b"):
            if k in rs.entries:
                raise ConfigError(f"[schedule] {k} conflicts with regime {name!r}", source, rs.line(k))
        a, b = REGIMES[name]
    else:
        a, b = rs.get("a", 1.0), rs.get("b", 1.0)
    schedule = rs.build(lambda: Schedule(c_a=rs.get("c_a", 1.0), a=a, c_b=rs.get("c_b", 2.0), b=b,
                                         clamp_beta=rs.get("clamp_beta", True)))

    rr = r["regularizer"]
    kind = rr.get("kind", "zero", str)
    if kind == "zero":
        extra = [k for k in ("lam", "lo", "hi") if k in rr.entries]
        if extra:
            raise ConfigError(f"[regularizer] {extra[0]} is not used by kind 'zero'", source, rr.line(extra[0]))
        reg = Regularizer.zero()
    elif kind == "l1":
        if "lo" in rr.entries or "hi" in rr.entries:
            k = "lo" if "lo" in rr.entries else "hi"
            raise ConfigError(f"[regularizer] {k} is not used by kind 'l1'", source, rr.line(k))
        reg = rr.build(lambda: Regularizer.l1(rr.get("lam", 0.0)), "lam")
    elif kind == "box":
        if "lam" in rr.entries:
            raise ConfigError("[regularizer] lam is not used by kind 'box'", source, rr.line("lam"))
        reg = rr.build(lambda: Regularizer.box(rr.get("lo", -1.0), rr.get("hi", 1.0)), "lo")
    else:
        raise ConfigError(f"unknown regularizer kind {kind!r}; expected zero, l1 or box", source, rr.line("kind"))

    sv = r["solver"]
    methods = sv.get("methods", ("ascpg",), lambda s: tuple(_list(s)))
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}", source, sv.line("methods"))
    if len(set(methods)) != len(methods) or not methods:
        raise ConfigError("methods must be a nonempty list without repeats", source, sv.line("methods"))
    K = sv.get("K", 1000)
    solver = sv.build(lambda: SolverConfig(schedule=schedule, regularizer=reg, max_iters=K,
                                           trace_stride=sv.get("trace_stride", 1),
                                           warm_start_y=sv.get("warm_start_y", True)), "K")

    run = r["run"]
    if "seeds" in run.entries and "n_seeds" in run.entries:
        raise ConfigError("[run] give either seeds or n_seeds, not both", source, run.line("n_seeds"))
    if "n_seeds" in run.entries:
        n = run.get("n_seeds", 1)
        if n < 1:
            raise ConfigError("[run] n_seeds must be >= 1", source, run.line("n_seeds"))
        seeds = tuple(range(n))
    else:
        seeds = run.get("seeds", (0,), parse_seeds)
    workers = run.get("workers", 1)
    if workers < 1:
        raise ConfigError("[run] workers must be >= 1", source, run.line("workers"))
    reference = run.get("reference", "auto", str)
    if reference not in REFERENCES:
        raise ConfigError(f"[run] reference must be one of {REFERENCES}", source, run.line("reference"))
    ref_iters = run.get("reference_iters", 100_000)
    if ref_iters < 1:
        raise ConfigError("[run] reference_iters must be >= 1", source, run.line("reference_iters"))

    mt = r["metrics"]
    fld = mt.get("field", "dist_sq", str)
    if fld not in FIELDS:
        raise ConfigError(f"[metrics] unknown field {fld!r}; expected one of {FIELDS}", source, mt.line("field"))
    axis = mt.get("axis", "queries", str)
    if axis not in AXIS_NAMES:
        raise ConfigError(f"[metrics] axis must be 'iters' or 'queries', got {axis!r}", source, mt.line("axis"))
    window = mt.get("window", None, parse_window)

    sweep = None
    if "sweep" in sec:
        sw = r["sweep"]
        for k in ("c_a", "c_b"):
            if k not in sw.entries:
                raise ConfigError(f"[sweep] needs a {k} list", source, sw.line())
        c_as, c_bs = sw.get("c_a", None, _floats), sw.get("c_b", None, _floats)
        for k, vals in (("c_a", c_as), ("c_b", c_bs)):
            if min(vals) <= 0:
                raise ConfigError(f"[sweep] {k} values must be positive", source, sw.line(k))
        sweep_K = sw.get("K", K)
        if sweep_K < 1:
            raise ConfigError("[sweep] K must be >= 1", source, sw.line("K"))
        sweep = Sweep(c_as, c_bs, sw.get("seeds", (1000,), parse_seeds), sweep_K)

    return ExperimentConfig(problem, solver, methods, seeds, workers, reference, ref_iters, fld, axis, window, sweep)


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config ({err.strerror})", str(path)) from None
    return loads_config(text, str(path))


def _num(v):
    return repr(float(v)) if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else str(v)


def dumps_config(cfg):
    """Fully resolved config text; loading it gives an equal :class:`ExperimentConfig`."""
    s, reg = cfg.solver.schedule, cfg.solver.regularizer
    lines = ["[problem]", f"family = {cfg.problem.family}"]
    lines += [f"{k} = {_num(v)}" for k, v in cfg.problem.params.items()]
    lines += ["", "[solver]", f"methods = {', '.join(cfg.methods)}", f"K = {cfg.solver.max_iters}",
              f"trace_stride = {cfg.solver.trace_stride}", f"warm_start_y = {_num(cfg.solver.warm_start_y)}"]
    lines += ["", "[schedule]", f"c_a = {_num(float(s.c_a))}", f"a = {_num(float(s.a))}",
              f"c_b = {_num(float(s.c_b))}", f"b = {_num(float(s.b))}", f"clamp_beta = {_num(s.clamp_beta)}"]
    lines += ["", "[regularizer]", f"kind = {reg.kind}"]
    if reg.kind == "l1":
        lines.append(f"lam = {_num(float(reg.lam))}")
    elif reg.kind == "box":
        lines += [f"lo = {_num(float(reg.lo))}", f"hi = {_num(float(reg.hi))}"]
    lines += ["", "[run]", f"seeds = {format_seeds(cfg.seeds)}", f"workers = {cfg.workers}",
              f"reference = {cfg.reference}", f"reference_iters = {cfg.reference_iters}"]
    lines += ["", "[metrics]", f"field = {cfg.field}", f"axis = {cfg.axis}"]
    if cfg.window is not None:
        lines.append(f"window = {_num(float(cfg.window[0]))}, {_num(float(cfg.window[1]))}")
    if cfg.sweep is not None:
        sw = cfg.sweep
        lines += ["", "[sweep]", f"c_a = {', '.join(_num(float(v)) for v in sw.c_a)}",
                  f"c_b = {', '.join(_num(float(v)) for v in sw.c_b)}",
                  f"seeds = {format_seeds(sw.seeds)}", f"K = {sw.K}"]
    return "\n".join(lines) + "\n"


def with_schedule(cfg, c_a, c_b):
    s = replace(cfg.solver.schedule, c_a=c_a, c_b=c_b)
    return replace(cfg.solver, schedule=s)
