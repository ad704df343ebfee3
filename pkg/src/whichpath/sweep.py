"""
Parameter sweeps over scenarios, regime maps and power-law fits.

A sweep evaluates one or two axes on a grid in row-major order. Failures
at a grid point are recorded in that row's ``error`` column and never
abort the sweep.
"""

import csv
import io
import itertools
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .decoherence import decoherence_report
from .scenario import Scenario, ScenarioError, classify_regime, effective_moment, whichpath_snr
from .worldline import ResolutionError

SWEEPABLE = ("q_A", "m_A", "d", "D", "T_A", "T_B", "q_B", "m_B", "moment")

# outputs that only need the closed-form estimates
CHEAP_OUTPUTS = {"snr": lambda s: whichpath_snr(s),
                 "regime": lambda s: classify_regime(s).narrative.value,
                 "moment": effective_moment}
# outputs that need the radiation chain, mapped to report attributes
REPORT_OUTPUTS = {"d_alice": "d_alice", "d_bob": "d_bob", "d_bob_estimate": "d_bob_estimate",
                  "n_entangling": "n_entangling", "radiated_energy": "radiated_energy",
                  "identity_residual": "identity_residual",
                  "inequality_margin": "inequality_margin", "audit_pass": "audit_pass"}
ALL_OUTPUTS = tuple(CHEAP_OUTPUTS) + tuple(REPORT_OUTPUTS)
DEFAULT_OUTPUTS = ("d_alice", "d_bob", "n_entangling", "snr", "regime", "inequality_margin")


class SweepSpecError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "log"

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise SweepSpecError(f"cannot sweep {self.name!r}; choose from {SWEEPABLE}")
        if self.spacing not in ("log", "linear"):
            raise SweepSpecError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")
        if int(self.count) != self.count or self.count < 2:
            raise SweepSpecError("an axis needs at least 2 points")
        if self.spacing == "log" and (self.min <= 0 or self.max <= 0):
            raise SweepSpecError("log axes need positive bounds")
        object.__setattr__(self, "count", int(self.count))

    def values(self):
        if self.spacing == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)

    @classmethod
    def parse(cls, text):
        """``"T_A log 1 100 13"`` -> Axis."""
        parts = text.split()
        if len(parts) != 5:
            raise SweepSpecError(f"axis must read 'name spacing min max count', got {text!r}")
        name, spacing, lo, hi, count = parts
        try:
            return cls(name, float(lo), float(hi), int(count), spacing)
        except ValueError as exc:
            raise SweepSpecError(f"bad axis {text!r}: {exc}") from None


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axes: tuple
    outputs: tuple = DEFAULT_OUTPUTS
    radiation_options: dict = field(default_factory=dict)

    def __post_init__(self):
        axes = tuple(Axis.parse(a) if isinstance(a, str) else a for a in self.axes)
        if not 1 <= len(axes) <= 2:
            raise SweepSpecError("a sweep has one or two axes")
        if len({a.name for a in axes}) != len(axes):
            raise SweepSpecError("axes must be distinct")
        unknown = [o for o in self.outputs if o not in ALL_OUTPUTS]
        if unknown:
            raise SweepSpecError(f"unknown outputs {unknown}; choose from {ALL_OUTPUTS}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @property
    def columns(self):
        return [a.name for a in self.axes] + list(self.outputs) + ["error"]

    def points(self):
        return list(itertools.product(*(a.values() for a in self.axes)))


def _evaluate_point(args):
    base, names, values, outputs, options = args
    row = {n: float(v) for n, v in zip(names, values)}
    try:
        s = base.replace(**dict(zip(names, values)))
        report = None
        if any(o in REPORT_OUTPUTS for o in outputs):
            report = decoherence_report(s, **options)
        for o in outputs:
            if o in CHEAP_OUTPUTS:
                row[o] = CHEAP_OUTPUTS[o](s)
            else:
                row[o] = getattr(report, REPORT_OUTPUTS[o])
        row["error"] = ""
    except (ScenarioError, ResolutionError, ValueError, ArithmeticError) as exc:
        for o in outputs:
            row.setdefault(o, None)
        code = "scenario" if isinstance(exc, ScenarioError) else (
            "resolution" if isinstance(exc, ResolutionError) else "numerical")
        row["error"] = f"{code}: {exc}"
    return row


def run_sweep(spec, workers=1):
    """
    Evaluate every grid point of ``spec``.

    Returns a list of row dicts in row-major order over the axes; the
    order does not depend on ``workers``.
    """
    return list(iter_sweep(spec, workers))


def iter_sweep(spec, workers=1):
    """Yield rows one at a time, in grid order."""
    names = [a.name for a in spec.axes]
    jobs = [(spec.base, names, pt, spec.outputs, spec.radiation_options)
            for pt in spec.points()]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                yield from pool.map(_evaluate_point, jobs)
        else:
            for job in jobs:
                yield _evaluate_point(job)


def format_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def rows_to_jsonl(rows, columns):
    return "".join(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n"
                   for row in rows)


def _json_value(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float


def fit_powerlaw(xs, ys):
    """Least-squares line through ``(log x, log y)``: ``y = prefactor * x**exponent``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    if xs.size < 5:
        raise ValueError("a power-law fit needs at least 5 points")
    if np.any(xs <= 0) or np.any(ys <= 0) or not np.all(np.isfinite(xs * ys)):
        raise ValueError("power-law fits need strictly positive, finite data")
    res = stats.linregress(np.log(xs), np.log(ys))
    r2 = res.rvalue ** 2 if np.isfinite(res.rvalue) else 1.0
    return PowerLawFit(float(res.slope), float(math.exp(res.intercept)), float(r2))


def snr_contour(rows, x="moment", y="T_B", level=1.0):
    """
    Points where the which-path SNR crosses ``level`` along ``x`` at each ``y``.

    Interpolates linearly in ``(log x, log SNR)`` between neighbouring grid
    points. SNR is a power law in every sweepable variable, so this is
    exact up to rounding. Returns ``[(y, x_crossing), ...]``.
    """
    by_y = {}
    for row in rows:
        if row.get("error") or row.get("snr") is None:
            continue
        by_y.setdefault(row[y], []).append((row[x], row["snr"]))
    out = []
    for yv in sorted(by_y):
        pts = sorted(by_y[yv])
        for (x0, s0), (x1, s1) in zip(pts, pts[1:]):
            if s0 <= 0 or s1 <= 0 or (s0 - level) * (s1 - level) > 0 or s0 == s1:
                continue
            lx0, lx1 = math.log(x0), math.log(x1)
            f = (math.log(level) - math.log(s0)) / (math.log(s1) - math.log(s0))
            out.append((yv, math.exp(lx0 + f * (lx1 - lx0))))
            break
    return out
