"""
Branch-difference source histories.

The two branches of Alice's superposition differ by a dipole (EM) or a
principal quadrupole moment (gravity). Only that *difference* sources
entangling radiation. It is switched on by a slow split in the past,
held at the plateau value, then switched off by the recombination ramp
on ``[0, T_A]``.

All breakpoints sit on the sampling grid so that composite Simpson
quadrature of the derivatives is exact segment by segment; at a
breakpoint a derivative sample holds the mean of its one-sided limits.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .scenario import Ramp, effective_moment


MIN_SAMPLES_PER_RAMP = 64
NYQUIST_MARGIN = 8.0
# highest radiated frequency the default mode basis resolves, times T_A
DEFAULT_OMEGA_MAX_FACTOR = 64.0


class ResolutionError(ValueError):
    """The sampling grid is too coarse for the requested accuracy."""


class Order(str, enum.Enum):
    DIPOLE = "dipole"
    QUADRUPOLE = "quadrupole"


# ---------------------------------------------------------------------------
# ramp windows: s(x) rises from 0 to 1 on [0, 1]; we need s and s', s'', s'''

_GAUSS_SIGMA = 0.1
_GAUSS_EDGE = math.exp(-1.0 / (8 * _GAUSS_SIGMA ** 2))
_GAUSS_NORM = (_GAUSS_SIGMA * math.sqrt(2 * math.pi)
               * math.erf(1 / (2 * math.sqrt(2) * _GAUSS_SIGMA)) - _GAUSS_EDGE)


def _smoothstep(x, k):
    if k == 0:
        return x ** 3 * (10 - 15 * x + 6 * x ** 2)
    if k == 1:
        return 30 * x ** 2 * (1 - x) ** 2
    if k == 2:
        return 60 * x - 180 * x ** 2 + 120 * x ** 3
    return 60 - 360 * x + 360 * x ** 2


def _raised_cosine(x, k):
    # raised-cosine velocity pulse, so the position is C^2 like the smoothstep
    w = 2 * np.pi
    if k == 0:
        return x - np.sin(w * x) / w
    if k == 1:
        return 1 - np.cos(w * x)
    if k == 2:
        return w * np.sin(w * x)
    return w ** 2 * np.cos(w * x)


def _gaussian(x, k):
    # Gaussian velocity pulse, lowered so it vanishes exactly at both ends
    sig = _GAUSS_SIGMA
    u = x - 0.5
    bump = np.exp(-u ** 2 / (2 * sig ** 2))
    if k == 0:
        c = sig * math.sqrt(math.pi / 2)
        half = math.erf(1 / (2 * math.sqrt(2) * sig))
        return (c * (erf(u / (math.sqrt(2) * sig)) + half) - _GAUSS_EDGE * x) / _GAUSS_NORM
    if k == 1:
        return (bump - _GAUSS_EDGE) / _GAUSS_NORM
    if k == 2:
        return -u / sig ** 2 * bump / _GAUSS_NORM
    return (u ** 2 / sig ** 4 - 1 / sig ** 2) * bump / _GAUSS_NORM


_WINDOWS = {
    Ramp.SMOOTHSTEP: _smoothstep,
    Ramp.RAISED_COSINE: _raised_cosine,
    Ramp.GAUSSIAN: _gaussian,
}


def window(ramp, x, k=0):
    """k-th derivative (k <= 3) of the unit step window on ``[0, 1]``.

    Outside the unit interval the window is 0 (left) or 1 (right) and all
    derivatives vanish.
    """
    if not 0 <= k <= 3:
        raise ValueError("window derivatives are available up to third order")
    ramp = Ramp.parse(ramp)
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= 1)
    out = np.zeros_like(x)
    out[inside] = _WINDOWS[ramp](x[inside], k)
    if k == 0:
        out[x > 1] = 1.0
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultipoleHistory:
    """
    Uniformly sampled difference moment of the two branches.

    Attributes
    ----------
    t : ndarray
        Time grid, uniform spacing.
    moment : ndarray
        Difference moment samples.
    order : Order
        Dipole or quadrupole.
    derivs : tuple of ndarray
        First, second and third time derivatives, when known analytically.
        Empty when the history was built from samples only.
    breakpoints : tuple of float
        Times where the window pieces join (derivatives may jump there).
    ramp_duration : float
        Duration of the recombination ramp.
    """

    t: np.ndarray
    moment: np.ndarray
    order: Order
    derivs: tuple = ()
    breakpoints: tuple = ()
    ramp_duration: float = float("nan")
    recombination_start: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        m = np.asarray(self.moment, dtype=float)
        if t.ndim != 1 or t.shape != m.shape:
            raise ValueError("t and moment must be 1-d arrays of equal length")
        if t.size < 3:
            raise ResolutionError("a history needs at least three samples")
        steps = np.diff(t)
        if not np.all(steps > 0) or np.ptp(steps) > 1e-9 * steps.mean():
            raise ValueError("time grid must be uniform and increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "moment", m)
        object.__setattr__(self, "order", Order(self.order))

    @property
    def dt(self):
        return (self.t[-1] - self.t[0]) / (self.t.size - 1)

    @property
    def radiating_order(self):
        """Derivative order that sources radiation (2 dipole, 3 quadrupole)."""
        return 2 if self.order is Order.DIPOLE else 3

    def derivative(self, k, method="auto"):
        """k-th time derivative on the grid.

        ``method="analytic"`` uses the stored window derivatives,
        ``"spectral"`` differentiates the samples with an FFT (exact for
        band-limited, effectively periodic input), ``"auto"`` prefers the
        analytic values.
        """
        if k == 0:
            return self.moment
        if method == "auto":
            method = "analytic" if len(self.derivs) >= k else "spectral"
        if method == "analytic":
            if len(self.derivs) < k:
                raise ValueError(f"no analytic derivative of order {k} stored")
            return self.derivs[k - 1]
        if method == "spectral":
            return spectral_derivative(self.moment, self.dt, k)
        raise ValueError(f"unknown derivative method {method!r}")

    def time_reversed(self):
        """Mirror image under ``t -> -t`` (recombine-then-split)."""
        derivs = tuple((-1) ** (k + 1) * d[::-1] for k, d in enumerate(self.derivs))
        return MultipoleHistory(
            t=-self.t[::-1], moment=self.moment[::-1].copy(), order=self.order,
            derivs=derivs, breakpoints=tuple(sorted(-b for b in self.breakpoints)),
            ramp_duration=self.ramp_duration,
            recombination_start=-(self.recombination_start + self.ramp_duration),
            meta=dict(self.meta, reversed=not self.meta.get("reversed", False)))

    def simpson_weights(self):
        """Composite Simpson weights on the grid (even number of intervals)."""
        n = self.t.size - 1
        if n % 2:
            raise ResolutionError("Simpson weights need an even number of intervals")
        w = np.full(self.t.size, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * self.dt / 3.0

    def to_csv(self, path_or_buf):
        """Write the two-column ``t,moment`` table."""
        data = np.column_stack([self.t, self.moment])
        np.savetxt(path_or_buf, data, delimiter=",", header="t,moment",
                   comments="", fmt="%.17g")


def spectral_derivative(samples, dt, k):
    """FFT derivative of order ``k`` of uniformly spaced periodic samples."""
    samples = np.asarray(samples, dtype=float)
    omega = 2 * np.pi * np.fft.rfftfreq(samples.size, d=dt)
    spec = np.fft.rfft(samples) * (1j * omega) ** k
    if samples.size % 2 == 0 and k % 2 == 1:
        spec[-1] = 0.0  # the Nyquist bin has no well-defined odd derivative
    return np.fft.irfft(spec, n=samples.size)


def samples_per_ramp(omega_max_factor=DEFAULT_OMEGA_MAX_FACTOR, requested=None):
    """Even sample count across one ramp satisfying the resolution rule.

    At least 64 samples, and a Nyquist frequency at least 8 times the
    highest mode frequency ``omega_max_factor / T_ramp``.
    """
    need = max(MIN_SAMPLES_PER_RAMP,
               math.ceil(NYQUIST_MARGIN * omega_max_factor / math.pi))
    if requested is not None:
        if requested < need:
            raise ResolutionError(
                f"{requested} samples per ramp is below the minimum {need} "
                f"(>= {MIN_SAMPLES_PER_RAMP} and Nyquist margin {NYQUIST_MARGIN:g}x)")
        need = int(requested)
    return need + (need % 2)


def _even(x):
    n = int(round(x))
    return max(2, n + (n % 2))


def build_branch_difference(s, samples=None, split_factor=20.0, hold_factor=2.0,
                            omega_max_factor=DEFAULT_OMEGA_MAX_FACTOR, reverse=False):
    """
    Difference moment of the two branches for scenario ``s``.

    The split ramp lasts ``split_factor * T_A`` and ends ``hold_factor * T_A``
    before the recombination ramp, which runs over ``[0, T_A]``. A slow
    split radiates a fraction of order ``split_factor**-2`` (dipole) or
    ``split_factor**-4`` (quadrupole) of the recombination. Because every
    duration is tied to ``T_A``, the radiated spectrum scales exactly with
    ``T_A``.

    Parameters
    ----------
    s : Scenario
    samples : int, optional
        Samples per recombination ramp; defaults to the resolution rule.
    split_factor, hold_factor : float
        Split duration and plateau length in units of ``T_A``.
    omega_max_factor : float
        Highest mode frequency times ``T_A`` that the grid must resolve.
    reverse : bool
        Return the recombine-then-split mirror image.

    Returns
    -------
    MultipoleHistory
    """
    if split_factor <= 0 or hold_factor < 0:
        raise ValueError("split_factor must be positive and hold_factor non-negative")
    n = samples_per_ramp(omega_max_factor, samples)
    dt = s.T_A / n
    n_split = _even(split_factor * n)
    n_hold = _even(hold_factor * n) if hold_factor > 0 else 0
    n_pad = _even(n / 4)

    k0 = n_pad + n_split + n_hold          # grid index of t = 0
    idx = np.arange(k0 + n + n_pad + 1) - k0
    t = idx * dt

    plateau = effective_moment(s)
    split_len = n_split * dt
    t_split0 = -(n_hold + n_split) * dt
    order = Order.QUADRUPOLE if s.is_gravitational else Order.DIPOLE

    # window arguments from integer offsets so the edges land exactly on 0 and 1
    x_split = (idx + n_hold + n_split) / n_split
    x_rec = idx / n
    moment = plateau * (window(s.ramp, x_split) - window(s.ramp, x_rec))
    derivs = tuple(
        plateau * (_piece(s.ramp, x_split, k) / split_len ** k
                   - _piece(s.ramp, x_rec, k) / s.T_A ** k)
        for k in (1, 2, 3))
    breaks = (t_split0, t_split0 + split_len, 0.0, s.T_A)

    hist = MultipoleHistory(
        t=t, moment=moment, order=order, derivs=derivs, breakpoints=breaks,
        ramp_duration=s.T_A, recombination_start=0.0,
        meta={"samples_per_ramp": n, "split_factor": n_split / n,
              "hold_factor": n_hold / n, "ramp": s.ramp.value,
              "omega_max_factor": omega_max_factor, "reversed": False})
    return hist.time_reversed() if reverse else hist


def _piece(ramp, x, k):
    # a derivative sample on an edge holds the mean of its one-sided limits
    out = window(ramp, x, k)
    out[(x == 0.0) | (x == 1.0)] *= 0.5
    return out


def causal_support_check(s, event):
    """
    Can the recombination have changed the field at ``event = (t, r)``?

    ``r`` is the distance from Alice and the recombination starts at
    ``t = 0``. The answer is True iff the past light cone of the event
    reaches the recombination ramp, i.e. ``t - r >= 0``. Before that the
    field at the event still carries the static branch-difference Coulomb
    (Newtonian) field set up by the early split; that field is present in
    Bob's region but is not a recombination signal.
    """
    t, r = event
    if r < 0:
        raise ValueError("r is a distance and must be non-negative")
    return bool(t - r >= 0.0)
