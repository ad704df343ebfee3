"""
Spectral amplitudes of the entangling radiation.

A difference history radiates into a continuum of positive-frequency
modes. We discretise the frequency integral on log-spaced nodes and give
each node a coherent-state amplitude

    alpha_i = sqrt(c * w_i / omega_i) * F[x^(p)](omega_i)

where ``x^(p)`` is the second (dipole) or third (quadrupole) time
derivative of the moment and ``F[f](omega) = int f(t) exp(i omega t) dt``.
With ``c = 2/(3 pi)`` the sum of ``omega_i |alpha_i|^2`` is the Larmor
energy ``int (2/(3 pi)) omega^4 |d(omega)|^2 d omega``; the quadrupole
analogue uses ``c = 2/(15 pi)``. Then ``sum |alpha_i|^2`` is the expected
number of emitted quanta.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .scenario import FieldKind
from .worldline import NYQUIST_MARGIN, Order, ResolutionError

DIPOLE_COEFF = 2.0 / (3.0 * math.pi)
QUADRUPOLE_COEFF = 2.0 / (15.0 * math.pi)

DEFAULT_MODES = 2048
DEFAULT_OMEGA_MIN_FACTOR = 1e-3
DEFAULT_OMEGA_MAX_FACTOR = 64.0
MIN_OMEGA_MAX_FACTOR = 8.0

_CHUNK = 256


class AliasingError(ResolutionError):
    """The mode basis reaches beyond what the time grid resolves."""


@dataclass(frozen=True)
class ModeBasis:
    """
    Truncated positive-frequency mode basis.

    Attributes
    ----------
    frequencies : ndarray
        Strictly increasing positive angular frequencies.
    weights : ndarray
        Quadrature weights for integrals over frequency.
    kind : FieldKind
    """

    frequencies: np.ndarray
    weights: np.ndarray
    kind: FieldKind = FieldKind.ELECTROMAGNETIC

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        q = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.shape != q.shape or w.size == 0:
            raise ValueError("frequencies and weights must be non-empty 1-d arrays of equal length")
        if not np.all(np.isfinite(w)) or np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("frequencies must be positive and strictly increasing")
        if not np.all(np.isfinite(q)) or np.any(q <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "weights", q)
        object.__setattr__(self, "kind", FieldKind.parse(self.kind))

    @property
    def size(self):
        return self.frequencies.size

    @classmethod
    def log_spaced(cls, omega_min, omega_max, n_modes=DEFAULT_MODES,
                   kind=FieldKind.ELECTROMAGNETIC):
        """Log-spaced nodes with trapezoidal weights in ``ln(omega)``."""
        if not 0 < omega_min < omega_max:
            raise ValueError("need 0 < omega_min < omega_max")
        if n_modes < 2:
            raise ValueError("need at least two modes")
        u = np.linspace(math.log(omega_min), math.log(omega_max), n_modes)
        omega = np.exp(u)
        h = u[1] - u[0]
        weights = omega * h
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return cls(omega, weights, kind)

    @classmethod
    def for_ramp(cls, T_ramp, kind=FieldKind.ELECTROMAGNETIC, n_modes=DEFAULT_MODES,
                 omega_min_factor=DEFAULT_OMEGA_MIN_FACTOR,
                 omega_max_factor=DEFAULT_OMEGA_MAX_FACTOR):
        """Default basis from ``omega_min_factor/T`` to ``omega_max_factor/T``."""
        if omega_max_factor < MIN_OMEGA_MAX_FACTOR:
            raise ResolutionError(
                f"omega_max must be at least {MIN_OMEGA_MAX_FACTOR:g}/T_ramp")
        return cls.log_spaced(omega_min_factor / T_ramp, omega_max_factor / T_ramp,
                              n_modes, kind)


@dataclass(frozen=True)
class ModeAmplitudes:
    """Coherent-state amplitudes on a mode basis."""

    basis: ModeBasis
    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} amplitudes, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros(basis.size, dtype=complex))

    def scaled(self, factor):
        return ModeAmplitudes(self.basis, factor * self.alpha)

    def spectrum(self):
        """``(omega, |alpha|^2, dE/domega)`` arrays."""
        occ = np.abs(self.alpha) ** 2
        omega = self.basis.frequencies
        return omega, occ, omega * occ / self.basis.weights

    def to_csv(self, path_or_buf):
        omega, occ, dE = self.spectrum()
        close = False
        if isinstance(path_or_buf, str):
            path_or_buf = open(path_or_buf, "w", newline="", encoding="utf-8")
            close = True
        try:
            writer = csv.writer(path_or_buf, lineterminator="\n")
            writer.writerow(["omega", "occupation", "dE_domega"])
            for row in zip(omega, occ, dE):
                writer.writerow([repr(float(v)) for v in row])
        finally:
            if close:
                path_or_buf.close()


def _coefficient(order, kind, coefficient):
    expected = Order.QUADRUPOLE if kind is FieldKind.GRAVITATIONAL else Order.DIPOLE
    if order is not expected:
        raise ValueError(f"{order.value} history cannot radiate into a {kind.value} basis")
    if coefficient is not None:
        return float(coefficient)
    return QUADRUPOLE_COEFF if order is Order.QUADRUPOLE else DIPOLE_COEFF


def check_resolution(h, basis):
    """Raise unless the basis respects the resolution rule for ``h``."""
    omega_max = basis.frequencies[-1]
    if np.isfinite(h.ramp_duration) and omega_max * h.ramp_duration < MIN_OMEGA_MAX_FACTOR - 1e-9:
        raise ResolutionError(
            f"basis stops at omega = {omega_max:.4g}, below "
            f"{MIN_OMEGA_MAX_FACTOR:g}/T_ramp = {MIN_OMEGA_MAX_FACTOR / h.ramp_duration:.4g}")
    nyquist = math.pi / h.dt
    if omega_max * NYQUIST_MARGIN > nyquist * (1 + 1e-9):
        raise AliasingError(
            f"basis reaches omega = {omega_max:.4g} but the grid Nyquist frequency "
            f"{nyquist:.4g} is less than {NYQUIST_MARGIN:g}x that")


def source_transform(h, omega):
    """``F[x^(p)](omega)`` by composite Simpson quadrature on the history grid."""
    f = h.derivative(h.radiating_order) * h.simpson_weights()
    keep = f != 0.0
    t, f = h.t[keep], f[keep]
    omega = np.asarray(omega, dtype=float)
    out = np.empty(omega.size, dtype=complex)
    for lo in range(0, omega.size, _CHUNK):
        w = omega[lo:lo + _CHUNK]
        out[lo:lo + _CHUNK] = np.exp(1j * np.outer(w, t)) @ f
    return out


def spectral_amplitudes(h, basis, coefficient=None):
    """
    Coherent amplitudes radiated by the difference history ``h``.

    Parameters
    ----------
    h : MultipoleHistory
    basis : ModeBasis
    coefficient : float, optional
        Override the multipole normalisation (2/(3 pi) dipole,
        2/(15 pi) quadrupole).

    Returns
    -------
    ModeAmplitudes
    """
    c = _coefficient(h.order, basis.kind, coefficient)
    check_resolution(h, basis)
    src = source_transform(h, basis.frequencies)
    return ModeAmplitudes(basis, np.sqrt(c * basis.weights / basis.frequencies) * src)


def photon_number(a):
    """Expected number of quanta, ``sum |alpha_i|^2``."""
    alpha = a.alpha if isinstance(a, ModeAmplitudes) else np.asarray(a)
    return float(np.sum(np.abs(alpha) ** 2))


def radiated_energy(a):
    """Radiated energy, ``sum omega_i |alpha_i|^2``."""
    return float(np.sum(a.basis.frequencies * np.abs(a.alpha) ** 2))


def omega_min_sensitivity(h, factors=(1e-4, 1e-3, 1e-2), n_modes=DEFAULT_MODES,
                          omega_max_factor=DEFAULT_OMEGA_MAX_FACTOR):
    """Expected quanta for several infrared cutoffs ``factor / T_ramp``."""
    kind = FieldKind.GRAVITATIONAL if h.order is Order.QUADRUPOLE else FieldKind.ELECTROMAGNETIC
    out = {}
    for f in factors:
        basis = ModeBasis.for_ramp(h.ramp_duration, kind, n_modes, f, omega_max_factor)
        out[f] = photon_number(spectral_amplitudes(h, basis))
    return out
