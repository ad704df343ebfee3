"""
Multimode coherent states and the Gaussian unitaries that keep them coherent.

Conventions
-----------
Quadratures are ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``,
ordered ``(x_1..x_n, p_1..p_n)``. A coherent label ``alpha`` has phase-space
mean ``sqrt(2) (Re alpha, Im alpha)``; the vacuum covariance is ``I/2``.

Displacements use the symmetric (Weyl) form ``D(d) = exp(d a^dag - d* a)``
so that ``D(d)|alpha> = exp(i Im(d alpha*)) |alpha + d>``. That phase
depends on the state and is carried in :attr:`CoherentLabel.phase`;
overall phases of a unitary itself are dropped.

Only passive (orthogonal) symplectic maps send coherent states to coherent
states. Active maps (squeezers) are fully supported as phase-space
matrices, but applying one to a coherent label raises
:class:`NotCoherentError`.
"""

import functools
from dataclasses import dataclass, field

import numpy as np

SYMPLECTIC_TOL = 1e-12
RESYMPLECTIFY_TOL = 1e-8


class ModeMismatchError(ValueError):
    pass


class NotSymplecticError(ValueError):
    pass


class NotCoherentError(ValueError):
    """A Gaussian unitary would take a coherent label out of the coherent family."""


@functools.lru_cache(maxsize=128)
def omega_form(n):
    """Standard symplectic form for ``(x..., p...)`` ordering."""
    om = np.zeros((2 * n, 2 * n))
    om[:n, n:] = np.eye(n)
    om[n:, :n] = -np.eye(n)
    om.setflags(write=False)
    return om


def symplectic_residual(S):
    n = S.shape[0] // 2
    # S Omega S^T = S_x S_p^T - S_p S_x^T for column blocks S = [S_x S_p]
    sx, sp = S[:, :n], S[:, n:]
    prod = sx @ sp.T - sp @ sx.T
    return float(np.max(np.abs(prod - omega_form(n))))


@dataclass(frozen=True)
class CoherentLabel:
    """
    A multimode coherent state up to a tracked phase.

    Attributes
    ----------
    amplitudes : ndarray of complex
    phase : float
        Phase picked up from displacements, in radians.
    """

    amplitudes: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if a.ndim != 1:
            raise ValueError("amplitudes must be a 1-d vector")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def n_modes(self):
        return self.amplitudes.size

    @classmethod
    def vacuum(cls, n):
        return cls(np.zeros(n, dtype=complex))

    def means(self):
        """Phase-space mean vector ``sqrt(2) (Re, Im)``."""
        return np.sqrt(2.0) * np.concatenate([self.amplitudes.real, self.amplitudes.imag])

    @classmethod
    def from_means(cls, r, phase=0.0):
        r = np.asarray(r, dtype=float)
        n = r.size // 2
        return cls((r[:n] + 1j * r[n:]) / np.sqrt(2.0), phase)

    def concat(self, other):
        """Tensor product ``|self> (x) |other>``."""
        return CoherentLabel(np.concatenate([self.amplitudes, other.amplitudes]),
                             self.phase + other.phase)

    def select(self, modes):
        """Reduced label on a subset of modes. The tracked phase stays with it."""
        return CoherentLabel(self.amplitudes[np.asarray(modes, dtype=int)], self.phase)


def _amplitudes(x):
    if isinstance(x, CoherentLabel):
        return x.amplitudes, x.phase
    alpha = getattr(x, "alpha", None)
    if alpha is not None:
        return np.asarray(alpha, dtype=complex), 0.0
    return np.atleast_1d(np.asarray(x, dtype=complex)), 0.0


def overlap(a, b):
    """
    Inner product of two coherent labels.

    ``<a|b> = exp(-|a - b|^2 / 2 + i Im(a* . b))`` times the tracked phases.
    Accepts :class:`CoherentLabel`, mode amplitudes or plain complex arrays.
    """
    x, pa = _amplitudes(a)
    y, pb = _amplitudes(b)
    if x.shape != y.shape:
        raise ModeMismatchError(f"mode counts differ: {x.size} vs {y.size}")
    diff = x - y
    exponent = -0.5 * np.vdot(diff, diff).real + 1j * np.vdot(x, y).imag
    return complex(np.exp(exponent + 1j * (pb - pa)))


def log_overlap_magnitude(a, b):
    """``ln |<a|b>|``, usable where the overlap itself underflows."""
    x, _ = _amplitudes(a)
    y, _ = _amplitudes(b)
    if x.shape != y.shape:
        raise ModeMismatchError(f"mode counts differ: {x.size} vs {y.size}")
    return -0.5 * float(np.sum(np.abs(x - y) ** 2))


@dataclass(frozen=True, eq=False)
class GaussianUnitary:
    """
    Gaussian unitary ``D(disp) U_S`` acting on phase space as ``r -> S r + disp``.

    ``S`` is checked to be symplectic to 1e-12; a matrix off by at most 1e-8
    gets one Newton correction ``S <- (I + E Omega / 2) S`` with
    ``E = S Omega S^T - Omega``.
    """

    S: np.ndarray
    disp: np.ndarray = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise NotSymplecticError("S must be a square 2n x 2n matrix")
        n = S.shape[0] // 2
        err = symplectic_residual(S)
        if err > SYMPLECTIC_TOL:
            if err > RESYMPLECTIFY_TOL:
                raise NotSymplecticError(f"S is not symplectic (residual {err:.3g})")
            om = omega_form(n)
            E = S @ om @ S.T - om
            S = (np.eye(2 * n) + 0.5 * E @ om) @ S
            err = symplectic_residual(S)
            if err > SYMPLECTIC_TOL:
                raise NotSymplecticError(f"re-symplectification left residual {err:.3g}")
        disp = np.zeros(2 * n) if self.disp is None else np.array(self.disp, dtype=float)
        if disp.shape != (2 * n,):
            raise ModeMismatchError(f"displacement must have length {2 * n}")
        S.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "disp", disp)

    @property
    def n_modes(self):
        return self.S.shape[0] // 2

    @classmethod
    def identity(cls, n):
        return cls(np.eye(2 * n))

    @classmethod
    def from_unitary(cls, U, delta=None):
        """Passive map ``alpha -> U alpha`` followed by a displacement ``delta``."""
        U = np.asarray(U, dtype=complex)
        n = U.shape[0]
        S = np.empty((2 * n, 2 * n))
        S[:n, :n] = S[n:, n:] = U.real
        S[:n, n:] = -U.imag
        S[n:, :n] = U.imag
        disp = None
        if delta is not None:
            disp = CoherentLabel(delta).means()
        return cls(S, disp)

    @classmethod
    def displacement(cls, delta):
        delta = np.atleast_1d(np.asarray(delta, dtype=complex))
        return cls(np.eye(2 * delta.size), CoherentLabel(delta).means())

    @property
    def delta(self):
        """Displacement as complex amplitudes."""
        n = self.n_modes
        return (self.disp[:n] + 1j * self.disp[n:]) / np.sqrt(2.0)

    def is_passive(self, tol=1e-10):
        key = ("passive", tol)
        if key not in self._cache:
            dev = np.max(np.abs(self.S @ self.S.T - np.eye(self.S.shape[0])))
            self._cache[key] = bool(dev <= tol)
        return self._cache[key]

    def complex_form(self):
        """Passive part as an ``n x n`` unitary on amplitudes."""
        if not self.is_passive():
            raise NotCoherentError("only passive maps have a unitary amplitude form")
        if "U" not in self._cache:
            n = self.n_modes
            self._cache["U"] = self.S[:n, :n] + 1j * self.S[n:, :n]
        return self._cache["U"]

    def compose(self, other):
        """``self`` after ``other`` (global phase dropped)."""
        if other.n_modes != self.n_modes:
            raise ModeMismatchError("cannot compose unitaries on different registries")
        return GaussianUnitary(self.S @ other.S, self.S @ other.disp + self.disp)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        n = self.n_modes
        om = omega_form(n)
        S_inv = -om @ self.S.T @ om
        return GaussianUnitary(S_inv, -S_inv @ self.disp)

    def embed(self, modes, n_total):
        """Act on ``modes`` of a larger ``n_total``-mode register, identity elsewhere."""
        modes = np.asarray(modes, dtype=int)
        if modes.size != self.n_modes:
            raise ModeMismatchError("mode list does not match the unitary size")
        if len(set(modes.tolist())) != modes.size or modes.min() < 0 or modes.max() >= n_total:
            raise ModeMismatchError("invalid target modes")
        idx = np.concatenate([modes, modes + n_total])
        S = np.eye(2 * n_total)
        S[np.ix_(idx, idx)] = self.S
        disp = np.zeros(2 * n_total)
        disp[idx] = self.disp
        return GaussianUnitary(S, disp)

    def commutes_with(self, other, tol=1e-12):
        a = self.compose(other)
        b = other.compose(self)
        return bool(np.max(np.abs(a.S - b.S)) <= tol and np.max(np.abs(a.disp - b.disp)) <= tol)


def apply_unitary(U, x):
    """
    Image of a coherent label under a passive Gaussian unitary.

    The amplitudes go to ``u alpha + delta`` with ``u`` the complex form of
    ``S``; the displacement contributes the Weyl phase
    ``Im(delta conj(u alpha))``.
    """
    if not isinstance(x, CoherentLabel):
        x = CoherentLabel(x)
    if U.n_modes != x.n_modes:
        raise ModeMismatchError(f"unitary acts on {U.n_modes} modes, label has {x.n_modes}")
    if not U.is_passive():
        raise NotCoherentError(
            "an active (squeezing) symplectic does not map coherent states to coherent states")
    moved = U.complex_form() @ x.amplitudes
    delta = U.delta
    phase = x.phase + float(np.vdot(moved, delta).imag)
    return CoherentLabel(moved + delta, phase)


def factor_overlap(joint_a, joint_b, partition):
    """
    Split a joint overlap into sector overlaps.

    ``partition`` is a pair of index sets covering all modes once. Returns
    ``(first-sector overlap, second-sector overlap)``; the tracked phases
    are attributed to the first sector, so the product equals the joint
    overlap.
    """
    first, second = (np.asarray(p, dtype=int) for p in partition)
    n = joint_a.n_modes
    if joint_b.n_modes != n:
        raise ModeMismatchError("joint labels have different mode counts")
    covered = np.concatenate([first, second])
    if covered.size != n or np.unique(covered).size != n or covered.min() < 0 or covered.max() >= n:
        raise ValueError("partition must cover every mode exactly once")
    a1, b1 = joint_a.select(first), joint_b.select(first)
    a2 = CoherentLabel(joint_a.amplitudes[second])
    b2 = CoherentLabel(joint_b.amplitudes[second])
    return overlap(a1, b1), overlap(a2, b2)


# ---------------------------------------------------------------------------
# random sampling and standard gates

def haar_unitary(n, rng):
    """Haar-random ``n x n`` unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_passive(n, rng, max_displacement=1.0):
    """Random interferometer followed by a random displacement."""
    delta = max_displacement * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
    return GaussianUnitary.from_unitary(haar_unitary(n, rng), delta)


def random_symplectic(n, rng, squeeze_max=2.0):
    """Random ``O1 Z O2`` symplectic with single-mode squeezing ``r <= squeeze_max``.

    The result is generally active and cannot act on coherent labels; it
    is meant for checks of the symplectic algebra itself.
    """
    o1 = GaussianUnitary.from_unitary(haar_unitary(n, rng)).S
    o2 = GaussianUnitary.from_unitary(haar_unitary(n, rng)).S
    r = rng.uniform(0, squeeze_max, n)
    z = np.diag(np.concatenate([np.exp(-r), np.exp(r)]))
    return o1 @ z @ o2


def beamsplitter(theta, phi=0.0):
    """Two-mode beam splitter; inputs ``(alpha, 0)`` leave as ``(cos(theta) alpha, e^{i phi} sin(theta) alpha)``."""
    c, s = np.cos(theta), np.sin(theta)
    return GaussianUnitary.from_unitary(
        np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]]))


def swap():
    return GaussianUnitary.from_unitary(np.array([[0, 1], [1, 0]]))


def phase_rotation(angles):
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    return GaussianUnitary.from_unitary(np.diag(np.exp(1j * angles)))
