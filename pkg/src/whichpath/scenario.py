"""
Physical parameters of the which-path gedankenexperiment.

Everything is in Planck units (G = c = hbar = 1). Alice holds a charge
(or mass) in a superposition of two locations a distance ``d`` apart;
Bob sits a distance ``D`` away and tries to read out which branch is
realised during a window of length ``T_B`` while Alice recombines over
``T_A``.
"""

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass


class ScenarioError(ValueError):
    """Raised when a parameter set violates the basic invariants."""


class FieldKind(str, enum.Enum):
    ELECTROMAGNETIC = "electromagnetic"
    GRAVITATIONAL = "gravitational"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"em": cls.ELECTROMAGNETIC, "grav": cls.GRAVITATIONAL}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ScenarioError(
                f"unknown field_kind {value!r}; expected one of "
                f"{[k.value for k in cls]}") from None


class Ramp(str, enum.Enum):
    """Shape of the split / recombination transition."""
    SMOOTHSTEP = "smoothstep"
    GAUSSIAN = "gaussian"
    RAISED_COSINE = "raised_cosine"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace("-", "_"))
        except ValueError:
            raise ScenarioError(
                f"unknown ramp {value!r}; expected one of "
                f"{[r.value for r in cls]}") from None


class Narrative(str, enum.Enum):
    BOB_KNOWS_ALICE_DECOHERED = "BobKnows_AliceDecohered"
    BOB_BLIND_ALICE_COHERENT = "BobBlind_AliceCoherent"
    # no which-path info for Bob, but Alice radiates anyway: harmless
    BOB_BLIND_ALICE_DECOHERED = "BobBlind_AliceDecohered"
    # the paradox cell; unreachable with matched thresholds
    BOB_KNOWS_ALICE_COHERENT = "BobKnows_AliceCoherent"
    PROTOCOL_VIOLATED = "ProtocolViolated"


@dataclass(frozen=True)
class Scenario:
    """
    Full parameter set of one run of the gedankenexperiment.

    Attributes
    ----------
    field_kind : FieldKind
        Electromagnetic (dipole radiation) or gravitational (quadrupole).
    q_A, m_A : float
        Charge and mass of Alice's particle.
    d : float
        Branch separation. ``d = 0`` is allowed and means coincident branches.
    D : float
        Alice-Bob distance.
    T_A, T_B : float
        Alice's recombination time and Bob's measurement time.
    q_B, m_B : float
        Charge and mass of Bob's probe particle.
    ramp : Ramp
        Window used for the split and recombination.
    bob_threshold, alice_threshold : float
        What counts as "significant": Bob knows when the which-path SNR
        exceeds ``bob_threshold``; Alice decoheres when the estimated
        entangling quanta exceed ``alice_threshold``.
    """

    field_kind: FieldKind = FieldKind.ELECTROMAGNETIC
    q_A: float = 1.0
    m_A: float = 1.0
    d: float = 1.0
    D: float = 100.0
    T_A: float = 50.0
    T_B: float = 50.0
    q_B: float = 1.0
    m_B: float = 1.0
    ramp: Ramp = Ramp.SMOOTHSTEP
    bob_threshold: float = 1.0
    alice_threshold: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "field_kind", FieldKind.parse(self.field_kind))
        object.__setattr__(self, "ramp", Ramp.parse(self.ramp))
        for name in ("q_A", "m_A", "d", "D", "T_A", "T_B", "q_B", "m_B",
                     "bob_threshold", "alice_threshold"):
            value = getattr(self, name)
            if isinstance(value, bool):
                raise ScenarioError(f"{name} must be a number, got {value!r}")
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ScenarioError(f"{name} must be a number, got {value!r}") from None
            if not math.isfinite(value):
                raise ScenarioError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        for name in ("m_A", "D", "T_A", "T_B", "m_B",
                     "bob_threshold", "alice_threshold"):
            if getattr(self, name) <= 0:
                raise ScenarioError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if self.d < 0:
            raise ScenarioError(f"d must be non-negative, got {self.d}")
        if self.d >= self.D:
            raise ScenarioError(f"branch separation d={self.d} must be smaller than D={self.D}")
        if self.d > self.D / 10:
            warnings.warn(f"d={self.d} is not small compared with D={self.D}; "
                          "the far-zone estimates assume d << D", stacklevel=3)

    @property
    def alice_causal(self):
        return self.T_A < self.D

    @property
    def bob_causal(self):
        return self.T_B < self.D

    @property
    def protocol_ok(self):
        return self.alice_causal and self.bob_causal

    @property
    def is_gravitational(self):
        return self.field_kind is FieldKind.GRAVITATIONAL

    def replace(self, **changes):
        """Copy with some fields changed; ``moment`` rescales q_A or m_A."""
        if "moment" in changes:
            moment = float(changes.pop("moment"))
            base = self.replace(**changes) if changes else self
            return base.with_moment(moment)
        return dataclasses.replace(self, **changes)

    def with_moment(self, moment):
        """Return a scenario whose effective moment equals ``moment``.

        The separation ``d`` is kept fixed; the charge (EM) or mass
        (gravitational) is adjusted.
        """
        if self.d == 0:
            raise ScenarioError("cannot set a moment when d = 0")
        if self.is_gravitational:
            return dataclasses.replace(self, m_A=moment / self.d ** 2)
        return dataclasses.replace(self, q_A=moment / self.d)

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["field_kind"] = self.field_kind.value
        out["ramp"] = self.ramp.value
        return out


@dataclass(frozen=True)
class RegimeLabel:
    bob_can_know: bool
    alice_decoheres: bool
    narrative: Narrative


def effective_moment(s):
    """Dipole ``q_A d`` (EM) or principal quadrupole ``m_A d**2`` (gravity)."""
    if s.is_gravitational:
        return s.m_A * s.d ** 2
    return s.q_A * s.d


def estimated_quanta(s):
    """Order-of-magnitude number of entangling quanta.

    ``D_A**2 / T_A**2`` for photons and ``Q_A**2 / T_A**4`` for gravitons.
    """
    moment = effective_moment(s)
    if s.is_gravitational:
        return moment ** 2 / s.T_A ** 4
    return moment ** 2 / s.T_A ** 2


def whichpath_snr(s):
    """Ratio of Bob's probe displacement to its vacuum-noise spread.

    EM: ``dx = (q_B/m_B) (D_A/D**3) T_B**2`` against ``Dx = q_B/m_B``.
    Gravity: ``dx = (Q_A/D**4) T_B**2`` against the Planck length.
    """
    # q_B / m_B cancels in the EM ratio, so it is not formed explicitly
    moment = abs(effective_moment(s))
    if s.is_gravitational:
        return moment * s.T_B ** 2 / s.D ** 4
    return moment * s.T_B ** 2 / s.D ** 3


def probe_response(s):
    """Return ``(delta_x, noise)`` for Bob's probe particle."""
    moment = effective_moment(s)
    if s.is_gravitational:
        return moment / s.D ** 4 * s.T_B ** 2, 1.0
    ratio = abs(s.q_B) / s.m_B
    return ratio * moment / s.D ** 3 * s.T_B ** 2, ratio


def classify_regime(s):
    """Place a scenario in the Bob-knows / Alice-decoheres map."""
    bob_can_know = whichpath_snr(s) > s.bob_threshold
    alice_decoheres = estimated_quanta(s) > s.alice_threshold
    if not s.protocol_ok:
        narrative = Narrative.PROTOCOL_VIOLATED
    elif bob_can_know and alice_decoheres:
        narrative = Narrative.BOB_KNOWS_ALICE_DECOHERED
    elif not bob_can_know and not alice_decoheres:
        narrative = Narrative.BOB_BLIND_ALICE_COHERENT
    elif alice_decoheres:
        narrative = Narrative.BOB_BLIND_ALICE_DECOHERED
    else:
        narrative = Narrative.BOB_KNOWS_ALICE_COHERENT
    return RegimeLabel(bob_can_know, alice_decoheres, narrative)
