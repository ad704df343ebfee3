"""
Decoherence of Alice's superposition, and what Bob can learn about it.

``D = 1 - |<1|2>|`` measures the lost interference visibility between the
branches. For the radiated field the two branch states are coherent with
amplitudes ``alpha_1``, ``alpha_2``, so ``D_Alice = 1 - exp(-|alpha_1 - alpha_2|^2 / 2)``.
For Bob's probe the same formula applies to the probe labels.

Bob's order-of-magnitude which-path signal (probe displacement over its
vacuum noise) is turned into a probe label by treating the probe as a
ground-state wave packet: a shift ``dx`` with width ``Dx`` has overlap
``exp(-dx^2 / (8 Dx^2))``, i.e. a coherent displacement ``|delta| = SNR / 2``.
This bridge is a modelling choice and is reported as such.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import scenario as _scenario
from .audit import IDENTITY_TOL, MARGIN_TOL, run_audit
from .gaussian import CoherentLabel, GaussianUnitary, ModeMismatchError, overlap
from .radiation import (DEFAULT_MODES, DEFAULT_OMEGA_MAX_FACTOR, DEFAULT_OMEGA_MIN_FACTOR,
                        ModeAmplitudes, ModeBasis, photon_number, radiated_energy,
                        spectral_amplitudes)
from .worldline import build_branch_difference

whichpath_snr = _scenario.whichpath_snr

SNR_BRIDGE = "ground-state wave packet: |<B1|B2>| = exp(-SNR^2/8)"


def _labels(a1, a2):
    x = a1.alpha if isinstance(a1, ModeAmplitudes) else a1
    y = a2.alpha if isinstance(a2, ModeAmplitudes) else a2
    if isinstance(a1, ModeAmplitudes) and isinstance(a2, ModeAmplitudes):
        if a1.basis is not a2.basis and not (
                np.array_equal(a1.basis.frequencies, a2.basis.frequencies)
                and np.array_equal(a1.basis.weights, a2.basis.weights)):
            raise ModeMismatchError("amplitudes live on different mode bases")
    return x, y


def alice_decoherence(a1, a2):
    """``1 - |<Psi_1|Psi_2>|`` for the radiation states of the two branches."""
    x, y = _labels(a1, a2)
    return 1.0 - abs(overlap(x, y))


def bob_decoherence(b1, b2):
    """``1 - |<B_1|B_2>|`` for Bob's final probe states."""
    if b1.n_modes != b2.n_modes:
        raise ModeMismatchError("probe labels belong to different sectors")
    return 1.0 - abs(overlap(b1, b2))


def subtract_common_mode(a1, a2, common=None):
    """Remove a shared (Coulomb-like) part from both branch amplitude sets.

    ``common`` defaults to ``a2``, which leaves the branch difference on
    ``a1`` and the vacuum on ``a2``. Decoherence is unchanged.
    """
    x, y = _labels(a1, a2)
    c = y if common is None else np.asarray(common, dtype=complex)
    out = (np.asarray(x) - c, np.asarray(y) - c)
    if isinstance(a1, ModeAmplitudes):
        return ModeAmplitudes(a1.basis, out[0]), ModeAmplitudes(a1.basis, out[1])
    return out


def probe_displacement(snr):
    """Coherent probe shift reproducing a which-path SNR: ``|delta| = SNR / 2``."""
    return 0.5 * float(snr)


def reduce_to_span(a1, a2):
    """
    Express two branch labels on an orthonormal basis of their span.

    The returned labels live on at most two modes and have exactly the
    same pairwise overlap, so downstream unitaries need not touch every
    spectral mode.
    """
    x, y = (np.asarray(v, dtype=complex) for v in _labels(a1, a2))
    cols = np.column_stack([x - y, y])
    q, r = np.linalg.qr(cols)
    scale = max(np.max(np.abs(r)), 1e-300)
    keep = np.abs(np.diag(r)) > 1e-13 * scale
    q = q[:, keep] if keep.any() else q[:, :1]
    return CoherentLabel(q.conj().T @ x), CoherentLabel(q.conj().T @ y)


def difference_mode_coupling(r1, r2, target):
    """
    Passive unitary on ``field (+) one probe mode`` that rotates the branch
    difference mode into the probe by the angle needed for a probe
    displacement difference ``target``.

    The rotation saturates at a full swap, so the probe can never carry
    more difference than the field holds. Returns ``(unitary, capped)``.
    """
    diff = r1.amplitudes - r2.amplitudes
    norm = float(np.linalg.norm(diff))
    n = r1.n_modes + 1
    if norm == 0.0:
        return GaussianUnitary.identity(n), target > 0
    ratio = target / norm
    capped = ratio > 1.0
    theta = math.asin(min(ratio, 1.0))
    e = np.zeros(n, dtype=complex)
    e[:-1] = diff / norm
    p = np.zeros(n, dtype=complex)
    p[-1] = 1.0
    U = (np.eye(n) - (1 - math.cos(theta)) * (np.outer(e, e.conj()) + np.outer(p, p.conj()))
         + math.sin(theta) * (np.outer(p, e.conj()) - np.outer(e, p.conj())))
    return GaussianUnitary.from_unitary(U), capped


# ---------------------------------------------------------------------------

REPORT_FIELDS = (
    "field_kind", "moment", "d_alice", "d_bob", "d_bob_estimate", "n_entangling",
    "n_estimate", "snr_whichpath", "radiated_energy", "mean_frequency",
    "regime", "bob_can_know", "alice_decoheres", "alice_causal", "bob_causal",
    "bob_capped", "identity_residual", "inequality_margin", "audit_pass",
)


@dataclass(frozen=True)
class DecoherenceReport:
    """
    Headline numbers for one scenario.

    ``d_bob`` is the decoherence from a Bob who rotates the radiated
    branch-difference mode into his probe with the strength implied by his
    which-path SNR (capped at a full swap); ``d_bob_estimate`` is the raw
    SNR bridge without that cap.
    """

    field_kind: str
    moment: float
    d_alice: float
    d_bob: float
    d_bob_estimate: float
    n_entangling: float
    n_estimate: float
    snr_whichpath: float
    radiated_energy: float
    mean_frequency: float
    regime: _scenario.RegimeLabel
    alice_causal: bool
    bob_causal: bool
    bob_capped: bool
    identity_residual: float
    inequality_margin: float
    audit_pass: bool

    @property
    def bob_can_know(self):
        return self.regime.bob_can_know

    @property
    def alice_decoheres(self):
        return self.regime.alice_decoheres

    def to_dict(self):
        out = {}
        for name in REPORT_FIELDS:
            value = getattr(self, name)
            if name == "regime":
                value = value.narrative.value
            out[name] = value
        return out

    def to_json(self, **extra):
        """JSON object; ``extra`` entries (e.g. the resolved config) are appended."""
        payload = self.to_dict()
        payload["snr_bridge"] = SNR_BRIDGE
        payload.update(extra)
        return json.dumps(payload, indent=2, allow_nan=True)

    def csv_row(self):
        return [_csv_value(v) for v in self.to_dict().values()]

    @staticmethod
    def csv_header():
        return list(REPORT_FIELDS)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_header())
        writer.writerow(self.csv_row())
        return buf.getvalue()


def _csv_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def radiated_amplitudes(s, n_modes=DEFAULT_MODES, omega_min_factor=DEFAULT_OMEGA_MIN_FACTOR,
                        omega_max_factor=DEFAULT_OMEGA_MAX_FACTOR, samples=None,
                        split_factor=20.0, hold_factor=2.0, coefficient=None):
    """Branch-difference history and its radiated amplitudes for scenario ``s``."""
    h = build_branch_difference(s, samples=samples, split_factor=split_factor,
                                hold_factor=hold_factor, omega_max_factor=omega_max_factor)
    basis = ModeBasis.for_ramp(s.T_A, s.field_kind, n_modes, omega_min_factor, omega_max_factor)
    return h, spectral_amplitudes(h, basis, coefficient)


def decoherence_report(s, **radiation_options):
    """
    Run the whole chain for one scenario: history, radiation, Alice's
    decoherence, Bob's probe, the audit of the bound, and the regime.
    """
    _, amps = radiated_amplitudes(s, **radiation_options)
    a2 = ModeAmplitudes.zeros(amps.basis)
    n = photon_number(amps)
    energy = radiated_energy(amps)
    d_alice = alice_decoherence(amps, a2)

    snr = whichpath_snr(s)
    delta = probe_displacement(snr)
    probe0 = CoherentLabel.vacuum(1)
    d_bob_estimate = bob_decoherence(probe0, CoherentLabel([delta]))

    r1, r2 = reduce_to_span(amps, a2)
    U_bob, capped = difference_mode_coupling(r1, r2, delta)
    audit = run_audit(r1, r2, U_bob, probe0, check=False)
    d_bob = 1.0 - abs(audit.overlap_bob)
    audit_pass = (audit.identity_residual < IDENTITY_TOL
                  and audit.inequality_margin >= -MARGIN_TOL
                  and d_bob <= d_alice + MARGIN_TOL)

    return DecoherenceReport(
        field_kind=s.field_kind.value,
        moment=_scenario.effective_moment(s),
        d_alice=d_alice,
        d_bob=d_bob,
        d_bob_estimate=d_bob_estimate,
        n_entangling=n,
        n_estimate=_scenario.estimated_quanta(s),
        snr_whichpath=snr,
        radiated_energy=energy,
        mean_frequency=energy / n if n > 0 else float("nan"),
        regime=_scenario.classify_regime(s),
        alice_causal=s.alice_causal,
        bob_causal=s.bob_causal,
        bob_capped=bool(capped),
        identity_residual=audit.identity_residual,
        inequality_margin=audit.inequality_margin,
        audit_pass=bool(audit_pass),
    )
