"""
Numerical audit of the no-paradox bound.

Field radiation states |Psi_1>, |Psi_2> and Bob's ready probe |B_0> start
in a product. Bob's measurement is a Gaussian unitary on field (+) probe.
Afterwards each branch is again a product |Psi'_j> (x) |B_j>, and
unitarity forces

    <Psi'_1|Psi'_2> <B_1|B_2> = <Psi_1|Psi_2>

so ``|<B_1|B_2>| >= |<Psi_1|Psi_2>|``: Bob never distinguishes the branches
better than the radiation already does.

Measurements are drawn from passive interferometers plus displacements on
field (+) ancilla probe modes, the family in which coherent labels stay
exact.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .gaussian import (CoherentLabel, ModeMismatchError,
                       apply_unitary, factor_overlap, overlap, random_passive)

IDENTITY_TOL = 1e-10
MARGIN_TOL = 1e-10
ORDER_TOL = 1e-10


class AuditViolation(AssertionError):
    """The bound failed numerically; this falsifies the implementation."""


@dataclass(frozen=True)
class AuditResult:
    overlap_sigma1: complex
    overlap_field_after: complex
    overlap_bob: complex
    identity_residual: float
    inequality_margin: float
    order_independence_residual: float = 0.0

    @property
    def passed(self):
        return (self.identity_residual < IDENTITY_TOL
                and self.inequality_margin >= -MARGIN_TOL
                and self.order_independence_residual < ORDER_TOL)


def _field_label(a):
    if isinstance(a, CoherentLabel):
        return a
    alpha = getattr(a, "alpha", None)
    return CoherentLabel(alpha if alpha is not None else a)


def _joint_after(a1, a2, U_bob, probe_init):
    f1, f2 = _field_label(a1), _field_label(a2)
    if f1.n_modes != f2.n_modes:
        raise ModeMismatchError("branch field labels live on different registries")
    if U_bob.n_modes != f1.n_modes + probe_init.n_modes:
        raise ModeMismatchError(
            f"U_bob acts on {U_bob.n_modes} modes, field + probe have "
            f"{f1.n_modes} + {probe_init.n_modes}")
    j1 = apply_unitary(U_bob, f1.concat(probe_init))
    j2 = apply_unitary(U_bob, f2.concat(probe_init))
    return f1, f2, j1, j2


def run_audit(a1, a2, U_bob, probe_init, check=True):
    """
    Evolve both branches through Bob's measurement and compare overlaps.

    Parameters
    ----------
    a1, a2 : ModeAmplitudes, CoherentLabel or complex array
        Field radiation labels of the two branches on the same modes.
    U_bob : GaussianUnitary
        Passive Gaussian unitary on the field modes followed by the probe modes.
    probe_init : CoherentLabel
        Bob's ready state, shared by both branches.
    check : bool
        Raise :class:`AuditViolation` if either invariant fails.

    Returns
    -------
    AuditResult
    """
    f1, f2, j1, j2 = _joint_after(a1, a2, U_bob, probe_init)
    nf = f1.n_modes
    field = np.arange(nf)
    probe = np.arange(nf, U_bob.n_modes)
    before = overlap(f1, f2)
    field_after, bob = factor_overlap(j1, j2, (field, probe))
    result = AuditResult(
        overlap_sigma1=before,
        overlap_field_after=field_after,
        overlap_bob=bob,
        identity_residual=abs(field_after * bob - before),
        inequality_margin=abs(bob) - abs(before),
    )
    if check and not result.passed:
        raise AuditViolation(f"audit failed: {result}")
    return result


def order_independence(a1, a2, U_bob, probe_init, recombination_tail):
    """
    Largest change in the final overlaps between applying Alice's tail
    before or after Bob's unitary.

    ``recombination_tail`` acts on the field sector only. The two maps must
    commute on the joint register (disjoint supports, say); otherwise the
    slice ordering is physically meaningful and a ValueError is raised.
    """
    f1 = _field_label(a1)
    n_total = U_bob.n_modes
    nf = f1.n_modes
    if recombination_tail.n_modes != nf:
        raise ModeMismatchError("the tail must act on the full field sector")
    tail = recombination_tail.embed(np.arange(nf), n_total)
    if not tail.commutes_with(U_bob):
        raise ValueError("tail and Bob's unitary have overlapping non-commuting support")

    def final_overlaps(first, second):
        f1_, f2_ = _field_label(a1), _field_label(a2)
        j1 = apply_unitary(second, apply_unitary(first, f1_.concat(probe_init)))
        j2 = apply_unitary(second, apply_unitary(first, f2_.concat(probe_init)))
        sectors = factor_overlap(j1, j2, (np.arange(nf), np.arange(nf, n_total)))
        return np.array([overlap(j1, j2), *sectors])

    tail_first = final_overlaps(tail, U_bob)
    bob_first = final_overlaps(U_bob, tail)
    return float(np.max(np.abs(tail_first - bob_first)))


# ---------------------------------------------------------------------------
# randomized trials

@dataclass(frozen=True)
class AuditSummary:
    trials: int
    seed: int
    max_modes: int
    worst_identity_residual: float
    worst_margin: float
    worst_order_residual: float
    violations: int

    @property
    def passed(self):
        return self.violations == 0

    def to_json(self):
        return json.dumps(asdict(self), indent=2)


def _trial(seed, max_modes, n_field=None, n_probe=None, amplitude_scale=1.5):
    rng = np.random.default_rng(seed)
    if n_field is None:
        n_total = int(rng.integers(2, max_modes + 1))
        n_probe = int(rng.integers(1, n_total))
        n_field = n_total - n_probe
    n_total = n_field + n_probe

    def label(n):
        # keep |a1 - a2|^2 of order one whatever the register size
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return amplitude_scale * z / math.sqrt(2 * n)

    a1 = CoherentLabel(label(n_field))
    a2 = CoherentLabel(label(n_field))
    probe = CoherentLabel(label(n_probe))
    U_bob = random_passive(n_total, rng)
    res = run_audit(a1, a2, U_bob, probe, check=False)

    # Alice's tail on part of the field, Bob restricted to the rest (+ probe)
    k = int(rng.integers(1, n_field + 1))
    tail = random_passive(k, rng).embed(np.arange(k), n_field)
    rest = np.arange(k, n_total)
    bob_local = random_passive(rest.size, rng).embed(rest, n_total)
    order_res = order_independence(a1, a2, bob_local, probe, tail)
    return res.identity_residual, res.inequality_margin, order_res


def _trial_args(args):
    return _trial(*args)


def random_audit(trials=10_000, seed=0, max_modes=6, n_field=4, n_probe=2, workers=1):
    """
    Run ``trials`` random measurements and aggregate the worst residuals.

    Each trial gets its own seed spawned from ``seed``, so results do not
    depend on the worker count. With ``n_field``/``n_probe`` set to None the
    register size is drawn per trial between 2 and ``max_modes``.
    """
    if trials < 1:
        raise ValueError("an audit needs at least one trial")
    if n_field is not None and n_field + n_probe > max_modes:
        raise ValueError(f"{n_field} field + {n_probe} probe modes exceed max_modes={max_modes}")
    children = np.random.SeedSequence(seed).spawn(trials)
    args = [(child, max_modes, n_field, n_probe) for child in children]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_args, args, chunksize=max(1, trials // (8 * workers))))
    else:
        results = [_trial(*a) for a in args]
    res = np.array(results)
    violations = int(np.sum((res[:, 0] >= IDENTITY_TOL) | (res[:, 1] < -MARGIN_TOL)
                            | (res[:, 2] >= ORDER_TOL)))
    return AuditSummary(
        trials=trials, seed=seed, max_modes=max_modes,
        worst_identity_residual=float(res[:, 0].max()),
        worst_margin=float(res[:, 1].min()),
        worst_order_residual=float(res[:, 2].max()),
        violations=violations,
    )
