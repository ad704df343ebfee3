"""
whichpath: decoherence of a spatially superposed charge or mass, and the
limits on what a distant observer can learn about its path.

Typical use::

    from whichpath import Scenario, decoherence_report
    r = decoherence_report(Scenario(q_A=0.5, d=1, D=100, T_A=80, T_B=80))
    r.d_alice, r.d_bob, r.regime.narrative
"""

from .audit import AuditResult, AuditSummary, AuditViolation, order_independence, random_audit, run_audit
from .config import ConfigError, RunConfig
from .decoherence import (DecoherenceReport, alice_decoherence, bob_decoherence,
                          decoherence_report, probe_displacement, radiated_amplitudes,
                          subtract_common_mode)
from .gaussian import (CoherentLabel, GaussianUnitary, ModeMismatchError, NotCoherentError,
                       NotSymplecticError, apply_unitary, beamsplitter, factor_overlap,
                       haar_unitary, overlap, random_passive, random_symplectic, swap)
from .radiation import (AliasingError, ModeAmplitudes, ModeBasis, photon_number,
                        radiated_energy, spectral_amplitudes)
from .scenario import (FieldKind, Narrative, Ramp, RegimeLabel, Scenario, ScenarioError,
                       classify_regime, effective_moment, estimated_quanta, probe_response,
                       whichpath_snr)
from .sweep import Axis, PowerLawFit, SweepSpec, SweepSpecError, fit_powerlaw, run_sweep, snr_contour
from .worldline import (MultipoleHistory, Order, ResolutionError, build_branch_difference,
                        causal_support_check, window)

__version__ = "0.1.0"

__all__ = [
    "AliasingError", "AuditResult", "AuditSummary", "AuditViolation", "Axis", "CoherentLabel",
    "ConfigError", "DecoherenceReport", "FieldKind", "GaussianUnitary", "ModeAmplitudes",
    "ModeBasis", "ModeMismatchError", "MultipoleHistory", "Narrative", "NotCoherentError",
    "NotSymplecticError", "Order", "PowerLawFit", "Ramp", "RegimeLabel", "ResolutionError",
    "RunConfig", "Scenario", "ScenarioError", "SweepSpec", "SweepSpecError",
    "alice_decoherence", "apply_unitary", "beamsplitter", "bob_decoherence",
    "build_branch_difference", "causal_support_check", "classify_regime", "decoherence_report",
    "effective_moment", "estimated_quanta", "factor_overlap", "fit_powerlaw", "haar_unitary",
    "order_independence", "overlap", "photon_number", "probe_displacement", "probe_response",
    "radiated_amplitudes", "radiated_energy", "random_audit", "random_passive",
    "random_symplectic", "run_audit", "run_sweep", "snr_contour", "spectral_amplitudes",
    "subtract_common_mode", "swap", "whichpath_snr", "window",
]
