import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from whichpath.decoherence import (REPORT_FIELDS, alice_decoherence, bob_decoherence,
                                   decoherence_report, difference_mode_coupling,
                                   probe_displacement, radiated_amplitudes, reduce_to_span,
                                   subtract_common_mode)
from whichpath.gaussian import CoherentLabel, ModeMismatchError, overlap
from whichpath.radiation import ModeAmplitudes, ModeBasis, photon_number
from whichpath.scenario import FieldKind, Narrative, Scenario, whichpath_snr

from oracles import fock_overlap


def test_alice_trivial_and_oracle():
    a = np.array([0.5 + 0.5j, -1.0])
    assert alice_decoherence(a, a) == pytest.approx(0.0, abs=1e-15)
    b = a + np.array([1.0, 1.0])      # |a1 - a2|^2 = 2
    assert alice_decoherence(a, b) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert alice_decoherence(a, b) == pytest.approx(1 - abs(fock_overlap(a, b)), abs=1e-10)


def test_alice_many_quanta_is_orthogonal():
    basis = ModeBasis.log_spaced(0.1, 1.0, 8)
    alpha = np.full(8, math.sqrt(10.7 / 8))
    a = ModeAmplitudes(basis, alpha)
    assert photon_number(a) > 10.6
    assert alice_decoherence(a, ModeAmplitudes.zeros(basis)) > 0.99


def test_bob_examples():
    b0 = CoherentLabel.vacuum(1)
    assert bob_decoherence(b0, b0) == 0
    assert bob_decoherence(b0, CoherentLabel([1 + 1j])) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    # |delta|^2 = 100: 1 - D_Bob = exp(-50) is below double resolution near 1,
    # so check the overlap itself
    far = CoherentLabel([10.0])
    assert bob_decoherence(b0, far) == 1.0
    assert abs(overlap(b0, far)) < 1e-21
    with pytest.raises(ModeMismatchError):
        bob_decoherence(b0, CoherentLabel.vacuum(2))


def test_mismatched_bases_rejected():
    a = ModeAmplitudes.zeros(ModeBasis.log_spaced(0.1, 1.0, 4))
    b = ModeAmplitudes.zeros(ModeBasis.log_spaced(0.1, 2.0, 4))
    with pytest.raises(ModeMismatchError):
        alice_decoherence(a, b)


def test_snr_examples():
    D, TB = 100.0, 50.0
    assert whichpath_snr(Scenario(q_A=0, d=1, D=D, T_B=TB)) == 0
    s = Scenario(q_A=1, d=1, D=D, T_B=TB).with_moment(D * (D / TB) ** 2)
    assert whichpath_snr(s) == pytest.approx(1.0, rel=1e-14)
    g = Scenario(field_kind="gravitational", d=1, D=D, T_A=10, T_B=D * 0.999999999).with_moment(D ** 2)
    assert whichpath_snr(g) == pytest.approx(1.0, rel=1e-8)


def test_probe_bridge():
    # overlap of the displaced probe reproduces exp(-SNR^2/8)
    for snr in (0.1, 1.0, 3.0):
        d = probe_displacement(snr)
        assert abs(overlap([0.0], [d])) == pytest.approx(math.exp(-snr ** 2 / 8), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4),
       st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_decoherence_in_unit_interval(x, y):
    a = np.array(x[:2]) + 1j * np.array(x[2:])
    b = np.array(y[:2]) + 1j * np.array(y[2:])
    assert 0.0 <= alice_decoherence(a, b) <= 1.0


def test_alice_strictly_increasing_in_distance():
    rng = np.random.default_rng(1)
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    u /= np.linalg.norm(u)
    vals = [alice_decoherence(np.zeros(3), r * u) for r in np.linspace(0, 5, 40)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9))
def test_common_mode_invariance(v):
    a1 = np.array(v[0:3]) + 0.5j
    a2 = np.array(v[3:6]) - 0.25j
    c = np.array(v[6:9]) * (1 + 1j)
    before = alice_decoherence(a1, a2)
    assert alice_decoherence(a1 + c, a2 + c) == pytest.approx(before, abs=1e-12)
    r1, r2 = subtract_common_mode(a1 + c, a2 + c)
    assert alice_decoherence(r1, r2) == pytest.approx(before, abs=1e-12)
    np.testing.assert_allclose(r2, 0, atol=1e-15)


def test_alice_consistent_with_photon_number():
    for kind in FieldKind:
        for T in (2.0, 10.0):
            s = Scenario(field_kind=kind, q_A=1.5, m_A=1.5, T_A=T)
            _, amps = radiated_amplitudes(s, n_modes=512)
            d = alice_decoherence(amps, ModeAmplitudes.zeros(amps.basis))
            assert abs(d - (1 - math.exp(-photon_number(amps) / 2))) < 1e-12


def test_reduce_to_span_keeps_overlap():
    rng = np.random.default_rng(4)
    a1 = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    a2 = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    r1, r2 = reduce_to_span(a1, a2)
    assert r1.n_modes == 2
    assert overlap(r1, r2) == pytest.approx(overlap(a1, a2), abs=1e-13)
    z1, z2 = reduce_to_span(a1, np.zeros(50))
    assert z1.n_modes == 1 and abs(overlap(z1, z2)) == pytest.approx(abs(overlap(a1, 0 * a1)))


def test_difference_mode_coupling_transfers_target():
    r1, r2 = CoherentLabel([2.0, 0.0]), CoherentLabel.vacuum(2)
    U, capped = difference_mode_coupling(r1, r2, 0.5)
    assert not capped
    from whichpath.gaussian import apply_unitary
    p1 = apply_unitary(U, r1.concat(CoherentLabel.vacuum(1))).amplitudes[-1]
    p2 = apply_unitary(U, r2.concat(CoherentLabel.vacuum(1))).amplitudes[-1]
    assert abs(p1 - p2) == pytest.approx(0.5, rel=1e-14)
    _, capped = difference_mode_coupling(r1, r2, 5.0)
    assert capped


# ---------------------------------------------------------------------------
# end-to-end reports

def test_report_adiabatic_em():
    r = decoherence_report(Scenario(q_A=0.5, d=1, D=100, T_A=80, T_B=80))
    assert r.d_alice < 0.01
    assert r.regime.narrative is Narrative.BOB_BLIND_ALICE_COHERENT
    assert r.audit_pass
    assert r.d_bob <= r.d_alice + 1e-10
    assert 0 <= r.d_bob <= 1


def test_report_strong_source():
    r = decoherence_report(Scenario(q_A=2000, d=1, D=100, T_A=90, T_B=90))
    assert r.regime.narrative is Narrative.BOB_KNOWS_ALICE_DECOHERED
    assert r.d_alice > 0.99
    assert r.bob_can_know and r.alice_decoheres
    assert r.audit_pass and r.d_bob <= r.d_alice + 1e-10


def test_report_caps_bob_at_full_swap():
    # only reachable outside the protocol: slow Alice and Bob, T_A T_B^2 >> D^3
    r = decoherence_report(Scenario(q_A=1, d=1, D=10, T_A=25, T_B=25))
    assert r.bob_capped
    assert r.d_bob == pytest.approx(r.d_alice, abs=1e-10)
    assert r.d_bob_estimate >= r.d_bob


def test_report_protocol_violation_is_flagged():
    r = decoherence_report(Scenario(q_A=1, d=1, D=100, T_A=50, T_B=200))
    assert r.regime.narrative is Narrative.PROTOCOL_VIOLATED
    assert not r.bob_causal


def test_report_serialization():
    r = decoherence_report(Scenario(field_kind="gravitational", m_A=5, d=1, D=100, T_A=20, T_B=20))
    d = r.to_dict()
    assert tuple(d) == REPORT_FIELDS
    payload = json.loads(r.to_json(config={"x": 1}))
    assert payload["config"] == {"x": 1}
    assert "snr_bridge" in payload
    lines = r.to_csv().splitlines()
    assert lines[0].split(",") == list(REPORT_FIELDS)
    assert len(lines) == 2


def test_cap_never_needed_under_protocol():
    rng = np.random.default_rng(9)
    for _ in range(12):
        D = 10 ** rng.uniform(0.5, 2.5)
        kind = list(FieldKind)[int(rng.integers(2))]
        s = Scenario(field_kind=kind, d=D / 50, D=D,
                     T_A=rng.uniform(0.05, 0.999) * D, T_B=rng.uniform(0.05, 0.999) * D)
        s = s.with_moment(10 ** rng.uniform(-2, 4) * D ** (2 if s.is_gravitational else 1))
        r = decoherence_report(s, n_modes=512)
        assert not r.bob_capped
        assert r.d_bob <= r.d_alice + 1e-10
