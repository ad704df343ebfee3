import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from whichpath.radiation import ModeBasis, photon_number, spectral_amplitudes
from whichpath.scenario import FieldKind, Ramp, Scenario
from whichpath.worldline import (MultipoleHistory, Order, ResolutionError,
                                 build_branch_difference, causal_support_check,
                                 samples_per_ramp, spectral_derivative, window)

from oracles import richardson_third_derivative, smoothstep_difference_moment


@pytest.mark.parametrize("ramp", list(Ramp))
def test_window_endpoints(ramp):
    x = np.array([-0.5, 0.0, 1.0, 1.5])
    np.testing.assert_allclose(window(ramp, x, 0), [0, 0, 1, 1], atol=1e-15)
    np.testing.assert_allclose(window(ramp, x, 1), 0, atol=1e-15)
    # the lowered Gaussian pulse keeps a tiny acceleration step at its edges
    peak = np.max(np.abs(window(ramp, np.linspace(0, 1, 2001), 2)))
    tol = 1e-4 if ramp is Ramp.GAUSSIAN else 1e-12
    assert np.max(np.abs(window(ramp, x, 2))) <= tol * peak


@pytest.mark.parametrize("ramp", list(Ramp))
def test_window_derivatives_match_finite_differences(ramp):
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    for k in (1, 2, 3):
        fd = (window(ramp, x + h, k - 1) - window(ramp, x - h, k - 1)) / (2 * h)
        scale = np.max(np.abs(window(ramp, np.linspace(0, 1, 201), k)))
        np.testing.assert_allclose(window(ramp, x, k), fd, atol=1e-6 * scale)


@pytest.mark.parametrize("ramp", list(Ramp))
def test_window_is_monotone(ramp):
    assert np.all(window(ramp, np.linspace(0, 1, 2001), 1) >= -1e-15)


def test_window_order_limit():
    with pytest.raises(ValueError):
        window("smoothstep", 0.5, 4)


def test_zero_separation_gives_zero_history():
    h = build_branch_difference(Scenario(d=0, T_A=10))
    assert not np.any(h.moment)
    assert all(not np.any(d) for d in h.derivs)


@pytest.mark.parametrize("kind", list(FieldKind))
@pytest.mark.parametrize("ramp", list(Ramp))
def test_plateau_equals_moment(kind, ramp):
    s = Scenario(field_kind=kind, ramp=ramp, q_A=3, m_A=2, d=1.5, T_A=7)
    h = build_branch_difference(s)
    plateau = 3 * 1.5 if kind is FieldKind.ELECTROMAGNETIC else 2 * 1.5 ** 2
    assert np.max(np.abs(h.moment)) == pytest.approx(plateau, rel=1e-15)
    assert h.order is (Order.DIPOLE if kind is FieldKind.ELECTROMAGNETIC else Order.QUADRUPOLE)
    # compact support: zero at both padded ends
    assert h.moment[0] == 0 and h.moment[-1] == 0


def test_recombination_occupies_zero_to_T():
    s = Scenario(T_A=10)
    h = build_branch_difference(s)
    before = h.t < 0
    during = (h.t > 0) & (h.t < s.T_A)
    after = h.t >= s.T_A
    assert np.all(h.moment[(h.t > -h.meta["hold_factor"] * s.T_A) & before] == 1.0)
    assert np.all(np.diff(h.moment[during]) < 0)
    assert np.all(h.moment[after] == 0.0)


def test_sampling_rule():
    assert samples_per_ramp() >= 64
    n = samples_per_ramp(64)
    # Nyquist at least 8x the top mode frequency
    assert math.pi * n >= 8 * 64
    assert n % 2 == 0
    with pytest.raises(ResolutionError):
        samples_per_ramp(64, requested=32)
    h = build_branch_difference(Scenario(T_A=10))
    assert h.meta["samples_per_ramp"] == n
    assert h.dt == pytest.approx(10 / n, rel=1e-12)


def test_third_derivative_matches_richardson_oracle():
    s = Scenario(T_A=10, q_A=1, d=1)
    h = build_branch_difference(s)
    T = s.T_A
    L = h.meta["split_factor"] * T
    t0 = -(h.meta["hold_factor"] + h.meta["split_factor"]) * T

    moment = smoothstep_difference_moment(T, t0, L)
    inner = np.flatnonzero((h.t > 0.05 * T) & (h.t < 0.95 * T))[::7]
    fine = h.dt / 10
    oracle = np.array([float(richardson_third_derivative(moment, h.t[i], fine)) for i in inner])
    module = h.derivative(3)[inner]
    scale = np.max(np.abs(h.derivative(3)))
    assert np.max(np.abs(module - oracle)) / scale < 1e-6


def test_spectral_derivative_band_limited():
    L = 20.0
    n = 512
    t = np.arange(n) * (L / n)
    k0 = 2 * math.pi * 3 / L
    f = np.sin(k0 * t) + 0.5 * np.cos(2 * k0 * t)
    d3 = -k0 ** 3 * np.cos(k0 * t) + 0.5 * (2 * k0) ** 3 * np.sin(2 * k0 * t)
    got = spectral_derivative(f, L / n, 3)
    assert np.max(np.abs(got - d3)) / np.max(np.abs(d3)) < 1e-8


def test_spectral_and_analytic_derivatives_agree_on_history():
    h = build_branch_difference(Scenario(T_A=10))
    a = h.derivative(2, "analytic")
    s = h.derivative(2, "spectral")
    # the analytic second derivative jumps at the ramp edges; compare away from them
    mask = np.ones_like(h.t, dtype=bool)
    for b in h.breakpoints:
        mask &= np.abs(h.t - b) > 0.1 * h.ramp_duration
    assert np.max(np.abs(a - s)[mask]) < 1e-3 * np.max(np.abs(a))


@pytest.mark.parametrize("kind", list(FieldKind))
def test_simpson_integrates_radiating_derivative_to_zero(kind):
    # compact history: the radiating derivative integrates to zero, and the
    # pieces (cubic or quadratic for the smoothstep) are exact under Simpson
    h = build_branch_difference(Scenario(field_kind=kind, T_A=10))
    w = h.simpson_weights()
    for k in (2, 3):
        assert abs(w @ h.derivative(k)) < 1e-14 * np.max(np.abs(h.derivative(k))) * h.t.size


@pytest.mark.parametrize("kind", list(FieldKind))
def test_time_reversal_preserves_quanta(kind):
    s = Scenario(field_kind=kind, T_A=10)
    h = build_branch_difference(s)
    r = build_branch_difference(s, reverse=True)
    np.testing.assert_array_equal(r.t, -h.t[::-1])
    np.testing.assert_array_equal(r.moment, h.moment[::-1])
    basis = ModeBasis.for_ramp(s.T_A, kind)
    n_fwd = photon_number(spectral_amplitudes(h, basis))
    n_rev = photon_number(spectral_amplitudes(r, basis))
    assert abs(n_fwd - n_rev) <= 1e-12 * n_fwd


def test_rescaling_time_keeps_plateau():
    s = Scenario(T_A=4)
    h1 = build_branch_difference(s)
    h2 = build_branch_difference(s.replace(T_A=12))
    np.testing.assert_allclose(h2.t, 3 * h1.t, rtol=1e-13, atol=1e-13)
    np.testing.assert_array_equal(h1.moment, h2.moment)
    np.testing.assert_allclose(h2.derivative(2), h1.derivative(2) / 9, rtol=1e-12, atol=1e-18)


def test_history_validation():
    with pytest.raises(ValueError):
        MultipoleHistory(t=[0, 1, 3], moment=[0, 1, 0], order="dipole")
    with pytest.raises(ResolutionError):
        MultipoleHistory(t=[0, 1], moment=[0, 1], order="dipole")


def test_history_csv(tmp_path):
    h = build_branch_difference(Scenario(T_A=2))
    path = tmp_path / "h.csv"
    h.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1], h.moment)


# ---------------------------------------------------------------------------
# causal support

def test_causal_examples():
    D, T = 100.0, 40.0
    assert causal_support_check(Scenario(D=D, T_A=T), (T / 2, 2 * D)) is False
    assert causal_support_check(Scenario(D=D, T_A=T), (T + D, D)) is True
    assert causal_support_check(Scenario(D=D, T_A=T), (D, D)) is True
    with pytest.raises(ValueError):
        causal_support_check(Scenario(), (0.0, -1.0))


def test_bob_window_is_never_reached():
    s = Scenario(D=100, T_A=90, T_B=99)
    for t in np.linspace(0, s.T_B, 1001):
        assert not causal_support_check(s, (t, s.D))


@settings(max_examples=200, deadline=None)
@given(D=st.floats(1e-2, 1e4), fb=st.floats(0, 0.9999), fa=st.floats(1e-3, 0.9999),
       u=st.floats(0, 1))
def test_no_recombination_signal_in_bob_window(D, fb, fa, u):
    s = Scenario(D=D, d=D / 100, T_A=fa * D, T_B=max(fb, 1e-6) * D)
    assert not causal_support_check(s, (u * s.T_B, s.D))
