"""Mode structure, segment integrals, and pulse-sequence fidelity tools."""
import math

import numpy as np
import pytest

import oracles
from ionqec import code, ionphys
from ionqec.ionphys import IonCrystal, ModeData, PulseSequence

OMEGA_X = 2.0 * math.pi * 3.0e6


def _pair_crystal(a):
    return IonCrystal(positions=np.array([[0.0, 0.0], [a, 0.0]]))


def test_two_ion_modes_match_closed_form():
    a = 5e-6
    crystal = _pair_crystal(a)
    eps = ionphys.epsilon_parameter(crystal, a)
    modes = ionphys.transverse_modes(crystal)
    assert modes.omega_k[0] == pytest.approx(OMEGA_X, rel=1e-12)
    assert modes.omega_k[1] == pytest.approx(OMEGA_X * math.sqrt(1.0 - 2.0 * eps),
                                             rel=1e-12)
    assert np.allclose(np.abs(modes.b), 1.0 / math.sqrt(2.0))
    assert np.allclose(modes.b.T @ modes.b, np.eye(2), atol=1e-12)


def test_epsilon_parameter_values():
    crystal5 = _pair_crystal(5e-6)
    assert ionphys.epsilon_parameter(crystal5, 5e-6) == pytest.approx(0.0183, rel=0.01)
    assert ionphys.epsilon_parameter(crystal5, 8e-6) == pytest.approx(0.0045, rel=0.02)
    with pytest.raises(ValueError):
        ionphys.epsilon_parameter(crystal5, 0.0)


def test_lamb_dicke_value():
    crystal = _pair_crystal(5e-6)
    modes = ionphys.transverse_modes(crystal)
    assert modes.eta_k[0] == pytest.approx(0.111, rel=0.01)


def test_com_mode_on_code_crystal():
    crystal = ionphys.crystal_from_layout(code.build_layout(3), 5e-6)
    modes = ionphys.transverse_modes(crystal)
    assert modes.omega_k[0] == pytest.approx(OMEGA_X, rel=1e-9)
    com = modes.b[:, 0]
    assert np.allclose(com, 1.0 / math.sqrt(crystal.n_ions), rtol=1e-6)
    assert np.all(np.diff(modes.omega_k) <= 1e-9)


def test_crystal_from_layout_geometry():
    layout = code.build_layout(3)
    a = 5e-6
    crystal = ionphys.crystal_from_layout(layout, a)
    assert crystal.n_ions == 2 * 9 - 1
    pos = crystal.positions
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    assert dist.min() == pytest.approx(a, rel=1e-12)
    emb = ionphys.embed_layout(layout, a)
    for layer in layout.cnot_layers:
        for gate in layer:
            (xu, xv), (yu, yv) = emb[gate[0]], emb[gate[1]]
            assert math.hypot(xu - yu, xv - yv) == pytest.approx(a, rel=1e-12)


def test_unstable_crystal_raises():
    with pytest.raises(ionphys.InstabilityError):
        ionphys.transverse_modes(_pair_crystal(1e-6))


def test_sound_radius():
    eps = 0.0045
    tau = 100e-6
    assert ionphys.sound_radius(eps, OMEGA_X, tau) == eps * OMEGA_X * tau


def _line_crystal(n, a=5e-6):
    pos = np.stack([np.arange(n) * a, np.zeros(n)], axis=1)
    return IonCrystal(positions=pos)


def _random_pulse(rng, ions, n_seg, tau, mu):
    amps = {i: rng.normal(0.0, 2.0 * math.pi * 5e4, size=n_seg) for i in ions}
    return PulseSequence(n_seg=n_seg, tau=tau, mu=mu, amplitudes=amps)


def test_alpha_theta_match_quadrature():
    crystal = _line_crystal(3)
    modes = ionphys.transverse_modes(crystal)
    band = float(modes.omega_k[0] - modes.omega_k[-1])
    rng = np.random.default_rng(12)
    mus = [
        float(modes.omega_k[0]) + 0.1 * band,   # above the band
        float(modes.omega_k[1]) + 30.0,          # almost on a mode
        float(modes.omega_k[-1]) - 0.2 * band,  # below the band
    ]
    for mu in mus:
        pulse = _random_pulse(rng, [0, 2], n_seg=5, tau=40e-6, mu=mu)
        alpha = ionphys.alpha_integrals(pulse, modes)
        theta = ionphys.theta_integrals(pulse, modes)
        alpha_ref = oracles.alpha_reference(pulse, modes)
        theta_ref = oracles.theta_reference(pulse, modes)
        np.testing.assert_allclose(alpha, alpha_ref, rtol=1e-7,
                                   atol=1e-7 * np.abs(alpha_ref).max())
        np.testing.assert_allclose(theta, theta_ref, rtol=1e-7,
                                   atol=1e-7 * np.abs(theta_ref).max())


def test_segment_integrals_near_resonance():
    omega = OMEGA_X
    for mu in (omega + 1.0, omega + 1e-3, omega):
        got = ionphys.epsilon_segments(omega, mu, 40e-6, 7)[0]
        ref = oracles.segment_integrals_reference(omega, mu, 40e-6, 7)
        # the atol floor covers components that vanish by cancellation,
        # where adaptive quadrature carries its own roundoff
        np.testing.assert_allclose(got, ref, rtol=1e-9,
                                   atol=1e-8 * np.abs(ref).max())


def test_detuning_derivative_matches_finite_difference():
    omega = np.array([OMEGA_X, OMEGA_X * 0.99])
    mu = OMEGA_X + 2.0 * math.pi * 20e3
    tau, n_seg = 60e-6, 9
    d = ionphys.epsilon_segments_dmu(omega, mu, tau, n_seg)
    step = 1e-2
    hi = ionphys.epsilon_segments(omega, mu + step, tau, n_seg)
    lo = ionphys.epsilon_segments(omega, mu - step, tau, n_seg)
    fd = (hi - lo) / (2.0 * step)
    np.testing.assert_allclose(d, fd, rtol=1e-6, atol=1e-6 * np.abs(d).max())


def test_theta_shape_and_scaling():
    crystal = _line_crystal(4)
    modes = ionphys.transverse_modes(crystal)
    rng = np.random.default_rng(3)
    mu = float(modes.omega_k[0]) + 2.0 * math.pi * 10e3
    pulse = _random_pulse(rng, [0, 1, 3], n_seg=4, tau=30e-6, mu=mu)
    theta = ionphys.theta_integrals(pulse, modes)
    assert theta.shape == (3, 3)
    assert np.allclose(theta, theta.T)
    assert np.all(np.diag(theta) == 0.0)
    s = 1.7
    scaled = PulseSequence(
        n_seg=4, tau=30e-6, mu=mu,
        amplitudes={i: s * v for i, v in pulse.amplitudes.items()})
    np.testing.assert_allclose(ionphys.theta_integrals(scaled, modes),
                               s * s * theta, rtol=1e-12)
    np.testing.assert_allclose(ionphys.alpha_integrals(scaled, modes),
                               s * ionphys.alpha_integrals(pulse, modes),
                               rtol=1e-12)


def test_mode_quadratic_form_matches_theta():
    mu = OMEGA_X + 2.0 * math.pi * 15e3
    tau, n_seg = 50e-6, 6
    modes = ModeData(omega_k=np.array([OMEGA_X]),
                     b=np.array([[0.8], [0.6]]),
                     eta_k=np.array([0.1]),
                     nbar_k=np.zeros(1))
    rng = np.random.default_rng(8)
    pulse = _random_pulse(rng, [0, 1], n_seg=n_seg, tau=tau, mu=mu)
    G = ionphys.mode_quadratic_form(OMEGA_X, mu, tau, n_seg)
    assert np.allclose(G, G.T)
    want = 0.1 ** 2 * 0.8 * 0.6 * float(
        pulse.amplitudes[0] @ G @ pulse.amplitudes[1])
    got = ionphys.theta_integrals(pulse, modes)[0, 1]
    assert got == pytest.approx(want, rel=1e-10)


def test_gate_infidelity():
    alpha = np.zeros((2, 3), dtype=complex)
    theta = np.array([[0.0, math.pi / 4], [math.pi / 4, 0.0]])
    nbar = np.zeros(3)
    assert ionphys.gate_infidelity(alpha, theta, {(0, 1): math.pi / 4}, nbar) == 0.0
    delta = 1e-3
    miss = ionphys.gate_infidelity(alpha, theta, {(0, 1): math.pi / 4 - delta}, nbar)
    assert miss == pytest.approx(0.8 * delta ** 2)
    # matrix targets mean the same thing as the dict form
    tmat = np.array([[0.0, math.pi / 4 - delta], [math.pi / 4 - delta, 0.0]])
    assert ionphys.gate_infidelity(alpha, theta, tmat, nbar) == pytest.approx(miss)
    # residual displacement heats as 2 nbar + 1
    alpha2 = alpha.copy()
    alpha2[0, 1] = 1e-4
    cold = ionphys.gate_infidelity(alpha2, theta, tmat, nbar)
    hot = ionphys.gate_infidelity(alpha2, theta, tmat, nbar + 2.0)
    assert hot - cold == pytest.approx(0.8 * 1e-8 * 4.0)


def test_pulse_sequence_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    pulse = _random_pulse(rng, [3, 17], n_seg=11, tau=123.4e-6,
                          mu=2.0 * math.pi * 3.017e6)
    path = tmp_path / "x.pulse"
    pulse.save(path)
    back = PulseSequence.load(path)
    assert back.n_seg == pulse.n_seg
    assert back.tau == pulse.tau
    assert back.mu == pulse.mu
    assert back.ions == [3, 17]
    for ion in pulse.ions:
        assert np.array_equal(back.amplitudes[ion], pulse.amplitudes[ion])


def test_pulse_sequence_validation(tmp_path):
    with pytest.raises(ValueError):
        PulseSequence(n_seg=0, tau=1e-5, mu=1.0)
    with pytest.raises(ValueError):
        PulseSequence(n_seg=2, tau=0.0, mu=1.0)
    with pytest.raises(ValueError):
        PulseSequence(n_seg=2, tau=1e-5, mu=1.0, amplitudes={0: [1.0, 2.0, 3.0]})
    bad = tmp_path / "bad.pulse"
    bad.write_text("1 2\n")
    with pytest.raises(ValueError):
        PulseSequence.load(bad)
    empty = tmp_path / "empty.pulse"
    empty.write_text("\n")
    with pytest.raises(ValueError):
        PulseSequence.load(empty)


def test_crystal_validation():
    with pytest.raises(ValueError):
        IonCrystal(positions=np.zeros((2, 3)))
    with pytest.raises(ValueError):
        IonCrystal(positions=np.array([[0.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        IonCrystal(positions=np.array([[0.0, 0.0]]), omega_x=-1.0)


def test_triangular_positions():
    pts = ionphys.triangular_positions(2, 3, 1.0)
    assert pts.shape == (6, 2)
    d01 = np.hypot(*(pts[1] - pts[0]))
    d03 = np.hypot(*(pts[3] - pts[0]))
    assert d01 == pytest.approx(1.0)
    assert d03 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ionphys.triangular_positions(0, 3, 1.0)
