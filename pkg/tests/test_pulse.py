"""Parallel gate design, pulse transplanting, and crosstalk sampling."""
import math

import numpy as np
import pytest

from ionqec import ionphys, pulse
from ionqec.ionphys import IonCrystal, PulseSequence
from ionqec.pulse import (GateTargets, InfeasibleTarget, NoiseSpec,
                          NullSpaceExhausted, TARGET_PHASE)


def _line_crystal(n, a=5e-6):
    pos = np.stack([np.arange(n) * a, np.zeros(n)], axis=1)
    return IonCrystal(positions=pos)


@pytest.fixture(scope="module")
def seven_ion():
    crystal = _line_crystal(7)
    return crystal, ionphys.transverse_modes(crystal)


def _design_scale(seq):
    peak = max(float(np.max(np.abs(a))) for a in seq.amplitudes.values())
    return peak * seq.tau / seq.n_seg


def test_single_pair_design_hits_machine_precision(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    seq = pulse.design_single_pair(modes, 2, 3, mu, tau=100e-6, n_seg=60)
    assert seq.ions == [2, 3]
    alpha = ionphys.alpha_integrals(seq, modes)
    theta = ionphys.theta_integrals(seq, modes)
    assert np.abs(alpha).max() < 1e-10 * _design_scale(seq)
    assert theta[0, 1] == pytest.approx(TARGET_PHASE, abs=1e-10)


def test_displacement_null_space_dimension(seven_ion):
    # 2K real displacement constraints leave n_seg - 2K shape directions
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    eps = ionphys.epsilon_segments(modes.omega_k, mu, 100e-6, 60)
    disp = np.vstack([eps.real, eps.imag])
    rank = np.linalg.matrix_rank(disp)
    assert rank == 2 * modes.n_modes
    assert 60 - rank == 46


def test_parallel_pairs_suppress_cross_phase(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    targets = GateTargets(((0, 1, TARGET_PHASE), (4, 5, TARGET_PHASE)))
    seq = pulse.ease_design(modes, targets, mu, tau=150e-6, n_seg=80)
    theta = ionphys.theta_integrals(seq, modes)
    ions = seq.ions
    want = np.zeros((4, 4))
    want[ions.index(0), ions.index(1)] = TARGET_PHASE
    want[ions.index(4), ions.index(5)] = TARGET_PHASE
    want = want + want.T
    np.testing.assert_allclose(theta, want, atol=1e-9)


def test_dict_targets_allow_chains(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    targets = {(1, 2): TARGET_PHASE, (2, 3): -TARGET_PHASE}
    seq = pulse.ease_design(modes, targets, mu, tau=150e-6, n_seg=80)
    theta = ionphys.theta_integrals(seq, modes)
    ions = seq.ions
    assert ions == [1, 2, 3]
    assert theta[0, 1] == pytest.approx(TARGET_PHASE, abs=1e-9)
    assert theta[1, 2] == pytest.approx(-TARGET_PHASE, abs=1e-9)
    assert theta[0, 2] == pytest.approx(0.0, abs=1e-9)


def test_null_space_exhausted(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    with pytest.raises(NullSpaceExhausted):
        pulse.design_single_pair(modes, 2, 3, mu, tau=100e-6, n_seg=10)


def test_amplitude_cap_infeasible(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    with pytest.raises(InfeasibleTarget):
        pulse.design_single_pair(modes, 2, 3, mu, tau=100e-6, n_seg=60,
                                 amp_cap=1.0)


def test_empty_target_layer(seven_ion):
    _, modes = seven_ion
    seq = pulse.ease_design(modes, {}, 1.0, tau=100e-6, n_seg=20)
    assert seq.amplitudes == {}
    assert pulse.design_parallel_layer(modes, {}, [], 100e-6, 20, mu=1.0)[0].ions == []


def test_design_is_deterministic(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    a = pulse.design_single_pair(modes, 1, 2, mu, tau=120e-6, n_seg=50)
    b = pulse.design_single_pair(modes, 1, 2, mu, tau=120e-6, n_seg=50)
    for ion in a.ions:
        assert np.array_equal(a.amplitudes[ion], b.amplitudes[ion])


def test_default_detuning(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    assert mu == 0.5 * (modes.omega_k[0] + modes.omega_k[1])
    single = ionphys.transverse_modes(_line_crystal(1))
    with pytest.raises(ValueError):
        pulse.default_detuning(single)


def test_rescale_law(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    ref = pulse.design_single_pair(modes, 2, 3, mu, tau=120e-6, n_seg=60)
    scales = pulse.rescale_for_boundary(ref, [(2, 3)], modes)
    assert scales[(2, 3)] == pytest.approx(1.0, abs=1e-8)
    # a shape scaled by s accumulates s^2 Theta, so the rescale factor
    # for any pair must drive it back to exactly pi/4
    scales2 = pulse.rescale_for_boundary(ref, [(1, 2)], modes)
    s = scales2[(1, 2)]
    probe = PulseSequence(
        n_seg=ref.n_seg, tau=ref.tau, mu=ref.mu,
        amplitudes={1: s * ref.amplitudes[2], 2: s * ref.amplitudes[3]})
    th = ionphys.theta_integrals(probe, modes)[0, 1]
    assert abs(th) == pytest.approx(TARGET_PHASE, rel=1e-10)


def test_transplant_layer(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    ref = pulse.design_single_pair(modes, 2, 3, mu, tau=120e-6, n_seg=60)
    layer, scales = pulse.transplant_layer(ref, [(0, 1), (4, 5)], modes)
    assert sorted(scales) == [(0, 1), (4, 5)]
    theta = ionphys.theta_integrals(layer, modes)
    ions = layer.ions
    for i, j in ((0, 1), (4, 5)):
        got = abs(theta[ions.index(i), ions.index(j)])
        assert got == pytest.approx(TARGET_PHASE, rel=1e-10)
    with pytest.raises(ValueError):
        pulse.transplant_layer(ref, [(0, 1), (1, 2)], modes)


def test_zero_noise_sampling_reports_zero_spread(seven_ion):
    crystal, modes = seven_ion
    mu = pulse.default_detuning(modes)
    seq = pulse.design_single_pair(modes, 2, 3, mu, tau=120e-6, n_seg=60)
    spec = NoiseSpec(amp_fraction=0.0, detuning_halfwidth=0.0, n_samples=3)
    rep = pulse.sample_noisy_crosstalk(seq, modes, spec, crystal=crystal,
                                       targets=[(2, 3)])
    assert rep.n_pairs == 1
    assert rep.delta_theta[0] == 0.0
    assert rep.pc_noise[0] == 0.0
    assert rep.theta_mean[0] == pytest.approx(TARGET_PHASE, abs=1e-9)
    assert rep.pc_intrinsic[0] == pytest.approx(TARGET_PHASE ** 2)
    assert rep.targeted[0]
    assert rep.r_over_a[0] == pytest.approx(1.0)


def test_noise_sampling_is_deterministic(seven_ion):
    crystal, modes = seven_ion
    mu = pulse.default_detuning(modes)
    targets = GateTargets(((0, 1, TARGET_PHASE), (4, 5, TARGET_PHASE)))
    seq = pulse.ease_design(modes, targets, mu, tau=150e-6, n_seg=80)
    spec = NoiseSpec(n_samples=8, seed=42)
    rep1 = pulse.sample_noisy_crosstalk(seq, modes, spec, crystal=crystal,
                                        targets=targets)
    rep2 = pulse.sample_noisy_crosstalk(seq, modes, spec, crystal=crystal,
                                        targets=targets)
    assert np.array_equal(rep1.delta_theta, rep2.delta_theta)
    assert np.array_equal(rep1.pc_noise, rep2.pc_noise)
    assert rep1.n_pairs == 6  # all unordered pairs of 4 addressed ions
    assert int(rep1.targeted.sum()) == 2
    assert rep1.gate_infidelity.shape == (2,)


def test_robust_design_reduces_detuning_sensitivity(seven_ion):
    crystal, modes = seven_ion
    mu = pulse.default_detuning(modes)
    plain = pulse.design_single_pair(modes, 2, 3, mu, tau=150e-6, n_seg=80,
                                     robust=False)
    robust = pulse.design_single_pair(modes, 2, 3, mu, tau=150e-6, n_seg=80,
                                      robust=True)

    def alpha_shift(seq, dmu):
        moved = PulseSequence(n_seg=seq.n_seg, tau=seq.tau, mu=seq.mu + dmu,
                              amplitudes=seq.amplitudes)
        return np.abs(ionphys.alpha_integrals(moved, modes)).max()

    dmu = 2.0 * math.pi * 200.0
    gain = alpha_shift(plain, dmu) / alpha_shift(robust, dmu)
    assert gain > 30.0


def test_binned_summary(seven_ion):
    crystal, modes = seven_ion
    mu = pulse.default_detuning(modes)
    targets = GateTargets(((0, 1, TARGET_PHASE), (5, 6, TARGET_PHASE)))
    seq = pulse.ease_design(modes, targets, mu, tau=150e-6, n_seg=80)
    spec = NoiseSpec(n_samples=5, seed=1)
    rep = pulse.sample_noisy_crosstalk(seq, modes, spec, crystal=crystal,
                                       targets=targets)
    bins = rep.binned_summary(n_bins=2)
    assert len(bins) == 2
    assert sum(b["count"] for b in bins) == int(rep.undesired().sum())
    assert bins[0]["r_hi"] <= bins[1]["r_lo"] + 1e-12


def test_crosstalk_csv_columns(seven_ion, tmp_path):
    crystal, modes = seven_ion
    mu = pulse.default_detuning(modes)
    seq = pulse.design_single_pair(modes, 2, 3, mu, tau=120e-6, n_seg=60)
    rep = pulse.sample_noisy_crosstalk(seq, modes, NoiseSpec(n_samples=2),
                                       crystal=crystal)
    path = tmp_path / "xt.csv"
    rep.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "ion_i,ion_j,r_over_a,theta_nominal,pc_intrinsic,delta_theta,pc_noise"
    assert len(lines) == 1 + rep.n_pairs
    first = lines[1].split(",")
    assert int(first[0]) == rep.ion_i[0]
    assert float(first[2]) == rep.r_over_a[0]


def test_fit_power_law_exact_and_noisy():
    rs = np.linspace(4.0, 20.0, 12)
    pts = [(r, 0.015 * r ** -5.87) for r in rs]
    c, gamma, rms = pulse.fit_power_law(pts, r_min=4.0)
    assert c == pytest.approx(0.015, rel=1e-9)
    assert gamma == pytest.approx(5.87, rel=1e-9)
    assert rms < 1e-12
    rng = np.random.default_rng(0)
    noisy = [(r, 0.015 * r ** -5.87 * math.exp(rng.normal(0.0, 0.2)))
             for r in rs]
    c2, gamma2, rms2 = pulse.fit_power_law(noisy, r_min=4.0)
    assert gamma2 == pytest.approx(5.87, abs=0.6)
    assert rms2 > 0.0
    # points closer than r_min stay out of the fit
    c3, gamma3, _ = pulse.fit_power_law(pts + [(1.0, 1e6)], r_min=4.0)
    assert gamma3 == pytest.approx(gamma, rel=1e-9)
    with pytest.raises(ValueError):
        pulse.fit_power_law([(5.0, 1e-4)], r_min=4.0)
    with pytest.raises(ValueError):
        pulse.fit_power_law([(5.0, 0.0), (6.0, 1e-5)], r_min=4.0)


def test_gate_targets_validation():
    with pytest.raises(ValueError):
        GateTargets(((0, 0, TARGET_PHASE),))
    with pytest.raises(ValueError):
        GateTargets(((0, 1, 0.5),))
    with pytest.raises(ValueError):
        GateTargets(((0, 1, TARGET_PHASE), (1, 2, TARGET_PHASE)))
    neg = GateTargets(((3, 2, -TARGET_PHASE),))
    assert neg.pairs == ((3, 2, -TARGET_PHASE),)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(amp_fraction=-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(detuning_halfwidth=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec(n_samples=0)


def test_ease_design_rejects_bad_inputs(seven_ion):
    _, modes = seven_ion
    mu = pulse.default_detuning(modes)
    with pytest.raises(ValueError):
        pulse.ease_design(modes, {(0, 9): TARGET_PHASE}, mu, 100e-6, 60)
    with pytest.raises(TypeError):
        pulse.ease_design(modes, [(0, 1)], mu, 100e-6, 60)
