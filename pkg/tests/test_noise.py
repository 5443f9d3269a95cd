"""Noise model parameters, crosstalk models, and circuit assembly."""
import math

import numpy as np
import pytest

from ionqec import code, ionphys, noise, sim


def test_idle_error_prob_basic():
    assert noise.idle_error_prob(1.0, math.inf) == 0.0
    assert noise.idle_error_prob(0.0, 100.0) == 0.0
    p = noise.idle_error_prob(1.0, 1.0)
    assert p == pytest.approx(0.75 * (1.0 - math.exp(-1.0)))


def test_coherence_from_idle_round_trip():
    T = noise.coherence_from_idle(7.5e-4)
    assert T == pytest.approx(999.5, abs=0.1)
    assert noise.idle_error_prob(1.0, T) == pytest.approx(7.5e-4)
    assert noise.coherence_from_idle(0.0) == math.inf
    with pytest.raises(ValueError):
        noise.coherence_from_idle(0.75)


def test_uniform_crosstalk():
    m = noise.UniformCrosstalk(1e-5)
    assert m.location_prob(((0, 0), (1, 1)), None) == 1e-5


def test_power_law_crosstalk_values():
    m = noise.PowerLawCrosstalk()
    assert noise.crosstalk_prob(m, (0.0, 0.0), (4.0, 0.0)) == pytest.approx(
        4.4e-6, rel=0.01)
    assert noise.crosstalk_prob(m, (0.0, 0.0), (8.0, 0.0)) == pytest.approx(
        7.5e-8, rel=0.01)
    # clamp below r_min rather than extrapolating upward
    close = noise.crosstalk_prob(m, (0.0, 0.0), (1.0, 0.0))
    at_rmin = noise.crosstalk_prob(m, (0.0, 0.0), (4.0, 0.0))
    assert close == at_rmin


def test_crosstalk_prob_units():
    m = noise.PowerLawCrosstalk()
    a = 8e-6
    scaled = noise.crosstalk_prob(m, (0.0, 0.0), (4 * a, 0.0), a=a)
    assert scaled == pytest.approx(noise.crosstalk_prob(m, (0, 0), (4, 0)))
    with pytest.raises(ValueError):
        noise.crosstalk_prob(m, (1.0, 2.0), (1.0, 2.0))


def test_pair_table_crosstalk():
    m = noise.PairTableCrosstalk({frozenset({(0, 0), (1, 1)}): 2e-5})
    assert m.location_prob(((1, 1), (0, 0)), None) == 2e-5
    with pytest.raises(KeyError):
        m.location_prob(((0, 0), (2, 2)), None)


def test_effective_crosstalk_uniform_full_groups():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)  # full: groups of k=6
    p_c = 1e-5
    eff = noise.effective_crosstalk_per_gate(sched, noise.UniformCrosstalk(p_c))
    assert eff == pytest.approx(2 * (6 - 1) * p_c)


def test_effective_crosstalk_serial_is_zero():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout, k=1)
    assert noise.effective_crosstalk_per_gate(
        sched, noise.UniformCrosstalk(1e-5)) == 0.0


def test_effective_crosstalk_sublattice_power_law():
    # locality of the fitted model caps the per-gate crosstalk near 1e-6
    layout = code.build_layout(17)
    sched = code.sublattice_schedule(layout, 4)
    emb = ionphys.embed_layout(layout, 8e-6)
    eff = noise.effective_crosstalk_per_gate(
        sched, noise.PowerLawCrosstalk(), emb, a=8e-6)
    assert 0.5e-6 < eff < 2e-6


def test_parse_noise_config():
    params = noise.parse_noise_config({
        "noise.p_g": "1e-3",
        "noise.T": "1e4",
        "noise.p_c": "1e-5",
        "noise.durations.t_meas": "7",
    })
    assert params.p_g == 1e-3
    assert params.T == 1e4
    assert isinstance(params.crosstalk, noise.UniformCrosstalk)
    assert params.crosstalk.p == 1e-5
    assert params.durations.t_meas == 7.0


def test_parse_noise_config_exclusive_idle_keys():
    with pytest.raises(ValueError):
        noise.parse_noise_config({"noise.p_i": "1e-4", "noise.T": "1e4"})
    params = noise.parse_noise_config({"noise.p_i": "7.5e-4"})
    assert params.T == pytest.approx(999.5, abs=0.1)


def test_parse_noise_config_power_law():
    params = noise.parse_noise_config({
        "noise.crosstalk.c": "0.015",
        "noise.crosstalk.gamma": "5.87",
    })
    assert isinstance(params.crosstalk, noise.PowerLawCrosstalk)
    assert params.crosstalk.r_min == 4.0


def _full_circuit(d, rounds, **kwargs):
    layout = code.build_layout(d)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams(**kwargs)
    return layout, sched, noise.attach_noise(layout, sched, params, rounds)


def test_crosstalk_location_count_per_group():
    layout = code.build_layout(5)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams(p_g=1e-3, crosstalk=noise.UniformCrosstalk(1e-5))
    circ = noise.attach_noise(layout, sched, params, rounds=1)
    per_round = circ.meta["crosstalk_locations_per_round"]
    expected = sum(2 * len(g) * (len(g) - 1) for g in sched.groups)
    assert per_round == expected
    assert expected == 4 * (2 * 20 * 19)  # four full groups of k=20


def test_serial_schedule_has_no_crosstalk():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout, k=1)
    params = noise.NoiseParams(p_g=1e-3, crosstalk=noise.UniformCrosstalk(1e-4))
    circ = noise.attach_noise(layout, sched, params, rounds=2)
    assert circ.meta["crosstalk_locations_per_round"] == 0
    assert all(ch.kind != "crosstalk" for ch in circ.channels)


def test_zero_noise_samples_zero_detectors():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams()
    circ = sim.build_memory_circuit(layout, sched, params, rounds=2)
    batch = sim.pauli_frame_sample(circ, shots=64, seed=0)
    assert not batch.detector_bits.any()
    assert not batch.observable_flips.any()


def test_role_convention_pauli_types():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams(crosstalk=noise.UniformCrosstalk(1e-4))
    circ = noise.attach_noise(layout, sched, params, rounds=1)
    xt = [ch for ch in circ.channels if ch.kind == "crosstalk"]
    assert xt
    # every crosstalk channel is a two-qubit X/Z product per role
    for ch in xt:
        assert len(ch.qubits) == 2
        assert set(ch.paulis) <= {"X", "Z"}


def test_depolarizing_convention_components():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams(crosstalk=noise.UniformCrosstalk(1.5e-4),
                               crosstalk_pauli="depolarizing")
    circ = noise.attach_noise(layout, sched, params, rounds=1)
    xt = [ch for ch in circ.channels if ch.kind == "crosstalk"]
    locations = circ.meta["crosstalk_locations_per_round"]
    assert len(xt) == 15 * locations
    assert xt[0].p == pytest.approx(1.5e-4 / 15.0)


def test_t_cycle_accounting():
    layout = code.build_layout(5)
    for k, n_groups in ((20, 4), (1, 80)):
        sched = code.schedule_gates(layout, k=k)
        params = noise.NoiseParams(p_g=1e-4)
        circ = noise.attach_noise(layout, sched, params, rounds=1)
        assert circ.meta["t_cycle"] == n_groups * 1.0 + 5.0


def test_attach_noise_rejects_foreign_schedule():
    layout3 = code.build_layout(3)
    layout5 = code.build_layout(5)
    sched5 = code.schedule_gates(layout5)
    with pytest.raises(ValueError):
        noise.attach_noise(layout3, sched5, noise.NoiseParams(), rounds=1)


def test_noise_params_validation():
    with pytest.raises(ValueError):
        noise.NoiseParams(p_g=1.5)
    with pytest.raises(ValueError):
        noise.NoiseParams(T=0.0)
    with pytest.raises(ValueError):
        noise.NoiseParams(crosstalk_pauli="bogus")
