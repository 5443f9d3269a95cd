"""Frame sampler: propagation algebra, determinism, fault enumeration."""
import numpy as np
import pytest

from ionqec import code, noise, sim
from ionqec.circuit import NoisyCircuit


def _frames(circ, faults):
    batch, x, z = sim.inject_paulis(circ, faults, return_frames=True)
    return x, z


def test_cnot_conjugation_table():
    circ = NoisyCircuit(2)
    circ.tick(0.0)
    circ.cnot(0, 1)
    # (pauli on qubit) -> expected (x0, x1), (z0, z1) after the gate
    table = {
        (0, "X"): ((1, 1), (0, 0)),
        (0, "Z"): ((0, 0), (1, 0)),
        (0, "Y"): ((1, 1), (1, 0)),
        (1, "X"): ((0, 1), (0, 0)),
        (1, "Z"): ((0, 0), (1, 1)),
        (1, "Y"): ((0, 1), (1, 1)),
    }
    for (q, pauli), (ex, ez) in table.items():
        x, z = _frames(circ, [(0, q, pauli)])
        assert tuple(x[0].astype(int)) == ex, (q, pauli)
        assert tuple(z[0].astype(int)) == ez, (q, pauli)


def test_hadamard_swaps_frame_components():
    circ = NoisyCircuit(1)
    circ.tick(0.0)
    circ.h(0)
    for pauli, (ex, ez) in {"X": (0, 1), "Z": (1, 0), "Y": (1, 1)}.items():
        x, z = _frames(circ, [(0, 0, pauli)])
        assert (int(x[0, 0]), int(z[0, 0])) == (ex, ez)


def test_reset_clears_frame():
    circ = NoisyCircuit(1)
    circ.tick(0.0)
    circ.reset(0)
    for pauli in ("X", "Y", "Z"):
        x, z = _frames(circ, [(0, 0, pauli)])
        assert not x.any() and not z.any()


def test_measurement_reads_x_component():
    circ = NoisyCircuit(1)
    circ.tick(0.0)
    rec = circ.measure(0)
    circ.detectors.append((rec,))
    for pauli, flips in {"X": 1, "Y": 1, "Z": 0}.items():
        batch = sim.inject_paulis(circ, [(0, 0, pauli)])
        assert int(batch.detector_bits[0, 0]) == flips


_PAULI_MAT = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CX_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                   dtype=complex)


def _apply(state, u, qubits, n):
    k = len(qubits)
    t = state.reshape([2] * n)
    t = np.moveaxis(t, qubits, range(k))
    t = (u @ t.reshape(2 ** k, -1)).reshape([2] * n)
    t = np.moveaxis(t, range(k), qubits)
    return t.reshape(-1)


def test_frame_engine_matches_statevector():
    """Cross-check against dense unitary simulation on a 3-qubit circuit.

    The noiseless circuit acts as the identity on |000>, so each record
    equals the physical measurement outcome after an injected Pauli.
    """
    n = 3
    spec = [("H", (0,)), ("TICK",), ("H", (0,)), ("CX", (0, 1)), ("TICK",),
            ("CX", (1, 2)), ("TICK",)]
    circ = NoisyCircuit(n)
    for q in range(n):
        circ.reset(q)
    for op in spec:
        if op[0] == "H":
            circ.h(op[1][0])
        elif op[0] == "CX":
            circ.cnot(*op[1])
        else:
            circ.tick(1.0)
    recs = [circ.measure(q) for q in range(n)]
    for r in recs:
        circ.detectors.append((r,))

    for step in range(3):
        for q in range(n):
            for pauli in ("X", "Y", "Z"):
                state = np.zeros(2 ** n, dtype=complex)
                state[0] = 1.0
                k = 0
                for op in spec:
                    if op[0] == "H":
                        state = _apply(state, _H_MAT, list(op[1]), n)
                    elif op[0] == "CX":
                        state = _apply(state, _CX_MAT, list(op[1]), n)
                    else:
                        if k == step:
                            state = _apply(state, _PAULI_MAT[pauli], [q], n)
                        k += 1
                probs = np.abs(state) ** 2
                idx = int(np.argmax(probs))
                assert probs[idx] == pytest.approx(1.0)
                want = [(idx >> (n - 1 - qq)) & 1 for qq in range(n)]
                batch = sim.inject_paulis(circ, [(step, q, pauli)])
                got = [int(batch.detector_bits[0, i]) for i in range(n)]
                assert got == want, (step, q, pauli)


def _memory(d, rounds, p_c=1e-4):
    layout = code.build_layout(d)
    sched = code.schedule_gates(layout)
    params = noise.NoiseParams(p_g=1e-4, T=noise.coherence_from_idle(1e-4),
                               crosstalk=noise.UniformCrosstalk(p_c))
    return sim.build_memory_circuit(layout, sched, params, rounds=rounds)


@pytest.mark.parametrize("d,rounds", [(3, 1), (3, 3), (5, 2)])
def test_detector_count(d, rounds):
    circ = _memory(d, rounds)
    assert circ.n_detectors == (d * d - 1) * rounds


def test_memory_meta_contents():
    circ = _memory(3, 2)
    for key in ("ancilla_records", "data_records", "qubit_index", "layout",
                "schedule", "params", "rounds", "t_cycle", "gates_per_round",
                "crosstalk_locations_per_round"):
        assert key in circ.meta
    assert circ.meta["rounds"] == 2
    assert circ.meta["gates_per_round"] == 24


def test_fault_table_counts():
    circ = _memory(3, 3)
    table = sim.enumerate_single_faults(circ)
    assert len(table) == circ.channel_count()
    kinds = {k: table.kinds.count(k) for k in set(table.kinds)}
    assert kinds["gate"] == 15 * 24 * 3
    assert kinds["crosstalk"] == 2 * 6 * 5 * 4 * 3
    assert kinds["idle"] == 468
    assert len(table) == 2268
    probs = np.array([circ.channels[i].p for i in range(len(table))])
    assert np.array_equal(table.probs, probs)


def test_crosstalk_faults_include_hyperedges():
    # some parallel-gate faults trigger three or more detectors, which is
    # what forces the hyperedge decomposition step in the decoder
    circ = _memory(3, 2)
    table = sim.enumerate_single_faults(circ)
    heavy = [dets for dets, kind in zip(table.dets, table.kinds)
             if kind == "crosstalk" and len(dets) >= 3]
    assert heavy


def test_sampling_is_deterministic():
    circ = _memory(3, 2)
    a = sim.pauli_frame_sample(circ, shots=500, seed=11)
    b = sim.pauli_frame_sample(circ, shots=500, seed=11)
    c = sim.pauli_frame_sample(circ, shots=500, seed=12)
    assert np.array_equal(a.detector_bits, b.detector_bits)
    assert np.array_equal(a.observable_flips, b.observable_flips)
    assert not np.array_equal(a.detector_bits, c.detector_bits)


def test_shot_offset_stitches_exactly():
    circ = _memory(3, 1)
    full = sim.pauli_frame_sample(circ, shots=200, seed=3)
    head = sim.pauli_frame_sample(circ, shots=120, seed=3)
    tail = sim.pauli_frame_sample(circ, shots=80, seed=3, shot_offset=120)
    det = np.concatenate([head.detector_bits, tail.detector_bits], axis=0)
    obs = np.concatenate([head.observable_flips, tail.observable_flips])
    assert np.array_equal(det, full.detector_bits)
    assert np.array_equal(obs, full.observable_flips)


def test_block_partition_does_not_change_bits(monkeypatch):
    circ = _memory(3, 1)
    ref = sim.pauli_frame_sample(circ, shots=300, seed=7)
    monkeypatch.setattr(sim, "BLOCK_SHOTS", 64)
    split = sim.pauli_frame_sample(circ, shots=300, seed=7)
    threaded = sim.pauli_frame_sample(circ, shots=300, seed=7, workers=4)
    assert np.array_equal(ref.detector_bits, split.detector_bits)
    assert np.array_equal(ref.detector_bits, threaded.detector_bits)
    assert np.array_equal(ref.observable_flips, threaded.observable_flips)


def test_channel_rate_is_calibrated():
    circ = NoisyCircuit(1)
    circ.reset(0)
    circ.channel([0], ["X"], 0.3, "idle")
    rec = circ.measure(0)
    circ.detectors.append((rec,))
    batch = sim.pauli_frame_sample(circ, shots=20000, seed=1)
    assert batch.detector_fraction() == pytest.approx(0.3, abs=0.015)


def test_channels_fire_independently():
    circ = NoisyCircuit(2)
    for q in (0, 1):
        circ.reset(q)
        circ.channel([q], ["X"], 0.5, "idle")
    recs = [circ.measure(q) for q in (0, 1)]
    for r in recs:
        circ.detectors.append((r,))
    batch = sim.pauli_frame_sample(circ, shots=20000, seed=2)
    bits = batch.detector_bits.astype(float)
    corr = np.corrcoef(bits[:, 0], bits[:, 1])[0, 1]
    assert abs(corr) < 0.03


def test_probe_symptom_basis_shape():
    circ = _memory(3, 1)
    out = sim.probe_symptom_basis(circ)
    assert len(out) == circ.n_steps() * circ.n_qubits * 3
    for dets, obs in out[:50]:
        assert isinstance(dets, tuple)
        assert obs in (0, 1)
