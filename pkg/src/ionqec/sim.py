"""Pauli-frame Monte Carlo engine.

The engine tracks, per shot, an X/Z flip frame relative to the noiseless
reference execution.  Frame rules: reset clears both flips, H swaps them,
CNOT propagates X control->target and Z target->control, a Z-basis
measurement records the X flip.  Detector and observable bits are XORs of
recorded flips, which is exact for stabilizer circuits whose detectors
have deterministic noiseless parity.

Sampling is vectorized over shots; noise channels draw from per-channel
skip-ahead streams keyed by (seed, channel), so any partition of shots
into worker blocks reproduces the identical sample.  The same engine, run
with one-hot fault rows instead of random draws, enumerates the detector
signature of every single fault.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import (NoisyCircuit, OP_RESET, OP_H, OP_CNOT, OP_MEASURE,
                      OP_CHANNEL, OP_TIME)
from .code import CodeLayout, Schedule
from .noise import NoiseParams, build_rounds
from .rng import channel_stream

BLOCK_SHOTS = 1 << 16


@dataclass
class SampleBatch:
    """Detector and observable flip bits for a batch of shots."""

    detector_bits: np.ndarray  # (shots, n_detectors) uint8
    observable_flips: np.ndarray  # (shots,) uint8
    shots: int
    seed: int

    def detector_fraction(self) -> float:
        if self.detector_bits.size == 0:
            return 0.0
        return float(self.detector_bits.mean())


def build_memory_circuit(layout: CodeLayout, schedule: Schedule, params: NoiseParams,
                         rounds: int, embedding=None, a: float = 1.0) -> NoisyCircuit:
    """Z-basis memory experiment: prepare |0..0>, run `rounds` extraction
    rounds, read out all data qubits, compare logical-Z parity."""
    return build_rounds(layout, schedule, params, rounds, embedding, a,
                        data_prep=True, final_data_measure=True)


def _records_to_batch(comp, records: np.ndarray, shots: int, seed: int) -> SampleBatch:
    n_det = len(comp.det_ptr) - 1
    det = np.zeros((shots, n_det), dtype=np.uint8)
    for j in range(n_det):
        idx = comp.det_idx[comp.det_ptr[j]:comp.det_ptr[j + 1]]
        if len(idx):
            det[:, j] = np.bitwise_xor.reduce(records[:, idx], axis=1)
    if len(comp.obs_idx):
        obs = np.bitwise_xor.reduce(records[:, comp.obs_idx], axis=1)
    else:
        obs = np.zeros(shots, dtype=np.uint8)
    return SampleBatch(det, obs.astype(np.uint8), shots, seed)


def _frame_block(circ: NoisyCircuit, shot0: int, shots: int, seed: int) -> SampleBatch:
    comp = circ.compiled()
    nq, nrec = comp.n_qubits, comp.n_records
    x = np.zeros((shots, nq), dtype=bool)
    z = np.zeros((shots, nq), dtype=bool)
    records = np.zeros((shots, nrec), dtype=np.uint8)
    for kind, a, b in zip(comp.op_kind, comp.op_a, comp.op_b):
        if kind == OP_CNOT:
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        elif kind == OP_CHANNEL:
            hit = channel_stream(seed, a, shot0).random(shots) < comp.ch_p[a]
            for slot in range(2):
                q = comp.ch_q[a, slot]
                if q < 0:
                    break
                if comp.ch_x[a, slot]:
                    x[:, q] ^= hit
                if comp.ch_z[a, slot]:
                    z[:, q] ^= hit
        elif kind == OP_MEASURE:
            records[:, b] = x[:, a]
        elif kind == OP_H:
            tmp = x[:, a].copy()
            x[:, a] = z[:, a]
            z[:, a] = tmp
        elif kind == OP_RESET:
            x[:, a] = False
            z[:, a] = False
    return _records_to_batch(comp, records, shots, seed)


def pauli_frame_sample(circ: NoisyCircuit, shots: int, seed: int,
                       workers: int = 1, shot_offset: int = 0) -> SampleBatch:
    """Sample detector/observable flips for `shots` shots.

    The result is a pure function of (circuit, shots, seed): each channel's
    draws are indexed by absolute shot number through skip-ahead streams,
    so neither the worker count nor the block partition can change the
    bits.  shot_offset starts the run at that absolute shot index, yielding
    exactly the corresponding slice of a longer run.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    blocks = [(shot_offset + b, min(BLOCK_SHOTS, shots - b))
              for b in range(0, shots, BLOCK_SHOTS)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _frame_block(circ, ab[0], ab[1], seed), blocks))
    else:
        parts = [_frame_block(circ, b0, n, seed) for b0, n in blocks]
    det = np.concatenate([p.detector_bits for p in parts], axis=0)
    obs = np.concatenate([p.observable_flips for p in parts], axis=0)
    return SampleBatch(det, obs, shots, seed)


@dataclass
class FaultTable:
    """Detector signature of every single Pauli fault, one row per channel."""

    dets: list[tuple[int, ...]]
    obs: np.ndarray  # (n_channels,) uint8
    kinds: list[str]
    probs: np.ndarray

    def __len__(self) -> int:
        return len(self.dets)

    def __iter__(self):
        for i, d in enumerate(self.dets):
            yield i, d, int(self.obs[i])


def _one_hot_run(circ: NoisyCircuit, n_rows: int, channel_row, injections=None,
                 return_frames: bool = False):
    """Run the frame engine with deterministic fault placement.

    channel_row maps channel index -> row hit by that channel (or -1).
    injections maps TIME-marker index -> list of (row, qubit, pauli),
    applied after the step's ops, right before the marker.
    """
    comp = circ.compiled()
    nq, nrec = comp.n_qubits, comp.n_records
    x = np.zeros((n_rows, nq), dtype=bool)
    z = np.zeros((n_rows, nq), dtype=bool)
    records = np.zeros((n_rows, nrec), dtype=np.uint8)
    injections = injections or {}
    for kind, a, b in zip(comp.op_kind, comp.op_a, comp.op_b):
        if kind == OP_CNOT:
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        elif kind == OP_CHANNEL:
            row = channel_row(a)
            if row >= 0:
                for slot in range(2):
                    q = comp.ch_q[a, slot]
                    if q < 0:
                        break
                    if comp.ch_x[a, slot]:
                        x[row, q] ^= True
                    if comp.ch_z[a, slot]:
                        z[row, q] ^= True
        elif kind == OP_MEASURE:
            records[:, b] = x[:, a]
        elif kind == OP_H:
            tmp = x[:, a].copy()
            x[:, a] = z[:, a]
            z[:, a] = tmp
        elif kind == OP_RESET:
            x[:, a] = False
            z[:, a] = False
        elif kind == OP_TIME:
            for row, q, pauli in injections.get(a, ()):
                if pauli in ("X", "Y"):
                    x[row, q] ^= True
                if pauli in ("Z", "Y"):
                    z[row, q] ^= True
    batch = _records_to_batch(comp, records, n_rows, seed=-1)
    if return_frames:
        return batch, x, z
    return batch


def enumerate_single_faults(circ: NoisyCircuit) -> FaultTable:
    """Propagate each Pauli channel component in isolation.

    Row i of the result is the detector set and observable flip caused by
    channel i firing alone; the table index doubles as the fault id.
    """
    n = len(circ.channels)
    batch = _one_hot_run(circ, max(n, 1), lambda ch: ch if ch < n else -1)
    dets = [tuple(np.flatnonzero(batch.detector_bits[i]).tolist()) for i in range(n)]
    kinds = [ch.kind for ch in circ.channels]
    probs = np.array([ch.p for ch in circ.channels], dtype=np.float64)
    return FaultTable(dets=dets, obs=batch.observable_flips[:n].copy(),
                      kinds=kinds, probs=probs)


def inject_paulis(circ: NoisyCircuit, faults, return_frames: bool = False):
    """Propagate hand-placed Pauli faults, one row each.

    `faults` is a list of (step_index, qubit_coord_or_index, pauli); each
    entry is applied at the end of the given time step in its own row.
    Spent by tests and by the decomposition probe basis.
    """
    qidx = circ.meta.get("qubit_index", {})
    by_step: dict[int, list] = {}
    for row, (step, q, pauli) in enumerate(faults):
        qi = qidx.get(q, q)
        by_step.setdefault(step, []).append((row, qi, pauli))
    return _one_hot_run(circ, max(len(faults), 1), lambda ch: -1,
                        injections=by_step, return_frames=return_frames)


def probe_symptom_basis(circ: NoisyCircuit):
    """Detector signatures of canonical single-Pauli faults.

    For every time step and every qubit, inject X, Y and Z at the end of
    the step.  Any channel component equals the product of its per-qubit
    factors at its own step, so these signatures span (by symmetric
    difference) the signature of every mechanism; the graphlike ones seed
    the hyperedge decomposition.
    """
    n_steps = circ.n_steps()
    faults = []
    for step in range(n_steps):
        for q in range(circ.n_qubits):
            for pauli in ("X", "Y", "Z"):
                faults.append((step, q, pauli))
    batch = inject_paulis(circ, faults)
    out = []
    for i in range(len(faults)):
        dets = tuple(np.flatnonzero(batch.detector_bits[i]).tolist())
        out.append((dets, int(batch.observable_flips[i])))
    return out
