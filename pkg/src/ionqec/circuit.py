"""Noisy Clifford circuit representation shared by the sampler and decoder.

A NoisyCircuit is a flat op list over integer qubit indices.  Noise appears
as explicit single-component Pauli channels: every depolarizing process is
expanded at build time into its nontrivial Pauli components, each an
independent Bernoulli event.  That expansion is what makes detector-error-
model sampling distributionally identical to frame-by-frame sampling.

TIME ops mark step boundaries and carry durations; they do nothing during
simulation but define the timing audit and the canonical fault-injection
positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OP_RESET = 0
OP_H = 1
OP_CNOT = 2
OP_MEASURE = 3
OP_CHANNEL = 4
OP_TIME = 5

KIND_GATE = "gate"
KIND_CROSSTALK = "crosstalk"
KIND_IDLE = "idle"

_PAULI_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True)
class PauliChannel:
    """One independent Bernoulli Pauli fault location."""

    qubits: tuple[int, ...]
    paulis: tuple[str, ...]
    p: float
    kind: str

    def __post_init__(self):
        if len(self.qubits) != len(self.paulis) or not 1 <= len(self.qubits) <= 2:
            raise ValueError("channel must act on 1 or 2 qubits")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"channel probability out of range: {self.p}")
        for pl in self.paulis:
            if pl not in _PAULI_BITS:
                raise ValueError(f"bad Pauli label {pl!r}")


@dataclass
class NoisyCircuit:
    n_qubits: int
    ops: list[tuple[int, int, int]] = field(default_factory=list)
    channels: list[PauliChannel] = field(default_factory=list)
    detectors: list[tuple[int, ...]] = field(default_factory=list)
    observable: tuple[int, ...] = ()
    n_records: int = 0
    step_durations: list[float] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    # -- construction helpers -------------------------------------------

    def reset(self, q: int) -> None:
        self.ops.append((OP_RESET, q, -1))

    def h(self, q: int) -> None:
        self.ops.append((OP_H, q, -1))

    def cnot(self, c: int, t: int) -> None:
        if c == t:
            raise ValueError("CNOT needs distinct qubits")
        self.ops.append((OP_CNOT, c, t))

    def measure(self, q: int) -> int:
        rec = self.n_records
        self.ops.append((OP_MEASURE, q, rec))
        self.n_records += 1
        return rec

    def channel(self, qubits, paulis, p: float, kind: str) -> None:
        if p <= 0.0:
            return
        ch = PauliChannel(tuple(qubits), tuple(paulis), p, kind)
        self.ops.append((OP_CHANNEL, len(self.channels), -1))
        self.channels.append(ch)

    def tick(self, duration: float) -> None:
        self.ops.append((OP_TIME, len(self.step_durations), -1))
        self.step_durations.append(duration)

    # -- derived views ---------------------------------------------------

    @property
    def n_detectors(self) -> int:
        return len(self.detectors)

    def n_steps(self) -> int:
        return len(self.step_durations)

    def channel_count(self, kind: str | None = None) -> int:
        if kind is None:
            return len(self.channels)
        return sum(1 for ch in self.channels if ch.kind == kind)

    def total_duration(self) -> float:
        return float(sum(self.step_durations))

    def compiled(self) -> "CompiledCircuit":
        comp = self.meta.get("_compiled")
        if comp is None or comp.stamp != (len(self.ops), self.n_records):
            comp = CompiledCircuit(self)
            self.meta["_compiled"] = comp
        return comp

    def dump(self) -> str:
        """Plain-text op list in execution order (stable, diffable)."""
        out = [f"Q {self.n_qubits}"]
        for kind, a, b in self.ops:
            if kind == OP_RESET:
                out.append(f"R {a}")
            elif kind == OP_H:
                out.append(f"H {a}")
            elif kind == OP_CNOT:
                out.append(f"CX {a} {b}")
            elif kind == OP_MEASURE:
                out.append(f"M {a} {b}")
            elif kind == OP_CHANNEL:
                ch = self.channels[a]
                body = " ".join(f"{q}:{p}" for q, p in zip(ch.qubits, ch.paulis))
                out.append(f"E {ch.kind} {ch.p!r} {body}")
            elif kind == OP_TIME:
                out.append(f"TICK {self.step_durations[a]!r}")
        for dets in self.detectors:
            out.append("DET " + " ".join(str(r) for r in dets))
        if self.observable:
            out.append("OBS " + " ".join(str(r) for r in self.observable))
        return "\n".join(out) + "\n"


class CompiledCircuit:
    """Array form of a NoisyCircuit for the vectorized frame engine."""

    def __init__(self, circ: NoisyCircuit):
        self.stamp = (len(circ.ops), circ.n_records)
        ops = np.asarray(circ.ops, dtype=np.int32).reshape(len(circ.ops), 3)
        self.op_kind = ops[:, 0].copy()
        self.op_a = ops[:, 1].copy()
        self.op_b = ops[:, 2].copy()
        n_ch = len(circ.channels)
        self.ch_q = np.full((n_ch, 2), -1, dtype=np.int32)
        self.ch_x = np.zeros((n_ch, 2), dtype=bool)
        self.ch_z = np.zeros((n_ch, 2), dtype=bool)
        self.ch_p = np.zeros(n_ch, dtype=np.float64)
        for i, ch in enumerate(circ.channels):
            self.ch_p[i] = ch.p
            for slot, (q, pl) in enumerate(zip(ch.qubits, ch.paulis)):
                x, z = _PAULI_BITS[pl]
                self.ch_q[i, slot] = q
                self.ch_x[i, slot] = bool(x)
                self.ch_z[i, slot] = bool(z)
        self.n_qubits = circ.n_qubits
        self.n_records = circ.n_records
        # Detectors as CSR over record indices.
        ptr = [0]
        idx: list[int] = []
        for dets in circ.detectors:
            idx.extend(dets)
            ptr.append(len(idx))
        self.det_ptr = np.asarray(ptr, dtype=np.int64)
        self.det_idx = np.asarray(idx, dtype=np.int64)
        self.obs_idx = np.asarray(circ.observable, dtype=np.int64)
