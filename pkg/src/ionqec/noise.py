"""Noise model and noisy-circuit assembly for surface-code rounds.

Three error processes, all expanded into independent Bernoulli Pauli
components at build time:

* two-qubit depolarizing after every CNOT (15 components at p_g/15),
* single-qubit depolarizing idling, p_i(dt) = (3/4)(1 - exp(-dt/T)),
  applied per time step to every qubit not otherwise acted on,
* parallel-gate crosstalk: for each unordered pair of CNOTs in the same
  schedule group, four qubit-pair locations; a qubit contributes sigma_x if
  it is its gate's control and sigma_z if it is the target (an ancilla-side
  X/Z pair is the hook error of Fig-style weight-4 propagation).  An
  alternative "depolarizing" convention replaces the fixed Pauli pair with
  a 15-component two-qubit depolarizing channel of the same total weight,
  which is the variant used for scaling-collapse studies.

Durations are measured in two-qubit-gate time units: t_2q = 1, t_1q = 0.1,
t_meas = 5 by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import NoisyCircuit, KIND_GATE, KIND_CROSSTALK, KIND_IDLE
from .code import CodeLayout, Schedule, Gate, Coord, ancilla_of, validate_schedule

_PAULIS = ("I", "X", "Y", "Z")
TWO_QUBIT_COMPONENTS = tuple(
    (p1, p2) for p1 in _PAULIS for p2 in _PAULIS if (p1, p2) != ("I", "I")
)


@dataclass(frozen=True)
class Durations:
    t_2q: float = 1.0
    t_1q: float = 0.1
    t_meas: float = 5.0


def idle_error_prob(dt: float, T: float) -> float:
    """Depolarizing probability accumulated by a qubit idling for dt.

    T is the coherence time in gate-time units; T = inf means no idling
    noise.  Saturates at 3/4 for dt >> T.
    """
    if dt < 0:
        raise ValueError(f"negative duration {dt}")
    if not T > 0:
        raise ValueError(f"coherence time must be positive, got {T}")
    if math.isinf(T) or dt == 0:
        return 0.0
    return 0.75 * (1.0 - math.exp(-dt / T))


def coherence_from_idle(p_i: float, t0: float = 1.0) -> float:
    """Coherence time such that idling for t0 depolarizes with probability p_i."""
    if not 0 <= p_i < 0.75:
        raise ValueError(f"unit-time idle probability must be in [0, 3/4), got {p_i}")
    if p_i == 0:
        return math.inf
    return -t0 / math.log(1.0 - 4.0 * p_i / 3.0)


# -- crosstalk strength models ------------------------------------------


@dataclass(frozen=True)
class UniformCrosstalk:
    """Same probability for every crosstalk location."""

    p: float

    def location_prob(self, pair: tuple[Coord, Coord], r_over_a: float | None) -> float:
        return self.p


@dataclass(frozen=True)
class PowerLawCrosstalk:
    """Distance-dependent crosstalk p(r) = c * (r/a)^(-gamma).

    The fit only holds beyond r_min lattice constants; closer pairs are
    clamped to the value at r_min rather than extrapolated upward.
    """

    c: float = 0.015
    gamma: float = 5.87
    r_min: float = 4.0

    def location_prob(self, pair: tuple[Coord, Coord], r_over_a: float | None) -> float:
        if r_over_a is None:
            raise ValueError("power-law crosstalk needs an embedding with positions")
        r = max(float(r_over_a), self.r_min)
        return self.c * r ** (-self.gamma)


@dataclass(frozen=True)
class PairTableCrosstalk:
    """Explicit per-qubit-pair probabilities; missing pairs are an error."""

    table: dict[frozenset, float]

    def location_prob(self, pair: tuple[Coord, Coord], r_over_a: float | None) -> float:
        key = frozenset(pair)
        if key not in self.table:
            raise KeyError(f"no crosstalk entry for qubit pair {sorted(pair)}")
        return self.table[key]


CrosstalkModel = UniformCrosstalk | PowerLawCrosstalk | PairTableCrosstalk


def crosstalk_prob(model: CrosstalkModel, pos_a, pos_b, a: float = 1.0) -> float:
    """Crosstalk probability for one location given physical positions.

    Positions are 2D points in the same length units as `a`; the separation
    is converted to lattice units before evaluating the model.
    """
    if a <= 0:
        raise ValueError("lattice constant must be positive")
    xa, ya = float(pos_a[0]), float(pos_a[1])
    xb, yb = float(pos_b[0]), float(pos_b[1])
    if xa == xb and ya == yb:
        raise ValueError("positions must be distinct")
    return model.location_prob((tuple(pos_a), tuple(pos_b)),
                               math.hypot(xa - xb, ya - yb) / a)


@dataclass(frozen=True)
class NoiseParams:
    p_g: float = 0.0
    T: float = math.inf
    crosstalk: CrosstalkModel = field(default_factory=lambda: UniformCrosstalk(0.0))
    crosstalk_pauli: str = "role"  # "role" (X on controls, Z on targets) or "depolarizing"
    durations: Durations = field(default_factory=Durations)

    def __post_init__(self):
        if not 0 <= self.p_g < 1:
            raise ValueError(f"p_g out of range: {self.p_g}")
        if not self.T > 0:
            raise ValueError(f"coherence time must be positive, got {self.T}")
        if self.crosstalk_pauli not in ("role", "depolarizing"):
            raise ValueError(f"unknown crosstalk convention {self.crosstalk_pauli!r}")


def parse_noise_config(cfg: dict[str, str], prefix: str = "noise.") -> NoiseParams:
    """Build NoiseParams from flat key-value config entries.

    Recognized keys (after the prefix): p_g, p_i or T, p_c or
    crosstalk.c/gamma/rmin, crosstalk_pauli, durations.t_2q/t_1q/t_meas.
    """
    def get(key, default=None):
        return cfg.get(prefix + key, default)

    p_g = float(get("p_g", 0.0))
    if get("p_i") is not None and get("T") is not None:
        raise ValueError("give either p_i or T, not both")
    if get("p_i") is not None:
        T = coherence_from_idle(float(get("p_i")))
    elif get("T") is not None:
        T = float(get("T"))
    else:
        T = math.inf
    if get("p_c") is not None:
        xt: CrosstalkModel = UniformCrosstalk(float(get("p_c")))
    elif get("crosstalk.c") is not None:
        xt = PowerLawCrosstalk(
            c=float(get("crosstalk.c")),
            gamma=float(get("crosstalk.gamma", 5.87)),
            r_min=float(get("crosstalk.rmin", 4.0)),
        )
    else:
        xt = UniformCrosstalk(0.0)
    dur = Durations(
        t_2q=float(get("durations.t_2q", 1.0)),
        t_1q=float(get("durations.t_1q", 0.1)),
        t_meas=float(get("durations.t_meas", 5.0)),
    )
    return NoiseParams(p_g=p_g, T=T, crosstalk=xt,
                       crosstalk_pauli=str(get("crosstalk_pauli", "role")),
                       durations=dur)


# -- crosstalk location enumeration -------------------------------------


def iter_crosstalk_locations(group: tuple[Gate, ...]):
    """All crosstalk locations of one schedule group.

    Yields (qubit_a, qubit_b, role_a, role_b) with roles in
    {"control", "target"}; a group of k gates yields 2k(k-1) locations.
    """
    for i in range(len(group)):
        for j in range(i + 1, len(group)):
            (c1, t1), (c2, t2) = group[i], group[j]
            yield (c1, c2, "control", "control")
            yield (c1, t2, "control", "target")
            yield (t1, c2, "target", "control")
            yield (t1, t2, "target", "target")


def effective_crosstalk_per_gate(schedule: Schedule, model: CrosstalkModel,
                                 embedding: dict[Coord, tuple[float, float]] | None = None,
                                 a: float = 1.0) -> float:
    """Mean crosstalk probability per CNOT, summed over the locations that
    touch it: sum of all location probabilities divided by the number of
    gates in one round.  For uniform strength p_c and full groups of k this
    equals 2(k-1) p_c.

    `a` is the lattice constant in the embedding's length units; embedding
    distances are divided by it before the model is evaluated.
    """
    total = 0.0
    n_gates = 0
    for gates in schedule.groups:
        n_gates += len(gates)
        for qa, qb, _ra, _rb in iter_crosstalk_locations(gates):
            total += model.location_prob((qa, qb), _r_over_a(embedding, qa, qb, a))
    if n_gates == 0:
        raise ValueError("schedule has no gates")
    return total / n_gates


def _r_over_a(embedding, qa: Coord, qb: Coord, a: float) -> float | None:
    if embedding is None:
        return None
    if a <= 0:
        raise ValueError("lattice constant must be positive")
    xa, ya = embedding[qa]
    xb, yb = embedding[qb]
    return math.hypot(xa - xb, ya - yb) / a


# -- circuit assembly ----------------------------------------------------


def _emit_idle(circ: NoisyCircuit, qidx, busy: set[Coord], all_qubits, p_idle: float):
    if p_idle <= 0:
        return
    for q in all_qubits:
        if q in busy:
            continue
        for pauli in ("X", "Y", "Z"):
            circ.channel((qidx[q],), (pauli,), p_idle / 3.0, KIND_IDLE)


def build_rounds(layout: CodeLayout, schedule: Schedule, params: NoiseParams,
                 rounds: int, embedding=None, a: float = 1.0,
                 data_prep: bool = False,
                 final_data_measure: bool = False) -> NoisyCircuit:
    """Assemble the noisy syndrome-extraction circuit.

    With data_prep and final_data_measure this is a full Z-basis memory
    experiment; without them it is the bare repeated-extraction block used
    for noise accounting.
    """
    if rounds < 1:
        raise ValueError(f"need at least one round, got {rounds}")
    validate_schedule(layout, schedule)
    dur = params.durations
    data = layout.data_qubits
    ancillas = layout.ancillas
    x_ancillas = [a for a in ancillas if layout.ancilla_type[a] == "X"]
    z_ancillas = [a for a in ancillas if layout.ancilla_type[a] == "Z"]
    qubits = list(data) + list(ancillas)
    qidx = {q: i for i, q in enumerate(qubits)}

    circ = NoisyCircuit(n_qubits=len(qubits))
    anc_rec: dict[tuple[Coord, int], int] = {}
    data_rec: dict[Coord, int] = {}

    if data_prep:
        for q in data:
            circ.reset(qidx[q])

    gate_total = 0
    xt_total = 0.0
    n_xt_locations = 0
    busy_h = set(x_ancillas)
    for r in range(rounds):
        for a in ancillas:
            circ.reset(qidx[a])
        # basis change in
        for a in x_ancillas:
            circ.h(qidx[a])
        _emit_idle(circ, qidx, busy_h, qubits, idle_error_prob(dur.t_1q, params.T))
        circ.tick(dur.t_1q)
        # entangling layers, one tick per schedule group
        for gates in schedule.groups:
            busy: set[Coord] = set()
            for (c, t) in gates:
                circ.cnot(qidx[c], qidx[t])
                busy.update((c, t))
            for (c, t) in gates:
                gate_total += 1
                for p1, p2 in TWO_QUBIT_COMPONENTS:
                    qs, ps = [], []
                    if p1 != "I":
                        qs.append(qidx[c]); ps.append(p1)
                    if p2 != "I":
                        qs.append(qidx[t]); ps.append(p2)
                    circ.channel(tuple(qs), tuple(ps), params.p_g / 15.0, KIND_GATE)
            for qa, qb, role_a, role_b in iter_crosstalk_locations(gates):
                r_ab = _r_over_a(embedding, qa, qb, a)
                p_loc = params.crosstalk.location_prob((qa, qb), r_ab)
                n_xt_locations += 1
                xt_total += p_loc
                if p_loc <= 0:
                    continue
                if params.crosstalk_pauli == "role":
                    pa = "X" if role_a == "control" else "Z"
                    pb = "X" if role_b == "control" else "Z"
                    circ.channel((qidx[qa], qidx[qb]), (pa, pb), p_loc, KIND_CROSSTALK)
                else:
                    for p1, p2 in TWO_QUBIT_COMPONENTS:
                        qs, ps = [], []
                        if p1 != "I":
                            qs.append(qidx[qa]); ps.append(p1)
                        if p2 != "I":
                            qs.append(qidx[qb]); ps.append(p2)
                        circ.channel(tuple(qs), tuple(ps), p_loc / 15.0, KIND_CROSSTALK)
            _emit_idle(circ, qidx, busy, qubits, idle_error_prob(dur.t_2q, params.T))
            circ.tick(dur.t_2q)
        # basis change out
        for a in x_ancillas:
            circ.h(qidx[a])
        _emit_idle(circ, qidx, busy_h, qubits, idle_error_prob(dur.t_1q, params.T))
        circ.tick(dur.t_1q)
        # readout; final data measurement shares the last readout step
        final = final_data_measure and r == rounds - 1
        for a in ancillas:
            anc_rec[(a, r)] = circ.measure(qidx[a])
        if final:
            for q in data:
                data_rec[q] = circ.measure(qidx[q])
        else:
            _emit_idle(circ, qidx, set(ancillas), qubits,
                       idle_error_prob(dur.t_meas, params.T))
        circ.tick(dur.t_meas)

    for r in range(rounds):
        for a in ancillas:
            typ = layout.ancilla_type[a]
            if r == 0:
                if typ == "Z":
                    circ.detectors.append((anc_rec[(a, 0)],))
            else:
                circ.detectors.append((anc_rec[(a, r)], anc_rec[(a, r - 1)]))
    if final_data_measure:
        for a in z_ancillas:
            recs = (anc_rec[(a, rounds - 1)],) + tuple(
                data_rec[q] for q in layout.plaquettes[a])
            circ.detectors.append(recs)
        circ.observable = tuple(
            data_rec[q] for q in sorted(layout.logical_z_support,
                                        key=lambda c: (c[1], c[0])))

    circ.meta.update(
        layout=layout, schedule=schedule, params=params, rounds=rounds,
        qubit_index=qidx, ancilla_records=anc_rec, data_records=data_rec,
        gates_per_round=gate_total // rounds,
        crosstalk_locations_per_round=n_xt_locations // rounds,
        crosstalk_prob_sum_per_round=xt_total / rounds,
        t_cycle=len(schedule.groups) * dur.t_2q + dur.t_meas,
    )
    return circ


def attach_noise(layout: CodeLayout, schedule: Schedule, params: NoiseParams,
                 rounds: int = 1, embedding=None, a: float = 1.0) -> NoisyCircuit:
    """Noisy repeated-extraction block (no logical prep or data readout)."""
    return build_rounds(layout, schedule, params, rounds, embedding, a,
                        data_prep=False, final_data_measure=False)
