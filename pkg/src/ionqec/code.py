"""Rotated surface-code layout and entangling-gate schedules.

Geometry lives in doubled integer coordinates (u, v): data qubits at
odd-odd positions, stabilizer ancillas at even-even positions.  The u axis
runs along rows ("horizontal"), v along columns, so a distance-d code spans
u, v in [0, 2d].  The doubled grid embeds isometrically into a triangular
ion lattice (see ionphys.embed_layout), where every CNOT pair lands on
nearest-neighbor sites.

Conventions pinned here and relied on everywhere else:

* X stabilizers are measured with the ancilla as CNOT control, Z
  stabilizers with the ancilla as target.
* The four CNOT layers visit plaquette corners so that an ancilla X error
  mid-extraction spreads onto two data qubits of one row, and an ancilla Z
  error onto two data qubits of one column.  A logical X is a vertical
  (fixed-u) string, a logical Z a horizontal (fixed-v) string, hence those
  hook errors never shortcut a logical operator.
* North/south boundaries carry weight-2 X stabilizers, east/west carry
  weight-2 Z stabilizers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rng import substream, DOMAIN_SCHEDULE

Coord = tuple[int, int]
Gate = tuple[Coord, Coord]  # (control, target)

# Plaquette-corner visit order per CNOT layer, as ancilla-relative offsets
# in doubled coordinates (+v is north, +u is east).  X ancillas sweep the
# north pair first, Z ancillas the east pair first.
X_LAYER_OFFSETS = ((1, 1), (-1, 1), (1, -1), (-1, -1))
Z_LAYER_OFFSETS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class CodeLayout:
    """Static geometry of one rotated surface code patch."""

    d: int
    data_qubits: tuple[Coord, ...]
    ancillas: tuple[Coord, ...]
    ancilla_type: dict[Coord, str] = field(compare=False)
    plaquettes: dict[Coord, tuple[Coord, ...]] = field(compare=False)
    cnot_layers: tuple[tuple[Gate, ...], ...] = ()
    logical_x_support: frozenset[Coord] = frozenset()
    logical_z_support: frozenset[Coord] = frozenset()

    @property
    def qubits(self) -> tuple[Coord, ...]:
        """All qubits, data first, each set row-major."""
        return self.data_qubits + self.ancillas

    def gates_per_round(self) -> int:
        return sum(len(layer) for layer in self.cnot_layers)


@dataclass(frozen=True)
class Schedule:
    """Partition of each CNOT layer into groups executed one per time step.

    Groups are ordered layer-major; `layer_of_group[g]` names the layer of
    group g.  k is the maximum group size actually used.
    """

    groups: tuple[tuple[Gate, ...], ...]
    layer_of_group: tuple[int, ...]
    k: int

    def n_steps(self) -> int:
        return len(self.groups)


def _row_major(coords) -> list[Coord]:
    return sorted(coords, key=lambda c: (c[1], c[0]))


def build_layout(d: int) -> CodeLayout:
    """Construct the distance-d rotated surface code.

    Raises ValueError unless d is odd and >= 3.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be odd and >= 3, got {d}")

    data = {(2 * i + 1, 2 * j + 1) for i in range(d) for j in range(d)}

    ancilla_type: dict[Coord, str] = {}
    for i in range(d + 1):
        for j in range(d + 1):
            typ = "X" if (i + j) % 2 == 1 else "Z"
            interior = 0 < i < d and 0 < j < d
            if interior:
                keep = True
            elif j == d and 0 < i < d:
                keep = typ == "X"  # north
            elif j == 0 and 0 < i < d:
                keep = typ == "X"  # south
            elif i == 0 and 0 < j < d:
                keep = typ == "Z"  # west
            elif i == d and 0 < j < d:
                keep = typ == "Z"  # east
            else:
                keep = False  # corners
            if keep:
                ancilla_type[(2 * i, 2 * j)] = typ

    plaquettes: dict[Coord, tuple[Coord, ...]] = {}
    layers: list[list[Gate]] = [[], [], [], []]
    for anc, typ in ancilla_type.items():
        offsets = X_LAYER_OFFSETS if typ == "X" else Z_LAYER_OFFSETS
        members = []
        for layer, (du, dv) in enumerate(offsets):
            q = (anc[0] + du, anc[1] + dv)
            if q in data:
                members.append(q)
                gate = (anc, q) if typ == "X" else (q, anc)
                layers[layer].append(gate)
        plaquettes[anc] = tuple(members)

    def gate_key(g: Gate):
        # Sort by ancilla position row-major; the ancilla is whichever
        # endpoint sits on the even-even sublattice.
        anc = g[0] if g[0][0] % 2 == 0 else g[1]
        return (anc[1], anc[0])

    cnot_layers = tuple(tuple(sorted(layer, key=gate_key)) for layer in layers)

    return CodeLayout(
        d=d,
        data_qubits=tuple(_row_major(data)),
        ancillas=tuple(_row_major(ancilla_type)),
        ancilla_type=ancilla_type,
        plaquettes=plaquettes,
        cnot_layers=cnot_layers,
        logical_x_support=frozenset((1, 2 * j + 1) for j in range(d)),
        logical_z_support=frozenset((2 * i + 1, 1) for i in range(d)),
    )


def ancilla_of(gate: Gate) -> Coord:
    return gate[0] if gate[0][0] % 2 == 0 else gate[1]


def schedule_gates(layout: CodeLayout, k: int | None = None, policy: str = "raster",
                   seed: int = 0) -> Schedule:
    """Split each CNOT layer into groups of at most k simultaneous gates.

    k=None (or k >= layer size) runs every layer in a single step.  policy
    "raster" fills groups in row-major ancilla order; "randomized" shuffles
    each layer with a stream keyed by (seed, layer) before chunking, so the
    same seed always yields the same schedule.
    """
    if k is not None and k < 1:
        raise ValueError(f"group size must be >= 1, got {k}")
    if policy not in ("raster", "randomized"):
        raise ValueError(f"unknown schedule policy {policy!r}")

    groups: list[tuple[Gate, ...]] = []
    layer_of_group: list[int] = []
    kmax = 0
    for layer_idx, layer in enumerate(layout.cnot_layers):
        gates = list(layer)
        if policy == "randomized":
            gen = substream(seed, DOMAIN_SCHEDULE, layer_idx)
            gen.shuffle(gates)
        size = len(gates) if k is None else min(k, len(gates))
        for start in range(0, len(gates), size):
            chunk = tuple(gates[start:start + size])
            groups.append(chunk)
            layer_of_group.append(layer_idx)
            kmax = max(kmax, len(chunk))
    return Schedule(groups=tuple(groups), layer_of_group=tuple(layer_of_group), k=kmax)


def sublattice_schedule(layout: CodeLayout, l: int) -> Schedule:
    """Schedule gates by sublattice translation class.

    Tiling the ion lattice with supercells of lattice constant 2*l*a splits
    the gates of one round into exactly 8*l*l groups (2*l*l per CNOT
    layer); any two gates in the same group are translates of one another
    by at least 2*l*a, so their nearest qubits sit >= (2l-1)*a apart.
    Groups may be empty for small patches; they still occupy a time step.
    """
    if l < 1:
        raise ValueError(f"sublattice parameter must be >= 1, got {l}")
    groups: list[list[Gate]] = []
    layer_of_group: list[int] = []
    index: dict[tuple[int, int, int], int] = {}
    for layer in range(4):
        for c1 in range(2 * l):
            for c2 in range(l):
                index[(layer, c1, c2)] = len(groups)
                groups.append([])
                layer_of_group.append(layer)
    for layer_idx, layer in enumerate(layout.cnot_layers):
        for gate in layer:
            u, v = ancilla_of(gate)
            i, j = u // 2, v // 2
            cls = (layer_idx, (i - j) % (2 * l), j % l)
            groups[index[cls]].append(gate)
    kmax = max((len(g) for g in groups), default=0)
    return Schedule(groups=tuple(tuple(g) for g in groups),
                    layer_of_group=tuple(layer_of_group), k=kmax)


def serialize_schedule(schedule: Schedule) -> str:
    """Text form: one gate per line `layer group cu cv tu tv`."""
    lines = []
    for g_idx, gates in enumerate(schedule.groups):
        layer = schedule.layer_of_group[g_idx]
        for (cu, cv), (tu, tv) in gates:
            lines.append(f"{layer} {g_idx} {cu} {cv} {tu} {tv}")
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> Schedule:
    """Inverse of serialize_schedule.

    Raises ValueError on malformed lines or non-contiguous group indices.
    """
    rows: list[tuple[int, int, Gate]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            layer, group, cu, cv, tu, tv = (int(p) for p in parts)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer field") from exc
        rows.append((group, layer, ((cu, cv), (tu, tv))))
    if not rows:
        raise ValueError("empty schedule")
    n_groups = max(r[0] for r in rows) + 1
    groups: list[list[Gate]] = [[] for _ in range(n_groups)]
    layer_of_group = [-1] * n_groups
    for group, layer, gate in rows:
        if group < 0:
            raise ValueError("negative group index")
        groups[group].append(gate)
        if layer_of_group[group] not in (-1, layer):
            raise ValueError(f"group {group} spans multiple layers")
        layer_of_group[group] = layer
    if -1 in layer_of_group:
        raise ValueError("group indices are not contiguous")
    kmax = max(len(g) for g in groups)
    return Schedule(groups=tuple(tuple(g) for g in groups),
                    layer_of_group=tuple(layer_of_group), k=kmax)


def validate_schedule(layout: CodeLayout, schedule: Schedule) -> None:
    """Check a schedule against its layout; raises ValueError on mismatch."""
    scheduled: list[Gate] = [g for grp in schedule.groups for g in grp]
    expected = [g for layer in layout.cnot_layers for g in layer]
    if sorted(scheduled) != sorted(expected):
        raise ValueError("schedule gates do not match layout CNOT layers")
    for g_idx, gates in enumerate(schedule.groups):
        layer = schedule.layer_of_group[g_idx]
        seen: set[Coord] = set()
        for gate in gates:
            if gate not in layout.cnot_layers[layer]:
                raise ValueError(f"group {g_idx}: gate {gate} not in layer {layer}")
            for q in gate:
                if q in seen:
                    raise ValueError(f"group {g_idx}: qubit {q} used twice")
                seen.add(q)
