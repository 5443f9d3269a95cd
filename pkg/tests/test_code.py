"""Rotated surface code layout, schedules, and their invariants."""
import math

import numpy as np
import pytest

from ionqec import code, ionphys

GOLDEN_D3_SCHEDULE = """\
0 0 2 0 3 1
0 0 3 3 2 2
0 0 4 2 5 3
0 0 1 5 0 4
0 0 2 4 3 5
0 0 5 5 4 4
1 1 2 0 1 1
1 1 3 1 2 2
1 1 4 2 3 3
1 1 1 3 0 4
1 1 2 4 1 5
1 1 5 3 4 4
2 2 1 3 2 2
2 2 4 2 5 1
2 2 5 3 6 2
2 2 2 4 3 3
2 2 3 5 4 4
2 2 4 6 5 5
3 3 1 1 2 2
3 3 4 2 3 1
3 3 5 1 6 2
3 3 2 4 1 3
3 3 3 3 4 4
3 3 4 6 3 5
"""


@pytest.mark.parametrize("d", [3, 5, 7])
def test_layout_counts(d):
    layout = code.build_layout(d)
    assert layout.d == d
    assert len(layout.data_qubits) == d * d
    assert len(layout.ancillas) == d * d - 1
    assert layout.gates_per_round() == 4 * d * (d - 1)
    assert len(layout.cnot_layers) == 4


def test_build_layout_rejects_even_and_small():
    for d in (1, 2, 4):
        with pytest.raises(ValueError):
            code.build_layout(d)


def test_stabilizer_weights():
    layout = code.build_layout(5)
    weights = sorted(len(sup) for sup in layout.plaquettes.values())
    assert weights.count(2) == 8          # boundary checks, 2(d-1) of them
    assert weights.count(4) == 16         # bulk checks
    assert len(weights) == 24


def test_ancilla_types_alternate():
    layout = code.build_layout(3)
    kinds = set(layout.ancilla_type.values())
    assert kinds == {"X", "Z"}
    n_x = sum(1 for t in layout.ancilla_type.values() if t == "X")
    assert n_x == (3 * 3 - 1) // 2


def test_logical_supports():
    layout = code.build_layout(5)
    assert len(layout.logical_x_support) == 5
    assert len(layout.logical_z_support) == 5
    # anticommute in exactly one qubit
    assert len(layout.logical_x_support & layout.logical_z_support) == 1


def test_every_gate_lands_on_adjacent_ions():
    layout = code.build_layout(5)
    emb = ionphys.embed_layout(layout, 1.0)
    for layer in layout.cnot_layers:
        for c, t in layer:
            (xa, ya), (xb, yb) = emb[c], emb[t]
            assert math.hypot(xa - xb, ya - yb) == pytest.approx(1.0)


def test_each_plaquette_gets_all_its_gates():
    layout = code.build_layout(5)
    touched: dict = {}
    for layer in layout.cnot_layers:
        for gate in layer:
            anc = code.ancilla_of(gate)
            touched.setdefault(anc, set()).add(gate)
    for anc, sup in layout.plaquettes.items():
        assert len(touched[anc]) == len(sup)


def test_golden_d3_full_schedule():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)
    assert code.serialize_schedule(sched) == GOLDEN_D3_SCHEDULE


def test_schedule_round_trip():
    layout = code.build_layout(5)
    sched = code.schedule_gates(layout, k=7)
    again = code.parse_schedule(code.serialize_schedule(sched))
    assert again.groups == sched.groups
    assert again.layer_of_group == sched.layer_of_group
    assert again.k == sched.k


def test_schedule_group_sizes_and_cover():
    layout = code.build_layout(5)
    for k in (1, 3, 20):
        sched = code.schedule_gates(layout, k=k)
        assert sched.k == min(k, 20)
        assert all(len(g) <= k for g in sched.groups)
        seen = [g for grp in sched.groups for g in grp]
        assert sorted(seen) == sorted(
            g for layer in layout.cnot_layers for g in layer)
        # groups never mix CNOT layers
        for grp, layer_idx in zip(sched.groups, sched.layer_of_group):
            assert set(grp) <= set(layout.cnot_layers[layer_idx])


def test_randomized_schedule_deterministic_by_seed():
    layout = code.build_layout(5)
    a = code.schedule_gates(layout, k=5, policy="randomized", seed=3)
    b = code.schedule_gates(layout, k=5, policy="randomized", seed=3)
    c = code.schedule_gates(layout, k=5, policy="randomized", seed=4)
    assert a.groups == b.groups
    assert a.groups != c.groups


def test_sublattice_schedule_group_count_and_separation():
    layout = code.build_layout(9)
    for l in (1, 2):
        sched = code.sublattice_schedule(layout, l)
        assert len(sched.groups) == 8 * l * l
        emb = ionphys.embed_layout(layout, 1.0)
        for grp in sched.groups:
            for i, (c1, t1) in enumerate(grp):
                for c2, t2 in grp[i + 1:]:
                    gap = min(
                        math.dist(emb[a], emb[b])
                        for a in (c1, t1) for b in (c2, t2))
                    assert gap >= (2 * l - 1) - 1e-9
        seen = sorted(g for grp in sched.groups for g in grp)
        assert seen == sorted(
            g for layer in layout.cnot_layers for g in layer)


def test_validate_schedule_rejects_foreign_gates():
    layout = code.build_layout(3)
    sched = code.schedule_gates(layout)
    foreign = (((99, 99), (98, 98)),)
    bad = code.Schedule(groups=sched.groups + (foreign,),
                        layer_of_group=sched.layer_of_group + (0,),
                        k=sched.k)
    with pytest.raises(ValueError):
        code.validate_schedule(layout, bad)


def test_parse_schedule_rejects_garbage():
    with pytest.raises(ValueError):
        code.parse_schedule("0 0 1 2 3\n")
