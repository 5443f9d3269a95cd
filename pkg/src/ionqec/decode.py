"""Detector error models and exact minimum-weight perfect matching.

The pipeline is:

1. ``build_dem`` enumerates every single-fault location of a noisy circuit
   and merges faults with identical (detector set, observable) signatures
   into mechanisms with combined odds.
2. ``decompose_to_graphlike`` splits mechanisms that fire more than two
   detectors into pairs/singles drawn from a symptom basis (the symptoms of
   single Pauli injections), producing weighted matching-graph edges.
3. ``MatchingGraph`` precomputes all-pairs interior distances, distances to
   the boundary, and the observable parity of every shortest path.
4. ``mwpm_decode`` prunes edges that provably cannot appear in a
   minimum-weight solution, splits the flipped detectors into clusters, and
   solves each cluster exactly (bitmask DP for small clusters, blossom
   matching on a doubled graph for large ones).

Sampling directly from the mechanism list reproduces the Pauli-frame
distribution exactly, because the circuit's channels are independent
Bernoulli events; ``estimate_logical_error_rate`` uses that fast path by
default and the frame simulator on request.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import _kernels
from .rng import block_stream
from .sim import BLOCK_SHOTS, enumerate_single_faults, pauli_frame_sample, probe_symptom_basis

WILSON_Z = 1.959963984540054

DECOMPOSE_DEPTH = 4
DP_CAP = 16


class UndecomposableMechanism(Exception):
    """A mechanism could not be written as a product of graphlike parts."""


class DisconnectedSyndrome(Exception):
    """A flipped detector has no finite-weight pairing available."""


def merge_probability(p, q):
    """Probability that exactly one of two independent flips occurs."""
    return p * (1.0 - q) + q * (1.0 - p)


@dataclass(frozen=True)
class Mechanism:
    dets: tuple
    obs: int
    p: float


@dataclass
class DetectorErrorModel:
    n_detectors: int
    mechanisms: list
    basis: dict
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.mechanisms)


def build_dem(circ):
    """Merge the circuit's single-fault symptoms into a detector error model.

    Raises ValueError if any fault flips the observable without firing a
    detector; such a fault would make the logical error rate saturate at
    1/2 regardless of decoding and indicates a broken circuit.
    """
    table = enumerate_single_faults(circ)
    merged = {}
    for i, dets, obs in table:
        key = (tuple(dets), int(obs))
        if not key[0]:
            if key[1]:
                raise ValueError("undetectable observable flip in fault enumeration")
            continue
        p = float(table.probs[i])
        if key in merged:
            merged[key] = merge_probability(merged[key], p)
        else:
            merged[key] = p

    basis = {}

    def add_basis(dets, obs):
        if 1 <= len(dets) <= 2:
            basis.setdefault(frozenset(dets), set()).add(int(obs))

    for dets, obs in probe_symptom_basis(circ):
        add_basis(dets, obs)
    for (dets, obs) in merged:
        add_basis(dets, obs)

    mechanisms = [Mechanism(dets, obs, p) for (dets, obs), p in sorted(merged.items())]
    return DetectorErrorModel(
        n_detectors=circ.n_detectors,
        mechanisms=mechanisms,
        basis=basis,
        meta={"n_faults": len(table), "n_mechanisms": len(mechanisms)},
    )


def _part_weight(merged_edges, dets, obs):
    p = merged_edges.get((dets, obs), 0.0)
    if p <= 0.0:
        return math.inf
    return math.log((1.0 - p) / p)


def _lex_key(dets, obs):
    return (tuple(sorted(dets)), obs)


def _split_once(target, obs, basis, by_det, direct):
    """Best split of (target, obs) into exactly two basis parts, or None."""
    m0 = min(target)
    best = None
    for e1 in by_det.get(m0, ()):
        rest = target ^ e1
        if not rest or len(rest) > 2 or rest not in basis:
            continue
        for o1 in basis[e1]:
            o2 = obs ^ o1
            if o2 not in basis[rest]:
                continue
            score = (
                _part_weight(direct, tuple(sorted(e1)), o1)
                + _part_weight(direct, tuple(sorted(rest)), o2),
                _lex_key(e1, o1),
                _lex_key(rest, o2),
            )
            if best is None or score < best[0]:
                best = (score, [(e1, o1), (rest, o2)])
    return None if best is None else best[1]


def _decompose(target, obs, basis, by_det, direct, depth):
    if len(target) <= 2:
        if target in basis:
            return [(target, obs)]
        return None
    pair = _split_once(target, obs, basis, by_det, direct)
    if pair is not None:
        return pair
    if depth <= 0:
        return None
    m0 = min(target)
    candidates = []
    for e1 in by_det.get(m0, ()):
        rest = target ^ e1
        if len(rest) >= len(target):
            continue
        for o1 in basis[e1]:
            w = _part_weight(direct, tuple(sorted(e1)), o1)
            candidates.append((w, _lex_key(e1, o1), e1, o1, rest))
    candidates.sort(key=lambda c: (c[0], c[1]))
    for _, _, e1, o1, rest in candidates:
        tail = _decompose(rest, obs ^ o1, basis, by_det, direct, depth - 1)
        if tail is not None:
            return [(e1, o1)] + tail
    return None


def decompose_to_graphlike(dem):
    """Reduce every mechanism to 1- and 2-detector edges.

    Returns a dict mapping (sorted detector tuple, observable flip) to the
    merged probability of all contributions.  A mechanism's probability is
    folded into each of its component edges.  Raises
    UndecomposableMechanism when no split into basis symptoms exists.
    """
    basis = dem.basis
    by_det = {}
    for dets in basis:
        for d in dets:
            by_det.setdefault(d, []).append(dets)
    for d in by_det:
        by_det[d].sort(key=sorted)

    direct = {}
    for mech in dem.mechanisms:
        if len(mech.dets) <= 2:
            key = (mech.dets, mech.obs)
            direct[key] = merge_probability(direct.get(key, 0.0), mech.p)

    edges = {}

    def fold(dets, obs, p):
        key = (tuple(sorted(dets)), obs)
        edges[key] = merge_probability(edges.get(key, 0.0), p)

    for mech in dem.mechanisms:
        target = frozenset(mech.dets)
        parts = _decompose(target, mech.obs, basis, by_det, direct, DECOMPOSE_DEPTH)
        if parts is None:
            raise UndecomposableMechanism(
                "mechanism dets=%r obs=%d has no graphlike decomposition"
                % (mech.dets, mech.obs)
            )
        for dets, obs in parts:
            fold(dets, obs, mech.p)
    return edges


@dataclass
class MatchingGraph:
    n_detectors: int
    D: np.ndarray
    BD: np.ndarray
    OB: np.ndarray
    BO: np.ndarray
    meta: dict = field(default_factory=dict)

    def decode(self, syndrome):
        return mwpm_decode(self, syndrome)


def build_matching_graph(dem):
    """Precompute shortest-path structure for decoding.

    Edges with probability at or above 1/2 would carry non-positive weight
    and break Dijkstra's assumptions, so they raise ValueError.
    """
    edges = decompose_to_graphlike(dem)
    n = dem.n_detectors
    EW = np.full((n, n), np.inf)
    EO = np.zeros((n, n), dtype=np.uint8)
    BW0 = np.full(n, np.inf)
    BO0 = np.zeros(n, dtype=np.uint8)
    conflicts = 0
    for (dets, obs), p in sorted(edges.items()):
        if p >= 0.5:
            raise ValueError("edge probability %g >= 1/2 for dets=%r" % (p, dets))
        w = math.log((1.0 - p) / p)
        if len(dets) == 1:
            u = dets[0]
            if np.isfinite(BW0[u]):
                conflicts += 1
                if w >= BW0[u]:
                    continue
            BW0[u] = w
            BO0[u] = obs
        else:
            u, v = dets
            if np.isfinite(EW[u, v]):
                conflicts += 1
                if w >= EW[u, v]:
                    continue
            EW[u, v] = EW[v, u] = w
            EO[u, v] = EO[v, u] = obs

    rows, cols = np.nonzero(np.isfinite(EW))
    interior = csr_matrix((EW[rows, cols], (rows, cols)), shape=(n, n))
    D, pred = dijkstra(interior, directed=False, return_predecessors=True)

    OB = np.zeros((n, n), dtype=np.uint8)
    for s in range(n):
        order = np.argsort(D[s], kind="stable")
        for t in order:
            pr = pred[s, t]
            if t == s or pr < 0:
                continue
            OB[s, t] = OB[s, pr] ^ EO[pr, t]

    brow = np.flatnonzero(np.isfinite(BW0))
    aug_rows = np.concatenate([rows, np.full(brow.size, n), brow])
    aug_cols = np.concatenate([cols, brow, np.full(brow.size, n)])
    aug_data = np.concatenate([EW[rows, cols], BW0[brow], BW0[brow]])
    aug = csr_matrix((aug_data, (aug_rows, aug_cols)), shape=(n + 1, n + 1))
    bdist, bpred = dijkstra(aug, directed=False, indices=n, return_predecessors=True)
    BD = bdist[:n].copy()
    BO = np.zeros(n, dtype=np.uint8)
    for t in np.argsort(BD, kind="stable"):
        pr = bpred[t]
        if pr < 0:
            continue
        if pr == n:
            BO[t] = BO0[t]
        else:
            BO[t] = BO[pr] ^ EO[pr, t]

    return MatchingGraph(
        n_detectors=n,
        D=D,
        BD=BD,
        OB=OB,
        BO=BO,
        meta={
            "n_edges": len(edges),
            "obs_conflicts": conflicts,
            "edges": edges,
        },
    )


def _as_det_row(graph, syndrome):
    """Accept either a length-n bit vector or a list of detector indices."""
    row = np.zeros((1, graph.n_detectors), dtype=np.uint8)
    arr = np.asarray(syndrome)
    if arr.size == 0:
        return row
    is_bits = arr.ndim == 1 and arr.size == graph.n_detectors and (
        arr.dtype == bool or int(arr.max()) <= 1
    )
    if is_bits:
        row[0] = arr.astype(np.uint8)
    else:
        idx = arr.astype(np.int64).ravel()
        if idx.min() < 0 or idx.max() >= graph.n_detectors:
            raise ValueError("detector index out of range")
        row[0, idx] = 1
    return row


def _blossom_shot(graph, flipped):
    """Decode one shot with the size cap disabled, so every cluster goes
    through the blossom matching kernel.  Kept as an independent path for
    cross-checking the capped decoder."""
    det = np.zeros((1, graph.n_detectors), dtype=np.uint8)
    det[0, np.asarray(flipped, dtype=np.int64)] = 1
    preds = np.zeros(1, dtype=np.uint8)
    weights = np.zeros(1, dtype=np.float64)
    flags = np.zeros(1, dtype=np.uint8)
    _kernels.decode_shots(det, graph.D, graph.BD, graph.OB, graph.BO, 0, preds, weights, flags)
    _raise_bad_flags(flags, det)
    return int(preds[0]), float(weights[0])


def _raise_bad_flags(flags, det):
    """Translate per-shot kernel failure flags into exceptions."""
    if np.any(flags == _kernels.FLAG_ERROR):
        raise RuntimeError("matching kernel tripped its iteration guard")
    bad = np.flatnonzero(flags == _kernels.FLAG_DISCONNECTED)
    if bad.size:
        s = int(bad[0])
        raise DisconnectedSyndrome(
            "syndrome %r has an unmatchable cluster"
            % (np.flatnonzero(det[s]).tolist(),)
        )


def mwpm_decode(graph, syndrome):
    """Decode one syndrome. Returns (observable prediction, solution weight)."""
    det = _as_det_row(graph, syndrome)
    preds = np.zeros(1, dtype=np.uint8)
    weights = np.zeros(1, dtype=np.float64)
    flags = np.zeros(1, dtype=np.uint8)
    _kernels.decode_shots(det, graph.D, graph.BD, graph.OB, graph.BO, DP_CAP, preds, weights, flags)
    _raise_bad_flags(flags, det)
    return int(preds[0]), float(weights[0])


def _bernoulli_positions(gen, n, p):
    """Indices of successes in n Bernoulli(p) trials, drawn exactly."""
    if p <= 0.0 or n <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 0.05:
        return np.flatnonzero(gen.random(n) < p).astype(np.int64)
    mean = n * p
    buf = int(mean + 6.0 * math.sqrt(mean + 1.0)) + 16
    chunks = []
    last = -1
    while True:
        gaps = gen.geometric(p, size=buf)
        cum = last + np.cumsum(gaps)
        chunks.append(cum[cum < n])
        if cum[-1] >= n:
            break
        last = int(cum[-1])
    return np.concatenate(chunks).astype(np.int64)


def _mechanism_arrays(dem):
    det_lists = [np.asarray(m.dets, dtype=np.int64) for m in dem.mechanisms]
    obs = np.asarray([m.obs for m in dem.mechanisms], dtype=np.uint8)
    probs = np.asarray([m.p for m in dem.mechanisms], dtype=np.float64)
    return det_lists, obs, probs


def sample_dem_block(dem, block, n, seed, arrays=None):
    """Sample n shots of detector and observable bits for one block index.

    The stream for a block depends only on (seed, block), so results are
    identical no matter how blocks are distributed over workers.
    """
    det_lists, obs_flags, probs = arrays if arrays is not None else _mechanism_arrays(dem)
    gen = block_stream(seed, block)
    det = np.zeros((n, dem.n_detectors), dtype=np.uint8)
    obs = np.zeros(n, dtype=np.uint8)
    for ids, oflag, p in zip(det_lists, obs_flags, probs):
        pos = _bernoulli_positions(gen, n, p)
        if pos.size:
            _kernels.xor_scatter(det, obs, pos, ids, oflag)
    return det, obs


@dataclass
class MemoryResult:
    """Outcome of a logical memory experiment."""

    shots: int
    failures: int
    rounds: int
    t_cycle: float
    fallback_shots: int = 0

    @property
    def p_total(self):
        return self.failures / self.shots

    @property
    def p_l(self):
        return logical_error_per_round(self.p_total, self.rounds)

    def per_round_interval(self, z=WILSON_Z):
        lo, hi = wilson_interval(self.failures, self.shots, z)
        return (
            logical_error_per_round(lo, self.rounds),
            logical_error_per_round(hi, self.rounds),
        )

    @property
    def coherence_time(self):
        # a fully mixed memory (p_l pinned at 1/2) has no coherence left
        if self.p_l >= 0.5:
            return 0.0
        return logical_coherence_time(self.p_l, self.t_cycle)


def wilson_interval(failures, shots, z=WILSON_Z):
    """Wilson score interval for a binomial proportion."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    ph = failures / shots
    z2 = z * z
    denom = 1.0 + z2 / shots
    center = (ph + z2 / (2.0 * shots)) / denom
    half = (z / denom) * math.sqrt(ph * (1.0 - ph) / shots + z2 / (4.0 * shots * shots))
    return max(0.0, center - half), min(1.0, center + half)


def logical_error_per_round(p_total, rounds):
    """Convert a total failure probability over r rounds to a per-round rate.

    Inverts P_total = (1 - (1 - 2 p)^r) / 2, clamping at the fully mixed
    point P_total = 1/2.
    """
    if rounds <= 0:
        raise ValueError("rounds must be positive")
    base = 1.0 - 2.0 * min(p_total, 0.5)
    return 0.5 * (1.0 - base ** (1.0 / rounds))


def logical_coherence_time(p_l, t_cycle):
    """Exponential-decay lifetime implied by a per-round error rate."""
    if t_cycle <= 0.0:
        raise ValueError("t_cycle must be positive")
    if p_l < 0.0 or p_l >= 0.5:
        raise ValueError(
            "per-round rate must lie in [0, 1/2); got %r" % (p_l,))
    if p_l == 0.0:
        return math.inf
    return -t_cycle / math.log(1.0 - 2.0 * p_l)


def _decode_block(graph, det, obs, cap):
    preds = np.empty(det.shape[0], dtype=np.uint8)
    weights = np.empty(det.shape[0], dtype=np.float64)
    flags = np.empty(det.shape[0], dtype=np.uint8)
    _kernels.decode_shots(det, graph.D, graph.BD, graph.OB, graph.BO, cap, preds, weights, flags)
    _raise_bad_flags(flags, det)
    fallback = int(np.count_nonzero(flags == _kernels.FLAG_FALLBACK))
    failures = int(np.count_nonzero(preds != obs))
    return failures, fallback


def estimate_logical_error_rate(
    circ,
    shots,
    seed=0,
    workers=1,
    sampler="dem",
    cap=DP_CAP,
    dem=None,
    graph=None,
):
    """Run a decoded memory experiment and return a MemoryResult.

    sampler="dem" draws detector bits directly from the error model (exact,
    fast); sampler="frame" runs the Pauli-frame simulator instead.  Results
    are bit-identical for a given seed regardless of the worker count.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if sampler not in ("dem", "frame"):
        raise ValueError("unknown sampler %r" % (sampler,))
    if dem is None:
        dem = build_dem(circ)
    if graph is None:
        graph = build_matching_graph(dem)
    meta = circ.meta
    rounds = meta["rounds"]
    t_cycle = meta["t_cycle"]

    arrays = _mechanism_arrays(dem)
    n_blocks = (shots + BLOCK_SHOTS - 1) // BLOCK_SHOTS

    def run_block(b):
        n = min(BLOCK_SHOTS, shots - b * BLOCK_SHOTS)
        if sampler == "dem":
            det, obs = sample_dem_block(dem, b, n, seed, arrays=arrays)
        else:
            batch = pauli_frame_sample(circ, n, seed, workers=1, shot_offset=b * BLOCK_SHOTS)
            det, obs = batch.detector_bits, batch.observable_flips
        return _decode_block(graph, det, obs, cap)

    failures = 0
    fallback = 0
    if workers <= 1 or n_blocks == 1:
        results = [run_block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, range(n_blocks)))
    for f, fb in results:
        failures += f
        fallback += fb
    return MemoryResult(
        shots=shots,
        failures=failures,
        rounds=rounds,
        t_cycle=t_cycle,
        fallback_shots=fallback,
    )
