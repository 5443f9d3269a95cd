"""Parallel entangling-gate design and crosstalk evaluation.

The designer produces segmented Rabi amplitudes that close every
spin-phonon loop (all residual displacements alpha = 0) and realize
prescribed two-qubit phases Theta on targeted ion pairs, while zeroing
the phase between every other pair of addressed ions.  It works in the
null space of the displacement constraints and solves one ion at a time:
the first two ions of each entangled component through a doubly
projected singular-value step, any further ions through a minimum-norm
linear solve.  Finished designs are re-evaluated with the closed-form
integrals of :mod:`ionqec.ionphys`; the designer never trusts its own
algebra.

Noise-sampled crosstalk reports quantify what a design does under
amplitude and detuning miscalibration, following the same counter-based
RNG discipline as the circuit sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import ionphys, rng
from .ionphys import PulseSequence

TARGET_PHASE = math.pi / 4.0


class NullSpaceExhausted(Exception):
    """No pulse freedom is left before all constraints were imposed."""


class InfeasibleTarget(Exception):
    """A targeted phase cannot be realized within the amplitude cap."""


# -- target specifications ---------------------------------------------------


@dataclass(frozen=True)
class GateTargets:
    """Disjoint ion pairs (i, j, theta) with theta = +-pi/4 each.

    Unlisted pairs implicitly target zero phase.
    """

    pairs: tuple = ()

    def __post_init__(self):
        norm = []
        used = set()
        for entry in self.pairs:
            i, j, th = entry
            i, j, th = int(i), int(j), float(th)
            if i == j:
                raise ValueError("pair (%d, %d) addresses one ion twice" % (i, j))
            if abs(abs(th) - TARGET_PHASE) > 1e-12:
                raise ValueError("targeted phase must be +-pi/4, got %r" % th)
            for ion in (i, j):
                if ion in used:
                    raise ValueError("ion %d appears in more than one pair" % ion)
                used.add(ion)
            norm.append((i, j, th))
        object.__setattr__(self, "pairs", tuple(norm))


@dataclass(frozen=True)
class NoiseSpec:
    """Miscalibration model for pulse-noise sampling.

    amp_fraction is the half-width of the uniform relative amplitude
    fluctuation applied independently to every ion and segment;
    detuning_halfwidth (rad/s) bounds a uniform shift of the detuning mu
    shared by the whole pulse.
    """

    amp_fraction: float = 0.01
    detuning_halfwidth: float = 2.0 * math.pi * 500.0
    n_samples: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.amp_fraction < 0.0:
            raise ValueError("amplitude fraction must be nonnegative")
        if self.detuning_halfwidth < 0.0:
            raise ValueError("detuning half-width must be nonnegative")
        if self.n_samples < 1:
            raise ValueError("need at least one noise sample")


def _normalize_targets(targets):
    """Map GateTargets or a {(i, j): theta} dict to {(min, max): theta}."""
    if isinstance(targets, GateTargets):
        items = [((i, j), th) for i, j, th in targets.pairs]
    elif isinstance(targets, dict):
        items = [(pair, th) for pair, th in targets.items()]
    else:
        raise TypeError("targets must be GateTargets or a dict of pairs")
    out = {}
    for (i, j), th in items:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError("pair (%d, %d) addresses one ion twice" % (i, j))
        key = (i, j) if i < j else (j, i)
        if key in out:
            raise ValueError("duplicate pair %r" % (key,))
        out[key] = float(th)
    return out


def _ordered_components(ions, theta_map):
    """Connected components of the nonzero-phase graph, each listed with
    a pair of entangled ions first and components ordered by least ion."""
    adj = {i: set() for i in ions}
    for (i, j), th in theta_map.items():
        if th != 0.0:
            adj[i].add(j)
            adj[j].add(i)
    seen = set()
    comps = []
    for root in sorted(ions):
        if root in seen:
            continue
        comp = {root}
        queue = [root]
        seen.add(root)
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.add(v)
                    queue.append(v)
        first = min(comp)
        if adj[first]:
            second = min(adj[first])
            rest = sorted(comp - {first, second})
            comps.append([first, second] + rest)
        else:
            comps.append([first])
    return comps


def _null_basis_rows(rows, dim, rtol):
    if rows.shape[0] == 0:
        return np.eye(dim)
    return scipy.linalg.null_space(rows, rcond=rtol)


# -- the designer ------------------------------------------------------------


def ease_design(modes, targets, mu, tau, n_seg, amp_cap=None,
                robust=False, rank_rtol=1e-10, check_tol=1e-8):
    """Design segmented amplitudes realizing the targeted two-qubit phases.

    Every addressed ion gets an n_seg amplitude vector such that all
    residual displacements vanish, targeted pairs accumulate their theta,
    and all other addressed pairs accumulate zero phase.  targets may be
    a GateTargets (disjoint +-pi/4 pairs) or a dict {(i, j): theta} for
    arbitrary entanglement patterns.

    With robust=True the detuning derivative of every displacement is
    constrained to zero as well (first-order insensitivity to a shift of
    mu), doubling the constraint rows and so the segments they consume.

    Raises NullSpaceExhausted when the constraints use up all pulse
    freedom (n_seg too small) and InfeasibleTarget when a phase cannot be
    reached, e.g. within amp_cap (rad/s) when one is given.
    """
    theta_map = _normalize_targets(targets)
    mu = float(mu)
    tau = float(tau)
    n_seg = int(n_seg)
    ions = sorted({ion for pair in theta_map for ion in pair})
    if not ions:
        return PulseSequence(n_seg=n_seg, tau=tau, mu=mu, amplitudes={})
    if ions[0] < 0 or ions[-1] >= modes.b.shape[0]:
        raise ValueError("target ions outside the crystal")

    omega_k = modes.omega_k
    n_modes = modes.n_modes
    eps = ionphys.epsilon_segments(omega_k, mu, tau, n_seg)
    blocks = [eps.real, eps.imag]
    if robust:
        deps = ionphys.epsilon_segments_dmu(omega_k, mu, tau, n_seg) / tau
        blocks.extend([deps.real, deps.imag])
    disp = np.vstack(blocks)
    basis = scipy.linalg.null_space(disp, rcond=rank_rtol)
    free = basis.shape[1]
    if free == 0:
        raise NullSpaceExhausted(
            "displacement constraints for %d modes use all %d segments"
            % (n_modes, n_seg))

    # Per-mode phase quadratic forms projected into the free subspace.
    proj = np.empty((n_modes, free, free))
    for k in range(n_modes):
        form = ionphys.mode_quadratic_form(omega_k[k:k + 1], mu, tau, n_seg)
        half = basis.T @ form @ basis
        proj[k] = 0.5 * (half + half.T)

    eta2 = modes.eta_k ** 2
    bmat = modes.b
    solved = []
    coeff = {}
    wvec = {}  # ion -> (n_modes, free), rows proj[k] @ coeff

    def pair_coupling(i, j):
        return eta2 * bmat[i] * bmat[j]

    def constraint_rows(t):
        rows = np.zeros((len(solved), free))
        rhs = np.zeros(len(solved))
        for r, j in enumerate(solved):
            rows[r] = pair_coupling(j, t) @ wvec[j]
            key = (j, t) if j < t else (t, j)
            rhs[r] = theta_map.get(key, 0.0)
        return rows, rhs

    def admit(t, vec):
        if amp_cap is not None:
            peak = float(np.max(np.abs(basis @ vec)))
            if peak > amp_cap:
                raise InfeasibleTarget(
                    "ion %d needs Rabi amplitude %.3e above the cap %.3e"
                    % (t, peak, amp_cap))
        for j in solved:
            key = (j, t) if j < t else (t, j)
            want = theta_map.get(key, 0.0)
            got = float(pair_coupling(j, t) @ (wvec[j] @ vec))
            if abs(got - want) > check_tol * (1.0 + abs(want)):
                raise RuntimeError(
                    "phase between ions %d and %d came out %r, target %r"
                    % (j, t, got, want))
        coeff[t] = vec
        wvec[t] = np.einsum("kab,b->ka", proj, vec)
        solved.append(t)

    for comp in _ordered_components(ions, theta_map):
        if len(comp) == 1:
            # Addressed but entangled with nobody; silence is a solution.
            admit(comp[0], np.zeros(free))
            continue
        k1, k2 = comp[0], comp[1]
        key = (k1, k2) if k1 < k2 else (k2, k1)
        theta_12 = theta_map[key]
        null1 = _null_basis_rows(constraint_rows(k1)[0], free, rank_rtol)
        null2 = _null_basis_rows(constraint_rows(k2)[0], free, rank_rtol)
        if null1.shape[1] == 0 or null2.shape[1] == 0:
            raise NullSpaceExhausted(
                "no pulse freedom left for ions %d and %d" % (k1, k2))
        pairmat = np.einsum("k,kab->ab", pair_coupling(k1, k2), proj)
        core = null1.T @ pairmat @ null2
        u, sing, vt = np.linalg.svd(core)
        top = float(sing[0])
        if not top > 0.0:
            raise InfeasibleTarget(
                "ions %d and %d are uncoupled in the remaining pulse space"
                % (k1, k2))
        scale = math.sqrt(abs(theta_12) / top)
        uvec = u[:, 0].copy()
        vvec = vt[0].copy()
        lead = int(np.argmax(np.abs(uvec)))
        if uvec[lead] < 0.0:
            uvec = -uvec
            vvec = -vvec
        admit(k1, null1 @ (scale * uvec))
        admit(k2, null2 @ (math.copysign(scale, theta_12) * vvec))
        for t in comp[2:]:
            rows, rhs = constraint_rows(t)
            sol = np.linalg.lstsq(rows, rhs, rcond=rank_rtol)[0]
            gap = float(np.max(np.abs(rows @ sol - rhs)))
            if gap > check_tol * (1.0 + float(np.max(np.abs(rhs)))):
                raise NullSpaceExhausted(
                    "phase constraints for ion %d are inconsistent "
                    "(residual %.3e)" % (t, gap))
            admit(t, sol)

    amps = {ion: basis @ coeff[ion] for ion in ions}
    pulse = PulseSequence(n_seg=n_seg, tau=tau, mu=mu, amplitudes=amps)
    _verify_design(pulse, modes, theta_map, check_tol)
    return pulse


def _verify_design(pulse, modes, theta_map, tol):
    """Independent re-evaluation of a finished design."""
    alpha = ionphys.alpha_integrals(pulse, modes)
    theta = ionphys.theta_integrals(pulse, modes)
    ions = pulse.ions
    peak = max((float(np.max(np.abs(a))) for a in pulse.amplitudes.values()),
               default=0.0)
    worst = float(np.max(np.abs(alpha))) if alpha.size else 0.0
    if worst > tol * max(peak * pulse.tau, 1e-300):
        raise RuntimeError(
            "design leaves residual displacement %.3e (amplitude scale %.3e)"
            % (worst, peak * pulse.tau))
    for a, i in enumerate(ions):
        for b in range(a + 1, len(ions)):
            j = ions[b]
            want = theta_map.get((i, j), 0.0)
            got = float(theta[a, b])
            if abs(got - want) > tol * (1.0 + abs(want)):
                raise RuntimeError(
                    "pair (%d, %d) accumulated phase %r, target %r"
                    % (i, j, got, want))


def default_detuning(modes):
    """Detuning midway between the two highest transverse mode frequencies."""
    if modes.n_modes < 2:
        raise ValueError("need at least two modes to place the detuning")
    return 0.5 * (float(modes.omega_k[0]) + float(modes.omega_k[1]))


def design_single_pair(modes, ion_i, ion_j, mu, tau, n_seg, theta=TARGET_PHASE,
                       **kwargs):
    """Amplitude-modulation design entangling one ion pair."""
    targets = GateTargets(((int(ion_i), int(ion_j), theta),))
    return ease_design(modes, targets, mu, tau, n_seg, **kwargs)


def design_parallel_layer(modes, ion_of, gates, tau, n_seg, mu=None,
                          theta=TARGET_PHASE, robust=True, **kwargs):
    """Design one layer of parallel gates given a layout embedding.

    ion_of maps layout coordinates to crystal ion indices and gates lists
    (control, target) coordinate pairs.  Layers are designed first-order
    detuning-insensitive by default (robust=True), which keeps the noise
    response of large parallel groups at the scale of an isolated gate.
    Returns (pulse, report); the report records the detuning and the peak
    and mean Rabi amplitude.
    """
    pairs = [(int(ion_of[c]), int(ion_of[t])) for c, t in gates]
    if mu is None:
        mu = default_detuning(modes)
    targets = GateTargets(tuple((i, j, theta) for i, j in pairs))
    pulse = ease_design(modes, targets, mu, tau, n_seg, robust=robust,
                        **kwargs)
    if pulse.amplitudes:
        stack = np.abs([pulse.amplitudes[i] for i in pulse.ions])
        max_rabi = float(np.max(stack))
        mean_rabi = float(np.mean(stack))
    else:
        max_rabi = mean_rabi = 0.0
    report = {
        "mu": float(mu),
        "n_pairs": len(pairs),
        "max_rabi": max_rabi,
        "mean_rabi": mean_rabi,
    }
    return pulse, report


# -- transplanting a shared pulse shape --------------------------------------


def _reference_shapes(ref_pulse):
    shapes = [ref_pulse.amplitudes[i] for i in ref_pulse.ions]
    if len(shapes) == 1:
        return shapes[0], shapes[0]
    if len(shapes) == 2:
        return shapes[0], shapes[1]
    raise ValueError("reference pulse must drive one or two ions")


def rescale_for_boundary(ref_pulse, pairs, modes, floor=1e-4):
    """Per-pair scale factors driving a shared pulse shape to |Theta| = pi/4.

    Each pair is evaluated in isolation with the reference shape on both
    ions; the returned factor s satisfies s^2 |Theta| = pi/4 exactly by
    the quadratic amplitude scaling of the accumulated phase.  Pairs
    whose |Theta| falls below floor are rejected as uncoupled.
    """
    first, second = _reference_shapes(ref_pulse)
    scales = {}
    for i, j in pairs:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError("pair (%d, %d) addresses one ion twice" % (i, j))
        tmp = PulseSequence(n_seg=ref_pulse.n_seg, tau=ref_pulse.tau,
                            mu=ref_pulse.mu, amplitudes={i: first, j: second})
        th = float(ionphys.theta_integrals(tmp, modes)[0, 1])
        if abs(th) < floor:
            raise ValueError(
                "pair (%d, %d) accumulates |Theta| = %.3e below the floor %.3e"
                % (i, j, abs(th), floor))
        scales[(i, j)] = math.sqrt(TARGET_PHASE / abs(th))
    return scales


def transplant_layer(ref_pulse, pairs, modes, floor=1e-4):
    """Drive every listed pair with the rescaled shared pulse shape.

    Returns (pulse, scales) where the composite pulse assigns the first
    reference shape to the first ion of each pair and the second shape to
    the other, both multiplied by that pair's boundary scale factor.
    """
    first, second = _reference_shapes(ref_pulse)
    scales = rescale_for_boundary(ref_pulse, pairs, modes, floor=floor)
    amps = {}
    for (i, j), s in scales.items():
        for ion, shape in ((i, first), (j, second)):
            if ion in amps:
                raise ValueError("ion %d appears in more than one pair" % ion)
            amps[ion] = s * shape
    pulse = PulseSequence(n_seg=ref_pulse.n_seg, tau=ref_pulse.tau,
                          mu=ref_pulse.mu, amplitudes=amps)
    return pulse, scales


# -- noise-sampled crosstalk --------------------------------------------------


@dataclass
class CrosstalkReport:
    """Sampled two-qubit phases for every unordered pair of addressed ions.

    Arrays are aligned: entry p describes the pair (ion_i[p], ion_j[p]).
    pc_intrinsic is the square of the nominal phase, pc_noise the square
    of the sample standard deviation delta_theta, and pc_sampled the mean
    of the squared sampled phase.  gate_infidelity holds the mean
    two-ion infidelity per targeted pair, aligned with gate_pairs.
    """

    ion_i: np.ndarray
    ion_j: np.ndarray
    r_over_a: np.ndarray
    theta_nominal: np.ndarray
    theta_mean: np.ndarray
    delta_theta: np.ndarray
    pc_intrinsic: np.ndarray
    pc_noise: np.ndarray
    pc_sampled: np.ndarray
    targeted: np.ndarray
    n_samples: int
    gate_pairs: tuple = ()
    gate_infidelity: np.ndarray = None

    @property
    def n_pairs(self):
        return len(self.ion_i)

    def undesired(self):
        """Boolean mask selecting the pairs that are not targeted gates."""
        return ~self.targeted

    def binned_summary(self, n_bins=2, quantity="pc_noise",
                       undesired_only=True):
        """Equal-count distance bins with mean crosstalk per bin.

        Returns a list of dicts {r_lo, r_hi, count, mean} over pairs with
        finite distance, using the named per-pair array.
        """
        values = np.asarray(getattr(self, quantity), dtype=float)
        mask = np.isfinite(self.r_over_a)
        if undesired_only:
            mask &= self.undesired()
        r = self.r_over_a[mask]
        v = values[mask]
        if r.size == 0:
            return []
        edges = np.quantile(r, np.linspace(0.0, 1.0, n_bins + 1))
        out = []
        for b in range(n_bins):
            lo, hi = edges[b], edges[b + 1]
            sel = (r >= lo) & (r <= hi if b == n_bins - 1 else r < hi)
            if not np.any(sel):
                continue
            out.append({
                "r_lo": float(lo),
                "r_hi": float(hi),
                "count": int(np.sum(sel)),
                "mean": float(np.mean(v[sel])),
            })
        return out

    def to_csv(self, path):
        cols = ("ion_i", "ion_j", "r_over_a", "theta_nominal",
                "pc_intrinsic", "delta_theta", "pc_noise")
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for p in range(self.n_pairs):
                fh.write("%d,%d,%s,%s,%s,%s,%s\n" % (
                    int(self.ion_i[p]), int(self.ion_j[p]),
                    repr(float(self.r_over_a[p])),
                    repr(float(self.theta_nominal[p])),
                    repr(float(self.pc_intrinsic[p])),
                    repr(float(self.delta_theta[p])),
                    repr(float(self.pc_noise[p]))))


def _target_phases(targets):
    """Normalize a targets argument to {(i, j): theta or None}."""
    if targets is None:
        return {}
    if isinstance(targets, GateTargets):
        entries = targets.pairs
    elif isinstance(targets, dict):
        entries = [(i, j, th) for (i, j), th in targets.items()]
    else:
        entries = list(targets)
    out = {}
    for entry in entries:
        if len(entry) == 2:
            i, j = entry
            th = None
        else:
            i, j, th = entry
            th = float(th)
        i, j = int(i), int(j)
        key = (i, j) if i < j else (j, i)
        out[key] = th
    return out


def sample_noisy_crosstalk(pulse, modes, spec, crystal=None,
                           lattice_constant=None, targets=None):
    """Monte Carlo estimate of crosstalk phases under miscalibration.

    Every sample perturbs each amplitude entry by an independent uniform
    relative factor within +-amp_fraction and shifts the detuning by a
    uniform draw within +-detuning_halfwidth, then re-evaluates all pair
    phases exactly.  Distances come from crystal positions when given,
    in units of lattice_constant (default: the smallest ion spacing).
    targets marks gate pairs, enabling per-gate infidelity estimates.
    """
    ions = pulse.ions
    n = len(ions)
    if n < 2:
        raise ValueError("need at least two addressed ions")
    pos_of = {ion: row for row, ion in enumerate(ions)}
    base = np.array([pulse.amplitudes[i] for i in ions])
    tmap = _target_phases(targets)
    for (i, j) in tmap:
        if i not in pos_of or j not in pos_of:
            raise ValueError("target pair (%d, %d) not driven by the pulse"
                             % (i, j))

    theta_nom = ionphys.theta_integrals(pulse, modes)
    iu = np.triu_indices(n, k=1)
    nominal = theta_nom[iu]

    gate_pairs = []
    for key in sorted(tmap):
        th = tmap[key]
        if th is None:
            th = math.copysign(TARGET_PHASE,
                               theta_nom[pos_of[key[0]], pos_of[key[1]]])
        gate_pairs.append((key[0], key[1], th))

    samples = np.empty((spec.n_samples, iu[0].size))
    infid = np.zeros((spec.n_samples, len(gate_pairs)))
    for s in range(spec.n_samples):
        gen = rng.substream(spec.seed, rng.DOMAIN_NOISE_SAMPLE, s)
        factors = 1.0 + spec.amp_fraction * (2.0 * gen.random((n, pulse.n_seg)) - 1.0)
        dmu = spec.detuning_halfwidth * (2.0 * gen.random() - 1.0)
        pert = PulseSequence(
            n_seg=pulse.n_seg, tau=pulse.tau, mu=pulse.mu + dmu,
            amplitudes={ion: base[row] * factors[row]
                        for row, ion in enumerate(ions)})
        th = ionphys.theta_integrals(pert, modes)
        samples[s] = th[iu]
        if gate_pairs:
            alpha = ionphys.alpha_integrals(pert, modes)
            for g, (i, j, th_t) in enumerate(gate_pairs):
                a, b = pos_of[i], pos_of[j]
                sub_alpha = alpha[[a, b]]
                phase = th[a, b]
                sub_theta = np.array([[0.0, phase], [phase, 0.0]])
                infid[s, g] = ionphys.gate_infidelity(
                    sub_alpha, sub_theta, {(0, 1): th_t}, modes.nbar_k)

    theta_mean = samples.mean(axis=0)
    if spec.n_samples > 1:
        delta = samples.std(axis=0, ddof=1)
    else:
        delta = np.zeros(iu[0].size)
    pc_sampled = np.mean(samples ** 2, axis=0)

    if crystal is not None:
        xy = crystal.positions
        sep = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=-1)
        if lattice_constant is None:
            off = sep[np.triu_indices(len(xy), k=1)]
            lattice_constant = float(np.min(off))
        rows = np.asarray(ions)
        r = sep[rows[iu[0]], rows[iu[1]]] / float(lattice_constant)
    else:
        r = np.full(iu[0].size, np.nan)

    ion_arr = np.asarray(ions)
    targeted = np.zeros(iu[0].size, dtype=bool)
    for p in range(iu[0].size):
        key = (int(ion_arr[iu[0][p]]), int(ion_arr[iu[1][p]]))
        targeted[p] = key in tmap

    return CrosstalkReport(
        ion_i=ion_arr[iu[0]],
        ion_j=ion_arr[iu[1]],
        r_over_a=r,
        theta_nominal=nominal,
        theta_mean=theta_mean,
        delta_theta=delta,
        pc_intrinsic=nominal ** 2,
        pc_noise=delta ** 2,
        pc_sampled=pc_sampled,
        targeted=targeted,
        n_samples=spec.n_samples,
        gate_pairs=tuple(gate_pairs),
        gate_infidelity=infid.mean(axis=0) if gate_pairs else np.zeros(0),
    )


def fit_power_law(points, r_min):
    """Fit p = c (r/a)^(-gamma) by least squares on log-log axes.

    Only points with r >= r_min enter the fit; they must be at least two
    and all positive.  Returns (c, gamma, rms_log_residual).
    """
    rs, ps = [], []
    for r, p in points:
        if r >= r_min:
            rs.append(float(r))
            ps.append(float(p))
    if len(rs) < 2:
        raise ValueError("need at least two points with r >= r_min")
    if min(ps) <= 0.0:
        raise ValueError("power-law fit needs positive values")
    x = np.log(np.asarray(rs))
    y = np.log(np.asarray(ps))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, inter), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + inter)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(np.exp(inter)), float(-slope), rms
