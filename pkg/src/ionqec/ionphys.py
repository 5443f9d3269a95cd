"""Transverse-mode physics of a 2D ion crystal and entangling-gate integrals.

Positions are the ideal triangular lattice (no equilibrium solve); the
fixed-lattice stiffness matrix then has the uniform vector as an exact
center-of-mass eigenvector at the trap frequency, which the tests pin.

The spin-phonon displacement alpha and two-qubit phase Theta for
piecewise-constant pulses are evaluated by closed-form per-segment
antiderivatives built from E(x) = (e^x - 1)/x and its divided difference,
with series fallbacks near degenerate arguments so nothing blows up at
mode resonance (mu close to omega_k).
"""

import math
from dataclasses import dataclass, field

import numpy as np

# CODATA 2018
AMU = 1.66053906660e-27  # kg
ELEM_CHARGE = 1.602176634e-19  # C
EPS0 = 8.8541878128e-12  # F/m
HBAR = 1.054571817e-34  # J s

YB171_MASS = 171.0 * AMU
RAMAN_355_DELTA_K = 4.0 * math.pi / 355.0e-9  # counter-propagating 355 nm pair

COULOMB_RATE = ELEM_CHARGE**2 / (4.0 * math.pi * EPS0)


class InstabilityError(Exception):
    """The transverse confinement cannot hold the crystal together."""


@dataclass(frozen=True)
class IonCrystal:
    positions: np.ndarray  # (N, 2) meters
    mass: float = YB171_MASS
    omega_x: float = 2.0 * math.pi * 3.0e6
    delta_k: float = RAMAN_355_DELTA_K

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be (N, 2)")
        if self.mass <= 0 or self.omega_x <= 0 or self.delta_k <= 0:
            raise ValueError("mass, omega_x, delta_k must be positive")
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        if dist.min() <= 0:
            raise ValueError("ion positions must be pairwise distinct")

    @property
    def n_ions(self):
        return self.positions.shape[0]


@dataclass(frozen=True)
class ModeData:
    omega_k: np.ndarray  # (K,) rad/s, descending
    b: np.ndarray  # (N, K), b[j, k] = participation of ion j in mode k
    eta_k: np.ndarray  # (K,)
    nbar_k: np.ndarray  # (K,)

    @property
    def n_modes(self):
        return self.omega_k.size


def triangular_positions(rows, cols, a):
    """Triangular lattice of rows x cols sites with spacing a (meters)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    if a <= 0:
        raise ValueError("lattice constant must be positive")
    pts = []
    for i in range(rows):
        for j in range(cols):
            pts.append((j * a + (i % 2) * a / 2.0, i * a * math.sqrt(3.0) / 2.0))
    return np.asarray(pts, dtype=float)


def embed_layout(layout, a):
    """Map code coordinates (u, v) onto the triangular lattice.

    (u, v) -> (u a/2, v a sqrt(3)/2), which places every scheduled CNOT
    pair at distance exactly a.
    """
    if a <= 0:
        raise ValueError("lattice constant must be positive")
    return {
        (u, v): (u * a / 2.0, v * a * math.sqrt(3.0) / 2.0)
        for (u, v) in layout.qubits
    }


def crystal_from_layout(layout, a, **kwargs):
    """IonCrystal whose ion order matches layout.qubits."""
    emb = embed_layout(layout, a)
    pos = np.asarray([emb[q] for q in layout.qubits], dtype=float)
    return IonCrystal(positions=pos, **kwargs)


def epsilon_parameter(crystal, a):
    """Dimensionless transverse-mode bandwidth e^2/(4 pi eps0 m omega_x^2 a^3)."""
    if a <= 0:
        raise ValueError("lattice constant must be positive")
    return COULOMB_RATE / (crystal.mass * crystal.omega_x**2 * a**3)


def sound_radius(epsilon, omega_x, tau):
    """Sound-wave travel range during tau, in units of the lattice constant."""
    return epsilon * omega_x * tau


def lamb_dicke(crystal, omega_k):
    """Lamb-Dicke parameter delta_k sqrt(hbar / (2 m omega))."""
    omega_k = np.asarray(omega_k, dtype=float)
    if np.any(omega_k <= 0):
        raise ValueError("mode frequencies must be positive")
    return crystal.delta_k * np.sqrt(HBAR / (2.0 * crystal.mass * omega_k))


def transverse_modes(crystal, nbar=None):
    """Normal modes of transverse motion on the fixed lattice.

    Stiffness matrix (units rad^2/s^2): off-diagonal t_jl =
    e^2/(4 pi eps0 m |r_jl|^3), diagonal omega_x^2 - sum_l t_jl.  Modes are
    returned in descending frequency; the center-of-mass mode (uniform
    vector at exactly omega_x) comes first.  Eigenvector signs are fixed so
    each column sums positive.
    """
    pos = crystal.positions
    n = crystal.n_ions
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    t = COULOMB_RATE / (crystal.mass * dist**3)
    K = t.copy()
    np.fill_diagonal(K, crystal.omega_x**2 - t.sum(axis=1))
    evals, evecs = np.linalg.eigh(K)
    if evals[0] <= 0:
        raise InstabilityError(
            "lowest squared mode frequency %.3e <= 0; crystal unstable" % evals[0]
        )
    order = np.argsort(evals, kind="stable")[::-1]
    evals = evals[order]
    b = evecs[:, order]
    for k in range(n):
        s = b[:, k].sum()
        if abs(s) < 1e-9:
            nz = np.flatnonzero(np.abs(b[:, k]) > 1e-9)
            s = b[nz[0], k]
        if s < 0:
            b[:, k] = -b[:, k]
    omega = np.sqrt(evals)
    eta = lamb_dicke(crystal, omega)
    if nbar is None:
        nbar = np.zeros(n)
    else:
        nbar = np.asarray(nbar, dtype=float)
        if nbar.shape != (n,):
            raise ValueError("nbar must have one entry per mode")
    return ModeData(omega_k=omega, b=b, eta_k=eta, nbar_k=nbar)


# -- stable primitives for the segment antiderivatives ---------------------


def _E(x):
    """(e^x - 1)/x with a series branch for small |x|."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = 1.0 + xs / 2.0 + xs**2 / 6.0 + xs**3 / 24.0 + xs**4 / 120.0
    xl = x[~small]
    out[~small] = (np.exp(xl) - 1.0) / xl
    return out


def _E_prime(x):
    """Derivative of _E, with a series branch for small |x|."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    out[small] = 0.5 + xs / 3.0 + xs**2 / 8.0 + xs**3 / 30.0 + xs**4 / 144.0
    xl = x[~small]
    out[~small] = (np.exp(xl) * (xl - 1.0) + 1.0) / xl**2
    return out


def _E_div_diff(x, y):
    """Divided difference (E(x) - E(y))/(x - y), stable as x -> y."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    mid = 0.5 * (x + y)
    close = np.abs(x - y) <= 1e-6 * (1.0 + np.abs(mid))
    out = np.empty_like(mid)
    out[close] = _E_prime(mid[close])
    xf, yf = x[~close], y[~close]
    out[~close] = (_E(xf) - _E(yf)) / (xf - yf)
    return out


def epsilon_segments(omega_k, mu, tau, n_seg):
    """Per-segment integral of sin(mu t) e^{i omega t}, shape (K, n_seg).

    Entry (k, m) is the integral over segment m of duration tau/n_seg.
    """
    omega_k = np.atleast_1d(np.asarray(omega_k, dtype=float))
    h = tau / n_seg
    t0 = np.arange(n_seg) * h
    a = (omega_k + mu)[:, None]
    b = (omega_k - mu)[:, None]
    Ea = _E(1j * a * h)
    Eb = _E(1j * b * h)
    return (h / 2j) * (np.exp(1j * a * t0) * Ea - np.exp(1j * b * t0) * Eb)


def epsilon_segments_dmu(omega_k, mu, tau, n_seg):
    """Detuning derivative of epsilon_segments, shape (K, n_seg).

    Entry (k, m) is the integral over segment m of t cos(mu t) e^{i omega t},
    the derivative of the segment integral with respect to mu.
    """
    omega_k = np.atleast_1d(np.asarray(omega_k, dtype=float))
    h = tau / n_seg
    t0 = np.arange(n_seg) * h
    a = (omega_k + mu)[:, None]
    b = (omega_k - mu)[:, None]
    ta = (t0 * _E(1j * a * h) + h * _E_prime(1j * a * h)) * np.exp(1j * a * t0)
    tb = (t0 * _E(1j * b * h) + h * _E_prime(1j * b * h)) * np.exp(1j * b * t0)
    return (h / 2.0) * (ta + tb)


def samesegment_integrals(omega_k, mu, tau, n_seg):
    """Ordered same-segment double integral, shape (K, n_seg).

    Entry (k, m) is the integral over t > t' (both inside segment m) of
    sin(mu t) e^{i omega_k t} sin(mu t') e^{-i omega_k t'}.
    """
    omega_k = np.atleast_1d(np.asarray(omega_k, dtype=float))
    h = tau / n_seg
    t0 = np.arange(n_seg) * h
    a = (omega_k + mu)[:, None]
    b = (omega_k - mu)[:, None]
    h2 = h * h
    # P(alpha, beta) = e^{i(alpha+beta)t0} h^2 D(i(alpha+beta)h, i alpha h),
    # with the four (alpha, beta) pairs collapsing to alpha+beta = ±2mu or 0
    two_mu = 2.0 * mu
    p_ac = np.exp(1j * two_mu * t0) * h2 * _E_div_diff(1j * two_mu * h, 1j * a * h)
    p_ad = h2 * _E_div_diff(np.zeros_like(a), 1j * a * h)
    p_bc = h2 * _E_div_diff(np.zeros_like(b), 1j * b * h)
    p_bd = np.exp(-1j * two_mu * t0) * h2 * _E_div_diff(-1j * two_mu * h, 1j * b * h)
    return -0.25 * (p_ac - p_ad - p_bc + p_bd)


# -- gate integrals ---------------------------------------------------------


def _pulse_matrix(pulse, ions):
    if ions is None:
        ions = sorted(pulse.amplitudes)
    omega = np.asarray([pulse.amplitudes[i] for i in ions], dtype=float)
    return list(ions), omega


def alpha_integrals(pulse, modes, ions=None):
    """Residual spin-phonon displacement alpha[j, k], complex (n_ions, K)."""
    ions, om = _pulse_matrix(pulse, ions)
    eps = epsilon_segments(modes.omega_k, pulse.mu, pulse.tau, pulse.n_seg)
    s = om @ eps.T  # (n, K)
    b_sub = modes.b[ions, :]
    return -1j * modes.eta_k[None, :] * b_sub * s


def theta_integrals(pulse, modes, ions=None):
    """Accumulated two-qubit phases Theta[i, j], symmetric, zero diagonal."""
    ions, om = _pulse_matrix(pulse, ions)
    n = om.shape[0]
    eps = epsilon_segments(modes.omega_k, pulse.mu, pulse.tau, pulse.n_seg)
    g = samesegment_integrals(modes.omega_k, pulse.mu, pulse.tau, pulse.n_seg)
    b_sub = modes.b[ions, :]
    theta = np.zeros((n, n))
    for k in range(modes.n_modes):
        u = om * eps[k][None, :]
        pu = np.cumsum(u, axis=1) - u  # exclusive prefix over segments
        cross = (u @ pu.conj().T).imag
        same = 2.0 * (om * g[k].imag[None, :]) @ om.T
        bb = modes.eta_k[k] ** 2 * np.outer(b_sub[:, k], b_sub[:, k])
        theta += bb * (cross + cross.T + same)
    np.fill_diagonal(theta, 0.0)
    return theta


def mode_quadratic_form(omega_k_one, mu, tau, n_seg):
    """Symmetric segment-space matrix G with Theta contribution om_i G om_j.

    For one mode: off-diagonal (p, q) holds the ordered cross-segment
    imaginary part, diagonal holds twice the same-segment integral, so that
    eta_k^2 b_ki b_kj (om_i @ G @ om_j) equals that mode's Theta term.
    """
    eps = epsilon_segments(omega_k_one, mu, tau, n_seg)[0]
    g = samesegment_integrals(omega_k_one, mu, tau, n_seg)[0]
    A = np.imag(np.outer(eps, eps.conj()))
    G = np.tril(A, -1)
    G = G + G.T
    np.fill_diagonal(G, 2.0 * g.imag)
    return G


def gate_infidelity(alpha, theta, targets, nbar_k):
    """Average infidelity D/(D+1) [sum |alpha|^2 (2 nbar+1) + sum (dTheta)^2].

    targets may be a full matrix matching theta or a dict {(i, j): phase}
    over index pairs; unlisted pairs target zero phase.
    """
    alpha = np.asarray(alpha)
    theta = np.asarray(theta)
    n = theta.shape[0]
    if isinstance(targets, dict):
        tmat = np.zeros_like(theta)
        for (i, j), v in targets.items():
            tmat[i, j] = v
            tmat[j, i] = v
    else:
        tmat = np.asarray(targets, dtype=float)
    nbar_k = np.asarray(nbar_k, dtype=float)
    term_alpha = float(np.sum(np.abs(alpha) ** 2 * (2.0 * nbar_k[None, :] + 1.0)))
    iu = np.triu_indices(n, k=1)
    term_theta = float(np.sum((theta[iu] - tmat[iu]) ** 2))
    dtotal = math.ldexp(1.0, alpha.shape[0])  # 2^N
    return dtotal / (dtotal + 1.0) * (term_alpha + term_theta)


# -- pulse sequences --------------------------------------------------------


@dataclass
class PulseSequence:
    """Segmented Rabi amplitudes for a set of addressed ions.

    amplitudes maps ion index to an n_seg vector (rad/s); all segments
    share duration tau/n_seg.
    """

    n_seg: int
    tau: float
    mu: float
    amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.n_seg = int(self.n_seg)
        self.tau = float(self.tau)
        self.mu = float(self.mu)
        if self.n_seg < 1:
            raise ValueError("need at least one segment")
        if self.tau <= 0:
            raise ValueError("gate time must be positive")
        clean = {}
        for ion, amps in self.amplitudes.items():
            arr = np.asarray(amps, dtype=float)
            if arr.shape != (self.n_seg,):
                raise ValueError(
                    "ion %r amplitude vector has shape %r, want (%d,)"
                    % (ion, arr.shape, self.n_seg)
                )
            clean[int(ion)] = arr
        self.amplitudes = clean

    @property
    def ions(self):
        return sorted(self.amplitudes)

    def save(self, path):
        """Text format: header `n_seg tau mu`, then `ion amp...` per ion.

        Floats are written with repr so a load reproduces them bit-exactly.
        """
        lines = ["%d %r %r" % (self.n_seg, self.tau, self.mu)]
        for ion in self.ions:
            amps = " ".join(repr(float(a)) for a in self.amplitudes[ion])
            lines.append("%d %s" % (ion, amps))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            lines = [ln for ln in (s.strip() for s in fh) if ln]
        if not lines:
            raise ValueError("empty pulse file")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError("pulse header must be `n_seg tau mu`")
        n_seg = int(head[0])
        tau, mu = float(head[1]), float(head[2])
        amplitudes = {}
        for ln in lines[1:]:
            parts = ln.split()
            amplitudes[int(parts[0])] = np.asarray([float(x) for x in parts[1:]])
        return cls(n_seg=n_seg, tau=tau, mu=mu, amplitudes=amplitudes)
