"""Analytic performance estimates for the parallel-gate memory.

Cycle durations, the unified logical-error-rate bound combining gate,
idle, and crosstalk contributions, optimal parallelism, minimum code
distance for a target logical error rate, and the combinatorial
error-chain estimates with their crossover condition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScalingFit",
    "DEFAULT_FIT",
    "NoThresholdError",
    "CHAIN_CROSSOVER",
    "cycle_duration",
    "sublattice_cycle_duration",
    "unified_logical_bound",
    "optimal_parallelism",
    "min_distance_for_target",
    "bound_table",
    "shortest_chain_probability",
    "typical_chain_probability",
    "typical_chains_dominate",
    "measure_slope",
]


class NoThresholdError(Exception):
    """The error-rate combination admits no decaying logical error rate."""


@dataclass(frozen=True)
class ScalingFit:
    """Monte Carlo fit constants for the logical-error bound.

    a_crosstalk and p_th describe the crosstalk-only fit
    p_L = a_crosstalk (p~_c / p_th)^((d+1)/2); b_gate and p_th_prime
    describe the gate/idle fit with the same exponent.  Users refitting
    from their own sweeps (measure_slope plus a prefactor fit at fixed d)
    can carry the result through every routine below.
    """

    a_crosstalk: float = 0.01
    p_th: float = 0.01
    b_gate: float = 0.015
    p_th_prime: float = 0.013

    def __post_init__(self):
        for name in ("a_crosstalk", "p_th", "b_gate", "p_th_prime"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")


DEFAULT_FIT = ScalingFit()

# p_c d^3 above this constant makes the typical-length chains (one
# crosstalk pair per step) more likely than the shortest chains built
# entirely from double-step crosstalk pairs.
CHAIN_CROSSOVER = math.exp(-math.log(2.0) - 1.0)


def _check_distance(d: int) -> None:
    if d < 3 or d % 2 == 0:
        raise ValueError(f"code distance must be an odd integer >= 3, got {d}")


def cycle_duration(d: int, k: float) -> float:
    """Syndrome-extraction cycle time, in two-qubit gate units.

    4 d (d-1) entangling gates run in ceil-free layers of k, plus a
    measurement step worth five gate times.
    """
    _check_distance(d)
    if not 1 <= k <= d * (d - 1):
        raise ValueError(f"parallelism must lie in [1, d(d-1)], got {k}")
    return 4.0 * d * (d - 1) / k + 5.0


def sublattice_cycle_duration(l: int) -> float:
    """Cycle time for the sublattice grouping: 8 l^2 gate layers plus
    measurement, independent of code distance."""
    if l < 1:
        raise ValueError(f"sublattice parameter must be >= 1, got {l}")
    return 8.0 * l * l + 5.0


def _bound_base(p_g: float, T: float, p_tilde_c: float, t: float,
                fit: ScalingFit) -> float:
    if p_g < 0 or p_tilde_c < 0 or t < 0:
        raise ValueError("rates and durations must be nonnegative")
    if not T > 0:
        raise ValueError(f"coherence time must be positive, got {T}")
    idle = 0.0 if math.isinf(T) else 3.0 * t / (8.0 * T)
    return (p_g + idle + (fit.p_th_prime / fit.p_th) * p_tilde_c) / fit.p_th_prime


def unified_logical_bound(p_g: float, T: float, p_tilde_c: float, d: int,
                          t: float, fit: ScalingFit = DEFAULT_FIT) -> float:
    """Upper bound on the logical error rate per cycle.

    max(A, B) * [(p_g + 3t/(8T) + (p_th'/p_th) p~_c) / p_th']^((d+1)/2);
    with the default fit constants this is
    0.015 * [(p_g + 3t/(8T) + 1.3 p~_c) / 0.013]^((d+1)/2).
    """
    _check_distance(d)
    base = _bound_base(p_g, T, p_tilde_c, t, fit)
    return max(fit.a_crosstalk, fit.b_gate) * base ** ((d + 1) // 2)


def _uniform_bound_at_k(p_g, T, p_c, d, k, fit):
    t = cycle_duration(d, k)
    return unified_logical_bound(p_g, T, 2.0 * (k - 1) * p_c, d, t, fit)


def optimal_parallelism(p_g: float, T: float, p_c: float, d: int,
                        fit: ScalingFit = DEFAULT_FIT) -> int:
    """Parallelism level minimizing the bound for uniform crosstalk p_c.

    Scans every k in [1, d(d-1)]; more parallelism shortens the cycle
    (less idling) but adds 2(k-1) p_c of effective crosstalk per gate.
    Ties break toward smaller k.
    """
    _check_distance(d)
    if p_c < 0:
        raise ValueError(f"crosstalk probability must be nonnegative, got {p_c}")
    best_k, best = 1, math.inf
    for k in range(1, d * (d - 1) + 1):
        val = _uniform_bound_at_k(p_g, T, p_c, d, k, fit)
        if val < best:
            best_k, best = k, val
    return best_k


def min_distance_for_target(p_g: float, T: float, target: float,
                            p_c: float | None = None,
                            t: float | None = None,
                            p_tilde_c: float | None = None,
                            fit: ScalingFit = DEFAULT_FIT,
                            k_policy: str = "d-1",
                            d_max: int = 499) -> int:
    """Smallest odd code distance whose bound reaches the target rate.

    Two usage modes: pass a uniform per-location `p_c` and a `k_policy`
    ("d-1" for the k = d-1 schedule, "optimal" for an exhaustive scan per
    distance), or pass a fixed cycle time `t` together with the effective
    `p_tilde_c` it delivers (the sublattice schedules, whose cycle time
    does not depend on d).

    Raises NoThresholdError when the bracketed base of the bound is >= 1
    for every distance tried, so the bound can never decay.
    """
    if target <= 0:
        raise ValueError(f"target must be positive, got {target}")
    uniform_mode = p_c is not None
    fixed_mode = t is not None or p_tilde_c is not None
    if uniform_mode == fixed_mode:
        raise ValueError("pass either p_c (uniform mode) or t and p_tilde_c "
                         "(fixed-schedule mode)")
    if fixed_mode and (t is None or p_tilde_c is None):
        raise ValueError("fixed-schedule mode needs both t and p_tilde_c")
    if uniform_mode and k_policy not in ("d-1", "optimal"):
        raise ValueError(f"unknown k_policy {k_policy!r}")

    any_base_below_one = False
    for d in range(3, d_max + 1, 2):
        if uniform_mode:
            if k_policy == "optimal":
                k = optimal_parallelism(p_g, T, p_c, d, fit)
            else:
                k = d - 1
            tt = cycle_duration(d, k)
            ptc = 2.0 * (k - 1) * p_c
        else:
            tt, ptc = t, p_tilde_c
        base = _bound_base(p_g, T, ptc, tt, fit)
        if base < 1.0:
            any_base_below_one = True
            if max(fit.a_crosstalk, fit.b_gate) * base ** ((d + 1) // 2) <= target:
                return d
    if not any_base_below_one:
        raise NoThresholdError(
            "bound base >= 1 at every distance; logical error cannot decay")
    raise ValueError(f"target {target} not reached for any odd d <= {d_max}")


def bound_table(p_g: float, T: float, d_values, p_c: float | None = None,
                t: float | None = None, p_tilde_c: float | None = None,
                fit: ScalingFit = DEFAULT_FIT, k_policy: str = "d-1"):
    """Rows (d, k, t, p_tilde_c, bound) for a list of distances.

    Same two modes as min_distance_for_target; in fixed-schedule mode the
    k column is 0 because the schedule is not described by a single k.
    """
    uniform_mode = p_c is not None
    if uniform_mode == (t is not None or p_tilde_c is not None):
        raise ValueError("pass either p_c (uniform mode) or t and p_tilde_c "
                         "(fixed-schedule mode)")
    rows = []
    for d in d_values:
        if uniform_mode:
            if k_policy == "optimal":
                k = optimal_parallelism(p_g, T, p_c, d, fit)
            elif k_policy == "d-1":
                k = d - 1
            else:
                raise ValueError(f"unknown k_policy {k_policy!r}")
            tt = cycle_duration(d, k)
            ptc = 2.0 * (k - 1) * p_c
        else:
            if t is None or p_tilde_c is None:
                raise ValueError("fixed-schedule mode needs both t and p_tilde_c")
            k, tt, ptc = 0, t, p_tilde_c
        rows.append((d, k, tt, ptc, unified_logical_bound(p_g, T, ptc, d, tt, fit)))
    return rows


def _check_chain_distance(d: int) -> None:
    if d < 4 or d % 4 != 0:
        raise ValueError(
            f"chain estimates are derived for distances divisible by 4, got {d}")


def shortest_chain_probability(d: int, p_c: float) -> float:
    """Probability weight of the shortest logical error chains.

    Chains of d/4 crosstalk pairs, each contributing two steps along one
    of the 2d rows or columns: 2d * C(d, d/2) * (d/2)!/((d/4)! 2^(d/4))
    * p_c^(d/4).
    """
    _check_chain_distance(d)
    if p_c < 0:
        raise ValueError(f"crosstalk probability must be nonnegative, got {p_c}")
    q = d // 4
    pairings = math.factorial(d // 2) // (math.factorial(q) * 2**q)
    return 2.0 * d * math.comb(d, d // 2) * pairings * p_c**q


def typical_chain_probability(d: int, p_c: float) -> float:
    """Probability weight of typical-length chains, one crosstalk pair per
    step with O(d^2) partner choices: 2d * C(d, d/2) * (d^2 p_c)^(d/2)."""
    _check_chain_distance(d)
    if p_c < 0:
        raise ValueError(f"crosstalk probability must be nonnegative, got {p_c}")
    return 2.0 * d * math.comb(d, d // 2) * (d * d * p_c) ** (d // 2)


def typical_chains_dominate(d: int, p_c: float) -> bool:
    """Whether typical-length chains outweigh shortest chains: p_c d^3 >
    e^(-ln 2 - 1).  Exact comparison, no rounding."""
    _check_chain_distance(d)
    return p_c * d**3 > CHAIN_CROSSOVER


def measure_slope(points, window: tuple[float, float] | None = None):
    """Local log-log slope of p_L versus p.

    points: iterable of (p, p_L) or (p, p_L, sigma) rows; sigma is the
    standard error of p_L and turns the fit into weighted least squares.
    window: optional (p_lo, p_hi) filter, inclusive.  Returns (slope,
    slope_err).  Needs at least three usable points; points with
    nonpositive p or p_L are rejected.
    """
    rows = [tuple(map(float, row)) for row in points]
    if window is not None:
        lo, hi = window
        rows = [r for r in rows if lo <= r[0] <= hi]
    if len(rows) < 3:
        raise ValueError(f"need at least 3 points in the window, got {len(rows)}")
    for r in rows:
        if r[0] <= 0 or r[1] <= 0:
            raise ValueError(f"p and p_L must be positive for a log-log fit: {r}")
        if len(r) > 2 and not math.isfinite(r[2]):
            raise ValueError(f"uncertainty must be finite: {r}")

    x = np.log(np.array([r[0] for r in rows]))
    y = np.log(np.array([r[1] for r in rows]))
    if all(len(r) > 2 and r[2] > 0 for r in rows):
        # relative error of p_L is the absolute error of log p_L
        w = 1.0 / np.array([r[2] / r[1] for r in rows])
    else:
        w = np.ones(len(rows))
    design = np.stack([x, np.ones_like(x)], axis=1)
    wd = design * w[:, None]
    wy = y * w
    coef, _, _, _ = np.linalg.lstsq(wd, wy, rcond=None)
    resid = wy - wd @ coef
    dof = max(len(rows) - 2, 1)
    cov = np.linalg.inv(wd.T @ wd)
    # scale covariance by reduced chi^2 only for unweighted fits; weighted
    # fits keep the propagated statistical error
    if np.allclose(w, 1.0):
        cov = cov * float(resid @ resid) / dof
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
