import math
import time

import numpy as np

from ionqec import ionphys, pulse

A5 = 5e-6

# 7-ion chain crystal
pos = ionphys.triangular_positions(1, 7, A5)
crys = ionphys.IonCrystal(positions=pos)
modes = ionphys.transverse_modes(crys)
mu = pulse.default_detuning(modes)
print("mu/2pi =", mu / (2 * math.pi))

# 1. single pair, n_seg = 60
t0 = time.time()
ps = pulse.design_single_pair(modes, 2, 3, mu, 100e-6, 60)
print("single pair design %.2fs" % (time.time() - t0))
al = ionphys.alpha_integrals(ps, modes)
th = ionphys.theta_integrals(ps, modes)
peak = max(np.max(np.abs(a)) for a in ps.amplitudes.values())
print("  max|alpha| =", np.max(np.abs(al)), " scale =", peak * ps.tau,
      " ratio =", np.max(np.abs(al)) / (peak * ps.tau))
print("  Theta - pi/4 =", th[0, 1] - math.pi / 4)
print("  peak Rabi / 2pi kHz =", peak / (2 * math.pi * 1e3))
print("  equal amplitudes? ",
      np.allclose(ps.amplitudes[2], ps.amplitudes[3]) or
      np.allclose(ps.amplitudes[2], -np.asarray(ps.amplitudes[3])))

# null dim >= n_seg - 2K
eps = ionphys.epsilon_segments(modes.omega_k, mu, 100e-6, 60)
import scipy.linalg
nb = scipy.linalg.null_space(np.vstack([eps.real, eps.imag]), rcond=1e-10)
print("  null dim =", nb.shape[1], ">=", 60 - 2 * modes.n_modes)

# 2. two disjoint pairs
ps2 = pulse.ease_design(
    modes, pulse.GateTargets(((0, 1, math.pi / 4), (4, 5, -math.pi / 4))),
    mu, 100e-6, 60)
th2 = ionphys.theta_integrals(ps2, modes)
ions2 = ps2.ions
print("two pairs ions:", ions2)
print("  Theta matrix:\n", th2)
print("  max cross |Theta| =",
      max(abs(th2[0, 2]), abs(th2[0, 3]), abs(th2[1, 2]), abs(th2[1, 3])))

# 3. 3-ion chain via dict targets (min-norm path)
tmap = {(1, 2): math.pi / 4, (1, 3): math.pi / 8}
ps3 = pulse.ease_design(modes, tmap, mu, 100e-6, 60)
th3 = ionphys.theta_integrals(ps3, modes)
print("chain ions:", ps3.ions)
print("  Theta(1,2) err:", th3[0, 1] - math.pi / 4,
      " Theta(1,3) err:", th3[0, 2] - math.pi / 8,
      " Theta(2,3):", th3[1, 2])

# 4. errors
try:
    pulse.ease_design(modes, {(0, 1): math.pi / 4}, mu, 100e-6, 10)
    print("ERROR: no NullSpaceExhausted")
except pulse.NullSpaceExhausted as exc:
    print("NullSpaceExhausted ok:", exc)
try:
    pulse.design_single_pair(modes, 2, 3, mu, 100e-6, 60, amp_cap=1.0)
    print("ERROR: no InfeasibleTarget")
except pulse.InfeasibleTarget as exc:
    print("InfeasibleTarget ok:", exc)

# 5. empty layer
ps0 = pulse.design_parallel_layer(modes, {}, [], 100e-6, 60, mu=mu)[0]
print("empty layer ions:", ps0.ions)

# 6. rescale: self-reference gives s = 1
ref = ps  # pair (2, 3)
scales = pulse.rescale_for_boundary(ref, [(2, 3)], modes)
print("self-rescale s =", scales[(2, 3)], " |s-1| =", abs(scales[(2, 3)] - 1))
# corner pair (0, 1): transplant and re-check
comp, sc = pulse.transplant_layer(ref, [(0, 1)], modes)
thc = ionphys.theta_integrals(comp, modes)
print("corner transplant Theta err:", abs(thc[0, 1]) - math.pi / 4, " s =", sc[(0, 1)])

# 7. zero-noise spec -> delta Theta = 0
spec0 = pulse.NoiseSpec(amp_fraction=0.0, detuning_halfwidth=0.0, n_samples=3, seed=1)
rep0 = pulse.sample_noisy_crosstalk(ps2, modes, spec0, crystal=crys,
                                    targets=[(0, 1), (4, 5)])
print("zero-noise max delta:", np.max(rep0.delta_theta),
      " targeted:", rep0.targeted.sum(), "of", rep0.n_pairs)
print("  r_over_a:", rep0.r_over_a)

# noisy spec determinism
spec1 = pulse.NoiseSpec(n_samples=5, seed=7)
ra = pulse.sample_noisy_crosstalk(ps2, modes, spec1, crystal=crys,
                                  targets=[(0, 1), (4, 5)])
rb = pulse.sample_noisy_crosstalk(ps2, modes, spec1, crystal=crys,
                                  targets=[(0, 1), (4, 5)])
print("deterministic:", np.array_equal(ra.delta_theta, rb.delta_theta),
      np.array_equal(ra.gate_infidelity, rb.gate_infidelity))
print("gate infidelities:", ra.gate_infidelity)

# 8. power-law fit
r = np.arange(1.0, 12.0)
p = 0.015 * r ** -5.87
c, g, rms = pulse.fit_power_law(list(zip(r, p)), 4.0)
print("fit exact:", c, g, rms)
gen = np.random.default_rng(3)
pn = p * np.exp(0.1 * gen.standard_normal(p.size))
c2, g2, rms2 = pulse.fit_power_law(list(zip(r, pn)), 1.0)
print("fit noisy:", c2, g2, rms2)
try:
    pulse.fit_power_law([(1.0, 1e-3)], 0.5)
    print("ERROR: no insufficient-data rejection")
except ValueError as exc:
    print("fit rejects:", exc)

# CSV round-trip sanity
rep0.to_csv("/tmp/ct.csv")
print(open("/tmp/ct.csv").read().splitlines()[0])
print(open("/tmp/ct.csv").read().splitlines()[1])
