import math
import time

import numpy as np

from ionqec import code, ionphys, pulse

t0 = time.time()
layout = code.build_layout(11)
crys = ionphys.crystal_from_layout(layout, 8e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
print("ions:", crys.n_ions, " gates in layer 0:", len(gates),
      " modes setup %.1fs" % (time.time() - t0))
eps_par = ionphys.epsilon_parameter(crys, 8e-6)
print("epsilon:", eps_par, " sound radius over a:",
      ionphys.sound_radius(eps_par, crys.omega_x, 100e-6))

# central gate pair: midpoint closest to crystal centroid
center = crys.positions.mean(axis=0)
best = min(gates, key=lambda g: np.linalg.norm(
    0.5 * (crys.positions[ion_of[g[0]]] + crys.positions[ion_of[g[1]]]) - center))
ci, cj = ion_of[best[0]], ion_of[best[1]]
print("central pair:", best, "->", (ci, cj))

mu = pulse.default_detuning(modes)
wk = modes.omega_k
print("top gaps Hz:", (wk[:3] - wk[1:4]) / (2 * math.pi))

t0 = time.time()
ref = pulse.design_single_pair(modes, ci, cj, mu, 100e-6, 500)
print("reference design %.1fs" % (time.time() - t0))
peak = max(np.max(np.abs(a)) for a in ref.amplitudes.values())
print("  peak Rabi kHz:", peak / (2 * math.pi * 1e3))

t0 = time.time()
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]
comp, scales = pulse.transplant_layer(ref, pairs, modes)
svals = np.array(list(scales.values()))
print("transplant %.1fs  scales min/max: %.4f %.4f" % (
    time.time() - t0, svals.min(), svals.max()))

# intrinsic crosstalk decay (no noise needed): nominal Theta of composite
t0 = time.time()
spec = pulse.NoiseSpec(n_samples=10, seed=0)
rep = pulse.sample_noisy_crosstalk(comp, modes, spec, crystal=crys,
                                   targets=pairs)
print("10-sample eval %.1fs" % (time.time() - t0))
und = rep.undesired()
for nm, arr in (("intrinsic", rep.pc_intrinsic), ("noise", rep.pc_noise)):
    pts = list(zip(rep.r_over_a[und], arr[und]))
    try:
        c, g, rms = pulse.fit_power_law(pts, 4.0)
        print("  %-9s fit: c=%.3e gamma=%.2f rms=%.2f" % (nm, c, g, rms))
    except ValueError as exc:
        print("  %-9s fit failed: %s" % (nm, exc))
# binned medians to eyeball decay
for lo in (1, 2, 4, 6, 8, 10):
    sel = und & (rep.r_over_a >= lo) & (rep.r_over_a < lo + 2)
    if sel.sum():
        print("  r in [%2d,%2d): n=%4d  med intrinsic %.2e  med noise %.2e" % (
            lo, lo + 2, sel.sum(),
            float(np.median(rep.pc_intrinsic[sel])),
            float(np.median(rep.pc_noise[sel]))))
