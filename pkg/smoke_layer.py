import math
import time

import numpy as np

from ionqec import code, ionphys, pulse

t0 = time.time()
layout = code.build_layout(5)
crys = ionphys.crystal_from_layout(layout, 5e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
print("gates in layer 0:", len(gates))
print("setup %.2fs" % (time.time() - t0))

t0 = time.time()
ps, report = pulse.design_parallel_layer(modes, ion_of, gates, 500e-6, 500)
dt_design = time.time() - t0
print("design %.1fs  report:" % dt_design, report)
print("  max Rabi / 2pi kHz =", report["max_rabi"] / (2 * math.pi * 1e3))
print("  mean Rabi / 2pi kHz =", report["mean_rabi"] / (2 * math.pi * 1e3))

al = ionphys.alpha_integrals(ps, modes)
th = ionphys.theta_integrals(ps, modes)
peak = report["max_rabi"]
seg_scale = peak * ps.tau / ps.n_seg
print("  max|alpha| =", np.max(np.abs(al)),
      " /seg_scale =", np.max(np.abs(al)) / seg_scale)
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]
pmap = {tuple(sorted(p)): math.pi / 4 for p in pairs}
ions = ps.ions
pos = {ion: r for r, ion in enumerate(ions)}
worst_t = worst_u = 0.0
for a in range(len(ions)):
    for b in range(a + 1, len(ions)):
        key = (min(ions[a], ions[b]), max(ions[a], ions[b]))
        if key in pmap:
            worst_t = max(worst_t, abs(abs(th[a, b]) - math.pi / 4))
        else:
            worst_u = max(worst_u, abs(th[a, b]))
print("  worst targeted |Theta|-pi/4 :", worst_t)
print("  worst untargeted |Theta|    :", worst_u)

t0 = time.time()
spec = pulse.NoiseSpec()
rep = pulse.sample_noisy_crosstalk(ps, modes, spec, crystal=crys, targets=pairs)
print("sampling %.1fs" % (time.time() - t0))
und = rep.undesired()
print("undesired pairs:", und.sum(), "of", rep.n_pairs)
print("mean pc_noise   :", np.mean(rep.pc_noise[und]))
print("mean pc_sampled :", np.mean(rep.pc_sampled[und]))
print("bins:", rep.binned_summary(n_bins=2))
print("mean per-gate infidelity:", np.mean(rep.gate_infidelity),
      " min/max:", rep.gate_infidelity.min(), rep.gate_infidelity.max())
rep.to_csv("/tmp/slow.csv")
