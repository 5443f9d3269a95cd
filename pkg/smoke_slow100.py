import math
import time

import numpy as np

from ionqec import code, ionphys, pulse

layout = code.build_layout(5)
crys = ionphys.crystal_from_layout(layout, 5e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]
wk = modes.omega_k

for name, mu in (("default", None), ("blue_1bw", wk[0] + 0.1 * (wk[0] - wk[-1]))):
    t0 = time.time()
    ps, report = pulse.design_parallel_layer(modes, ion_of, gates, 500e-6,
                                             500, mu=mu, robust=True)
    al = ionphys.alpha_integrals(ps, modes)
    seg_scale = report["max_rabi"] * ps.tau / ps.n_seg
    rep = pulse.sample_noisy_crosstalk(ps, modes, pulse.NoiseSpec(),
                                       crystal=crys, targets=pairs)
    und = rep.undesired()
    bins = rep.binned_summary(n_bins=2)
    ratio = max(bins[0]["mean"], bins[1]["mean"]) / min(bins[0]["mean"],
                                                        bins[1]["mean"])
    print("%-8s  design+sample %.0fs" % (name, time.time() - t0))
    print("  alpha/seg_scale = %.2e" % (np.max(np.abs(al)) / seg_scale))
    print("  maxR = %.0f kHz  meanR = %.0f kHz" % (
        report["max_rabi"] / (2 * math.pi * 1e3),
        report["mean_rabi"] / (2 * math.pi * 1e3)))
    print("  mean pc_noise  = %.3e   (x%.2f of 1.1e-5)" % (
        float(np.mean(rep.pc_noise[und])),
        float(np.mean(rep.pc_noise[und])) / 1.1e-5))
    print("  mean pc_sample = %.3e" % float(np.mean(rep.pc_sampled[und])))
    print("  bins %.3e / %.3e  ratio %.2f" % (bins[0]["mean"], bins[1]["mean"], ratio))
    print("  mean per-gate dF = %.3e  (x%.2f of 5e-3)" % (
        float(np.mean(rep.gate_infidelity)),
        float(np.mean(rep.gate_infidelity)) / 5e-3))
