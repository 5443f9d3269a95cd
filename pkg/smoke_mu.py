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

w = modes.omega_k
print("omega/2pi kHz, top 6:", (w[:6] - w[5]) / (2 * math.pi * 1e3), "rel to w[5]")
print("band top/2pi MHz:", w[0] / (2 * math.pi * 1e6),
      " bottom:", w[-1] / (2 * math.pi * 1e6))
print("band width /2pi kHz:", (w[0] - w[-1]) / (2 * math.pi * 1e3))
gaps = (w[:-1] - w[1:]) / (2 * math.pi)
print("top gaps Hz:", gaps[:5])
print("median gap Hz:", np.median(gaps), " max gap Hz:", np.max(gaps),
      " at k =", int(np.argmax(gaps)))

bw = w[0] - w[-1]
candidates = {
    "mid_top2": 0.5 * (w[0] + w[1]),
    "blue_1bw": w[0] + 0.1 * bw,
    "blue_3bw": w[0] + 0.3 * bw,
    "red_band": w[-1] - 0.1 * bw,
    "maxgap": 0.5 * (w[np.argmax(gaps)] + w[np.argmax(gaps) + 1]),
}

spec = pulse.NoiseSpec(n_samples=20, seed=0)
for name, mu in candidates.items():
    t0 = time.time()
    try:
        ps, report = pulse.design_parallel_layer(modes, ion_of, gates,
                                                 500e-6, 500, mu=mu)
    except Exception as exc:
        print(name, "FAILED:", exc)
        continue
    rep = pulse.sample_noisy_crosstalk(ps, modes, spec, crystal=crys,
                                       targets=pairs)
    und = rep.undesired()
    bins = rep.binned_summary(n_bins=2)
    tgt_dtheta = rep.delta_theta[rep.targeted]
    # split the per-gate infidelity into alpha and theta parts for one sample
    print("%-9s maxR=%5.0fkHz meanR=%4.0fkHz pc=%8.2e bins=%8.2e/%8.2e "
          "dF=%8.2e tgt_dTheta=%7.1e  (%.1fs)" % (
              name, report["max_rabi"] / (2 * math.pi * 1e3),
              report["mean_rabi"] / (2 * math.pi * 1e3),
              float(np.mean(rep.pc_noise[und])),
              bins[0]["mean"], bins[1]["mean"],
              float(np.mean(rep.gate_infidelity)),
              float(np.mean(tgt_dtheta)),
              time.time() - t0))
