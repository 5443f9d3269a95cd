import math
import time

import numpy as np

from ionqec import code, ionphys, pulse

# finite-difference check of the detuning derivative
w = 2 * math.pi * np.array([2.95e6, 2.98e6, 3.0e6])
mu0 = 2 * math.pi * 2.99e6
tau, S = 123e-6, 37
dh = 1e-3
num = (ionphys.epsilon_segments(w, mu0 + dh, tau, S)
       - ionphys.epsilon_segments(w, mu0 - dh, tau, S)) / (2 * dh)
ana = ionphys.epsilon_segments_dmu(w, mu0, tau, S)
print("deps max rel err:", np.max(np.abs(num - ana)) / np.max(np.abs(ana)))

layout = code.build_layout(5)
crys = ionphys.crystal_from_layout(layout, 5e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]

wk = modes.omega_k
bw = wk[0] - wk[-1]
gaps = wk[:-1] - wk[1:]
candidates = {
    "mid_top2": 0.5 * (wk[0] + wk[1]),
    "blue_1bw": wk[0] + 0.1 * bw,
    "blue_3bw": wk[0] + 0.3 * bw,
    "maxgap": 0.5 * (wk[np.argmax(gaps)] + wk[np.argmax(gaps) + 1]),
}
spec = pulse.NoiseSpec(n_samples=20, seed=0)
for name, mu in candidates.items():
    t0 = time.time()
    ps, report = pulse.design_parallel_layer(modes, ion_of, gates, 500e-6,
                                             500, mu=mu, robust=True)
    rep = pulse.sample_noisy_crosstalk(ps, modes, spec, crystal=crys,
                                       targets=pairs)
    und = rep.undesired()
    bins = rep.binned_summary(n_bins=2)
    print("%-9s maxR=%5.0fkHz meanR=%4.0fkHz pc=%8.2e bins=%8.2e/%8.2e "
          "dF=%8.2e tgt_dT=%7.1e (%.0fs)" % (
              name, report["max_rabi"] / (2 * math.pi * 1e3),
              report["mean_rabi"] / (2 * math.pi * 1e3),
              float(np.mean(rep.pc_noise[und])),
              bins[0]["mean"], bins[1]["mean"],
              float(np.mean(rep.gate_infidelity)),
              float(np.mean(rep.delta_theta[rep.targeted])),
              time.time() - t0))
