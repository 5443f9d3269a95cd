import math

import numpy as np

from ionqec import code, ionphys, pulse

layout = code.build_layout(5)
crys = ionphys.crystal_from_layout(layout, 5e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]

mu = pulse.default_detuning(modes)
ps, report = pulse.design_parallel_layer(modes, ion_of, gates, 500e-6, 500, mu=mu)

specs = {
    "amp_only": pulse.NoiseSpec(amp_fraction=0.01, detuning_halfwidth=0.0,
                                n_samples=20, seed=0),
    "det_only": pulse.NoiseSpec(amp_fraction=0.0,
                                detuning_halfwidth=2 * math.pi * 500,
                                n_samples=20, seed=0),
    "both": pulse.NoiseSpec(n_samples=20, seed=0),
}
for name, spec in specs.items():
    rep = pulse.sample_noisy_crosstalk(ps, modes, spec, crystal=crys,
                                       targets=pairs)
    und = rep.undesired()
    print("%-8s pc=%9.3e dF=%9.3e tgt_dTheta=%8.2e und_dTheta=%8.2e" % (
        name, float(np.mean(rep.pc_noise[und])),
        float(np.mean(rep.gate_infidelity)),
        float(np.mean(rep.delta_theta[rep.targeted])),
        float(np.mean(rep.delta_theta[und]))))

# cancellation magnitude of the accumulated phase for one targeted pair
i, j = pairs[0]
eps = ionphys.epsilon_segments(modes.omega_k, ps.mu, ps.tau, ps.n_seg)
g = ionphys.samesegment_integrals(modes.omega_k, ps.mu, ps.tau, ps.n_seg)
oi = ps.amplitudes[i]
oj = ps.amplitudes[j]
total = 0.0
abssum = 0.0
per_mode = []
for k in range(modes.n_modes):
    G = ionphys.mode_quadratic_form(modes.omega_k[k:k + 1], ps.mu, ps.tau, ps.n_seg)
    bb = modes.eta_k[k] ** 2 * modes.b[i, k] * modes.b[j, k]
    contrib = bb * (oi @ G @ oj)
    elem = bb * np.outer(oi, oj) * G
    total += contrib
    abssum += np.abs(elem).sum()
    per_mode.append(contrib)
per_mode = np.array(per_mode)
print("pair (%d,%d): Theta=%.6f  sum|elements|=%.2f  sum|per-mode|=%.2f" % (
    i, j, total, abssum, np.abs(per_mode).sum()))
print("largest per-mode contributions:", np.sort(np.abs(per_mode))[-5:])

# same for one far undesired pair
und_idx = None
rep = pulse.sample_noisy_crosstalk(ps, modes,
                                   pulse.NoiseSpec(n_samples=2, seed=0),
                                   crystal=crys, targets=pairs)
mask = rep.undesired() & (rep.r_over_a > 6)
p = int(np.argmax(rep.r_over_a * mask))
i2, j2 = int(rep.ion_i[p]), int(rep.ion_j[p])
oi, oj = ps.amplitudes[i2], ps.amplitudes[j2]
total = abssum = 0.0
pm = []
for k in range(modes.n_modes):
    G = ionphys.mode_quadratic_form(modes.omega_k[k:k + 1], ps.mu, ps.tau, ps.n_seg)
    bb = modes.eta_k[k] ** 2 * modes.b[i2, k] * modes.b[j2, k]
    total += bb * (oi @ G @ oj)
    abssum += np.abs(bb * np.outer(oi, oj) * G).sum()
    pm.append(bb * (oi @ G @ oj))
print("far pair (%d,%d) r=%.1f: Theta=%.2e  sum|elements|=%.2f  sum|per-mode|=%.2f"
      % (i2, j2, float(rep.r_over_a[p]), total, abssum, np.abs(pm).sum()))
