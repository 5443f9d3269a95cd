import math

import numpy as np

from ionqec import code, ionphys, pulse
from ionqec.ionphys import PulseSequence

layout = code.build_layout(5)
crys = ionphys.crystal_from_layout(layout, 5e-6)
modes = ionphys.transverse_modes(crys)
ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
gates = layout.cnot_layers[0]
pairs = [(ion_of[c], ion_of[t]) for c, t in gates]

mu = pulse.default_detuning(modes)
ps, report = pulse.design_parallel_layer(modes, ion_of, gates, 500e-6, 500, mu=mu)

ions = ps.ions
pos = {ion: r for r, ion in enumerate(ions)}

# detuning-only shift, one-sided
for dmu in (2 * math.pi * 250, 2 * math.pi * 500):
    pert = PulseSequence(n_seg=ps.n_seg, tau=ps.tau, mu=ps.mu + dmu,
                         amplitudes=ps.amplitudes)
    al = ionphys.alpha_integrals(pert, modes)
    th = ionphys.theta_integrals(pert, modes)
    ta = tt = 0.0
    for (i, j) in pairs:
        a, b = pos[i], pos[j]
        ta += float(np.sum(np.abs(al[[a, b]]) ** 2)) / len(pairs)
        tt += (th[a, b] - math.copysign(math.pi / 4, th[a, b])) ** 2 / len(pairs)
    print("dmu/2pi=%4.0f  per-gate alpha term=%9.3e  theta term=%9.3e" % (
        dmu / (2 * math.pi), ta, tt))

# per-ion amplitude norms in solve order (row-major ancilla order of the layer)
print("\nion  max|Om|/2pi kHz   ||Om||2")
order = []
for c, t in gates:
    order.extend([ion_of[c], ion_of[t]])
for ion in order[:8] + order[-8:]:
    om = ps.amplitudes[ion]
    print("%4d  %8.1f  %10.3e" % (ion, np.max(np.abs(om)) / (2 * math.pi * 1e3),
                                  np.linalg.norm(om)))

# detuning sensitivity of alpha per ion: |alpha(mu+dmu)| summed over modes
dmu = 2 * math.pi * 500
pert = PulseSequence(n_seg=ps.n_seg, tau=ps.tau, mu=ps.mu + dmu,
                     amplitudes=ps.amplitudes)
al = ionphys.alpha_integrals(pert, modes)
an = np.sqrt(np.sum(np.abs(al) ** 2, axis=1))
rank = np.argsort(an)
print("\nions by |alpha| under detuning shift (worst 6):")
for r in rank[-6:]:
    print("  ion %3d |alpha|=%.3e" % (ions[r], an[r]))
print("alpha term total (all 40 ions):", float(np.sum(an ** 2)))
