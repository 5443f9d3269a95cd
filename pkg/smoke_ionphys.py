import math

import numpy as np
from scipy import integrate

from ionqec.code import build_layout
from ionqec import ionphys as ip

# constants
c5 = ip.IonCrystal(positions=[[0, 0], [5e-6, 0]])
print("eps(5um) =", ip.epsilon_parameter(c5, 5e-6), "expect ~0.0183")
print("eps(8um) =", ip.epsilon_parameter(c5, 8e-6), "expect ~0.0045")
eta = ip.lamb_dicke(c5, 2 * math.pi * 3e6)
print("eta =", eta, "expect ~0.111")
print("sound slow =", ip.sound_radius(ip.epsilon_parameter(c5, 5e-6), c5.omega_x, 500e-6))
print("sound fast =", ip.sound_radius(ip.epsilon_parameter(c5, 8e-6), c5.omega_x, 100e-6))

# 2-ion analytic modes
modes2 = ip.transverse_modes(c5)
t = ip.COULOMB_RATE / (c5.mass * (5e-6) ** 3)
exp_low = math.sqrt(c5.omega_x**2 - 2 * t)
print("2-ion modes:", modes2.omega_k, "expect", [c5.omega_x, exp_low])
print("COM vec:", modes2.b[:, 0])

# d=5 crystal: COM invariant + orthonormality
layout = build_layout(5)
cry = ip.crystal_from_layout(layout, 5e-6)
print("ions:", cry.n_ions)
modes = ip.transverse_modes(cry)
print("COM rel err:", abs(modes.omega_k[0] - cry.omega_x) / cry.omega_x)
print("COM vec uniform dev:", np.abs(modes.b[:, 0] - 1 / math.sqrt(49)).max())
print("orthonormal dev:", np.abs(modes.b.T @ modes.b - np.eye(49)).max())
print("bandwidth frac:", (modes.omega_k[0] - modes.omega_k[-1]) / cry.omega_x,
      "vs eps:", ip.epsilon_parameter(cry, 5e-6))

# alpha vs quadrature, random pulse incl. near-resonant mu
rng = np.random.default_rng(3)
n_seg = 7
tau = 50e-6
for trial in range(4):
    k_sel = rng.integers(0, 49)
    omega = modes.omega_k[k_sel]
    mu = omega + (rng.uniform(-1, 1) * [1e5, 1e3, 10, 0][trial])
    amps = rng.normal(0, 2 * math.pi * 50e3, size=n_seg)
    pulse = ip.PulseSequence(n_seg=n_seg, tau=tau, mu=mu, amplitudes={5: amps})
    alpha = ip.alpha_integrals(pulse, modes, ions=[5])

    def om_t(tt):
        m = min(int(tt / (tau / n_seg)), n_seg - 1)
        return amps[m]

    re = integrate.quad(lambda tt: om_t(tt) * math.sin(mu * tt) * math.cos(omega * tt),
                        0, tau, limit=800)[0]
    im = integrate.quad(lambda tt: om_t(tt) * math.sin(mu * tt) * math.sin(omega * tt),
                        0, tau, limit=800)[0]
    want = -1j * modes.eta_k[k_sel] * modes.b[5, k_sel] * (re + 1j * im)
    got = alpha[0, k_sel]
    print(f"alpha trial {trial}: rel err {abs(got - want) / (abs(want) + 1e-30):.2e}")

# theta vs 2D quadrature on a tiny 3-ion crystal
c3 = ip.IonCrystal(positions=[[0, 0], [5e-6, 0], [2.5e-6, 5e-6 * math.sqrt(3) / 2]])
m3 = ip.transverse_modes(c3)
n_seg = 5
tau3 = 20e-6
mu3 = (m3.omega_k[0] + m3.omega_k[1]) / 2
amps3 = {i: rng.normal(0, 2 * math.pi * 80e3, size=n_seg) for i in range(3)}
pulse3 = ip.PulseSequence(n_seg=n_seg, tau=tau3, mu=mu3, amplitudes=amps3)
theta = ip.theta_integrals(pulse3, m3)


def om_i(i, tt):
    m = min(int(tt / (tau3 / n_seg)), n_seg - 1)
    return amps3[i][m]


def theta_quad(i, j):
    tot = 0.0
    for k in range(3):
        def inner(tt):
            val = integrate.quad(
                lambda tp: om_i(j, tp) * math.sin(mu3 * tp) * math.sin(m3.omega_k[k] * (tt - tp)),
                0, tt, limit=400)[0]
            return om_i(i, tt) * math.sin(mu3 * tt) * val
        I1 = integrate.quad(inner, 0, tau3, limit=400)[0]

        def inner2(tt):
            val = integrate.quad(
                lambda tp: om_i(i, tp) * math.sin(mu3 * tp) * math.sin(m3.omega_k[k] * (tt - tp)),
                0, tt, limit=400)[0]
            return om_i(j, tt) * math.sin(mu3 * tt) * val
        I2 = integrate.quad(inner2, 0, tau3, limit=400)[0]
        tot += m3.eta_k[k] ** 2 * m3.b[i, k] * m3.b[j, k] * (I1 + I2)
    return tot


for (i, j) in [(0, 1), (0, 2), (1, 2)]:
    tq = theta_quad(i, j)
    print(f"theta[{i},{j}] closed={theta[i, j]:.6e} quad={tq:.6e} "
          f"rel={abs(theta[i, j] - tq) / (abs(tq) + 1e-30):.2e}")

# quadratic-form route equals prefix route
th2 = np.zeros((3, 3))
oms = np.asarray([amps3[i] for i in range(3)])
for k in range(3):
    G = ip.mode_quadratic_form(m3.omega_k[k:k + 1], mu3, tau3, n_seg)
    bb = m3.eta_k[k] ** 2 * np.outer(m3.b[:, k], m3.b[:, k])
    th2 += bb * (oms @ G @ oms.T)
np.fill_diagonal(th2, 0)
print("quadratic-form vs prefix:", np.abs(th2 - theta).max() / np.abs(theta).max())

# symmetry/scaling
pulse_s = ip.PulseSequence(n_seg=n_seg, tau=tau3, mu=mu3,
                           amplitudes={i: 2.0 * amps3[i] for i in range(3)})
theta_s = ip.theta_integrals(pulse_s, m3)
print("s^2 scaling dev:", np.abs(theta_s - 4 * theta).max() / np.abs(theta).max())
print("symmetric:", np.abs(theta - theta.T).max())

# infidelity formula
alpha0 = np.zeros((2, 3))
th = np.zeros((2, 2))
th[0, 1] = th[1, 0] = math.pi / 4 + 1e-3
dF = ip.gate_infidelity(alpha0, th, {(0, 1): math.pi / 4}, np.zeros(3))
print("dF =", dF, "expect", 0.8e-6)

# file round trip
import tempfile, os
with tempfile.TemporaryDirectory() as td:
    p = os.path.join(td, "pulse.txt")
    pulse3.save(p)
    back = ip.PulseSequence.load(p)
    same = (back.n_seg == pulse3.n_seg and back.tau == pulse3.tau
            and back.mu == pulse3.mu
            and all(np.array_equal(back.amplitudes[i], pulse3.amplitudes[i])
                    for i in range(3)))
    print("round trip bit-exact:", same)
