"""Independent reference values frozen into the unit tests.

Plain numpy/scipy evaluations that share no code with the C++ library.
Run: python3 tools/oracles.py
"""
import numpy as np
from scipy import optimize

hbar = 1.05457e-34
mu_B = 9.27401e-24
a0 = 5.29177e-11
h = 6.62607e-34
amu = 1.66054e-27
m85 = 84.9118 * amu
m87 = 86.9092 * amu
G = 1e-4


def show(name, value):
    print(f"{name:40s} {value!r}")


def a_of_B(B, a_bg=-443 * a0, d=10.71 * G, B0=155.041 * G):
    return a_bg * (1 - d / (B - B0))


w70 = 2 * np.pi * 70
show("harmonic_length_85_70Hz_um", np.sqrt(hbar / (m85 * w70)) * 1e6)
show("harmonic_length_87_70Hz_um", np.sqrt(hbar / (m87 * w70)) * 1e6)
show("alpha_1e4_m30", 1e4 * -30 * a0 * np.sqrt(m85 * w70 / hbar))
show("alpha_1p5e4_m30", 1.5e4 * -30 * a0 * np.sqrt(m85 * w70 / hbar))
show("a_at_165p75_a0", a_of_B(165.75 * G) / a0)
B_m30 = optimize.brentq(lambda B: a_of_B(B) + 30 * a0, 160 * G, 170 * G, xtol=1e-20, rtol=1e-15)
show("B_for_m30_G", B_m30 / G)
curv = -103e-3 * G / 1e-6
w2 = mu_B * (-1 / 3) * (-2) / m85 * curv
show("omega_z_sq_m103", w2)
show("omega_z_hz_m103", np.sqrt(-w2) / (2 * np.pi))
show("rf_165p776_MHz", mu_B * 0.5 * 165.776 * G / h / 1e6)
show("g1d_m30_70Hz", 2 * hbar * w70 * -30 * a0)

# variational surface
alpha = 1.5e4 * -30 * a0 * np.sqrt(m85 * w70 / hbar)
lam2 = -(1 / 70) ** 2


def eps(x, al=alpha, l2=lam2):
    r, z = x
    return 1 / (2 * r**2) + r**2 / 2 + 1 / (6 * z**2) + np.pi**2 / 24 * l2 * z**2 + al / (3 * r**2 * z)


def grad_fd(x, al=alpha, l2=lam2, step=1e-6):
    g = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = step * max(1.0, abs(x[i]))
        g.append((eps(x + e, al, l2) - eps(x - e, al, l2)) / (2 * e[i]))
    return np.array(g)


sol = optimize.root(lambda x: grad_fd(np.array(x)), [1.0, 30.0], tol=1e-14)
r_s, z_s = sol.x
show("saddle_gamma_rho", r_s)
show("saddle_gamma_z", z_s)
show("saddle_energy", eps(sol.x))
H = np.zeros((2, 2))
st = 1e-4
for i in range(2):
    for j in range(2):
        ei = np.zeros(2); ei[i] = st * sol.x[i]
        ej = np.zeros(2); ej[j] = st * sol.x[j]
        H[i, j] = (eps(sol.x + ei + ej) - eps(sol.x + ei - ej) - eps(sol.x - ei + ej) + eps(sol.x - ei - ej)) / (4 * ei[i] * ej[j])
show("saddle_hessian_eigs", tuple(np.linalg.eigvalsh(H)))
show("grad_at_0p9_40", tuple(grad_fd(np.array([0.9, 40.0]))))
show("l_z_saddle_um", z_s * np.sqrt(hbar / (m85 * w70)) * 1e6)
l2t = (1 / 70) ** 2
show("alpha0_trapped_gamma_z", (4 / (np.pi**2 * l2t)) ** 0.25)

# grid oracle: min gradient-norm cell on 400x400 over [0.5,1.5]x[5,100]
rr = np.linspace(0.5, 1.5, 400)
zz = np.linspace(5, 100, 400)
R, Z = np.meshgrid(rr, zz, indexing="ij")
gr = -1 / R**3 + R - 2 * alpha / (3 * R**3 * Z)
gz = -1 / (3 * Z**3) + np.pi**2 / 12 * lam2 * Z - alpha / (3 * R**2 * Z**2)
k = np.unravel_index(np.argmin(np.hypot(gr, gz)), gr.shape)
show("grid_oracle_cell", (rr[k[0]], zz[k[1]]))

# 1D soliton
sig = np.sqrt(hbar / (m85 * w70))
l = sig**2 / (1e4 * 2.5 * a0)
show("soliton_l_N1e4_m2p5_um", l * 1e6)
show("sech_rms_factor", np.pi / np.sqrt(12))

# Bragg kinematics
k = 2 * np.pi / 780e-9
show("k_lattice", k)
show("delta_v_mm_s", 2 * hbar * k / m85 * 1e3)
show("phase_5p2e-2_1ms", 2 * k * 5.2e-2 * 1e-6)
