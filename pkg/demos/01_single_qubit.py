"""
Single qubit dephasing
======================

One qubit coupled linearly to one thermal mode. The coherence decays as
exp(-Gamma) and fully recoheres at every bath period.
"""

import numpy as np

from spinboson import BathSpec, LinearCoupling, SystemSpec, apply_map, damping

lam, omega, T = 0.5, 1.0, 1.0
spec = SystemSpec(1, LinearCoupling([[lam]]), BathSpec.thermal([omega], T))
rho = np.full((2, 2), 0.5, dtype=complex)

# closed form for the exponent
t = np.linspace(0, 4 * np.pi, 9)
gamma = 4 * lam**2 / omega**2 / np.tanh(omega / (2 * T)) * (1 - np.cos(omega * t))

# engine value for the (up, down) pair
up, down = np.array([1]), np.array([-1])
engine = np.array([damping(spec, up, down, s) for s in t])
print("max |engine - closed form|:", np.max(np.abs(engine - gamma)))

# |rho_01| follows exp(-Gamma), with recoherence at t = 2 pi / omega
for s, g in zip(t, gamma):
    out = apply_map(spec, rho, s)
    print(f"t={s:6.3f}  |rho_01|={abs(out[0, 1]):.6f}  0.5 exp(-Gamma)={0.5 * np.exp(-g):.6f}")
