"""
Continuum bath
==============

Ohmic spectral density. The integral forms of W(t) and Gamma(t) are
compared with finite discretizations of increasing size.
"""

import numpy as np

from spinboson import Ohmic, convergence_study, damping_integral, lamb_integral, ramp_coefficient

J = Ohmic(eta=0.1, s=1.0, omega_c=1.0)
T = 1.0

t = np.array([0.5, 1.0, 2.0, 5.0, 10.0])
print("t      W(t)        Gamma(t)")
for s in t:
    print(f"{s:5.1f}  {lamb_integral(J, s):+.6f}  {damping_integral(J, T, s):.6f}")

# at T=0 and s=1 the damping grows like log(1 + t^2) without saturating
print("T=0 Gamma(100):", damping_integral(J, 0.0, 100.0), "vs", 0.05 * np.log1p(1e4))

# linear ramp of W at long times
print("W(1000)/1000 =", lamb_integral(J, 1000.0) / 1000.0, " -int J/w =", -ramp_coefficient(J))

# discretization error shrinks roughly fourfold per doubling
study = convergence_study(J, T, np.linspace(0, 10, 41), [200, 400, 800, 1600, 3200])
for K, dg, dw in zip(study.n_modes, study.max_damping_error, study.max_lamb_error):
    print(f"K={K:5d}  max|dGamma|={dg:.2e}  max|dW|={dw:.2e}")
