"""
What the bath sees
==================

The modes end up in a mixture of displaced states, one per spin
configuration, weighted by the initial populations. Coherences of the
qubits play no role.
"""

import numpy as np

from spinboson import (BathSpec, SystemSpec, boson_state, fully_connected_coupling,
                       magnetization, mixture_moments)

n, lam, omega = 3, 0.3, 1.0
spec = SystemSpec(n, fully_connected_coupling([lam], n), BathSpec.product([omega], 0.0))

# GHZ state: only M = +3 and M = -3 are populated
psi = np.zeros(2**n, dtype=complex)
psi[0] = psi[-1] = 1 / np.sqrt(2)
ghz = np.outer(psi, psi.conj())

for t in (0.0, np.pi / 2, np.pi, 2 * np.pi):
    mix = boson_state(spec, ghz, t)
    print(f"t={t:5.3f}  components={mix.n_components}")
    for w, mu in zip(mix.weights, mix.amplitudes[:, 0]):
        print(f"    weight={w:.3f}  mu={mu.real:+.4f}{mu.imag:+.4f}j")

# dropping the coherences changes nothing on the bath side
t = 1.1
a = mixture_moments(boson_state(spec, ghz, t))
b = mixture_moments(boson_state(spec, np.diag(np.diag(ghz)), t))
print("moment difference without coherences:",
      max(np.max(np.abs(a[0] - b[0])), np.max(np.abs(a[1] - b[1]))))
print("M values:", np.unique(magnetization(spec.basis)))
