"""
Bath-induced Ising interaction
==============================

The Lamb-shift part of the exponent acts like a time-dependent Ising
Hamiltonian sum_ij W_ij(t) s_i s_j. Its matrix is read off directly.
"""

import numpy as np

from spinboson import (BathSpec, LinearCoupling, SystemSpec, contract_spins,
                       dephasing_matrix, ising_lamb_matrix, lamb_shift_W)

# two modes, three qubits, random couplings
rng = np.random.default_rng(0)
spec = SystemSpec(3, LinearCoupling(rng.normal(scale=0.3, size=(2, 3))),
                  BathSpec.thermal([0.9, 1.6], 0.4))

for t in (0.5, 2.0, 8.0):
    W = ising_lamb_matrix(spec, t)
    G = dephasing_matrix(spec, t)
    print(f"t = {t}")
    print("  W_ij\n", np.array2string(W, precision=4))
    print("  Gamma_ij\n", np.array2string(G, precision=4))

# the contraction reproduces the exponent on every basis state
t = 2.0
basis = spec.basis
quadratic = contract_spins(ising_lamb_matrix(spec, t), basis)
print("max |s W s - W(s)|:", np.max(np.abs(quadratic - lamb_shift_W(spec, basis, t))))
