"""
Brute-force check
=================

Two qubits and one thermal mode, evolved exactly in a truncated Fock space,
against the closed-form map.
"""

import numpy as np

from spinboson import BathSpec, FockTruncation, LinearCoupling, SystemSpec, compare, thermal_cutoff

spec = SystemSpec(2, LinearCoupling([[0.3, -0.2]]), BathSpec.product([1.0], 0.5))
rng = np.random.default_rng(1)
a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
rho = a @ a.conj().T
rho /= np.trace(rho)

print("cutoff for tail mass 1e-10:", thermal_cutoff(0.5))
report = compare(spec, FockTruncation((40,)), rho, np.linspace(0, 20, 11))
for row in report.rows():
    print("t={:5.1f}  trace distance={:.1e}  mean dev={:.1e}  cov dev={:.1e}  leakage={:.1e}"
          .format(*row))
print("passed at 1e-6:", report.passed(1e-6))
