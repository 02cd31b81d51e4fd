"""Linear couplings: boson-mediated Ising Lamb shift and pairwise dephasing.

With ``f_k(sigma) = sum_i lam[k, i] sigma_i`` the Lamb shift becomes
``W_t(sigma) = sum_ij W_ij(t) sigma_i sigma_j`` and the thermal decoherence
function ``Gamma_t = sum_ij Gamma_ij(t) d_i d_j`` with ``d = sigma' - sigma``.
Both sums run over all ordered pairs, diagonal included; the diagonal terms
of ``W`` only add a global phase since ``sigma_i^2 = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedVariantError, ValidationError
from .exponents import lamb_weights, thermal_weights
from .model import LinearCoupling, SystemSpec

GENERAL = "general"
SECTORIZED = "sectorized"
FULLY_CONNECTED = "fully_connected"


@dataclass(frozen=True)
class CouplingTopology:
    """Structural tag of a linear coupling matrix.

    ``modes_per_qubit`` is set for sectorized couplings, where qubit ``i``
    couples only to modes ``[i*m, (i+1)*m)``.
    """

    tag: str
    lam: np.ndarray
    modes_per_qubit: Optional[int] = None

    @property
    def uniform(self) -> bool:
        """Sectorized with identical per-qubit couplings, or fully connected."""
        if self.tag == FULLY_CONNECTED:
            return True
        if self.tag != SECTORIZED:
            return False
        m = self.modes_per_qubit
        blocks = [self.lam[i * m:(i + 1) * m, i] for i in range(self.lam.shape[1])]
        return all(np.array_equal(blocks[0], b) for b in blocks[1:])


def sectorized_coupling(per_qubit, n_qubits: int) -> LinearCoupling:
    """Coupling where every qubit has a private copy of the same ``m`` modes."""
    per_qubit = np.atleast_1d(np.asarray(per_qubit, dtype=float))
    m = per_qubit.size
    lam = np.zeros((m * n_qubits, n_qubits))
    for i in range(n_qubits):
        lam[i * m:(i + 1) * m, i] = per_qubit
    return LinearCoupling(lam)


def fully_connected_coupling(lam_k, n_qubits: int) -> LinearCoupling:
    """All qubits couple to every mode with strength ``lam_k``."""
    lam_k = np.atleast_1d(np.asarray(lam_k, dtype=float))
    return LinearCoupling(np.repeat(lam_k[:, None], n_qubits, axis=1))


def classify_topology(lam) -> CouplingTopology:
    """Detect sectorized and fully connected structure of a ``K x N`` matrix."""
    lam = np.asarray(lam, dtype=float)
    K, N = lam.shape
    if N > 1 and np.all(lam == lam[:, :1]):
        return CouplingTopology(FULLY_CONNECTED, lam)
    if K % N == 0:
        m = K // N
        mask = np.zeros_like(lam, dtype=bool)
        for i in range(N):
            mask[i * m:(i + 1) * m, i] = True
        if not np.any(lam[~mask]):
            return CouplingTopology(SECTORIZED, lam, m)
    return CouplingTopology(GENERAL, lam)


def _linear_lam(spec: SystemSpec) -> np.ndarray:
    if not isinstance(spec.coupling, LinearCoupling):
        raise UnsupportedVariantError("this operation needs a linear coupling")
    return spec.coupling.lam


def ising_lamb_matrix(spec: SystemSpec, t: float) -> np.ndarray:
    """``W_ij(t) = sum_k lam_ki lam_kj (sin w_k t - w_k t) / w_k^2``."""
    lam = _linear_lam(spec)
    return lam.T @ (lamb_weights(spec.bath.omega, t)[:, None] * lam)


def dephasing_matrix(spec: SystemSpec, t: float) -> np.ndarray:
    """``Gamma_ij(t) = sum_k lam_ki lam_kj coth(w_k/2T) (1 - cos w_k t) / w_k^2``."""
    lam = _linear_lam(spec)
    if not spec.bath.is_thermal:
        raise UnsupportedVariantError("the dephasing matrix needs a thermal product bath")
    return lam.T @ (thermal_weights(spec, t)[:, None] * lam)


def contract_flips(matrix, sigma, sigma_p):
    """``sum_ij M_ij d_i d_j`` with ``d = sigma' - sigma``."""
    d = np.asarray(sigma_p, dtype=float) - np.asarray(sigma, dtype=float)
    return np.einsum("...i,ij,...j->...", d, matrix, d)


def contract_spins(matrix, sigma):
    """``sum_ij M_ij sigma_i sigma_j``."""
    s = np.asarray(sigma, dtype=float)
    return np.einsum("...i,ij,...j->...", s, matrix, s)


def uniform_damping_scalar(spec: SystemSpec, t: float) -> float:
    """Per-qubit scalar ``Gamma(t)`` of uniform topologies.

    Fully connected: ``Gamma_t(sigma, sigma') = Gamma(t) (M' - M)^2``, the sum
    running over all K modes. Uniform sectorized: ``Gamma_t = Gamma(t) sum_i
    (sigma_i' - sigma_i)^2``, the sum running over one qubit's m modes.
    """
    topo = classify_topology(_linear_lam(spec))
    if not topo.uniform:
        raise ValidationError(
            "uniform damping scalar needs a fully connected or uniform sectorized coupling")
    g = dephasing_matrix(spec, t)
    return float(g[0, 0])


def uniform_lamb_scalar(spec: SystemSpec, t: float) -> float:
    """``W(t)`` with ``W_t(sigma) = W(t) M(sigma)^2`` for a fully connected coupling."""
    topo = classify_topology(_linear_lam(spec))
    if topo.tag != FULLY_CONNECTED and spec.n_qubits > 1:
        raise ValidationError("uniform Lamb scalar needs a fully connected coupling")
    return float(ising_lamb_matrix(spec, t)[0, 0])
