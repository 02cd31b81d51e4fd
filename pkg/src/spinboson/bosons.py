"""Bath-side evolution: a population-weighted mixture of displaced Gaussians.

Conditioned on spin configuration ``sigma`` the bath evolves under
``V(sigma)``, which rotates the initial Gaussian freely and displaces it by
``beta_k(sigma) = f_k(sigma) / w_k (e^{-i w_k t} - 1)``. Tracing out the qubits
weights each branch by the population ``<sigma|rho_S|sigma>``; coherences of
``rho_S`` never enter.

``beta`` is the Schrodinger-picture mean of ``b_k``. Its complex conjugate
appears in the qubit-side displacement amplitude ``mu_k`` because there the
bath is probed through ``exp(iV't) exp(-iVt)`` rather than evolved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import check_density_matrix
from .model import SystemSpec


@dataclass(frozen=True)
class BosonMixture:
    """``rho_B(t) = sum_j weights[j] D(amplitudes[j]) rho_free D(amplitudes[j])^dag``.

    Attributes
    ----------
    weights : ndarray, shape (M,)
        Branch probabilities, summing to one.
    amplitudes : ndarray, shape (M, K)
        Complex coherent displacements per mode.
    covariance : ndarray, shape (2K, 2K)
        Covariance of the freely evolved initial state, shared by all branches.
    free_means : ndarray, shape (2K,)
        First moments of the freely evolved initial state.
    f_values : ndarray, shape (M, K)
        Coupling values labelling each branch.
    """

    weights: np.ndarray
    amplitudes: np.ndarray
    covariance: np.ndarray
    free_means: np.ndarray
    f_values: np.ndarray
    time: float

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def displacements(self) -> np.ndarray:
        """Phase-space means ``(q1, p1, ...)`` of each branch; shape ``(M, 2K)``."""
        out = np.empty((self.n_components, 2 * self.amplitudes.shape[1]))
        out[:, 0::2] = np.sqrt(2) * self.amplitudes.real
        out[:, 1::2] = np.sqrt(2) * self.amplitudes.imag
        return out + self.free_means


def free_rotation(omega, t) -> np.ndarray:
    """Phase-space map of ``exp(-i w n t)``: ``q -> q cos + p sin``, ``p -> p cos - q sin``."""
    R = np.zeros((2 * len(omega),) * 2)
    for k, w in enumerate(omega):
        c, s = np.cos(w * t), np.sin(w * t)
        R[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[c, s], [-s, c]]
    return R


def _group_rows(values, weights):
    scale = max(float(np.max(np.abs(values))), 1.0)
    keys = np.round(values / scale, 12)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.ravel(inverse)
    summed = np.bincount(inverse, weights=weights, minlength=len(uniq))
    reps = np.array([values[np.flatnonzero(inverse == g)[0]] for g in range(len(uniq))])
    return reps, summed


def boson_state(spec: SystemSpec, rho_s, t: float, merge: bool = True) -> BosonMixture:
    """Bath state at time ``t`` for qubits starting in ``rho_s``.

    Branches with identical coupling values are merged (weights summed) and
    branches with zero population dropped, giving a canonical form.
    """
    rho_s = check_density_matrix(rho_s, spec.dim)
    pops = np.real(np.diag(rho_s)).copy()
    F = np.asarray(spec.coupling_table)
    keep = pops > 0
    F, pops = F[keep], pops[keep]
    if merge:
        F, pops = _group_rows(F, pops)
    w = spec.bath.omega
    amps = F / w * np.expm1(-1j * w * t)
    R = free_rotation(w, t)
    cov = R @ spec.bath.covariance_matrix @ R.T
    means = R @ spec.bath.means
    return BosonMixture(pops, amps, cov, means, F, float(t))


def mixture_moments(mixture: BosonMixture):
    """Total first moments and covariance of the mixture.

    The covariance is the shared branch covariance plus the weighted spread
    of the branch means.
    """
    d = mixture.displacements
    w = mixture.weights
    mean = w @ d
    spread = d - mean
    cov = mixture.covariance + (spread * w[:, None]).T @ spread
    return mean, cov
