"""The exact dephasing map on qubit density matrices and coherence-order tools."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, InvalidStateError, ValidationError
from .exponents import displacement_weights, exponent_matrix, lamb_weights
from .model import MAX_DENSE_QUBITS, SystemSpec, enumerate_basis, magnetization

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


def check_density_matrix(rho, dim: Optional[int] = None, herm_tol=HERMITIAN_TOL,
                         trace_tol=TRACE_TOL, eig_floor=EIGENVALUE_FLOOR) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`InvalidStateError`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValidationError(f"density matrix has dimension {rho.shape[0]}, expected {dim}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise InvalidStateError(f"density matrix trace is {np.trace(rho).real:.15g}")
    lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lowest < eig_floor:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lowest:.3e}",
                                min_eigenvalue=float(lowest))
    return rho


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho, rho)))


def apply_map(spec: SystemSpec, rho, t: float, validate: bool = True) -> np.ndarray:
    """Exact reduced qubit state at time ``t``.

    Every element is multiplied by ``exp(Lambda_t)``; populations are left
    untouched. ``validate=False`` skips the input checks in hot loops.
    """
    if spec.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense maps are capped at {MAX_DENSE_QUBITS} qubits")
    if validate:
        rho = check_density_matrix(rho, spec.dim)
    else:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (spec.dim, spec.dim):
            raise ValidationError(f"density matrix must be {spec.dim}x{spec.dim}")
    factor = np.exp(exponent_matrix(spec, t))
    np.fill_diagonal(factor, 1.0)
    return rho * factor


def evolve(spec: SystemSpec, rho, times, validate: bool = True) -> np.ndarray:
    """Stack of :func:`apply_map` outputs over a time grid."""
    if validate:
        rho = check_density_matrix(rho, spec.dim)
    return np.stack([apply_map(spec, rho, t, validate=False) for t in np.atleast_1d(times)])


def lamb_hamiltonian_action(spec: SystemSpec, sigma, t: float):
    """Diagonal of the effective Lamb-shift Hamiltonian, ``W_t + Wd_t``, at ``sigma``.

    The reduced state equals ``exp(-i H) rho exp(i H)`` followed by pure
    damping, with ``H`` diagonal and given by this value.
    """
    f = spec.f_values(sigma)
    return (f**2) @ lamb_weights(spec.bath.omega, t) + f @ displacement_weights(spec, t)


# --- coherence orders --------------------------------------------------------------

@dataclass(frozen=True)
class CoherenceSector:
    """Ordered basis pairs ``(a, b)`` with ``M(b) - M(a) == delta_m``."""

    delta_m: int
    pairs: np.ndarray


def pair_delta_m(n_qubits: int) -> np.ndarray:
    """``M(sigma_b) - M(sigma_a)`` for all ordered pairs, shape ``(2^N, 2^N)``."""
    m = magnetization(enumerate_basis(n_qubits))
    return m[None, :] - m[:, None]


def coherence_sectors(n_qubits: int) -> list:
    """Partition of all ordered basis pairs by magnetization difference."""
    if n_qubits > MAX_DENSE_QUBITS // 2:
        raise CapacityError("coherence sectors enumerate 4^N pairs; N is capped at "
                            f"{MAX_DENSE_QUBITS // 2}")
    dm = pair_delta_m(n_qubits)
    sectors = []
    for value in range(-2 * n_qubits, 2 * n_qubits + 1, 2):
        a, b = np.nonzero(dm == value)
        sectors.append(CoherenceSector(value, np.column_stack([a, b])))
    return sectors


def sector_magnitudes(rho) -> dict:
    """Sum of ``|rho_ab|`` per coherence order (off-diagonal elements only).

    A bookkeeping aggregate, not a coherence measure.
    """
    rho = np.asarray(rho)
    n = int(np.log2(rho.shape[0]))
    dm = pair_delta_m(n)
    mag = np.abs(rho)
    np.fill_diagonal(mag, 0.0)
    return {int(v): float(mag[dm == v].sum()) for v in range(-2 * n, 2 * n + 1, 2)}


@dataclass(frozen=True)
class SectorProfile:
    """Decoherence function organized by coherence order.

    When ``collapsed`` is true, ``gamma[i]`` is the common value of every pair
    in sector ``delta_m[i]``. Otherwise one row per ordered pair is given and
    ``pairs`` holds the basis indices.
    """

    collapsed: bool
    delta_m: np.ndarray
    gamma: np.ndarray
    pairs: Optional[np.ndarray] = None


def sector_damping_profile(spec: SystemSpec, t: float, tol: float = 1e-12) -> SectorProfile:
    """Decoherence per coherence order, collapsed when it depends on ``delta M`` only.

    The collapse happens whenever every sector has a single value of
    ``Gamma`` to relative tolerance ``tol`` (the fully connected case);
    other couplings degrade to a per-pair table labelled by sector.
    """
    gamma = -exponent_matrix(spec, t).real
    dm = pair_delta_m(spec.n_qubits)
    values = np.arange(-2 * spec.n_qubits, 2 * spec.n_qubits + 1, 2)
    scale = max(float(np.max(np.abs(gamma))), np.finfo(float).tiny)
    collapsed = []
    for v in values:
        g = gamma[dm == v]
        if np.ptp(g) > tol * scale:
            break
        collapsed.append(float(np.mean(g)))
    else:
        return SectorProfile(True, values, np.array(collapsed))
    a, b = np.indices(gamma.shape)
    return SectorProfile(False, dm.ravel(), gamma.ravel(),
                         np.column_stack([a.ravel(), b.ravel()]))
