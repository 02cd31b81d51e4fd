"""System and bath specification for N qubits dephasing through K bosonic modes.

Spin configurations follow the convention ``|0> <-> sigma = +1`` and
``|1> <-> sigma = -1``. Qubit 0 is the most significant bit of the basis
index, so the basis ordering agrees with ``np.kron`` of single-qubit states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, UnsupportedVariantError, ValidationError

#: Hard cap on qubit number for operations that build dense 2^N objects.
MAX_DENSE_QUBITS = 20


# --- spin basis ---------------------------------------------------------------

def enumerate_basis(n_qubits: int, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
    """All spin configurations in basis-index order.

    Returns an integer array of shape ``(2**N, N)`` with entries +1/-1. Row
    ``b`` holds the configuration whose bit ``i`` (counted from the most
    significant end) is 0 exactly when ``sigma_i = +1``.
    """
    n = int(n_qubits)
    if n < 1 or n > max_qubits:
        raise CapacityError(f"n_qubits={n_qubits} outside [1, {max_qubits}]")
    idx = np.arange(2**n)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    bits = (idx >> shifts) & 1
    return (1 - 2 * bits).astype(np.int64)


def basis_index(sigma) -> int:
    """Basis index of a spin configuration (inverse of :func:`spin_config`)."""
    s = np.asarray(sigma)
    _check_spins(s)
    index = 0
    for si in s:
        index = (index << 1) | int(si == -1)
    return index


def spin_config(index: int, n_qubits: int) -> np.ndarray:
    """Spin configuration with the given basis index."""
    if not 0 <= index < 2**n_qubits:
        raise ValueError(f"index {index} out of range for N={n_qubits}")
    bits = (index >> np.arange(n_qubits - 1, -1, -1)) & 1
    return (1 - 2 * bits).astype(np.int64)


def magnetization(sigma) -> np.ndarray:
    """Total magnetization, the sum of spins along the last axis."""
    s = np.asarray(sigma)
    return s.sum(axis=-1)


def _check_spins(s):
    if not np.all((s == 1) | (s == -1)):
        raise ValidationError("spin configurations must contain only +1 and -1")


# --- couplings ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearCoupling:
    """Linear coupling ``f_k(sigma) = sum_i lam[k, i] * sigma_i``.

    Parameters
    ----------
    lam : array_like, shape (K, N)
        Coupling strengths in energy units.
    """

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 2 or lam.size == 0:
            raise ValidationError("linear coupling must be a non-empty K x N matrix")
        if not np.all(np.isfinite(lam)):
            raise ValidationError("coupling strengths must be finite")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def n_modes(self) -> int:
        return self.lam.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.lam.shape[1]

    def values(self, sigmas) -> np.ndarray:
        """``f_k`` for each configuration; shape ``(..., K)``."""
        return np.asarray(sigmas, dtype=float) @ self.lam.T

    def to_polynomial(self) -> "PolynomialCoupling":
        terms = [
            [(float(c), (i,)) for i, c in enumerate(row) if c != 0.0]
            for row in self.lam
        ]
        return PolynomialCoupling(terms, n_qubits=self.n_qubits)


def _reduce_monomials(terms, n_qubits):
    """Collapse repeated indices (sigma^2 = 1) and merge equal supports."""
    merged = {}
    for coef, support in terms:
        counts = {}
        for i in support:
            i = int(i)
            if not 0 <= i < n_qubits:
                raise ValidationError(f"monomial index {i} out of range for N={n_qubits}")
            counts[i] = counts.get(i, 0) + 1
        key = tuple(sorted(i for i, c in counts.items() if c % 2 == 1))
        merged[key] = merged.get(key, 0.0) + float(coef)
    return tuple((c, s) for s, c in merged.items() if c != 0.0)


@dataclass(frozen=True, eq=False)
class PolynomialCoupling:
    """Coupling given as a sum of Pauli-Z monomials for each mode.

    ``terms[k]`` is a sequence of ``(coefficient, support)`` pairs, the
    monomial being ``coefficient * prod(sigma_i for i in support)``. An empty
    support is a constant offset. Repeated indices are reduced on
    construction.
    """

    terms: Sequence
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be positive")
        if len(self.terms) == 0:
            raise ValidationError("polynomial coupling needs at least one mode")
        reduced = tuple(_reduce_monomials(mode, self.n_qubits) for mode in self.terms)
        object.__setattr__(self, "terms", reduced)

    @property
    def n_modes(self) -> int:
        return len(self.terms)

    def values(self, sigmas) -> np.ndarray:
        s = np.asarray(sigmas, dtype=float)
        out = np.zeros(s.shape[:-1] + (self.n_modes,))
        for k, mode in enumerate(self.terms):
            for coef, support in mode:
                if support:
                    out[..., k] += coef * np.prod(s[..., list(support)], axis=-1)
                else:
                    out[..., k] += coef
        return out


Coupling = Union[LinearCoupling, PolynomialCoupling]


def eval_coupling(coupling: Coupling, k: int, sigma) -> float:
    """Value of ``f_k`` at a single spin configuration."""
    if not 0 <= k < coupling.n_modes:
        raise IndexError(f"mode index {k} out of range [0, {coupling.n_modes})")
    s = np.asarray(sigma)
    if s.shape != (coupling.n_qubits,):
        raise IndexError(f"expected {coupling.n_qubits} spins, got shape {s.shape}")
    _check_spins(s)
    return float(coupling.values(s)[k])


# --- bath -----------------------------------------------------------------------

def coth_half(omega, temperature) -> np.ndarray:
    """``coth(omega / 2T)`` with a zero-temperature limit and stable extremes."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return np.ones_like(omega)
    if not np.isfinite(temperature):
        raise ValidationError("infinite temperature makes the dephasing divergent")
    x = omega / (2.0 * temperature)
    out = np.empty_like(x)
    big = x > 30.0
    small = x < 1e-8
    mid = ~(big | small)
    out[big] = 1.0
    out[small] = 1.0 / x[small] + x[small] / 3.0
    out[mid] = 1.0 / np.tanh(x[mid])
    return out


def bose_einstein(omega, temperature) -> np.ndarray:
    """Thermal occupation ``1 / (exp(omega/T) - 1)``; zero at ``T = 0``."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return np.zeros_like(omega)
    if not np.isfinite(temperature):
        raise ValidationError("infinite temperature makes the dephasing divergent")
    return 1.0 / np.expm1(omega / temperature)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ``[[0, 1], [-1, 0]]`` form for ordering (q1, p1, q2, p2, ...)."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def check_covariance(cov, atol=1e-10):
    """Raise unless ``cov`` is a bona fide quantum covariance matrix.

    Vacuum is ``I/2`` in this convention; the uncertainty principle reads
    ``cov + (i/2) Omega >= 0``.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValidationError(f"covariance must be 2K x 2K, got {cov.shape}")
    if not np.allclose(cov, cov.T, atol=atol, rtol=0):
        raise ValidationError("covariance matrix is not symmetric")
    omega = symplectic_form(cov.shape[0] // 2)
    lowest = np.linalg.eigvalsh(cov + 0.5j * omega)[0]
    if lowest < -atol:
        raise ValidationError(
            f"covariance violates the uncertainty principle (eigenvalue {lowest:.3e})"
        )


@dataclass(frozen=True, eq=False)
class BathSpec:
    """Mode frequencies and Gaussian initial state of the bosons.

    Use the constructors :meth:`thermal`, :meth:`squeezed_thermal`,
    :meth:`product` or :meth:`gaussian` rather than the raw initializer.

    A *product* bath has per-mode occupation ``nbar`` and real squeezing
    ``squeezing``, with mode covariance ``(nbar + 1/2) diag(e^{2z}, e^{-2z})``.
    A *gaussian* bath carries a full ``2K x 2K`` covariance and first moments.
    """

    omega: np.ndarray
    temperature: Optional[float] = None
    nbar: Optional[np.ndarray] = None
    squeezing: Optional[np.ndarray] = None
    covariance: Optional[np.ndarray] = None
    first_moments: Optional[np.ndarray] = None

    def __post_init__(self):
        omega = np.atleast_1d(np.array(self.omega, dtype=float))
        if omega.ndim != 1 or omega.size == 0:
            raise ValidationError("omega must be a non-empty vector")
        if not np.all(np.isfinite(omega)) or np.any(omega <= 0):
            raise ValidationError("all mode frequencies must be positive and finite")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        K = omega.size

        if self.temperature is not None:
            T = float(self.temperature)
            if T < 0 or np.isnan(T):
                raise ValidationError("temperature must be non-negative")
            if np.isinf(T):
                raise ValidationError("infinite temperature makes the dephasing divergent")
            object.__setattr__(self, "temperature", T)

        if self.covariance is not None:
            if self.nbar is not None or self.squeezing is not None:
                raise ValidationError("give either a covariance matrix or nbar/squeezing")
            cov = np.array(self.covariance, dtype=float)
            if cov.shape != (2 * K, 2 * K):
                raise ValidationError(f"covariance must be {2 * K}x{2 * K}, got {cov.shape}")
            check_covariance(cov)
            cov = 0.5 * (cov + cov.T)
            cov.setflags(write=False)
            object.__setattr__(self, "covariance", cov)
            means = np.zeros(2 * K) if self.first_moments is None else np.array(
                self.first_moments, dtype=float)
            if means.shape != (2 * K,):
                raise ValidationError(f"first_moments must have length {2 * K}")
            means.setflags(write=False)
            object.__setattr__(self, "first_moments", means)
            return

        if self.first_moments is not None:
            raise ValidationError("first moments require the general Gaussian variant")
        if self.nbar is None:
            if self.temperature is None:
                raise ValidationError("a product bath needs nbar or a temperature")
            nbar = bose_einstein(omega, self.temperature)
        else:
            nbar = np.broadcast_to(np.array(self.nbar, dtype=float), (K,)).copy()
        if np.any(nbar < 0) or not np.all(np.isfinite(nbar)):
            raise ValidationError("occupations must be finite and non-negative")
        z = np.zeros(K) if self.squeezing is None else np.broadcast_to(
            np.array(self.squeezing, dtype=float), (K,)).copy()
        if not np.all(np.isfinite(z)):
            raise ValidationError("squeezing must be finite")
        for arr in (nbar, z):
            arr.setflags(write=False)
        object.__setattr__(self, "nbar", nbar)
        object.__setattr__(self, "squeezing", z)

    # constructors
    @classmethod
    def thermal(cls, omega, temperature) -> "BathSpec":
        return cls(omega=omega, temperature=temperature)

    @classmethod
    def squeezed_thermal(cls, omega, temperature, squeezing) -> "BathSpec":
        return cls(omega=omega, temperature=temperature, squeezing=squeezing)

    @classmethod
    def product(cls, omega, nbar, squeezing=0.0) -> "BathSpec":
        return cls(omega=omega, nbar=nbar, squeezing=squeezing)

    @classmethod
    def gaussian(cls, omega, covariance, first_moments=None) -> "BathSpec":
        return cls(omega=omega, covariance=covariance, first_moments=first_moments)

    @property
    def n_modes(self) -> int:
        return self.omega.size

    @property
    def is_product(self) -> bool:
        return self.covariance is None

    @property
    def is_thermal(self) -> bool:
        """Product bath without squeezing (any occupation)."""
        return self.is_product and not np.any(self.squeezing)

    @cached_property
    def occupation_factor(self) -> np.ndarray:
        """``2 nbar + 1`` per mode, i.e. ``coth(omega / 2T)`` for a thermal bath."""
        if not self.is_product:
            raise UnsupportedVariantError("occupation factor is defined for product baths only")
        if self.temperature is not None and self.nbar is not None:
            # nbar was derived from T; take coth directly for accuracy
            if np.allclose(self.nbar, bose_einstein(self.omega, self.temperature), rtol=0, atol=0):
                return coth_half(self.omega, self.temperature)
        return 2.0 * self.nbar + 1.0

    @cached_property
    def covariance_matrix(self) -> np.ndarray:
        """Full ``2K x 2K`` covariance (vacuum = I/2)."""
        if self.covariance is not None:
            return self.covariance
        diag = np.empty(2 * self.n_modes)
        half = 0.5 * self.occupation_factor
        diag[0::2] = half * np.exp(2 * self.squeezing)
        diag[1::2] = half * np.exp(-2 * self.squeezing)
        return np.diag(diag)

    @property
    def means(self) -> np.ndarray:
        """First moments ``(<q1>, <p1>, ...)``; zero for product baths."""
        if self.first_moments is None:
            return np.zeros(2 * self.n_modes)
        return self.first_moments

    @property
    def has_displacement(self) -> bool:
        return self.first_moments is not None and bool(np.any(self.first_moments))


# --- full system ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SystemSpec:
    """N qubits, their coupling functions, the bath and an optional diagonal H_S.

    Parameters
    ----------
    n_qubits : int
    coupling : LinearCoupling or PolynomialCoupling
    bath : BathSpec
    hs_energies : array_like or callable, optional
        Diagonal qubit energies ``E(sigma)``, either a length ``2**N`` vector in
        basis order or a function of a spin configuration. When absent the
        dynamics are in the interaction picture.
    """

    n_qubits: int
    coupling: Coupling
    bath: BathSpec
    hs_energies: Optional[Union[np.ndarray, Callable]] = field(default=None)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be positive")
        if self.coupling.n_qubits != self.n_qubits:
            raise ValidationError(
                f"coupling acts on {self.coupling.n_qubits} qubits, spec has {self.n_qubits}")
        if self.coupling.n_modes != self.bath.n_modes:
            raise ValidationError(
                f"coupling has {self.coupling.n_modes} modes, bath has {self.bath.n_modes}")

    @property
    def n_modes(self) -> int:
        return self.bath.n_modes

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @cached_property
    def basis(self) -> np.ndarray:
        return enumerate_basis(self.n_qubits)

    @cached_property
    def coupling_table(self) -> np.ndarray:
        """``f_k(sigma)`` for every basis state; shape ``(2**N, K)``."""
        table = self.coupling.values(self.basis)
        table.setflags(write=False)
        return table

    @cached_property
    def energies(self) -> Optional[np.ndarray]:
        if self.hs_energies is None:
            return None
        if callable(self.hs_energies):
            e = np.array([float(self.hs_energies(s)) for s in self.basis])
        else:
            e = np.array(self.hs_energies, dtype=float)
        if e.shape != (self.dim,):
            raise ValidationError(f"hs_energies must have length {self.dim}")
        return e

    def f_values(self, sigma) -> np.ndarray:
        """``f_k`` for one configuration or a stack of them."""
        s = np.asarray(sigma)
        if s.shape[-1] != self.n_qubits:
            raise IndexError(f"expected {self.n_qubits} spins per configuration")
        _check_spins(s)
        return self.coupling.values(s)
