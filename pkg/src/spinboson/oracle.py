"""Brute-force validator in a truncated Fock space.

The full Hamiltonian ``V = sum_k [w_k n_k + f_k(sigma_z)(b_k + b_k^dag)]`` is
block diagonal in the spin basis. Each block is diagonalized once and the
joint state is propagated exactly, so the only approximation is the Fock
cutoff, which is monitored through the population left in the top level.

Nothing here imports the closed-form engine except :func:`compare`, which
needs it to produce the comparison.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import CapacityError, ValidationError
from .model import BathSpec, SystemSpec, symplectic_form

DEFAULT_MAX_DIM = 200_000
DEFAULT_LEAKAGE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class FockTruncation:
    """Per-mode Fock cutoffs ``n_max``; each mode keeps levels ``0..n_max``."""

    cutoffs: tuple
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in np.atleast_1d(self.cutoffs))
        if any(c < 1 for c in cutoffs):
            raise ValidationError("Fock cutoffs must be at least 1")
        object.__setattr__(self, "cutoffs", cutoffs)

    @classmethod
    def uniform(cls, n_modes, cutoff, max_dim=DEFAULT_MAX_DIM):
        return cls((cutoff,) * n_modes, max_dim)

    @property
    def bath_dim(self) -> int:
        return int(np.prod([c + 1 for c in self.cutoffs]))

    def total_dim(self, n_qubits: int) -> int:
        return 2**n_qubits * self.bath_dim

    def check(self, spec: SystemSpec):
        if len(self.cutoffs) != spec.n_modes:
            raise ValidationError(
                f"{len(self.cutoffs)} cutoffs given for {spec.n_modes} modes")
        dim = self.total_dim(spec.n_qubits)
        if dim > self.max_dim:
            raise CapacityError(
                f"oracle dimension {dim} exceeds cap {self.max_dim}; "
                "lower the cutoffs or the number of qubits/modes")


def thermal_cutoff(nbar: float, tail: float = 1e-10) -> int:
    """Smallest ``n_max`` whose Boltzmann tail mass beyond ``n_max`` is below ``tail``."""
    if nbar <= 0:
        return 1
    ratio = nbar / (nbar + 1.0)
    return max(1, int(np.ceil(np.log(tail) / np.log(ratio))) - 1)


# --- operators ------------------------------------------------------------------

def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def _embed(op, mode, dims):
    out = np.array([[1.0]])
    for k, d in enumerate(dims):
        out = np.kron(out, op if k == mode else np.eye(d))
    return out


def mode_operators(trunc: FockTruncation):
    """Annihilation operators of every mode on the product Fock space."""
    dims = [c + 1 for c in trunc.cutoffs]
    return [_embed(annihilation(c), k, dims) for k, c in enumerate(trunc.cutoffs)]


def quadrature_operators(trunc: FockTruncation):
    """``[q1, p1, q2, p2, ...]`` with ``q = (b + b^dag)/sqrt2``, ``p = i(b^dag - b)/sqrt2``."""
    ops = []
    for b in mode_operators(trunc):
        bd = b.conj().T
        ops.append((b + bd) / np.sqrt(2))
        ops.append(1j * (bd - b) / np.sqrt(2))
    return ops


# --- Hamiltonian ------------------------------------------------------------------

def hamiltonian_blocks(spec: SystemSpec, trunc: FockTruncation):
    """Dense bath Hamiltonians ``V(sigma)``, one per basis state."""
    trunc.check(spec)
    bs = mode_operators(trunc)
    free = sum(w * (b.conj().T @ b) for w, b in zip(spec.bath.omega, bs))
    xs = [b + b.conj().T for b in bs]
    blocks = []
    for fvals in spec.coupling_table:
        h = free.copy()
        for f, x in zip(fvals, xs):
            h = h + f * x
        blocks.append(h)
    return blocks


def build_hamiltonian(spec: SystemSpec, trunc: FockTruncation) -> sp.csr_matrix:
    """Full interaction Hamiltonian on spin (major) x Fock (minor) space."""
    return sp.block_diag(hamiltonian_blocks(spec, trunc), format="csr")


# --- initial bath states -------------------------------------------------------------

def _thermal_mode(nbar, cutoff):
    n = np.arange(cutoff + 1)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)
    return np.diag(p / p.sum()), 1.0 - p.sum()


def _squeezed_mode(nbar, z, cutoff, pad=60):
    """Squeeze a thermal state in an enlarged space, then project back.

    The squeeze operator is chosen so that ``Var(q) = (nbar + 1/2) e^{2z}``.
    Returns the renormalized state and the norm lost by the projection.
    """
    big = cutoff + pad
    rho, _ = _thermal_mode(nbar, big)
    b = annihilation(big)
    gen = 0.5 * z * (b @ b - b.conj().T @ b.conj().T)
    S = sla.expm(-gen)
    rho = S @ rho @ S.conj().T
    rho = rho[: cutoff + 1, : cutoff + 1]
    kept = np.trace(rho).real
    return rho / kept, 1.0 - kept


def _gibbs_from_covariance(cov, means, trunc):
    """Gaussian state as a Gibbs state of a quadratic Hamiltonian.

    For ``rho ~ exp(-H)`` with ``H = 1/2 (r - m)^T G (r - m)`` the covariance
    is ``1/2 coth(i Omega G / 2) i Omega``; this is inverted for ``G``.
    Requires a strictly mixed state (all symplectic eigenvalues > 1/2).
    """
    K = cov.shape[0] // 2
    om = symplectic_form(K)
    a = 2j * cov @ om  # = coth(i Omega G / 2)
    vals, vecs = np.linalg.eig(a)
    if np.min(np.abs(vals.real)) <= 1.0 + 1e-9:
        raise ValidationError("Gibbs synthesis needs a strictly mixed Gaussian state")
    arccoth = 0.5 * np.log((vals + 1.0) / (vals - 1.0))
    A = 2.0 * vecs @ np.diag(arccoth) @ np.linalg.inv(vecs)  # = i Omega G
    G = (1j * om @ A).real  # (i Omega)^-1 = i Omega
    G = 0.5 * (G + G.T)
    r = quadrature_operators(trunc)
    dim = r[0].shape[0]
    shifted = [ri - mi * np.eye(dim) for ri, mi in zip(r, means)]
    H = np.zeros((dim, dim), dtype=complex)
    for i in range(2 * K):
        for j in range(2 * K):
            if G[i, j] != 0:
                H += 0.5 * G[i, j] * (shifted[i] @ shifted[j])
    H = 0.5 * (H + H.conj().T)
    e, v = np.linalg.eigh(H)
    w = np.exp(-(e - e[0]))
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


@dataclass
class BathState:
    """Initial bath density matrix in the truncated Fock space."""

    rho: np.ndarray
    norm_deficit: float = 0.0


def bath_fock_state(bath: BathSpec, trunc: FockTruncation) -> BathState:
    """Synthesize the bath's initial Gaussian state in the Fock basis."""
    if len(trunc.cutoffs) != bath.n_modes:
        raise ValidationError("cutoff count does not match bath modes")
    if bath.is_product:
        rho = np.array([[1.0 + 0j]])
        deficit = 0.0
        for nbar, z, c in zip(bath.nbar, bath.squeezing, trunc.cutoffs):
            if z == 0:
                m, d = _thermal_mode(nbar, c)
            else:
                m, d = _squeezed_mode(nbar, z, c)
            rho = np.kron(rho, m)
            deficit += d
        return BathState(rho.astype(complex), deficit)
    rho = _gibbs_from_covariance(bath.covariance, bath.means, trunc)
    return BathState(rho.astype(complex), 0.0)


def bath_moments(rho_b: np.ndarray, trunc: FockTruncation):
    """First moments and covariance of a Fock-space bath state."""
    r = [sp.csr_matrix(ri) for ri in quadrature_operators(trunc)]
    # tr(rho A B) = sum((A^T rho^T)^T * B) with A rho evaluated sparse-dense
    left = [(ri.T @ rho_b.T).T for ri in r]  # rho @ r_i
    means = np.array([np.trace(li).real for li in left])
    n = len(r)
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            second = (r[j].multiply(left[i].T).sum() + r[i].multiply(left[j].T).sum()).real
            cov[i, j] = cov[j, i] = 0.5 * second - means[i] * means[j]
    return means, cov


def top_level_population(rho_b: np.ndarray, trunc: FockTruncation) -> float:
    """Largest marginal population in any mode's highest retained level."""
    dims = [c + 1 for c in trunc.cutoffs]
    diag = np.real(np.diag(rho_b)).reshape(dims)
    worst = 0.0
    for k in range(len(dims)):
        marginal = np.moveaxis(diag, k, 0).reshape(dims[k], -1).sum(axis=1)
        worst = max(worst, float(marginal[-1]))
    return worst


# --- evolution -----------------------------------------------------------------------

@dataclass
class JointState:
    """Evolved joint state stored as ``rho_S[s, s'] * U_s rho_B U_s'^dag`` blocks."""

    rho_s0: np.ndarray
    rho_b0: np.ndarray
    unitaries: list
    trunc: FockTruncation

    def reduced_system(self) -> np.ndarray:
        D = self.rho_s0.shape[0]
        out = np.empty((D, D), dtype=complex)
        evolved = [u @ self.rho_b0 for u in self.unitaries]
        for a in range(D):
            for b in range(D):
                # tr(U_a rho_B U_b^dag)
                out[a, b] = self.rho_s0[a, b] * np.vdot(self.unitaries[b], evolved[a])
        return out

    def reduced_bath(self) -> np.ndarray:
        p = np.real(np.diag(self.rho_s0))
        out = np.zeros_like(self.rho_b0)
        for w, u in zip(p, self.unitaries):
            if w != 0:
                out += w * (u @ self.rho_b0 @ u.conj().T)
        return out

    def matrix(self) -> np.ndarray:
        """Dense joint density matrix (small cases only)."""
        D = self.rho_s0.shape[0]
        rows = []
        for a in range(D):
            left = self.unitaries[a] @ self.rho_b0
            rows.append([self.rho_s0[a, b] * left @ self.unitaries[b].conj().T
                         for b in range(D)])
        return np.block(rows)

    def leakage(self) -> float:
        return top_level_population(self.reduced_bath(), self.trunc)


@dataclass
class BlockPropagator:
    """Eigendecompositions of the spin blocks, reusable across times."""

    energies: list
    vectors: list

    @classmethod
    def from_spec(cls, spec, trunc):
        es, vs = [], []
        for h in hamiltonian_blocks(spec, trunc):
            e, v = np.linalg.eigh(h)
            es.append(e)
            vs.append(v)
        return cls(es, vs)

    def unitaries(self, t: float):
        return [(v * np.exp(-1j * e * t)) @ v.conj().T
                for e, v in zip(self.energies, self.vectors)]


def evolve_exact(spec: SystemSpec, trunc: FockTruncation, rho_s, bath_state=None,
                 t: float = 0.0, propagator: Optional[BlockPropagator] = None) -> JointState:
    """Exact ``e^{-iVt} (rho_S x rho_B) e^{iVt}`` in the truncated space."""
    trunc.check(spec)
    rho_s = np.asarray(rho_s, dtype=complex)
    if rho_s.shape != (spec.dim, spec.dim):
        raise ValidationError(f"rho_S must be {spec.dim}x{spec.dim}")
    if bath_state is None:
        bath_state = bath_fock_state(spec.bath, trunc)
    if propagator is None:
        propagator = BlockPropagator.from_spec(spec, trunc)
    return JointState(rho_s, bath_state.rho, propagator.unitaries(t), trunc)


# --- comparison ----------------------------------------------------------------------

def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b`` for Hermitian arguments."""
    diff = np.asarray(a) - np.asarray(b)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


@dataclass
class ComparisonReport:
    """Oracle-versus-engine deviations on a time grid."""

    times: np.ndarray
    trace_distance: np.ndarray
    mean_deviation: np.ndarray
    covariance_deviation: np.ndarray
    leakage: np.ndarray
    norm_deficit: float
    warnings: list = field(default_factory=list)

    @property
    def max_trace_distance(self) -> float:
        return float(np.max(self.trace_distance))

    @property
    def max_leakage(self) -> float:
        return float(np.max(self.leakage))

    def passed(self, tolerance: float) -> bool:
        return self.max_trace_distance <= tolerance

    def columns(self):
        return ["t", "trace_distance", "mean_deviation", "covariance_deviation", "leakage"]

    def rows(self):
        return np.column_stack([self.times, self.trace_distance, self.mean_deviation,
                                self.covariance_deviation, self.leakage])


def compare(spec: SystemSpec, trunc: FockTruncation, rho_s, t_grid: Sequence[float],
            leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
            boson_moments: bool = True) -> ComparisonReport:
    """Run the oracle and the closed-form engine side by side."""
    from .bosons import boson_state, mixture_moments
    from .channel import apply_map

    trunc.check(spec)
    rho_s = np.asarray(rho_s, dtype=complex)
    bstate = bath_fock_state(spec.bath, trunc)
    prop = BlockPropagator.from_spec(spec, trunc)
    times = np.asarray(t_grid, dtype=float)
    td, dm, dc, leak = (np.zeros(times.size) for _ in range(4))
    notes = []
    if bstate.norm_deficit > leakage_threshold:
        notes.append(f"initial state truncation lost norm {bstate.norm_deficit:.2e}")
    for n, t in enumerate(times):
        joint = evolve_exact(spec, trunc, rho_s, bstate, t, prop)
        td[n] = trace_distance(joint.reduced_system(), apply_map(spec, rho_s, t))
        rho_b = joint.reduced_bath()
        leak[n] = top_level_population(rho_b, trunc)
        if boson_moments:
            m_or, c_or = bath_moments(rho_b, trunc)
            m_en, c_en = mixture_moments(boson_state(spec, rho_s, t))
            dm[n] = np.max(np.abs(m_or - m_en))
            dc[n] = np.max(np.abs(c_or - c_en))
    if np.max(leak, initial=0.0) > leakage_threshold:
        notes.append(f"top Fock level population {np.max(leak):.2e} exceeds "
                     f"{leakage_threshold:.0e}; raise the cutoff")
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return ComparisonReport(times, td, dm, dc, leak, bstate.norm_deficit, notes)
