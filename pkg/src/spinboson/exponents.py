"""Closed-form evolution exponents of the dephasing map.

Each coherence ``<sigma|rho|sigma'>`` is multiplied by ``exp(Lambda)`` with

    Lambda = i [W(sigma') - W(sigma) + Wd(sigma') - Wd(sigma)] - Gamma(sigma, sigma')

where ``W`` is the coupling-induced Lamb shift, ``Wd`` the extra shift from
initial bath displacements and ``Gamma >= 0`` the decoherence function. For a
Gaussian bath ``Gamma`` is a quadratic form of the phase-space point
``r(sigma, sigma')`` built from the displacement amplitudes.

Conventions: ``q = (b + b^dag)/sqrt2``, ``p = i(b^dag - b)/sqrt2``, vacuum
covariance ``I/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedVariantError
from .model import SystemSpec, symplectic_form


@dataclass(frozen=True)
class EvolutionExponent:
    """``Lambda = i * lamb_phase - damping`` for one ordered basis pair."""

    lamb_phase: float
    damping: float

    @property
    def combined(self) -> complex:
        return complex(-self.damping, self.lamb_phase)


def _delta_f(spec, sigma, sigma_p):
    return spec.f_values(sigma_p) - spec.f_values(sigma)


def displacement_amplitude(spec: SystemSpec, k: int, sigma, sigma_p, t: float) -> complex:
    """``mu_k = [f_k(sigma') - f_k(sigma)] / w_k * (e^{i w_k t} - 1)``."""
    if not 0 <= k < spec.n_modes:
        raise IndexError(f"mode index {k} out of range")
    df = _delta_f(spec, sigma, sigma_p)[k]
    w = spec.bath.omega[k]
    return complex(df / w * np.expm1(1j * w * t))


def _phase_weights(omega, t):
    """Per-mode factors turning ``delta f`` into ``(q_k, p_k)``."""
    wt = omega * t
    # 1 - cos x = 2 sin^2(x/2) avoids cancellation for small x
    qw = -np.sqrt(2) * 2.0 * np.sin(0.5 * wt) ** 2 / omega
    pw = np.sqrt(2) * np.sin(wt) / omega
    return qw, pw


def phase_points(spec: SystemSpec, sigma, sigma_p, t: float) -> np.ndarray:
    """Phase-space point ``(q_1, p_1, ..., q_K, p_K)`` at which the bath
    characteristic function is sampled; ``q + i p = sqrt2 * mu``."""
    df = _delta_f(spec, sigma, sigma_p)
    qw, pw = _phase_weights(spec.bath.omega, t)
    r = np.empty(df.shape[:-1] + (2 * spec.n_modes,))
    r[..., 0::2] = df * qw
    r[..., 1::2] = df * pw
    return r


def _sin_minus_x(x):
    x = np.asarray(x, dtype=float)
    out = np.sin(x) - x
    small = np.abs(x) < 1e-3
    xs = x[small]
    out[small] = -xs**3 / 6.0 + xs**5 / 120.0 - xs**7 / 5040.0
    return out


def lamb_weights(omega, t) -> np.ndarray:
    """``(sin w t - w t) / w^2`` per mode."""
    omega = np.asarray(omega, dtype=float)
    return _sin_minus_x(omega * t) / omega**2


def lamb_shift_W(spec: SystemSpec, sigma, t: float):
    """Coupling-induced Lamb shift ``W_t(sigma) = sum_k f_k^2 (sin w t - w t) / w^2``.

    Independent of the bath state and non-positive for ``t >= 0``.
    """
    f = spec.f_values(sigma)
    return (f**2) @ lamb_weights(spec.bath.omega, t)


def displacement_weights(spec: SystemSpec, t: float) -> np.ndarray:
    """Per-mode factors ``h_k`` with ``Wd_t(sigma) = sum_k f_k(sigma) h_k``."""
    bath = spec.bath
    if not bath.has_displacement:
        return np.zeros(spec.n_modes)
    w = bath.omega
    q, p = bath.means[0::2], bath.means[1::2]
    wt = w * t
    return np.sqrt(2) / w * (q * np.sin(wt) + p * 2.0 * np.sin(0.5 * wt) ** 2)


def lamb_shift_W_tilde(spec: SystemSpec, sigma, t: float):
    """Lamb shift from initial bath displacements.

    ``Wd_t(sigma) = sqrt2 sum_k f_k / w_k [<q_k> sin w t - <p_k> (cos w t - 1)]``,
    the reduction of the linear term ``-i r^T Omega rbar`` of the Gaussian
    log-characteristic function. Zero for product baths.
    """
    return spec.f_values(sigma) @ displacement_weights(spec, t)


def _require_product(spec, thermal=False):
    bath = spec.bath
    if not bath.is_product:
        raise UnsupportedVariantError("closed form needs a product (per-mode) bath")
    if thermal and not bath.is_thermal:
        raise UnsupportedVariantError("thermal closed form needs zero squeezing")


def damping_thermal(spec: SystemSpec, sigma, sigma_p, t: float):
    """``Gamma = sum_k df_k^2 / w_k^2 coth(w_k / 2T) (1 - cos w_k t)``."""
    _require_product(spec, thermal=True)
    df = _delta_f(spec, sigma, sigma_p)
    return (df**2) @ thermal_weights(spec, t)


def thermal_weights(spec: SystemSpec, t: float) -> np.ndarray:
    w = spec.bath.omega
    return spec.bath.occupation_factor * 2.0 * np.sin(0.5 * w * t) ** 2 / w**2


def squeezed_weights(spec: SystemSpec, t: float) -> np.ndarray:
    bath = spec.bath
    w, z = bath.omega, bath.squeezing
    one_minus_cos = 2.0 * np.sin(0.5 * w * t) ** 2
    bracket = one_minus_cos**2 * np.exp(-2 * z) + np.sin(w * t) ** 2 * np.exp(2 * z)
    return bath.occupation_factor * bracket / (2.0 * w**2)


def damping_squeezed_thermal(spec: SystemSpec, sigma, sigma_p, t: float):
    """Squeezed-thermal decoherence function.

    ``Gamma = sum_k df_k^2 / (2 w_k^2) (2 nbar_k + 1)
    [(1 - cos w_k t)^2 e^{-2 z_k} + sin^2(w_k t) e^{2 z_k}]`` for mode covariance
    ``(nbar + 1/2) diag(e^{2z}, e^{-2z})``.
    """
    _require_product(spec)
    df = _delta_f(spec, sigma, sigma_p)
    return (df**2) @ squeezed_weights(spec, t)


def characteristic_kernel(spec: SystemSpec, t: float) -> np.ndarray:
    """``K x K`` matrix ``G`` with ``Gamma = df^T G df``.

    From ``-ln|chi(r)| = 1/2 (Omega r)^T Theta (Omega r)`` and ``r = B^T df``.
    """
    K = spec.n_modes
    qw, pw = _phase_weights(spec.bath.omega, t)
    B = np.zeros((K, 2 * K))
    B[np.arange(K), 2 * np.arange(K)] = qw
    B[np.arange(K), 2 * np.arange(K) + 1] = pw
    om = symplectic_form(K)
    rotated = B @ om.T  # rows are (Omega r)^T per unit df_k
    G = 0.5 * rotated @ spec.bath.covariance_matrix @ rotated.T
    return 0.5 * (G + G.T)


def damping_from_characteristic(spec: SystemSpec, sigma, sigma_p, t: float):
    """Decoherence function from the Gaussian characteristic function.

    Valid for any Gaussian bath, including correlated covariance matrices.
    First moments only contribute a phase, see :func:`lamb_shift_W_tilde`.
    """
    df = _delta_f(spec, sigma, sigma_p)
    G = characteristic_kernel(spec, t)
    return np.einsum("...k,kl,...l->...", df, G, df)


def damping_kernel(spec: SystemSpec, t: float) -> np.ndarray:
    """Fastest valid ``K x K`` kernel ``G`` (diagonal for product baths)."""
    bath = spec.bath
    if bath.is_thermal:
        return np.diag(thermal_weights(spec, t))
    if bath.is_product:
        return np.diag(squeezed_weights(spec, t))
    return characteristic_kernel(spec, t)


def damping(spec: SystemSpec, sigma, sigma_p, t: float):
    """Decoherence function, dispatched thermal -> squeezed -> general."""
    bath = spec.bath
    if bath.is_thermal:
        return damping_thermal(spec, sigma, sigma_p, t)
    if bath.is_product:
        return damping_squeezed_thermal(spec, sigma, sigma_p, t)
    return damping_from_characteristic(spec, sigma, sigma_p, t)


def lamb_phase(spec: SystemSpec, sigma, sigma_p, t: float):
    """``W(sigma') - W(sigma) + Wd(sigma') - Wd(sigma)``."""
    f, fp = spec.f_values(sigma), spec.f_values(sigma_p)
    lw = lamb_weights(spec.bath.omega, t)
    dw = displacement_weights(spec, t)
    return (fp**2 - f**2) @ lw + (fp - f) @ dw


def evolution_exponent(spec: SystemSpec, sigma, sigma_p, t: float) -> EvolutionExponent:
    """Full exponent for one ordered pair of spin configurations."""
    return EvolutionExponent(float(lamb_phase(spec, sigma, sigma_p, t)),
                             float(damping(spec, sigma, sigma_p, t)))


def exponent_matrix(spec: SystemSpec, t: float, chunk: int = 256) -> np.ndarray:
    """``Lambda_t(sigma_a, sigma_b)`` for all basis pairs, shape ``(2^N, 2^N)``.

    Includes the optional ``H_S`` phase ``-i [E(a) - E(b)] t``.
    """
    F = spec.coupling_table
    D = F.shape[0]
    lw = lamb_weights(spec.bath.omega, t)
    dw = displacement_weights(spec, t)
    shift = (F**2) @ lw + F @ dw
    phase = shift[None, :] - shift[:, None]
    if spec.energies is not None:
        phase = phase - (spec.energies[:, None] - spec.energies[None, :]) * t
    G = damping_kernel(spec, t)
    diag = np.allclose(G, np.diag(np.diag(G)), rtol=0, atol=0)
    gamma = np.empty((D, D))
    for start in range(0, D, chunk):
        df = F[None, :, :] - F[start:start + chunk, None, :]
        if diag:
            gamma[start:start + chunk] = (df**2) @ np.diag(G)
        else:
            gamma[start:start + chunk] = np.einsum("abk,kl,abl->ab", df, G, df)
    return 1j * phase - gamma
