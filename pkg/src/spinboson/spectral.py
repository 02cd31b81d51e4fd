"""Continuum baths: spectral densities, integral forms and discretization.

For a fully connected coupling with ``J(w) = sum_k lam_k^2 delta(w - w_k)``

    W(t)     = int dw J(w)/w^2 (sin wt - wt)
    Gamma(t) = int dw J(w)/w^2 coth(w/2T) (1 - cos wt)

and the same expressions with ``J_ij`` give the pairwise matrices of
:mod:`spinboson.linear`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from .errors import IntegrationError, ValidationError
from .model import BathSpec, LinearCoupling, SystemSpec, coth_half

DEFAULT_EPSABS = 1e-9
DEFAULT_EPSREL = 1e-10
#: Default upper edge of linear bins for Ohmic densities, in units of w_c.
OHMIC_BIN_RANGE = 30.0


@dataclass(frozen=True)
class Ohmic:
    """``J(w) = eta w^s w_c^(1-s) exp(-w/w_c)``."""

    eta: float
    s: float = 1.0
    omega_c: float = 1.0

    def __post_init__(self):
        if self.eta < 0:
            raise ValidationError("eta must be non-negative")
        if self.omega_c <= 0:
            raise ValidationError("omega_c must be positive")

    @property
    def support(self):
        # exp(-60) tail is far below any quadrature tolerance
        return 0.0, self.omega_c * (60.0 + 2.0 * max(self.s, 0.0))

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.eta * w**self.s * self.omega_c ** (1 - self.s) * np.exp(-w / self.omega_c)

    def bin_moments(self, edges):
        """Exact ``int J`` and ``int J / w`` over consecutive bins.

        The second is ``inf`` where it diverges (``s <= 0`` in the first bin).
        """
        x = np.asarray(edges, dtype=float) / self.omega_c
        pref = self.eta * self.omega_c
        m0 = pref * self.omega_c * special.gamma(self.s + 1) * np.diff(
            special.gammainc(self.s + 1, x))
        if self.s > 0:
            m_inv = pref * special.gamma(self.s) * np.diff(special.gammainc(self.s, x))
        else:
            m_inv = np.array([integrate.quad(lambda w: self(w) / w, a, b)[0] if a > 0
                              else np.inf for a, b in zip(edges[:-1], edges[1:])])
        return m0, m_inv


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Spectral density interpolated from a table with monotone cubic (PCHIP).

    Evaluation outside ``[omega[0], omega[-1]]`` raises.
    """

    omega: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        j = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != j.shape or w.size < 2:
            raise ValidationError("tabulated J needs two equal-length columns, >= 2 rows")
        if np.any(np.diff(w) <= 0):
            raise ValidationError("tabulated omega must be strictly increasing")
        if w[0] < 0 or np.any(j < 0):
            raise ValidationError("tabulated J must be non-negative on a non-negative grid")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", j)
        object.__setattr__(self, "_interp", PchipInterpolator(w, j, extrapolate=False))

    @classmethod
    def from_file(cls, path):
        """Read two whitespace- or comma-separated columns ``omega, J``."""
        with open(path) as fh:
            text = fh.read().replace(",", " ")
        data = np.loadtxt(text.splitlines(), ndmin=2)
        if data.shape[1] != 2:
            raise ValidationError(f"{path}: expected two columns, found {data.shape[1]}")
        return cls(data[:, 0], data[:, 1])

    @property
    def support(self):
        return float(self.omega[0]), float(self.omega[-1])

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.support
        if np.any((w < lo) | (w > hi)):
            raise ValidationError("tabulated J evaluated outside its table")
        return self._interp(w)

    def bin_moments(self, edges):
        pairs = list(zip(edges[:-1], edges[1:]))
        m0 = np.array([integrate.quad(self, a, b, limit=200)[0] for a, b in pairs])
        m_inv = np.array([integrate.quad(lambda w: self(w) / w, a, b, limit=200)[0]
                          if a > 0 or self(0.0) == 0 else np.inf for a, b in pairs])
        return m0, m_inv


def _infrared_exponent(J):
    """Low-frequency power law ``J ~ w^s`` if known, else None."""
    if isinstance(J, Ohmic):
        return J.s
    lo, _ = J.support
    if lo == 0 and J(0.0) > 0:
        return 0.0
    return None


def _quad(func, lo, hi, t, epsabs, epsrel, what):
    """Adaptive quadrature split into pieces of a few oscillation periods."""
    width = hi - lo
    if t > 0:
        width = min(width, 20.0 * np.pi / t)
    n = max(1, int(np.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, n + 1)
    total, error = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, info = integrate.quad(func, a, b, epsabs=epsabs / n, epsrel=epsrel,
                                        limit=200, full_output=1)[:3]
        total += val
        error += err
    if error > max(epsabs, epsrel * abs(total)) * 10:
        raise IntegrationError(f"{what}: quadrature did not converge (error {error:.2e})",
                               {"value": total, "error": error, "pieces": n})
    return total


@functools.lru_cache(maxsize=64)
def ramp_coefficient(J, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> float:
    """``int J(w)/w dw``, the large-time slope of ``-W(t)``."""
    s = _infrared_exponent(J)
    if s is not None and s <= 0:
        raise IntegrationError("int J/w diverges at low frequency for s <= 0",
                               {"s": s})
    lo, hi = J.support
    return _quad(lambda w: J(w) / w, lo, hi, 0.0, epsabs, epsrel, "ramp coefficient")


def lamb_integral(J, t: float, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> float:
    """``W(t) = int J/w^2 sin(wt) dw - t int J/w dw``."""
    if t == 0:
        return 0.0
    lo, hi = J.support
    osc = _quad(lambda w: J(w) * np.sin(w * t) / w**2, lo, hi, abs(t), epsabs, epsrel,
                "Lamb-shift integral")
    return osc - t * ramp_coefficient(J, epsabs, epsrel)


def damping_integral(J, temperature: float, t: float, epsabs=DEFAULT_EPSABS,
                     epsrel=DEFAULT_EPSREL) -> float:
    """``Gamma(t) = int J/w^2 coth(w/2T) (1 - cos wt) dw``; non-negative."""
    if temperature < 0:
        raise ValidationError("temperature must be non-negative")
    s = _infrared_exponent(J)
    if s is not None and ((temperature > 0 and s <= 0) or s <= -1):
        raise IntegrationError(
            f"infrared divergence: J ~ w^{s} makes the dephasing integrand non-integrable",
            {"s": s, "temperature": temperature})
    if t == 0:
        return 0.0
    lo, hi = J.support

    def integrand(w):
        return J(w) / w**2 * coth_half(w, temperature) * 2.0 * np.sin(0.5 * w * t) ** 2

    value = _quad(integrand, lo, hi, abs(t), epsabs, epsrel, "dephasing integral")
    if value < -epsabs:
        raise IntegrationError(f"negative dephasing {value:.3e} from quadrature",
                               {"value": value})
    return value


def discretize(J, n_modes: int, scheme: str = "linear", omega_max: Optional[float] = None,
               omega_min: Optional[float] = None):
    """Bin ``J`` into ``n_modes`` discrete modes.

    Each bin contributes ``lam^2 = int_bin J`` placed at the centroid of
    ``J(w)/w`` over the bin, ``w_k = int_bin J / int_bin (J/w)``. This weighting
    makes ``lam^2 / w_k`` exact per bin, which removes the first-order error
    from the ``coth(w/2T) ~ 2T/w`` infrared behaviour. Where ``int J/w``
    diverges the bin falls back to its midpoint. Linear bins default to
    ``[0, 30 w_c]`` for Ohmic densities and to the full table otherwise; log
    bins start at ``omega_min`` (default ``1e-4 * omega_max``). Empty bins
    are dropped.

    Returns
    -------
    omega, lam : ndarray
    """
    if n_modes < 1:
        raise ValidationError("n_modes must be at least 1")
    lo, hi = J.support
    if omega_max is None:
        omega_max = OHMIC_BIN_RANGE * J.omega_c if isinstance(J, Ohmic) else hi
    omega_max = min(omega_max, hi)
    if scheme == "linear":
        start = lo if omega_min is None else max(lo, omega_min)
        edges = np.linspace(start, omega_max, n_modes + 1)
    elif scheme == "log":
        start = omega_min if omega_min is not None else max(lo, 1e-4 * omega_max)
        edges = np.geomspace(max(start, lo, np.finfo(float).tiny), omega_max, n_modes + 1)
    else:
        raise ValidationError(f"unknown discretization scheme {scheme!r}")
    m0, m_inv = J.bin_moments(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(np.isfinite(m_inv) & (m_inv > 0), m0 / m_inv, mid)
    keep = m0 > 0
    return omega[keep], np.sqrt(m0[keep])


def discrete_spec(omega, lam, temperature: float) -> SystemSpec:
    """Single qubit coupled to the given modes through ``f_k = lam_k sigma``."""
    return SystemSpec(1, LinearCoupling(np.asarray(lam)[:, None]),
                      BathSpec.thermal(omega, temperature))


def discrete_curves(omega, lam, temperature: float, times):
    """``W(t)`` and ``Gamma(t)`` of a finite mode set via the finite-K engine."""
    from .linear import dephasing_matrix, ising_lamb_matrix

    spec = discrete_spec(omega, lam, temperature)
    W = np.array([ising_lamb_matrix(spec, t)[0, 0] for t in times])
    G = np.array([dephasing_matrix(spec, t)[0, 0] for t in times])
    return W, G


def integral_curves(J, temperature: float, times, **kw):
    W = np.array([lamb_integral(J, t, **kw) for t in times])
    G = np.array([damping_integral(J, temperature, t, **kw) for t in times])
    return W, G


@dataclass(frozen=True)
class ConvergenceStudy:
    """Maximum deviations of discretized curves from the integrals, per K."""

    n_modes: np.ndarray
    max_damping_error: np.ndarray
    max_lamb_error: np.ndarray


def convergence_study(J, temperature: float, times, mode_counts, scheme: str = "linear",
                      reference=None) -> ConvergenceStudy:
    """Compare discretized ``W, Gamma`` with their integrals over a time grid."""
    times = np.asarray(times, dtype=float)
    W_ref, G_ref = reference if reference is not None else integral_curves(
        J, temperature, times)
    dG, dW = [], []
    for K in mode_counts:
        omega, lam = discretize(J, K, scheme)
        W, G = discrete_curves(omega, lam, temperature, times)
        dG.append(np.max(np.abs(G - G_ref)))
        dW.append(np.max(np.abs(W - W_ref)))
    return ConvergenceStudy(np.asarray(mode_counts), np.array(dG), np.array(dW))


def _same_density(a, b):
    if type(a) is not type(b):
        return False
    if isinstance(a, Tabulated):
        return np.array_equal(a.omega, b.omega) and np.array_equal(a.values, b.values)
    return a == b


def _entry(item):
    if item is None:
        return 0.0, None
    if isinstance(item, tuple):
        weight, J = item
        return float(weight), J
    return 1.0, item


def cross_spectral(J_table, t: float, which: str = "lamb",
                   temperature: Optional[float] = None) -> np.ndarray:
    """Continuum ``W_ij(t)`` or ``Gamma_ij(t)`` from pairwise spectral densities.

    ``J_table[i][j]`` is a spectral density, ``None`` for zero, or a
    ``(weight, density)`` tuple for a signed multiple ``weight * J``.
    """
    N = len(J_table)
    if any(len(row) != N for row in J_table):
        raise ValidationError("J table must be square")
    if which not in ("lamb", "damping"):
        raise ValidationError("which must be 'lamb' or 'damping'")
    if which == "damping" and temperature is None:
        raise ValidationError("damping needs a temperature")
    out = np.zeros((N, N))
    for i in range(N):
        for j in range(i, N):
            wi, Ji = _entry(J_table[i][j])
            wj, Jj = _entry(J_table[j][i])
            if wi != wj or (Ji is None) != (Jj is None) or (
                    Ji is not None and not _same_density(Ji, Jj)):
                raise ValidationError(f"J table is not symmetric at ({i}, {j})")
            if Ji is None or wi == 0:
                continue
            if which == "lamb":
                val = lamb_integral(Ji, t)
            else:
                val = damping_integral(Ji, temperature, t)
            out[i, j] = out[j, i] = wi * val
    return out
