import numpy as np
import pytest

from spinboson.model import BathSpec, LinearCoupling, SystemSpec


def random_rho(dim, rng, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_pure(dim, rng):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_covariance(n_modes, rng, scale=0.4):
    """Valid correlated Gaussian covariance: symplectic image of a thermal state."""
    from scipy.linalg import expm

    from spinboson.model import symplectic_form

    om = symplectic_form(n_modes)
    h = rng.normal(size=(2 * n_modes, 2 * n_modes))
    h = scale * (h + h.T)
    S = expm(om @ h)
    nbar = rng.uniform(0.0, 1.0, n_modes)
    base = np.diag(np.repeat(nbar + 0.5, 2))
    return S @ base @ S.T


def random_spec(rng, n_qubits, n_modes, bath="thermal"):
    lam = rng.normal(scale=0.4, size=(n_modes, n_qubits))
    omega = rng.uniform(0.3, 2.5, n_modes)
    if bath == "thermal":
        b = BathSpec.thermal(omega, rng.uniform(0.0, 3.0))
    elif bath == "squeezed":
        b = BathSpec.squeezed_thermal(omega, rng.uniform(0.0, 3.0),
                                      rng.uniform(-0.8, 0.8, n_modes))
    elif bath == "gaussian":
        b = BathSpec.gaussian(omega, random_covariance(n_modes, rng),
                              rng.normal(scale=0.5, size=2 * n_modes))
    else:
        raise ValueError(bath)
    return SystemSpec(n_qubits, LinearCoupling(lam), b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
