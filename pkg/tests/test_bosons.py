import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_rho, random_spec
from spinboson.bosons import boson_state, free_rotation, mixture_moments
from spinboson.linear import fully_connected_coupling
from spinboson.model import BathSpec, LinearCoupling, SystemSpec, magnetization, symplectic_form
from spinboson.oracle import FockTruncation, bath_moments, evolve_exact


def dicke(n, lam=0.3, omega=1.2, nbar=0.0):
    return SystemSpec(n, fully_connected_coupling([lam], n), BathSpec.product([omega], nbar))


class TestBosonState:
    def test_basis_projector(self, rng):
        spec = random_spec(rng, 2, 3)
        rho = np.zeros((4, 4), dtype=complex)
        rho[2, 2] = 1.0
        t = 1.7
        mix = boson_state(spec, rho, t)
        assert mix.n_components == 1
        f = spec.coupling_table[2]
        w = spec.bath.omega
        np.testing.assert_allclose(mix.amplitudes[0], f / w * (np.exp(-1j * w * t) - 1),
                                   rtol=1e-13)

    def test_recurrence(self):
        spec = dicke(3, omega=1.0)
        mix = boson_state(spec, np.full((8, 8), 1 / 8, dtype=complex), 2 * np.pi)
        np.testing.assert_allclose(mix.amplitudes, 0, atol=1e-15)

    def test_dicke_grouping(self, rng):
        n, lam, w, t = 3, 0.3, 1.2, 0.8
        spec = dicke(n, lam, w)
        rho = random_rho(8, rng)
        mix = boson_state(spec, rho, t)
        assert mix.n_components == n + 1
        m = magnetization(spec.basis)
        pops = np.real(np.diag(rho))
        for M in np.unique(m):
            mu = lam * M / w * (np.exp(-1j * w * t) - 1)
            j = np.argmin(np.abs(mix.amplitudes[:, 0] - mu))
            assert mix.amplitudes[j, 0] == pytest.approx(mu, abs=1e-14)
            assert mix.weights[j] == pytest.approx(pops[m == M].sum(), abs=1e-14)

    def test_unmerged(self, rng):
        spec = dicke(2)
        mix = boson_state(spec, np.eye(4) / 4, 1.0, merge=False)
        assert mix.n_components == 4

    def test_free_rotation_symplectic(self):
        R = free_rotation([0.7, 1.9], 1.3)
        om = symplectic_form(2)
        np.testing.assert_allclose(R @ om @ R.T, om, atol=1e-15)


class TestMoments:
    def test_single_component(self, rng):
        spec = random_spec(rng, 1, 2, bath="squeezed")
        rho = np.diag([1.0, 0.0]).astype(complex)
        mix = boson_state(spec, rho, 2.0)
        mean, cov = mixture_moments(mix)
        np.testing.assert_allclose(mean, mix.displacements[0])
        np.testing.assert_allclose(cov, mix.covariance)

    def test_symmetric_populations_zero_mean(self):
        spec = dicke(3)
        mean, _ = mixture_moments(boson_state(spec, np.eye(8) / 8, 1.4))
        np.testing.assert_allclose(mean, 0, atol=1e-15)

    def test_two_qubit_spread(self):
        lam, w, t = 0.4, 1.0, 2.0
        spec = dicke(2, lam, w)
        mean, cov = mixture_moments(boson_state(spec, np.eye(4) / 4, t))
        # four equally likely branches with M in {2, 0, 0, -2}
        mus = [lam * M / w * (np.exp(-1j * w * t) - 1) for M in (2, 0, 0, -2)]
        q = np.sqrt(2) * np.real(mus)
        p = np.sqrt(2) * np.imag(mus)
        assert cov[0, 0] == pytest.approx(0.5 + np.mean(q**2), rel=1e-13)
        assert cov[1, 1] == pytest.approx(0.5 + np.mean(p**2), rel=1e-13)
        assert cov[0, 1] == pytest.approx(np.mean(q * p), rel=1e-13)

    def test_weights_are_populations(self, rng):
        spec = random_spec(rng, 3, 2)
        rho = random_rho(8, rng)
        mix = boson_state(spec, rho, 0.9, merge=False)
        np.testing.assert_allclose(mix.weights, np.real(np.diag(rho)), rtol=1e-14)
        assert mix.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_oracle_vacuum_pair():
    spec = SystemSpec(2, LinearCoupling([[0.35, -0.2]]), BathSpec.product([1.0], 0.0))
    rng = np.random.default_rng(5)
    rho = random_rho(4, rng)
    trunc = FockTruncation.uniform(1, 30)
    for t in np.linspace(0, 6, 7):
        joint = evolve_exact(spec, trunc, rho, t=t)
        m_or, c_or = bath_moments(joint.reduced_bath(), trunc)
        m_en, c_en = mixture_moments(boson_state(spec, rho, t))
        np.testing.assert_allclose(m_or, m_en, atol=1e-6)
        np.testing.assert_allclose(c_or, c_en, atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 3), st.floats(0, 20))
def test_coherence_blind(seed, n, k, t):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n, k, "squeezed")
    rho = random_rho(2**n, rng)
    a = boson_state(spec, rho, t)
    b = boson_state(spec, np.diag(np.diag(rho)), t)
    np.testing.assert_allclose(a.weights, b.weights, atol=1e-14)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-14)
    assert a.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert a.n_components <= 2**n
