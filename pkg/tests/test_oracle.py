import warnings

import numpy as np
import pytest

import spinboson.exponents as exponents
from conftest import random_covariance, random_rho
from spinboson.channel import apply_map
from spinboson.errors import CapacityError, ValidationError
from spinboson.exponents import damping, lamb_phase
from spinboson.model import BathSpec, LinearCoupling, SystemSpec
from spinboson.oracle import (BlockPropagator, FockTruncation, bath_fock_state, bath_moments,
                              build_hamiltonian, compare, evolve_exact, hamiltonian_blocks,
                              thermal_cutoff, trace_distance)

UP, DOWN = np.array([1]), np.array([-1])


def pair_spec(lam=(0.3, -0.2), bath=None):
    bath = BathSpec.product([1.0], 0.5) if bath is None else bath
    return SystemSpec(2, LinearCoupling([list(lam)]), bath)


class TestHamiltonian:
    def test_uncoupled_is_diagonal(self):
        spec = SystemSpec(2, LinearCoupling(np.zeros((2, 2))), BathSpec.thermal([1.0, 1.5], 1))
        H = build_hamiltonian(spec, FockTruncation((3, 2))).toarray()
        np.testing.assert_array_equal(H, np.diag(np.diag(H)))
        n1, n2 = np.meshgrid(np.arange(4), np.arange(3), indexing="ij")
        free = (1.0 * n1 + 1.5 * n2).ravel()
        np.testing.assert_allclose(np.diag(H), np.tile(free, 4))

    def test_single_qubit_cutoff_two(self):
        lam = 0.4
        spec = SystemSpec(1, LinearCoupling([[lam]]), BathSpec.thermal([1.0], 0))
        H = build_hamiltonian(spec, FockTruncation((2,))).toarray()
        assert H.shape == (6, 6)
        s2 = np.sqrt(2)
        expected = np.zeros((6, 6))
        for block, sign in ((0, 1), (1, -1)):
            o = 3 * block
            expected[o + 1, o + 1], expected[o + 2, o + 2] = 1.0, 2.0
            expected[o, o + 1] = expected[o + 1, o] = sign * lam
            expected[o + 1, o + 2] = expected[o + 2, o + 1] = sign * lam * s2
        np.testing.assert_allclose(H, expected, atol=1e-15)

    def test_displaced_oscillator_spectrum(self):
        spec = pair_spec(lam=(0.3, 0.45), bath=BathSpec.thermal([1.3], 0))
        blocks = hamiltonian_blocks(spec, FockTruncation((60,)))
        for f, h in zip(spec.coupling_table[:, 0], blocks):
            e = np.linalg.eigvalsh(h)[:10]
            np.testing.assert_allclose(e, 1.3 * np.arange(10) - f**2 / 1.3, atol=1e-10)


class TestStates:
    def test_thermal_cutoff(self):
        n = thermal_cutoff(0.5)
        assert (0.5 / 1.5) ** (n + 1) < 1e-10 <= (0.5 / 1.5) ** n

    def test_thermal_moments(self):
        trunc = FockTruncation((40,))
        st = bath_fock_state(BathSpec.product([1.0], 0.7), trunc)
        _, cov = bath_moments(st.rho, trunc)
        np.testing.assert_allclose(cov, 1.2 * np.eye(2), atol=1e-10)

    def test_squeezed_moments(self):
        trunc = FockTruncation((50,))
        st = bath_fock_state(BathSpec.product([1.0], 0.2, squeezing=0.4), trunc)
        _, cov = bath_moments(st.rho, trunc)
        np.testing.assert_allclose(cov, 0.7 * np.diag([np.exp(0.8), np.exp(-0.8)]), atol=1e-8)
        assert -1e-14 < st.norm_deficit < 1e-8

    def test_gaussian_moments(self, rng):
        cov = random_covariance(2, rng, scale=0.15)
        means = np.array([0.3, -0.2, 0.1, 0.25])
        trunc = FockTruncation((34, 34))
        st = bath_fock_state(BathSpec.gaussian([1.0, 1.4], cov, means), trunc)
        m, c = bath_moments(st.rho, trunc)
        # finite cutoff leaves a small truncation error
        np.testing.assert_allclose(m, means, atol=2e-5)
        np.testing.assert_allclose(c, cov, atol=2e-5)

    def test_capacity(self):
        spec = pair_spec()
        with pytest.raises(CapacityError):
            FockTruncation((200_000,)).check(spec)
        with pytest.raises(ValidationError):
            FockTruncation((5, 5)).check(spec)


class TestEvolution:
    def test_zero_time(self, rng):
        spec = pair_spec()
        rho = random_rho(4, rng)
        np.testing.assert_allclose(
            evolve_exact(spec, FockTruncation((20,)), rho, t=0).reduced_system(), rho,
            atol=1e-14)

    def test_uncoupled_constant(self, rng):
        spec = pair_spec(lam=(0.0, 0.0))
        rho = random_rho(4, rng)
        trunc = FockTruncation((20,))
        for t in (1.0, 5.0):
            np.testing.assert_allclose(evolve_exact(spec, trunc, rho, t=t).reduced_system(),
                                       rho, atol=1e-13)

    def test_single_qubit_vacuum(self):
        lam, w = 0.35, 1.0
        spec = SystemSpec(1, LinearCoupling([[lam]]), BathSpec.thermal([w], 0))
        rho = np.full((2, 2), 0.5, dtype=complex)
        trunc = FockTruncation((40,))
        prop = BlockPropagator.from_spec(spec, trunc)
        for t in np.linspace(0.3, 9.0, 12):
            out = evolve_exact(spec, trunc, rho, t=t, propagator=prop).reduced_system()
            g = 4 * lam**2 / w**2 * (1 - np.cos(w * t))
            expected = 0.5 * np.exp(1j * lamb_phase(spec, UP, DOWN, t) - g)
            assert out[0, 1] == pytest.approx(expected, abs=1e-8)

    def test_unitarity_and_populations(self, rng):
        spec = pair_spec()
        rho = random_rho(4, rng, rank=1)
        trunc = FockTruncation((12,))
        joint0 = evolve_exact(spec, trunc, rho, t=0.0).matrix()
        p0 = np.real(np.trace(joint0 @ joint0))
        for t in (0.7, 3.1):
            joint = evolve_exact(spec, trunc, rho, t=t)
            m = joint.matrix()
            assert np.trace(m).real == pytest.approx(1.0, abs=1e-10)
            assert np.real(np.trace(m @ m)) == pytest.approx(p0, abs=1e-10)
            np.testing.assert_allclose(np.diag(joint.reduced_system()).real,
                                       np.diag(rho).real, atol=1e-10)


class TestCompare:
    def test_uncoupled(self, rng):
        spec = pair_spec(lam=(0.0, 0.0))
        rep = compare(spec, FockTruncation((20,)), random_rho(4, rng), [0.0, 2.0, 5.0])
        assert rep.max_trace_distance <= 1e-12
        assert rep.passed(1e-12)

    def test_thermal_pair(self, rng):
        spec = pair_spec(lam=tuple(rng.normal(scale=0.3, size=2)))
        rep = compare(spec, FockTruncation((40,)), random_rho(4, rng),
                      np.linspace(0, 20, 11))
        assert rep.max_trace_distance <= 1e-6
        assert rep.max_leakage < 1e-8
        assert np.max(rep.mean_deviation) <= 1e-6
        assert np.max(rep.covariance_deviation) <= 1e-6
        assert rep.rows().shape == (11, len(rep.columns()))

    def test_cutoff_convergence(self, rng):
        spec = pair_spec()
        rho = random_rho(4, rng)
        times = np.linspace(0, 20, 6)
        a = compare(spec, FockTruncation((30,)), rho, times, boson_moments=False)
        b = compare(spec, FockTruncation((60,)), rho, times, boson_moments=False)
        assert np.max(np.abs(a.trace_distance - b.trace_distance)) < 1e-6

    def test_leakage_warning(self, rng):
        spec = pair_spec(lam=(0.8, 0.6))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = compare(spec, FockTruncation((6,)), random_rho(4, rng), [3.0],
                          boson_moments=False)
        assert any("top Fock level" in str(w.message) for w in caught)
        assert any("top Fock level" in note for note in rep.warnings)

    def test_detects_halved_normalization(self, rng, monkeypatch):
        # Gaussian covariance carrying an extra factor 1/2 halves the damping
        spec = pair_spec(lam=(0.4, -0.3))
        rho = random_rho(4, rng, rank=1)
        times = np.linspace(0, 20, 11)
        good = compare(spec, FockTruncation((40,)), rho, times, boson_moments=False)
        original = exponents.thermal_weights
        monkeypatch.setattr(exponents, "thermal_weights",
                            lambda spec, t: 0.5 * original(spec, t))
        bad = compare(spec, FockTruncation((40,)), rho, times, boson_moments=False)
        assert good.max_trace_distance <= 1e-6
        assert bad.max_trace_distance >= 1e-2


def test_trace_distance_basic():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert trace_distance(a, b) == pytest.approx(1.0)
    assert trace_distance(a, a) == 0
