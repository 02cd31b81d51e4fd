import numpy as np
import pytest

from conftest import random_pure, random_rho, random_spec
from spinboson.channel import apply_map, pair_delta_m
from spinboson.errors import UnsupportedVariantError, ValidationError
from spinboson.exponents import damping_thermal, exponent_matrix, lamb_shift_W
from spinboson.linear import (FULLY_CONNECTED, GENERAL, SECTORIZED, classify_topology,
                              contract_flips, contract_spins, dephasing_matrix,
                              fully_connected_coupling, ising_lamb_matrix, sectorized_coupling,
                              uniform_damping_scalar, uniform_lamb_scalar)
from spinboson.model import BathSpec, LinearCoupling, PolynomialCoupling, SystemSpec
from spinboson.oracle import trace_distance


def pairs(spec):
    basis = spec.basis
    a, b = np.meshgrid(np.arange(spec.dim), np.arange(spec.dim), indexing="ij")
    return basis[a.ravel()], basis[b.ravel()]


def local_spec(n, per_qubit=(0.3, 0.25, 0.1), omega=(0.8, 1.3, 2.1), T=0.7):
    return SystemSpec(n, sectorized_coupling(per_qubit, n),
                      BathSpec.thermal(np.tile(omega, n), T))


def connected_spec(n, lam=(0.3, 0.25), omega=(0.8, 1.3), T=0.7):
    return SystemSpec(n, fully_connected_coupling(lam, n), BathSpec.thermal(omega, T))


class TestTopology:
    def test_sectorized(self):
        topo = classify_topology(sectorized_coupling([0.1, 0.2], 3).lam)
        assert topo.tag == SECTORIZED and topo.modes_per_qubit == 2 and topo.uniform

    def test_fully_connected(self):
        topo = classify_topology(fully_connected_coupling([0.1, 0.2], 3).lam)
        assert topo.tag == FULLY_CONNECTED and topo.uniform

    def test_general(self, rng):
        topo = classify_topology(rng.normal(size=(3, 2)))
        assert topo.tag == GENERAL and not topo.uniform

    def test_non_uniform_sectorized(self):
        lam = np.zeros((2, 2))
        lam[0, 0], lam[1, 1] = 0.1, 0.2
        topo = classify_topology(lam)
        assert topo.tag == SECTORIZED and not topo.uniform


class TestIsingLamb:
    def test_zero_time(self, rng):
        np.testing.assert_array_equal(ising_lamb_matrix(random_spec(rng, 3, 2), 0.0), 0)

    def test_sectorized_diagonal(self):
        W = ising_lamb_matrix(local_spec(4), 2.5)
        np.testing.assert_array_equal(W - np.diag(np.diag(W)), 0)

    def test_fully_connected_constant(self):
        spec = connected_spec(4)
        t = 2.5
        W = ising_lamb_matrix(spec, t)
        w = np.array([0.8, 1.3])
        lam = np.array([0.3, 0.25])
        expected = np.sum(lam**2 * (np.sin(w * t) - w * t) / w**2)
        np.testing.assert_allclose(W, expected, rtol=1e-13)
        assert uniform_lamb_scalar(spec, t) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_contraction_matches_engine(self, n, rng):
        spec = random_spec(rng, n, 3)
        t = 1.9
        W = ising_lamb_matrix(spec, t)
        s, sp = pairs(spec)
        lhs = contract_spins(W, sp) - contract_spins(W, s)
        rhs = lamb_shift_W(spec, sp, t) - lamb_shift_W(spec, s, t)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-13)

    def test_rejects_polynomial(self):
        spec = SystemSpec(1, PolynomialCoupling([[(1.0, (0,))]], 1), BathSpec.thermal([1.0], 0))
        with pytest.raises(UnsupportedVariantError):
            ising_lamb_matrix(spec, 1.0)


class TestDephasingMatrix:
    def test_zero_time(self, rng):
        np.testing.assert_array_equal(dephasing_matrix(random_spec(rng, 3, 2), 0.0), 0)

    def test_psd(self, rng):
        spec = random_spec(rng, 4, 3)
        G = dephasing_matrix(spec, 3.3)
        for _ in range(50):
            x = rng.normal(size=4)
            assert x @ G @ x >= -1e-14

    def test_single_qubit(self):
        lam, w, T, t = 0.45, 1.1, 2.0, 1.4
        spec = SystemSpec(1, LinearCoupling([[lam]]), BathSpec.thermal([w], T))
        g = contract_flips(dephasing_matrix(spec, t), [1], [-1])
        expected = 4 * lam**2 / w**2 * (1 - np.cos(w * t)) / np.tanh(w / (2 * T))
        assert g == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_contraction_matches_engine(self, n, rng):
        spec = random_spec(rng, n, 3)
        t = 2.2
        s, sp = pairs(spec)
        np.testing.assert_allclose(contract_flips(dephasing_matrix(spec, t), s, sp),
                                   damping_thermal(spec, s, sp, t), rtol=1e-12, atol=1e-14)

    def test_rejects_squeezed(self, rng):
        with pytest.raises(UnsupportedVariantError):
            dephasing_matrix(random_spec(rng, 2, 2, bath="squeezed"), 1.0)


class TestUniformScalar:
    def test_recoherence(self):
        spec = SystemSpec(3, fully_connected_coupling([0.3], 3), BathSpec.thermal([1.0], 0.5))
        assert abs(uniform_damping_scalar(spec, 2 * np.pi)) < 1e-15

    def test_fully_connected_single_mode(self):
        lam, w, T, t = 0.3, 1.2, 0.6, 2.0
        spec = SystemSpec(3, fully_connected_coupling([lam], 3), BathSpec.thermal([w], T))
        expected = lam**2 / w**2 * (1 / np.tanh(w / (2 * T))) * (1 - np.cos(w * t))
        assert uniform_damping_scalar(spec, t) == pytest.approx(expected, rel=1e-13)

    def test_matches_contraction(self, rng):
        spec = connected_spec(3)
        t = 1.4
        g = uniform_damping_scalar(spec, t)
        s, sp = pairs(spec)
        dm = sp.sum(axis=1) - s.sum(axis=1)
        np.testing.assert_allclose(g * dm**2, damping_thermal(spec, s, sp, t), rtol=1e-12,
                                   atol=1e-15)

    def test_local_counts_flips(self):
        spec = local_spec(3)
        t = 1.4
        g = uniform_damping_scalar(spec, t)
        s, sp = pairs(spec)
        d2 = ((sp - s) ** 2).sum(axis=1)
        np.testing.assert_allclose(g * d2, damping_thermal(spec, s, sp, t), rtol=1e-12,
                                   atol=1e-15)

    def test_rejects_general(self, rng):
        with pytest.raises(ValidationError):
            uniform_damping_scalar(random_spec(rng, 2, 3), 1.0)
        with pytest.raises(ValidationError):
            uniform_lamb_scalar(local_spec(2), 1.0)


class TestStructure:
    def test_sectorized_factorizes(self, rng):
        n = 3
        spec = local_spec(n)
        one = local_spec(1)
        t = 2.7
        for k in range(6):
            rho = random_pure(2**n, rng) if k % 2 else random_rho(2**n, rng)
            full = apply_map(spec, rho, t)
            # the product channel acts element-wise with the product of factors
            f1 = np.exp(exponent_matrix(one, t))
            np.fill_diagonal(f1, 1.0)
            prod = f1
            for _ in range(n - 1):
                prod = np.kron(prod, f1)
            assert trace_distance(full, rho * prod) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_fully_connected_depends_on_delta_m(self, n):
        spec = connected_spec(n)
        G = -exponent_matrix(spec, 1.8).real
        dm = pair_delta_m(n)
        for v in np.unique(dm):
            g = G[dm == v]
            assert np.ptp(g) <= 1e-12 * np.max(G)
