import math

import numpy as np
import pytest

from stirap import kernels
from stirap.adiabatic import (
    DARK,
    MINUS,
    PLUS,
    dark_state,
    dressed_dephasing_generator,
    dressed_hamiltonian,
    evolve_adiabatic,
    gauge_matrix,
    in_frame,
    initial_bare_state,
    mixing_matrix,
    rhs_adiabatic,
    to_adiabatic,
    to_bare,
)
from stirap.lindblad import DEPHASING_OPERATOR, SimConfig, evolve_bare, hamiltonian3, rhs_bare
from stirap.linalg import ket_projector, projector
from stirap.protocols import Protocol, sample

SINE = Protocol.linear_sine(2.0, 40.0)
GAUSS = Protocol.gaussian(2.0, 16.0, tau=1.0)
S2 = math.sqrt(2.0) / 2.0

rng = np.random.default_rng(3)
THETAS = rng.uniform(0.0, math.pi / 2, 50)


def random_state(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


class TestMixingMatrix:
    def test_columns_at_zero(self):
        w = mixing_matrix(0.0)
        np.testing.assert_array_equal(w[:, PLUS], [0, S2, S2])
        np.testing.assert_array_equal(w[:, DARK], [1, 0, 0])
        np.testing.assert_array_equal(w[:, MINUS], [0, -S2, S2])

    @pytest.mark.parametrize("theta", THETAS)
    def test_unitary(self, theta):
        w = mixing_matrix(theta)
        np.testing.assert_allclose(w.conj().T @ w, np.eye(3), atol=1e-14)

    @pytest.mark.parametrize("theta", THETAS)
    def test_diagonalises_hamiltonian(self, theta):
        s = sample(SINE, theta * 80.0 / math.pi)
        w = mixing_matrix(s.theta)
        np.testing.assert_allclose(w.conj().T @ hamiltonian3(s) @ w, dressed_hamiltonian(s.omega), atol=1e-12)

    @pytest.mark.parametrize("theta", THETAS)
    def test_dephasing_generator_theta_free(self, theta):
        w = mixing_matrix(theta)
        np.testing.assert_allclose(w.conj().T @ DEPHASING_OPERATOR @ w, dressed_dephasing_generator(),
                                   atol=1e-12)

    def test_dark_column(self):
        for theta in THETAS[:5]:
            np.testing.assert_allclose(mixing_matrix(theta)[:, DARK], dark_state(theta), atol=1e-15)

    def test_round_trip(self):
        rho = random_state(rng)
        np.testing.assert_allclose(to_bare(to_adiabatic(rho, 0.7), 0.7), rho, atol=1e-14)


class TestGaugeMatrix:
    def test_zero_rate(self):
        assert not gauge_matrix(0.0).any()

    def test_entry(self):
        m = gauge_matrix(math.pi / 80)
        assert m[1, 0] == pytest.approx(0.02777, abs=1e-5)
        assert m[1, 0] == pytest.approx(S2 * math.pi / 80, rel=1e-15)

    def test_real_antisymmetric(self):
        m = gauge_matrix(0.3)
        assert not m.imag.any()
        np.testing.assert_array_equal(m, -m.T)

    @pytest.mark.parametrize("protocol", [SINE, GAUSS], ids=["sine", "gauss"])
    def test_finite_difference(self, protocol):
        h = 1e-6
        for t in np.linspace(0.1, 0.9, 9) * protocol.t0:
            w = mixing_matrix(sample(protocol, t).theta)
            dw = (mixing_matrix(sample(protocol, t + h).theta) - mixing_matrix(sample(protocol, t - h).theta)) / (2 * h)
            np.testing.assert_allclose(w.conj().T @ dw, gauge_matrix(sample(protocol, t).theta_dot), atol=1e-6)


class TestDissipator:
    def test_dark_state_exact(self):
        f = dressed_dephasing_generator()
        d = projector(DARK)
        assert not (f @ d @ f.conj().T - d).any()

    def test_kernel_stationary_dark(self):
        row = np.array([0.0, 0.0, 2.0, 0.3, 0.0])
        out = kernels.adiabatic_rhs(row, projector(DARK), np.zeros((0, 3, 3), complex), np.array([2.0]))
        assert not out.any()


class TestRhsAdiabatic:
    @staticmethod
    def component_equations(r, om, td, g):
        """The six component equations, written out by hand."""
        k = S2 * td
        pp, dd, mm = r[0, 0], r[1, 1], r[2, 2]
        pd, dm, pm = r[0, 1], r[1, 2], r[0, 2]
        dp, md, mp = r[1, 0], r[2, 1], r[2, 0]
        return {
            (0, 0): k * (dp + pd) + g * (mm - pp),
            (2, 2): k * (dm + md) + g * (pp - mm),
            (1, 1): -k * (pd + dp + dm + md),
            (0, 1): -1j * om * pd - k * (-dd + pp + pm) + g * (md - pd),
            (1, 2): -1j * om * dm - k * (-dd + pm + mm) + g * (dp - dm),
            (0, 2): -2j * om * pm + k * (dm + pd) + g * (mp - pm),
        }

    @pytest.mark.parametrize("protocol", [SINE, GAUSS], ids=["sine", "gauss"])
    def test_matches_component_equations(self, protocol):
        local = np.random.default_rng(4)
        cfg = SimConfig(protocol, 1.7)
        for t in local.uniform(0, protocol.t0, 25):
            rho = random_state(local)
            s = sample(protocol, t)
            out = rhs_adiabatic(t, rho, cfg)
            for (i, j), v in self.component_equations(rho, s.omega, s.theta_dot, 1.7).items():
                assert abs(out[i, j] - v) <= 1e-12
                assert abs(out[j, i] - np.conj(v)) <= 1e-12

    def test_trace_free(self):
        cfg = SimConfig(GAUSS, 2.0)
        for t in np.linspace(0, 16, 20):
            assert abs(np.trace(rhs_adiabatic(t, random_state(rng), cfg))) <= 1e-14

    def test_consistent_with_bare(self):
        # d/dt (W^T rho W) = W^T rho_dot W + M^T rho_a + rho_a M
        cfg = SimConfig(GAUSS, 2.0)
        for t in (3.0, 8.0, 11.5):
            s = sample(GAUSS, t)
            rho = random_state(rng)
            w, m = mixing_matrix(s.theta), gauge_matrix(s.theta_dot)
            rho_a = w.conj().T @ rho @ w
            expected = w.conj().T @ rhs_bare(t, rho, cfg) @ w + m.T @ rho_a + rho_a @ m
            np.testing.assert_allclose(rhs_adiabatic(t, rho_a, cfg), expected, atol=1e-12)


FRAME_GRID = [
    (SINE, 0.0), (SINE, 2.0), (Protocol.linear_sine(6.0, 40.0), 2.0),
    (Protocol.linear_sine(2.0, 120.0), 4.0),
    (GAUSS, 0.0), (GAUSS, 2.0), (Protocol.gaussian(6.0, 16.0), 2.0), (GAUSS.replace(t0=48.0), 4.0),
]


class TestEvolveAdiabatic:
    @pytest.mark.parametrize("protocol, gamma", FRAME_GRID)
    def test_frame_equivalence(self, protocol, gamma):
        cfg = SimConfig(protocol, gamma, sample_stride=25)
        a = evolve_adiabatic(cfg)
        b = evolve_bare(cfg, initial_bare_state(cfg))
        assert np.max(np.abs(in_frame(a, "bare").states - b.states)) <= 1e-6
        assert np.max(np.abs(in_frame(b, "adiabatic").states - a.states)) <= 1e-6

    def test_sine_start_is_level_one(self):
        np.testing.assert_allclose(initial_bare_state(SimConfig(SINE, 2.0)), projector(0), atol=1e-16)

    def test_dark_state_followed_without_dephasing(self):
        tr = evolve_adiabatic(SimConfig(SINE, 0.0, sample_stride=10))
        assert np.min(tr.states[:, DARK, DARK].real) >= 0.995

    def test_decay_ordering(self):
        final = [evolve_adiabatic(SimConfig(SINE, g, sample_stride=1000)).final[DARK, DARK].real
                 for g in (0.0, 2.0, 4.0)]
        assert final[0] > final[1] > final[2]

    def test_symmetry_relations_emerge(self):
        st = evolve_adiabatic(SimConfig(SINE, 2.0, sample_stride=4)).states
        assert np.max(np.abs(st[:, PLUS, PLUS] - st[:, MINUS, MINUS])) <= 0.05
        assert np.max(np.abs(st[:, PLUS, DARK] - st[:, DARK, MINUS])) <= 0.05
        assert np.max(np.abs(st[:, PLUS, MINUS])) <= 0.05

    def test_frame_label(self):
        tr = evolve_adiabatic(SimConfig(GAUSS, 2.0, sample_stride=1000))
        assert tr.frame == "adiabatic"
        assert in_frame(tr, "adiabatic") is tr
        with pytest.raises(ValueError):
            in_frame(tr, "rotating")

    def test_custom_start(self):
        start = ket_projector([S2, S2, 0.0])
        tr = evolve_adiabatic(SimConfig(SINE, 2.0, sample_stride=1000), start)
        np.testing.assert_array_equal(tr.states[0], start)
