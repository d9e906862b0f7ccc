import math

import numpy as np
import pytest

from stirap.errors import ContractViolation, DomainError, UsageError
from stirap.protocols import Protocol, drive_arrays, sample, theta_dot_gaussian

SINE = Protocol.linear_sine(2.0, 40.0)
GAUSS = Protocol.gaussian(2.0, 16.0, tau=1.0)


class TestConstruction:
    def test_gaussian_default_width(self):
        assert GAUSS.t_width == 2.0

    def test_width_convention_enforced(self):
        with pytest.raises(ContractViolation):
            Protocol.gaussian(2.0, 16.0, t_width=3.0)
        p = Protocol.gaussian(2.0, 16.0, t_width=3.0, free_width=True)
        assert p.t_width == 3.0

    def test_t0_from_width(self):
        assert Protocol.gaussian(2.0, t_width=24.0).t0 == 192.0

    @pytest.mark.parametrize("omega0, t0", [(0.0, 40.0), (-1.0, 40.0), (2.0, 0.0), (math.nan, 40.0)])
    def test_bad_parameters(self, omega0, t0):
        with pytest.raises(ContractViolation):
            Protocol.linear_sine(omega0, t0)

    def test_replace_rescales_width(self):
        p = GAUSS.replace(t0=192.0)
        assert p.t_width == 24.0
        assert p.tau == 1.0

    def test_sine_rejects_gaussian_fields(self):
        with pytest.raises(ContractViolation):
            Protocol("linear_sine", 2.0, 40.0, tau=1.0)


class TestLinearSine:
    def test_start(self):
        s = sample(SINE, 0.0)
        assert (s.omega_p, s.omega_s, s.omega, s.theta) == (0.0, 2.0, 2.0, 0.0)
        assert s.theta_dot == pytest.approx(math.pi / 80, rel=1e-15)

    def test_end(self):
        s = sample(SINE, 40.0)
        assert s.theta == pytest.approx(math.pi / 2, abs=1e-15)
        assert s.omega == 2.0

    def test_constant_coupling(self):
        d = drive_arrays(SINE, np.linspace(0, 40, 101))
        assert np.all(d["omega"] == 2.0)
        np.testing.assert_allclose(np.hypot(d["omega_p"], d["omega_s"]), 2.0, rtol=1e-15)


class TestGaussian:
    def test_symmetric_point(self):
        s = sample(GAUSS, 8.0)
        assert s.omega_p == pytest.approx(s.omega_s, rel=1e-15)
        assert s.theta == pytest.approx(math.pi / 4, abs=1e-15)
        assert s.theta_dot == pytest.approx(0.25, rel=1e-15)

    def test_theta_dot_off_centre(self):
        v = theta_dot_gaussian(GAUSS, 10.0)
        assert v == pytest.approx(0.25 / math.cosh(1.0), rel=1e-14)
        h = 1e-6
        fd = (sample(GAUSS, 10.0 + h).theta - sample(GAUSS, 10.0 - h).theta) / (2 * h)
        assert fd == pytest.approx(v, rel=1e-8)

    def test_theta_dot_decays_away_from_centre(self):
        t = np.linspace(8.0, 16.0, 200)
        v = np.array([theta_dot_gaussian(GAUSS, x) for x in t])
        assert np.all(np.diff(v) < 0)
        v = np.array([theta_dot_gaussian(GAUSS, x) for x in 16.0 - t])
        assert np.all(np.diff(v) < 0)

    def test_wrong_variant(self):
        with pytest.raises(UsageError):
            theta_dot_gaussian(SINE, 1.0)

    def test_window_edges(self):
        # edge amplitudes are tiny; tan(theta(0)) = exp(-tau T0 / T^2) = exp(-4)
        s0, s1 = sample(GAUSS, 0.0), sample(GAUSS, 16.0)
        assert max(s0.omega_p, s1.omega_s) < 1e-6 * GAUSS.omega0
        assert s0.theta == pytest.approx(math.atan(math.exp(-4.0)), rel=1e-12)
        assert s1.theta == pytest.approx(math.pi / 2 - math.atan(math.exp(-4.0)), rel=1e-12)

    @pytest.mark.parametrize("t0", [16.0, 48.0, 192.0])
    def test_edge_angle_closed_form(self, t0):
        # tan(theta(0)) = exp(-tau T0 / T^2); with T = T0/8 this is exp(-64 tau / T0)
        p = GAUSS.replace(t0=t0)
        assert sample(p, 0.0).theta == pytest.approx(math.atan(math.exp(-64.0 / t0)), rel=1e-12)


@pytest.mark.parametrize("p", [SINE, GAUSS, GAUSS.replace(t0=192.0), Protocol.gaussian(8.0, 16.0, tau=2.0)],
                         ids=["sine", "gauss", "gauss_long", "gauss_tau2"])
class TestDriveInvariants:
    def test_closed_form_theta_dot(self, p):
        rng = np.random.default_rng(0)
        h = 1e-6
        for t in rng.uniform(0.05 * p.t0, 0.95 * p.t0, 100):
            fd = (sample(p, t + h).theta - sample(p, t - h).theta) / (2 * h)
            assert fd == pytest.approx(sample(p, t).theta_dot, rel=1e-6)

    def test_theta_non_decreasing(self, p):
        theta = drive_arrays(p, np.linspace(0, p.t0, 5001))["theta"]
        assert np.all(np.diff(theta) >= 0)
        assert np.all((theta >= 0) & (theta <= math.pi / 2))

    def test_sample_relations(self, p):
        for t in np.linspace(0, p.t0, 33):
            s = sample(p, t)
            assert s.omega == pytest.approx(math.hypot(s.omega_p, s.omega_s), abs=1e-12)
            if s.omega_s > 0:
                assert math.tan(s.theta) * s.omega_s == pytest.approx(s.omega_p, abs=1e-10)

    def test_vectorised_matches_scalar(self, p):
        t = np.linspace(0, p.t0, 17)
        d = drive_arrays(p, t)
        for i, x in enumerate(t):
            s = sample(p, x)
            for k in ("omega_p", "omega_s", "omega", "theta", "theta_dot"):
                assert d[k][i] == pytest.approx(getattr(s, k), rel=1e-14, abs=1e-300)

    def test_domain(self, p):
        with pytest.raises(DomainError):
            sample(p, -0.1)
        with pytest.raises(DomainError):
            sample(p, p.t0 * 1.01)
        with pytest.raises(DomainError):
            drive_arrays(p, [0.0, 2 * p.t0])
