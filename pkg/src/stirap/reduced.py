"""Approximate descriptions of the dressed-frame dynamics.

``evolve_reduced`` integrates the closed system for ``(rho_dd, a, b)`` with
``rho_{+d} = rho_{d-} = a + ib``, ``rho_{++} = rho_{--}`` and
``rho_{+-} = 0``. The remaining functions are closed forms: the quasi-static
solution for the linear-sine protocol, its end-of-pulse transfer efficiency,
the two adiabaticity margins and the all-level-dephasing reference law.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from . import integrate, kernels
from .errors import NumericFailure, UsageError
from .lindblad import DEPHASING_OPERATOR, SimConfig
from .protocols import LINEAR_SINE, drive_arrays, sample


#: Tolerated |analytic - reduced| for rho_dd(T0) on the linear-sine defaults.
LADDER_TOL_ANALYTIC = 0.02
#: Tolerated sup_t |reduced - exact| for rho_dd(t).
LADDER_TOL_EXACT = 0.05
#: Panels of the composite Simpson rule used for eta.
ETA_PANELS = 10_000
#: Grid points used to maximise the adiabaticity margins.
MARGIN_GRID = 10_000


class ReducedState(NamedTuple):
    rho_dd: float
    a: float
    b: float


@dataclass(frozen=True)
class ReducedTrajectory:
    times: np.ndarray
    rho_dd: np.ndarray
    a: np.ndarray
    b: np.ndarray
    cfg: SimConfig = field(repr=False)

    def points(self):
        for i, t in enumerate(self.times):
            yield float(t), ReducedState(float(self.rho_dd[i]), float(self.a[i]), float(self.b[i]))

    def adiabatic_states(self):
        """Dressed-frame density matrices implied by the symmetry ansatz."""
        return ansatz_states(self.rho_dd, self.a + 1j * self.b)


def ansatz_states(rho_dd, coherence=0.0):
    rho_dd = np.asarray(rho_dd, dtype=float)
    c = np.broadcast_to(np.asarray(coherence, dtype=np.complex128), rho_dd.shape)
    out = np.zeros(rho_dd.shape + (3, 3), dtype=np.complex128)
    side = 0.5 * (1.0 - rho_dd)
    out[..., 0, 0] = out[..., 2, 2] = side
    out[..., 1, 1] = rho_dd
    out[..., 0, 1] = out[..., 1, 2] = c
    out[..., 1, 0] = out[..., 2, 1] = np.conj(c)
    return out


@dataclass(frozen=True)
class EfficiencyReport:
    rho33_final: float
    chi: float
    exponent: float
    adiabatic_margin_1: float
    adiabatic_margin_2: float


def rhs_reduced(t, s, cfg):
    d = sample(cfg.protocol, t)
    row = np.array([d.omega_p, d.omega_s, d.omega, d.theta, d.theta_dot])
    out = kernels.reduced_rhs(row, np.asarray(s, dtype=float), np.array([cfg.gamma]))
    return ReducedState(float(out[0]), float(out[1]), float(out[2]))


def evolve_reduced(cfg, s0=ReducedState(1.0, 0.0, 0.0)):
    n_steps, dt = cfg.grid()
    drive = integrate.drive_table(cfg.protocol, n_steps, dt)
    ys, kind, step, value = integrate.rk4_reduced(
        np.asarray(s0, dtype=float), drive, np.array([cfg.gamma]),
        dt, n_steps, cfg.sample_stride)
    if kind != integrate.BREACH_NONE:
        raise NumericFailure(integrate.BREACH_NAMES[kind], value, step * dt)
    times = integrate.sample_indices(n_steps, cfg.sample_stride) * dt
    times[-1] = cfg.protocol.t0
    return ReducedTrajectory(times, ys[:, 0].copy(), ys[:, 1].copy(), ys[:, 2].copy(), cfg)


def chi(gamma, theta_dot, omega):
    return 2.0 * gamma * theta_dot ** 2 / omega ** 2


def analytic_rho_dd(t, gamma, theta_dot, omega):
    """Quasi-static dark-state population 1/3 + (2/3) exp(-3 chi t).

    Valid for constant theta_dot and Omega, i.e. the linear-sine protocol.
    Accepts scalar or array ``t``.
    """
    return 1.0 / 3.0 + (2.0 / 3.0) * np.exp(-3.0 * chi(gamma, theta_dot, omega) * np.asarray(t))


def _require_linear_sine(protocol):
    if protocol.kind != LINEAR_SINE:
        raise UsageError("the closed-form law only holds for the linear_sine protocol")


def analytic_trajectory(cfg, times):
    _require_linear_sine(cfg.protocol)
    p = cfg.protocol
    return analytic_rho_dd(times, cfg.gamma, math.pi / (2.0 * p.t0), p.omega0)


def transfer_efficiency(gamma, omega0, t0):
    theta_dot = math.pi / (2.0 * t0)
    exponent = 3.0 * math.pi * gamma * theta_dot / omega0 ** 2
    return EfficiencyReport(
        rho33_final=1.0 / 3.0 + (2.0 / 3.0) * math.exp(-exponent),
        chi=chi(gamma, theta_dot, omega0),
        exponent=exponent,
        adiabatic_margin_1=theta_dot / omega0,
        adiabatic_margin_2=exponent,
    )


def eta(protocol):
    """(3/4) * integral of sin^2(2 theta) over the pulse window."""
    if protocol.kind == LINEAR_SINE:
        return 3.0 * protocol.t0 / 8.0
    t = np.linspace(0.0, protocol.t0, ETA_PANELS + 1)
    theta = drive_arrays(protocol, t)["theta"]
    return 0.75 * float(simpson(np.sin(2.0 * theta) ** 2, x=t))


def classical_reference(gamma13, protocol):
    """Final target population when all coherences dephase (rate gamma13 on rho_13).

    The 1-2 and 2-3 dephasing rates drop out of this law.
    """
    if gamma13 < 0:
        raise ValueError("gamma13 must be >= 0")
    if gamma13 == 0:
        return 1.0
    return 1.0 / 3.0 + (2.0 / 3.0) * math.exp(-gamma13 * eta(protocol))


def model_gamma13(gamma):
    """Decay rate of rho_13 generated by gamma (F rho F - rho); zero for this model."""
    f = np.real(np.diag(DEPHASING_OPERATOR))
    return gamma * (1.0 - f[0] * f[2])


def margin_profile(cfg, n_points=MARGIN_GRID):
    """Times and the two margin curves theta_dot/Omega and 3 pi gamma theta_dot/Omega^2."""
    t = np.linspace(0.0, cfg.protocol.t0, n_points)
    d = drive_arrays(cfg.protocol, t)
    with np.errstate(divide="ignore", over="ignore"):
        m1 = np.abs(d["theta_dot"]) / d["omega"]
        m2 = 3.0 * math.pi * cfg.gamma * np.abs(d["theta_dot"]) / d["omega"] ** 2
    return t, m1, m2


def adiabatic_margins(cfg):
    _, m1, m2 = margin_profile(cfg)
    return float(np.max(m1)), float(np.max(m2))
