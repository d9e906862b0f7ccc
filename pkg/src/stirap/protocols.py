"""Pump/Stokes pulse pairs and their exact instantaneous samples.

Two protocols are supported:

``linear_sine``
    ``Omega_P = Omega0 sin(pi t / 2T0)``, ``Omega_S = Omega0 cos(pi t / 2T0)``,
    which keeps the total coupling constant and the mixing angle linear in t.
``gaussian``
    two Gaussians of width ``T`` displaced by ``tau`` around ``T0/2``, Stokes
    first for ``tau > 0``. By default the window is tied to the width by
    ``T0 = 8 T``.

All quantities are dimensionless (rates, frequencies and times in the same
arbitrary unit, with hbar = 1).
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import ContractViolation, DomainError, UsageError

LINEAR_SINE = "linear_sine"
GAUSSIAN = "gaussian"
KINDS = (LINEAR_SINE, GAUSSIAN)

# grids built as k*dt may overshoot T0 by a few ulps
_TIME_SLACK = 1e-12


@dataclass(frozen=True)
class Protocol:
    kind: Literal["linear_sine", "gaussian"]
    omega0: float
    t0: float
    tau: float = 0.0
    t_width: Optional[float] = None
    free_width: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractViolation(f"unknown protocol kind {self.kind!r}")
        for name in ("omega0", "t0", "tau"):
            if not math.isfinite(getattr(self, name)):
                raise ContractViolation(f"{name} must be finite")
        if self.omega0 <= 0:
            raise ContractViolation("omega0 must be > 0")
        if self.t0 <= 0:
            raise ContractViolation("t0 must be > 0")
        if self.kind == GAUSSIAN:
            if self.t_width is None:
                object.__setattr__(self, "t_width", self.t0 / 8.0)
            if not (math.isfinite(self.t_width) and self.t_width > 0):
                raise ContractViolation("t_width must be > 0")
            if not self.free_width and not math.isclose(self.t0, 8.0 * self.t_width, rel_tol=1e-12):
                raise ContractViolation(
                    f"gaussian protocol requires t0 = 8*t_width (got t0={self.t0}, "
                    f"t_width={self.t_width}); pass free_width=True to decouple"
                )
        elif self.t_width is not None or self.tau != 0.0:
            raise ContractViolation("tau/t_width only apply to the gaussian protocol")

    @classmethod
    def linear_sine(cls, omega0, t0):
        return cls(LINEAR_SINE, float(omega0), float(t0))

    @classmethod
    def gaussian(cls, omega0, t0=None, tau=1.0, t_width=None, free_width=False):
        if t0 is None and t_width is None:
            raise ContractViolation("gaussian protocol needs t0 or t_width")
        if t0 is None:
            t0 = 8.0 * t_width
        return cls(GAUSSIAN, float(omega0), float(t0), float(tau),
                   None if t_width is None else float(t_width), free_width)

    def replace(self, **changes):
        """Copy with some parameters changed.

        For a gaussian with the default width convention, changing ``t0``
        rescales the width so that ``T0 = 8T`` still holds.
        """
        fields = dict(kind=self.kind, omega0=self.omega0, t0=self.t0, tau=self.tau,
                      t_width=self.t_width, free_width=self.free_width)
        if self.kind == GAUSSIAN and not self.free_width and "t0" in changes and "t_width" not in changes:
            fields["t_width"] = None
        fields.update(changes)
        return Protocol(**fields)


@dataclass(frozen=True)
class DriveSample:
    omega_p: float
    omega_s: float
    omega: float
    theta: float
    theta_dot: float


def _check_time(p, t):
    if not (-_TIME_SLACK * p.t0 <= t <= p.t0 * (1 + _TIME_SLACK)):
        raise DomainError(f"t={t} outside the protocol window [0, {p.t0}]")


def theta_dot_gaussian(p: Protocol, t: float) -> float:
    """Exact dθ/dt for the gaussian pair: (τ/T²) sech(2τ(t - T0/2)/T²)."""
    if p.kind != GAUSSIAN:
        raise UsageError("theta_dot_gaussian requires the gaussian protocol")
    w2 = p.t_width ** 2
    u = 2.0 * p.tau * (t - 0.5 * p.t0) / w2
    return p.tau / w2 / math.cosh(u) if abs(u) < 700 else 0.0


def sample(p: Protocol, t: float) -> DriveSample:
    _check_time(p, t)
    if p.kind == LINEAR_SINE:
        theta = math.pi * t / (2.0 * p.t0)
        return DriveSample(p.omega0 * math.sin(theta), p.omega0 * math.cos(theta),
                           p.omega0, theta, math.pi / (2.0 * p.t0))
    w2 = p.t_width ** 2
    c = 0.5 * p.t0
    op = p.omega0 * math.exp(-((t - 0.5 * p.tau - c) ** 2) / w2)
    os_ = p.omega0 * math.exp(-((t + 0.5 * p.tau - c) ** 2) / w2)
    return DriveSample(op, os_, math.hypot(op, os_), math.atan2(op, os_), theta_dot_gaussian(p, t))


def drive_arrays(p: Protocol, times):
    """Vectorised :func:`sample` over an array of times.

    Returns a dict of arrays keyed like the :class:`DriveSample` fields.
    """
    t = np.asarray(times, dtype=float)
    if t.size and (t.min() < -_TIME_SLACK * p.t0 or t.max() > p.t0 * (1 + _TIME_SLACK)):
        raise DomainError(f"times outside the protocol window [0, {p.t0}]")
    if p.kind == LINEAR_SINE:
        theta = np.pi * t / (2.0 * p.t0)
        return dict(omega_p=p.omega0 * np.sin(theta), omega_s=p.omega0 * np.cos(theta),
                    omega=np.full_like(t, p.omega0), theta=theta,
                    theta_dot=np.full_like(t, np.pi / (2.0 * p.t0)))
    w2 = p.t_width ** 2
    c = 0.5 * p.t0
    op = p.omega0 * np.exp(-((t - 0.5 * p.tau - c) ** 2) / w2)
    os_ = p.omega0 * np.exp(-((t + 0.5 * p.tau - c) ** 2) / w2)
    u = 2.0 * p.tau * (t - c) / w2
    with np.errstate(over="ignore"):
        theta_dot = p.tau / w2 / np.cosh(u)
    return dict(omega_p=op, omega_s=os_, omega=np.hypot(op, os_),
                theta=np.arctan2(op, os_), theta_dot=theta_dot)
