"""Exact master-equation dynamics in the bare basis.

Two independent code paths integrate the same physics:

* the 3-level engine in the single-excitation basis
  ``|1> = |100>, |2> = |010>, |3> = |001>``, and
* an oracle that works in the full 8-dimensional three-spin space with
  Pauli operators built from scratch, projected back onto that basis.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import integrate, kernels
from .errors import ConfigError, NumericFailure
from .linalg import density_matrix3, projector
from .protocols import GAUSSIAN, Protocol, sample

#: Upper bound on fixed RK4 steps per run; larger requests are rejected.
MAX_STEPS = 20_000_000

#: sigma^z of the intermediate spin, restricted to the single-excitation basis.
DEPHASING_OPERATOR = np.diag([-1.0, 1.0, -1.0]).astype(np.complex128)


def peak_coupling(protocol):
    """Upper bound of Omega(t): Omega0, or sqrt(2)*Omega0 where gaussians overlap."""
    if protocol.kind == GAUSSIAN:
        return math.sqrt(2.0) * protocol.omega0
    return protocol.omega0


@dataclass(frozen=True)
class SimConfig:
    protocol: Protocol
    gamma: float
    delta: float = 0.0
    dt: Optional[float] = None
    sample_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError("gamma must be finite and >= 0")
        if not math.isfinite(self.delta):
            raise ConfigError("delta must be finite")
        if not isinstance(self.sample_stride, (int, np.integer)) or self.sample_stride < 1:
            raise ConfigError("sample_stride must be an integer >= 1")
        if self.dt is not None:
            if not (math.isfinite(self.dt) and self.dt > 0):
                raise ConfigError("dt must be > 0")
            if self.dt > self.max_dt * (1 + 1e-12):
                raise ConfigError(f"dt={self.dt} exceeds the stability bound {self.max_dt:.6g}")

    @property
    def _rate_scale(self):
        return max(peak_coupling(self.protocol), self.gamma, 1.0)

    @property
    def max_dt(self):
        return min(0.01 / self._rate_scale, self.protocol.t0 / 1000.0)

    @property
    def default_dt(self):
        return min(self.protocol.t0 / 5000.0, 0.01 / self._rate_scale)

    def grid(self):
        """Number of steps and the step actually used (T0 divided evenly)."""
        dt = self.default_dt if self.dt is None else self.dt
        n_steps = max(1, math.ceil(self.protocol.t0 / dt - 1e-9))
        if n_steps > MAX_STEPS:
            raise ConfigError(
                f"run needs {n_steps} RK4 steps (limit {MAX_STEPS}); reduce gamma or omega0"
            )
        return n_steps, self.protocol.t0 / n_steps

    def replace(self, **changes):
        fields_ = dict(protocol=self.protocol, gamma=self.gamma, delta=self.delta,
                       dt=self.dt, sample_stride=self.sample_stride)
        fields_.update(changes)
        return SimConfig(**fields_)


@dataclass(frozen=True)
class Certification:
    max_trace_drift: float
    max_hermiticity_defect: float
    min_eigenvalue: float
    n_steps: int
    dt: float
    max_leakage: Optional[float] = None

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class Trajectory:
    """Sampled density matrices, either in the bare or the adiabatic basis."""

    times: np.ndarray
    states: np.ndarray
    trace_err: np.ndarray
    purity: np.ndarray
    frame: str
    cfg: SimConfig = field(repr=False)
    certification: Certification = field(repr=False)

    def __post_init__(self):
        for a in (self.times, self.states, self.trace_err, self.purity):
            a.setflags(write=False)

    def populations(self):
        return np.real(np.einsum("tii->ti", self.states))

    @property
    def final(self):
        return self.states[-1].copy()


def hamiltonian3(s):
    p, q = s.omega_p, s.omega_s
    return np.array([[0, p, 0], [p, 0, q], [0, q, 0]], dtype=np.complex128)


def dissipator3(rho, gamma):
    rho = np.asarray(rho, dtype=np.complex128)
    f = DEPHASING_OPERATOR
    return gamma * (f @ rho @ f.conj().T - rho)


_NO_OPS = np.zeros((0, 3, 3), dtype=np.complex128)


def _row(s):
    return np.array([s.omega_p, s.omega_s, s.omega, s.theta, s.theta_dot])


def rhs_bare(t, rho, cfg):
    """-i[H(t), rho] + D(rho) in the bare basis."""
    rho = np.asarray(rho, dtype=np.complex128)
    return kernels.bare_rhs(_row(sample(cfg.protocol, t)), rho, _NO_OPS, np.array([cfg.gamma]))


def _raise_breach(kind, step, value, dt):
    raise NumericFailure(integrate.BREACH_NAMES[kind], value, step * dt)


def _finish(cfg, states, frame, cert, n_steps, dt):
    idx = integrate.sample_indices(n_steps, cfg.sample_stride)
    times = idx * dt
    times[-1] = cfg.protocol.t0
    trace_err = np.abs(np.real(np.einsum("tii->t", states)) - 1.0)
    pur = np.sum(np.abs(states) ** 2, axis=(1, 2))
    return Trajectory(times, states, trace_err, pur, frame, cfg, cert)


def run_density_kernel(cfg, model, rho0, ops, params):
    n_steps, dt = cfg.grid()
    drive = integrate.drive_table(cfg.protocol, n_steps, dt)
    states, kind, step, value, tr, herm, lam = integrate.rk4_density(
        model, rho0, drive, ops, params, dt, n_steps, cfg.sample_stride)
    if kind != integrate.BREACH_NONE:
        _raise_breach(kind, step, value, dt)
    return states, Certification(float(tr), float(herm), float(lam), n_steps, dt), n_steps, dt


def evolve_bare(cfg, rho0=None):
    """Integrate the 3-level master equation from ``rho0`` (default ``|1><1|``) to T0."""
    rho0 = projector(0) if rho0 is None else density_matrix3(rho0)
    states, cert, n_steps, dt = run_density_kernel(
        cfg, integrate.MODEL_BARE, rho0, _NO_OPS, np.array([cfg.gamma]))
    return _finish(cfg, states, "bare", cert, n_steps, dt)


# --- 8-dimensional oracle -------------------------------------------------

# single spin, basis order (|0>, |1>); |1> carries the excitation
_SZ = np.diag([-1.0, 1.0]).astype(np.complex128)
_SP = np.array([[0, 0], [1, 0]], dtype=np.complex128)
_SM = _SP.conj().T
_I2 = np.eye(2, dtype=np.complex128)

#: indices of |100>, |010>, |001> in the kron-ordered 8-dim basis
SECTOR = np.array([4, 2, 1])


def _on(op1=_I2, op2=_I2, op3=_I2):
    return np.kron(np.kron(op1, op2), op3)


def spin_operators():
    """(sum_j sz_j, sz_2, hopping 1<->2, hopping 2<->3) in the 8-dim space."""
    zsum = _on(op1=_SZ) + _on(op2=_SZ) + _on(op3=_SZ)
    z2 = _on(op2=_SZ)
    hop12 = _on(op1=_SP, op2=_SM) + _on(op1=_SM, op2=_SP)
    hop23 = _on(op2=_SP, op3=_SM) + _on(op2=_SM, op3=_SP)
    return np.ascontiguousarray(np.stack([zsum, z2, hop12, hop23]))


def embed8(rho3):
    rho = np.zeros((8, 8), dtype=np.complex128)
    rho[np.ix_(SECTOR, SECTOR)] = rho3
    return rho


def evolve_full8(cfg, rho0=None):
    """Three-spin Lindblad integration, projected onto the single-excitation basis.

    ``rho0`` is a 3x3 state embedded in the sector (default ``|100><100|``).
    The returned certification covers the full 8x8 run and records the
    largest population found outside the sector.
    """
    rho0 = projector(0) if rho0 is None else density_matrix3(rho0)
    states8, cert, n_steps, dt = run_density_kernel(
        cfg, integrate.MODEL_FULL8, embed8(rho0), spin_operators(),
        np.array([cfg.gamma, cfg.delta]))
    diag = np.real(np.einsum("tii->ti", states8))
    outside = np.setdiff1d(np.arange(8), SECTOR)
    leakage = float(np.max(np.abs(diag[:, outside]).sum(axis=1)))
    cert = Certification(cert.max_trace_drift, cert.max_hermiticity_defect, cert.min_eigenvalue,
                         cert.n_steps, cert.dt, max_leakage=leakage)
    states = np.ascontiguousarray(states8[:, SECTOR][:, :, SECTOR])
    return _finish(cfg, states, "bare", cert, n_steps, dt)
