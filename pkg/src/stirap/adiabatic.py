"""Dressed-basis (adiabatic-frame) dynamics.

The basis order is ``(|+>, |d>, |->)``. ``W(theta)`` has the bare basis on
its rows and the dressed states on its columns, so ``rho_a = W^T rho W``
(``W`` is real). The time dependence of the basis enters through the gauge
matrix ``M = W^T dW/dt``.
"""

import math

import numpy as np

from . import integrate, kernels
from .lindblad import Trajectory, _finish, run_density_kernel
from .linalg import density_matrix3, projector
from .protocols import drive_arrays, sample

_S2 = math.sqrt(2.0) / 2.0

PLUS, DARK, MINUS = 0, 1, 2

_NO_OPS = np.zeros((0, 3, 3), dtype=np.complex128)


def mixing_matrix(theta):
    s, c = math.sin(theta), math.cos(theta)
    return np.array(
        [[_S2 * s, c, _S2 * s],
         [_S2, 0.0, -_S2],
         [_S2 * c, -s, _S2 * c]],
        dtype=np.complex128,
    )


def _mixing_stack(theta):
    theta = np.asarray(theta, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    w = np.zeros(theta.shape + (3, 3))
    w[..., 0, 0] = w[..., 0, 2] = _S2 * s
    w[..., 0, 1] = c
    w[..., 1, 0] = _S2
    w[..., 1, 2] = -_S2
    w[..., 2, 0] = w[..., 2, 2] = _S2 * c
    w[..., 2, 1] = -s
    return w


def gauge_matrix(theta_dot):
    return _S2 * theta_dot * np.array([[0, -1, 0], [1, 0, 1], [0, -1, 0]], dtype=np.complex128)


def dressed_dephasing_generator():
    """W^T F W for the intermediate-spin sigma^z; independent of theta."""
    return np.array([[0, 0, -1], [0, -1, 0], [-1, 0, 0]], dtype=np.complex128)


def dressed_hamiltonian(omega):
    return np.diag([omega, 0.0, -omega]).astype(np.complex128)


def dark_state(theta):
    return np.array([math.cos(theta), 0.0, -math.sin(theta)], dtype=np.complex128)


def to_adiabatic(rho, theta):
    w = mixing_matrix(theta)
    return w.conj().T @ np.asarray(rho, dtype=np.complex128) @ w


def to_bare(rho_a, theta):
    w = mixing_matrix(theta)
    return w @ np.asarray(rho_a, dtype=np.complex128) @ w.conj().T


def rhs_adiabatic(t, rho_a, cfg):
    """-i[H_a, rho_a] - [M, rho_a] + gamma (F_a rho_a F_a - rho_a)."""
    s = sample(cfg.protocol, t)
    row = np.array([s.omega_p, s.omega_s, s.omega, s.theta, s.theta_dot])
    return kernels.adiabatic_rhs(row, np.asarray(rho_a, dtype=np.complex128), _NO_OPS, np.array([cfg.gamma]))


def evolve_adiabatic(cfg, rho_a0=None):
    """Integrate the dressed-frame master equation from ``rho_a0`` (default ``|d><d|``)."""
    rho_a0 = projector(DARK) if rho_a0 is None else density_matrix3(rho_a0)
    states, cert, n_steps, dt = run_density_kernel(
        cfg, integrate.MODEL_ADIABATIC, rho_a0, _NO_OPS, np.array([cfg.gamma]))
    return _finish(cfg, states, "adiabatic", cert, n_steps, dt)


def _transform(traj, frame):
    theta = drive_arrays(traj.cfg.protocol, traj.times)["theta"]
    w = _mixing_stack(theta)
    wt = np.swapaxes(w, 1, 2)
    if frame == "adiabatic":
        states = wt @ traj.states @ w
    else:
        states = w @ traj.states @ wt
    return Trajectory(traj.times.copy(), states, traj.trace_err.copy(), traj.purity.copy(),
                      frame, traj.cfg, traj.certification)


def in_frame(traj, frame):
    """Return ``traj`` expressed in the ``"bare"`` or ``"adiabatic"`` basis."""
    if frame not in ("bare", "adiabatic"):
        raise ValueError(f"unknown frame {frame!r}")
    return traj if traj.frame == frame else _transform(traj, frame)


def initial_bare_state(cfg):
    """Bare-basis state matching the default dressed-frame start ``|d(theta(0))>``."""
    return to_bare(projector(DARK), sample(cfg.protocol, 0.0).theta)

