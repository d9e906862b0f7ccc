"""Fixed-step classic RK4 kernels shared by every engine.

The right-hand sides live in :mod:`stirap.kernels` and stay independent per
engine; only the stepping loop is shared. Drive data are precomputed on the half-step grid ``t = k*dt/2`` so a
kernel never samples a protocol itself. Row layout of that table is
``DRIVE_COLUMNS``.
"""

import math

import numba
import numpy as np

from . import kernels
from .linalg import HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL, eigvalsh3
from .protocols import drive_arrays

DRIVE_COLUMNS = ("omega_p", "omega_s", "omega", "theta", "theta_dot")
OMEGA_P, OMEGA_S, OMEGA, THETA, THETA_DOT = range(5)

#: density-matrix models understood by :func:`rk4_density`
MODEL_BARE, MODEL_ADIABATIC, MODEL_FULL8 = range(3)

BREACH_NONE, BREACH_TRACE, BREACH_HERMITICITY, BREACH_POSITIVITY, BREACH_NONFINITE, BREACH_RANGE = range(6)
BREACH_NAMES = {
    BREACH_TRACE: "trace drift",
    BREACH_HERMITICITY: "hermiticity defect",
    BREACH_POSITIVITY: "min eigenvalue",
    BREACH_NONFINITE: "non-finite entry",
    BREACH_RANGE: "rho_dd out of [0, 1]",
}


def drive_table(protocol, n_steps, dt):
    """Drive samples at ``k*dt/2`` for ``k = 0..2*n_steps``, shape (2N+1, 5)."""
    half = np.arange(2 * n_steps + 1) * (0.5 * dt)
    half[-1] = protocol.t0
    d = drive_arrays(protocol, half)
    return np.ascontiguousarray(np.stack([d[c] for c in DRIVE_COLUMNS], axis=1))


def sample_indices(n_steps, stride):
    idx = np.arange(0, n_steps + 1, stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return idx


@numba.njit(cache=True, nogil=True)
def _rhs(model, row, rho, ops, params):
    if model == MODEL_BARE:
        return kernels.bare_rhs(row, rho, ops, params)
    if model == MODEL_ADIABATIC:
        return kernels.adiabatic_rhs(row, rho, ops, params)
    return kernels.full8_rhs(row, rho, ops, params)


@numba.njit(cache=True, nogil=True)
def _mineig(rho):
    if rho.shape[0] == 3:
        return eigvalsh3(rho)[0]
    return np.linalg.eigvalsh(rho)[0]


@numba.njit(cache=True, nogil=True)
def rk4_density(model, rho0, drive, ops, params, dt, n_steps, stride):
    """Integrate a density-matrix ODE, certifying every step.

    Each step measures the Hermiticity defect, re-symmetrises, then checks
    the trace and the smallest eigenvalue. The loop stops at the first breach
    and reports ``(kind, step, value)``; kind 0 means the run is clean.
    """
    n = rho0.shape[0]
    n_samples = n_steps // stride + 1
    if n_steps % stride != 0:
        n_samples += 1
    out = np.empty((n_samples, n, n), dtype=np.complex128)
    rho = rho0.copy()
    out[0] = rho
    s = 1
    max_trace = abs(np.trace(rho).real - 1.0)
    max_herm = 0.0
    min_eig = _mineig(rho)
    half = 0.5 * dt
    for step in range(n_steps):
        k = 2 * step
        k1 = _rhs(model, drive[k], rho, ops, params)
        k2 = _rhs(model, drive[k + 1], rho + half * k1, ops, params)
        k3 = _rhs(model, drive[k + 1], rho + half * k2, ops, params)
        k4 = _rhs(model, drive[k + 2], rho + dt * k3, ops, params)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        herm = 0.0
        finite = True
        for i in range(n):
            for j in range(n):
                z = rho[i, j]
                if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                    finite = False
                d = abs(z - np.conj(rho[j, i]))
                if d > herm:
                    herm = d
        if not finite:
            return out[:s], BREACH_NONFINITE, step + 1, np.nan, max_trace, max_herm, min_eig
        if herm > max_herm:
            max_herm = herm
        if herm > HERMITICITY_TOL:
            return out[:s], BREACH_HERMITICITY, step + 1, herm, max_trace, max_herm, min_eig
        rho = 0.5 * (rho + rho.conj().T)

        tr = abs(np.trace(rho).real - 1.0)
        if tr > max_trace:
            max_trace = tr
        if tr > TRACE_TOL:
            return out[:s], BREACH_TRACE, step + 1, tr, max_trace, max_herm, min_eig
        lam = _mineig(rho)
        if lam < min_eig:
            min_eig = lam
        if lam < -POSITIVITY_TOL:
            return out[:s], BREACH_POSITIVITY, step + 1, lam, max_trace, max_herm, min_eig

        if (step + 1) % stride == 0 or step + 1 == n_steps:
            out[s] = rho
            s += 1
    return out, BREACH_NONE, 0, 0.0, max_trace, max_herm, min_eig


@numba.njit(cache=True, nogil=True)
def rk4_reduced(y0, drive, params, dt, n_steps, stride):
    """Integrate a real vector ODE whose first component is a population."""
    n_samples = n_steps // stride + 1
    if n_steps % stride != 0:
        n_samples += 1
    out = np.empty((n_samples, y0.shape[0]))
    y = y0.copy()
    out[0] = y
    s = 1
    half = 0.5 * dt
    for step in range(n_steps):
        k = 2 * step
        k1 = kernels.reduced_rhs(drive[k], y, params)
        k2 = kernels.reduced_rhs(drive[k + 1], y + half * k1, params)
        k3 = kernels.reduced_rhs(drive[k + 1], y + half * k2, params)
        k4 = kernels.reduced_rhs(drive[k + 2], y + dt * k3, params)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(y.shape[0]):
            if not math.isfinite(y[i]):
                return out[:s], BREACH_NONFINITE, step + 1, np.nan
        if y[0] < -POSITIVITY_TOL or y[0] > 1.0 + POSITIVITY_TOL:
            return out[:s], BREACH_RANGE, step + 1, y[0]
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            out[s] = y
            s += 1
    return out, BREACH_NONE, 0, 0.0
