"""Compiled right-hand sides, one independent function per engine.

They live in one leaf module so the shared RK4 loop can reference them as
globals, which keeps the numba on-disk cache usable. No code is shared
between them. Every density-matrix RHS has the signature
``(drive_row, rho, ops, params)`` with ``params[0] = gamma``.
"""

import numba
import numpy as np

# drive_row layout, see integrate.drive_table
OMEGA_P, OMEGA_S, OMEGA, THETA, THETA_DOT = range(5)


@numba.njit(cache=True, nogil=True)
def bare_rhs(row, rho, ops, params):
    gamma = params[0]
    h = np.zeros((3, 3), dtype=np.complex128)
    h[0, 1] = row[OMEGA_P]
    h[1, 0] = row[OMEGA_P]
    h[1, 2] = row[OMEGA_S]
    h[2, 1] = row[OMEGA_S]
    out = np.empty((3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            c = 0j
            for k in range(3):
                c += h[i, k] * rho[k, j] - rho[i, k] * h[k, j]
            # F = diag(-1, 1, -1): coherences touching level 2 decay at 2*gamma
            decay = 0.0 if (i == 1) == (j == 1) else -2.0 * gamma
            out[i, j] = -1j * c + decay * rho[i, j]
    return out


@numba.njit(cache=True, nogil=True)
def adiabatic_rhs(row, rho, ops, params):
    gamma = params[0]
    om = row[OMEGA]
    g = 0.7071067811865476 * row[THETA_DOT]
    h = (om, 0.0, -om)
    m = np.zeros((3, 3))
    m[0, 1] = -g
    m[1, 0] = g
    m[1, 2] = g
    m[2, 1] = -g
    # F_a maps |+> <-> -|->, |d> -> -|d>
    perm = (2, 1, 0)
    out = np.empty((3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            gauge = 0j
            for k in range(3):
                gauge += m[i, k] * rho[k, j] - rho[i, k] * m[k, j]
            out[i, j] = (-1j * (h[i] - h[j]) * rho[i, j] - gauge
                         + gamma * (rho[perm[i], perm[j]] - rho[i, j]))
    return out


@numba.njit(cache=True, nogil=True)
def full8_rhs(row, rho, ops, params):
    # ops = (sum_j sz_j, sz_2, hop_12, hop_23); params = (gamma, delta)
    gamma, delta = params[0], params[1]
    h = delta * ops[0] + row[OMEGA_P] * ops[2] + row[OMEGA_S] * ops[3]
    z2 = ops[1]
    return np.ascontiguousarray(-1j * (h @ rho - rho @ h) + gamma * (z2 @ rho @ z2 - rho))


@numba.njit(cache=True, nogil=True)
def reduced_rhs(row, y, params):
    gamma = params[0]
    om = row[OMEGA]
    td = row[THETA_DOT]
    out = np.empty(3)
    out[0] = -2.0 * 1.4142135623730951 * td * y[1]
    out[1] = om * y[2] - 0.3535533905932738 * td * (1.0 - 3.0 * y[0])
    out[2] = -om * y[1] - 2.0 * gamma * y[2]
    return out
