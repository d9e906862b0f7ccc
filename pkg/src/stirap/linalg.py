"""Small dense complex linear algebra for 3x3 (and 8x8) density matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every public
function returns a fresh array, so callers never alias each other's state.
"""

import math

import numba
import numpy as np

from .errors import ContractViolation

#: Smallest eigenvalue accepted as "positive semidefinite" after integration.
POSITIVITY_TOL = 1e-9
#: Allowed deviation of the trace from 1.
TRACE_TOL = 1e-9
#: Allowed max |rho - rho^dagger| entry for an integrated state.
HERMITICITY_TOL = 1e-10
#: Hermiticity required of inputs to the eigenvalue routine.
EIG_INPUT_TOL = 1e-10
#: Hermiticity of a constructed ``DensityMatrix3``.
STATE_HERMITICITY_TOL = 1e-12


def commutator(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return a @ b - b @ a


def adjoint(a):
    return np.array(np.asarray(a).conj().T, dtype=np.complex128)


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


@numba.njit(cache=True, nogil=True)
def _cross(x, y):
    out = np.empty(3, dtype=np.complex128)
    out[0] = x[1] * y[2] - x[2] * y[1]
    out[1] = x[2] * y[0] - x[0] * y[2]
    out[2] = x[0] * y[1] - x[1] * y[0]
    return out


@numba.njit(cache=True, nogil=True)
def _norm(x):
    s = 0.0
    for i in range(x.shape[0]):
        s += x[i].real * x[i].real + x[i].imag * x[i].imag
    return math.sqrt(s)


@numba.njit(cache=True, nogil=True)
def _quad(u, a, v):
    # u^dagger a v
    s = 0j
    for i in range(3):
        for j in range(3):
            s += np.conj(u[i]) * a[i, j] * v[j]
    return s


@numba.njit(cache=True, nogil=True)
def eigvalsh3(a):
    """Ascending eigenvalues of a 3x3 Hermitian matrix in closed form.

    The trigonometric solution of the characteristic cubic locates the
    spectrum. It loses half the digits on (near-)degenerate pairs, which
    matters for positivity checks of pure states, so the best-isolated root
    is then turned into an eigenvector by a row cross product and the other
    two roots are recomputed from the exact 2x2 compression onto its
    orthogonal complement. No iteration is involved. The matrix is scaled
    to unit max-norm first so tiny or huge entries cannot under/overflow.
    """
    out = np.empty(3)
    s = 0.0
    for i in range(3):
        for j in range(3):
            s = max(s, abs(a[i, j]))
    if s == 0.0:
        out[:] = 0.0
        return out
    a = a / s
    a00 = a[0, 0].real
    a11 = a[1, 1].real
    a22 = a[2, 2].real
    p1 = abs(a[0, 1]) ** 2 + abs(a[0, 2]) ** 2 + abs(a[1, 2]) ** 2
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    if p2 == 0.0:
        out[:] = q * s
        return out
    p = math.sqrt(p2 / 6.0)
    b = a.copy()
    for i in range(3):
        b[i, i] -= q
    b /= p
    det = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    ).real
    r = min(1.0, max(-1.0, 0.5 * det))
    phi = math.acos(r) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    mid = 3.0 * q - hi - lo

    iso = hi if hi - mid >= mid - lo else lo
    m = a.copy()
    for i in range(3):
        m[i, i] -= iso
    best = np.zeros(3, dtype=np.complex128)
    best_norm = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        c = _cross(m[i], m[j])
        n = _norm(c)
        if n > best_norm:
            best = c
            best_norm = n
    if best_norm == 0.0:
        out[0] = lo * s
        out[1] = mid * s
        out[2] = hi * s
        out.sort()
        return out
    v = best / best_norm
    lam = _quad(v, a, v).real

    k = 0
    for i in range(1, 3):
        if abs(v[i]) < abs(v[k]):
            k = i
    u1 = -v * np.conj(v[k])
    u1[k] += 1.0
    u1 /= _norm(u1)
    u2 = np.conj(_cross(v, u1))
    u2 /= _norm(u2)
    c11 = _quad(u1, a, u1).real
    c22 = _quad(u2, a, u2).real
    c12 = _quad(u1, a, u2)
    mean = 0.5 * (c11 + c22)
    rad = math.hypot(0.5 * (c11 - c22), abs(c12))
    out[0] = lam
    out[1] = mean - rad
    out[2] = mean + rad
    out *= s
    out.sort()
    return out


def eig_hermitian3(a):
    """Eigenvalues of a Hermitian 3x3 matrix as an ascending tuple.

    Raises :class:`ContractViolation` if ``a`` is not Hermitian within 1e-10.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (3, 3):
        raise ContractViolation(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("matrix has non-finite entries")
    if hermiticity_defect(a) > EIG_INPUT_TOL:
        raise ContractViolation("matrix is not Hermitian within 1e-10")
    w = eigvalsh3(a)
    return float(w[0]), float(w[1]), float(w[2])


def purity(rho):
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho) ** 2))


def projector(index, dim=3):
    """``|i><i|`` for a zero-based basis index."""
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[index, index] = 1.0
    return out


def ket_projector(vec):
    vec = np.asarray(vec, dtype=np.complex128)
    return np.outer(vec, vec.conj())


def density_matrix3(m):
    """Validate and copy a 3x3 density matrix.

    Checks Hermiticity (1e-12), unit trace (1e-9) and positivity (-1e-9).
    """
    m = np.array(m, dtype=np.complex128)
    if m.shape != (3, 3):
        raise ContractViolation(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("density matrix has non-finite entries")
    if hermiticity_defect(m) > STATE_HERMITICITY_TOL:
        raise ContractViolation("density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ContractViolation(f"density matrix trace {tr.real:.12g} != 1")
    if eigvalsh3(m)[0] < -POSITIVITY_TOL:
        raise ContractViolation("density matrix is not positive semidefinite")
    return m
