"""Hot loops for path tracking: Laurent evaluation, Jacobian, Newton, predictor-corrector.

The functions below are written once in numba-compatible Python. With numba
available (and ``KCENSUS_NUMBA`` not set to ``0``) they are compiled with
``@njit``; otherwise the evaluation kernel is swapped for a vectorized numpy
version and the drivers run as plain Python. Both backends share the same
algorithm and step logic.

Tracker modes
-------------
0  coefficients ``P * s**q`` (column-wise), variable ``s``
1  coefficients ``P + z(s) D`` with ``z(s) = s + i c s (1 - s)``, variable
   ``sigma`` where ``s = 1 - exp(-sigma)``
"""
import os

import numpy as np

USE_NUMBA = os.environ.get("KCENSUS_NUMBA", "1").lower() not in ("0", "false", "no")
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"

OK, DIVERGED, STALLED = 0, 1, 2
DIVERGE_LOG = np.log(1e12)
MAX_STEPS = 20000


def monomials(expo, x, out):
    m, n = expo.shape
    for k in range(m):
        v = 1.0 + 0.0j
        for j in range(n):
            e = expo[k, j]
            if e > 0:
                for _ in range(e):
                    v *= x[j]
            elif e < 0:
                for _ in range(-e):
                    v /= x[j]
        out[k] = v


def residual_jacobian(expo, C, x, f, J):
    m, n = expo.shape
    neq = C.shape[0]
    mono = np.empty(m, dtype=np.complex128)
    monomials(expo, x, mono)
    for i in range(neq):
        f[i] = 0.0
        for j in range(n):
            J[i, j] = 0.0
    for k in range(m):
        for i in range(neq):
            c = C[i, k]
            if c == 0:
                continue
            t = c * mono[k]
            f[i] += t
            for j in range(n):
                e = expo[k, j]
                if e != 0:
                    J[i, j] += t * e / x[j]


def _monomials_np(expo, x, out):
    out[:] = np.prod(x[None, :] ** expo, axis=1)


def _residual_jacobian_np(expo, C, x, f, J):
    mono = np.prod(x[None, :] ** expo, axis=1)
    t = C * mono[None, :]
    f[:] = t.sum(axis=1)
    J[:, :] = (t @ expo) / x[None, :]


def _log_step_np(J, x, rhs):
    return np.linalg.solve(J * x[None, :], rhs)


def coefficients(P, q, D, c_arc, mode, r, C, dC):
    neq, m = P.shape
    if mode == 0:
        s = r
        for k in range(m):
            qk = q[k]
            if qk == 0.0:
                g = 1.0
                dg = 0.0
            else:
                g = s**qk
                dg = qk * s ** (qk - 1.0)
            for i in range(neq):
                C[i, k] = P[i, k] * g
                dC[i, k] = P[i, k] * dg
    else:
        e = np.exp(-r)
        s = 1.0 - e
        z = s + 1j * c_arc * s * (1.0 - s)
        dz = (1.0 + 1j * c_arc * (1.0 - 2.0 * s)) * e
        for k in range(m):
            for i in range(neq):
                C[i, k] = P[i, k] + z * D[i, k]
                dC[i, k] = D[i, k] * dz


def _norm(v):
    return np.sqrt(np.sum(np.abs(v) ** 2))


def _log_step(J, x, rhs):
    """Solve J diag(x) du = rhs; steps are taken as x * exp(du)."""
    n = x.shape[0]
    A = np.empty_like(J)
    for j in range(n):
        for i in range(J.shape[0]):
            A[i, j] = J[i, j] * x[j]
    return np.linalg.solve(A, rhs)


def newton(expo, C, x0, maxit, tol):
    """Newton in log coordinates. Returns (x, converged, last relative step, residual)."""
    n = x0.shape[0]
    x = x0.copy()
    f = np.empty(C.shape[0], dtype=np.complex128)
    J = np.empty((C.shape[0], n), dtype=np.complex128)
    step = np.inf
    for _ in range(maxit):
        residual_jacobian(expo, C, x, f, J)
        try:
            du = _log_step(J, x, -f)
        except Exception:
            return x, False, step, np.max(np.abs(f))
        if not np.all(np.isfinite(du)):
            return x, False, step, np.max(np.abs(f))
        step = np.max(np.abs(du))
        if step > 30.0:
            return x, False, step, np.max(np.abs(f))
        x = x * np.exp(du)
        if step <= tol:
            residual_jacobian(expo, C, x, f, J)
            return x, True, step, np.max(np.abs(f))
    residual_jacobian(expo, C, x, f, J)
    return x, False, step, np.max(np.abs(f))


def correct(expo, C, xp, tol):
    """At most three contracting Newton steps; the first relative step is capped at 0.1."""
    n = xp.shape[0]
    x = xp.copy()
    f = np.empty(C.shape[0], dtype=np.complex128)
    J = np.empty((C.shape[0], n), dtype=np.complex128)
    prev = np.inf
    for it in range(3):
        residual_jacobian(expo, C, x, f, J)
        try:
            du = _log_step(J, x, -f)
        except Exception:
            return x, False
        if not np.all(np.isfinite(du)):
            return x, False
        step = np.max(np.abs(du))
        if it == 0 and step > 0.1:
            return x, False
        if step > 0.5 * prev and step > tol:
            return x, False
        x = x * np.exp(du)
        if step <= tol:
            return x, True
        prev = step
    return x, False


def track(expo, P, q, D, c_arc, mode, x0, r0, r1, h0, hmin, hmax, tol):
    """Euler predictor, Newton corrector, adaptive step, all in log coordinates.

    Returns (status, x, r, steps).
    """
    n = x0.shape[0]
    m = expo.shape[0]
    neq = P.shape[0]
    x = x0.copy()
    C = np.empty((neq, m), dtype=np.complex128)
    dC = np.empty((neq, m), dtype=np.complex128)
    f = np.empty(neq, dtype=np.complex128)
    J = np.empty((neq, n), dtype=np.complex128)
    mono = np.empty(m, dtype=np.complex128)
    r = r0
    h = h0
    good = 0
    steps = 0
    while r < r1:
        h = min(h, r1 - r)
        coefficients(P, q, D, c_arc, mode, r, C, dC)
        residual_jacobian(expo, C, x, f, J)
        monomials(expo, x, mono)
        rhs = -(dC @ mono)
        try:
            du = _log_step(J, x, rhs)
        except Exception:
            return STALLED, x, r, steps
        if not np.all(np.isfinite(du)):
            return STALLED, x, r, steps
        rn = r + h
        ok = np.max(np.abs(h * du)) < 1.0
        if ok:
            xp = x * np.exp(h * du)
            coefficients(P, q, D, c_arc, mode, rn, C, dC)
            xc, ok = correct(expo, C, xp, tol)
        if ok:
            x = xc
            r = rn
            steps += 1
            good += 1
            if good >= 3:
                h = min(2.0 * h, hmax)
                good = 0
            big = 0.0
            for j in range(n):
                a = abs(np.log(abs(x[j])))
                big = max(big, a)
            if big > DIVERGE_LOG:
                return DIVERGED, x, r, steps
        else:
            h *= 0.5
            good = 0
            if h < hmin:
                return STALLED, x, r, steps
        if steps > MAX_STEPS:
            return STALLED, x, r, steps
    return OK, x, r, steps


if USE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    monomials = _jit(monomials)
    residual_jacobian = _jit(residual_jacobian)
    coefficients = _jit(coefficients)
    _norm = _jit(_norm)
    _log_step = _jit(_log_step)
    newton = _jit(newton)
    correct = _jit(correct)
    track = _jit(track)
else:
    monomials = _monomials_np
    residual_jacobian = _residual_jacobian_np
    _log_step = _log_step_np


def evaluate(expo, C, x):
    f = np.empty(C.shape[0], dtype=np.complex128)
    J = np.empty((C.shape[0], x.shape[0]), dtype=np.complex128)
    residual_jacobian(np.ascontiguousarray(expo), np.ascontiguousarray(C), np.ascontiguousarray(x), f, J)
    return f


def jacobian(expo, C, x):
    f = np.empty(C.shape[0], dtype=np.complex128)
    J = np.empty((C.shape[0], x.shape[0]), dtype=np.complex128)
    residual_jacobian(np.ascontiguousarray(expo), np.ascontiguousarray(C), np.ascontiguousarray(x), f, J)
    return J
