"""Hot numeric kernels, numba-jitted with pure-numpy fallbacks.

Two kernels live here: the implicit-shift QL eigensolver for symmetric
tridiagonal matrices that accumulates only the first row of the rotation
product (so eigenvalues and spectral weights come out of one O(n^2) sweep),
and the windowed three-term recursion for the moments ``<e1, J^k e1>``.

Backend selection: numba is used when importable, unless the environment
variable ``LAGSPEC_NO_NUMBA`` is set to anything but ``0`` or empty, in
which case pure-numpy fallbacks take over (a dense LAPACK
eigendecomposition for the eigensolver, vectorized slicing for the moment
recursion). The two backends agree up to floating-point round-off; each is
individually deterministic.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import NumericalError

__all__ = [
    "USING_NUMBA",
    "tridiag_eigen_firstrow",
    "tridiag_moments",
]


def _numba_disabled() -> bool:
    return os.environ.get("LAGSPEC_NO_NUMBA", "").strip() not in ("", "0")


try:
    if _numba_disabled():
        raise ImportError("numba disabled via LAGSPEC_NO_NUMBA")
    from numba import njit as _njit

    USING_NUMBA = True
except ImportError:
    _njit = None
    USING_NUMBA = False

# Iteration cap per eigenvalue for the QL sweep.
MAX_QL_SWEEPS = 50

_EPS = float(np.finfo(np.float64).eps)


def _ql_firstrow_impl(d, e, z, max_sweeps):
    """Implicit-shift QL with Wilkinson shifts, first-row accumulation.

    Diagonalizes the symmetric tridiagonal matrix with diagonal ``d`` and
    subdiagonal ``e[:n-1]`` in place: on return ``d`` holds the (unsorted)
    eigenvalues and ``z`` holds e1^T Q, the first row of the accumulated
    rotation product. ``e`` is destroyed. Returns 0 on success, or the
    1-based index of an eigenvalue that failed to converge within
    ``max_sweeps`` sweeps.
    """
    n = d.shape[0]
    if n == 1:
        return 0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            sgn = 1.0 if g >= 0.0 else -1.0
            g = d[m] - d[l] + e[l] / (g + sgn * r)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # Recover from a vanishing rotation and restart the sweep.
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def _tridiag_moments_impl(d, e, out):
    """Fill ``out[k-1] = <e1, J^k e1>`` for k = 1..len(out).

    Works on the leading window of size min(order+1, n): a power J^k e1 is
    supported on the first k+1 coordinates, so entries beyond the window
    never contribute.
    """
    order = out.shape[0]
    n = d.shape[0]
    w = order + 1 if order + 1 < n else n
    v = np.zeros(w)
    u = np.zeros(w)
    v[0] = 1.0
    for k in range(order):
        for i in range(w):
            s = d[i] * v[i]
            if i > 0:
                s += e[i - 1] * v[i - 1]
            if i < w - 1:
                s += e[i] * v[i + 1]
            u[i] = s
        for i in range(w):
            v[i] = u[i]
        out[k] = v[0]
    return out


if USING_NUMBA:
    _ql_firstrow = _njit(cache=True)(_ql_firstrow_impl)
    _tridiag_moments_jit = _njit(cache=True)(_tridiag_moments_impl)
else:
    _ql_firstrow = _ql_firstrow_impl
    _tridiag_moments_jit = None


def _eigen_firstrow_numpy(diag, offdiag):
    """Dense LAPACK fallback: full eigh, keep first row of eigenvectors."""
    n = diag.shape[0]
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = diag
    a[idx[:-1], idx[:-1] + 1] = offdiag
    a[idx[:-1] + 1, idx[:-1]] = offdiag
    vals, vecs = np.linalg.eigh(a)
    return vals, vecs[0] ** 2


def tridiag_eigen_firstrow(diag, offdiag):
    """Eigenvalues (ascending) and squared first eigenvector components.

    Parameters are the diagonal (length n) and subdiagonal (length n-1) of
    a symmetric tridiagonal matrix. Returns ``(lam, w)`` with ``w[i]`` the
    squared first component of the normalized eigenvector for ``lam[i]``;
    the ``w`` sum to 1 up to round-off.

    Raises NumericalError if the QL iteration exceeds its sweep cap.
    """
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    offdiag = np.ascontiguousarray(offdiag, dtype=np.float64)
    n = diag.shape[0]
    if n == 1:
        return diag.copy(), np.ones(1)
    if USING_NUMBA:
        d = diag.copy()
        e = np.zeros(n)
        e[: n - 1] = offdiag
        z = np.zeros(n)
        z[0] = 1.0
        status = _ql_firstrow(d, e, z, MAX_QL_SWEEPS)
        if status != 0:
            raise NumericalError(
                f"QL iteration failed to converge for matrix of size {n} "
                f"(eigenvalue index {status})"
            )
        w = z * z
    else:
        d, w = _eigen_firstrow_numpy(diag, offdiag)
    order = np.argsort(d)
    return d[order], w[order]


def tridiag_moments(diag, offdiag, order):
    """Moments ``m_k = <e1, J^k e1>`` for k = 1..order, no eigensolve.

    Cost is O(order^2) independent of the matrix size, because the window
    of coordinates reachable in ``order`` steps is tracked explicitly.
    """
    if order < 1:
        raise ValueError(f"moment order must be >= 1, got {order}")
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    offdiag = np.ascontiguousarray(offdiag, dtype=np.float64)
    out = np.empty(order)
    if USING_NUMBA:
        return _tridiag_moments_jit(diag, offdiag, out)
    n = diag.shape[0]
    w = min(order + 1, n)
    dw = diag[:w]
    ew = offdiag[: w - 1]
    v = np.zeros(w)
    v[0] = 1.0
    for k in range(order):
        u = dw * v
        # Keep the add order of the loop backend (left neighbor first) so
        # both backends produce bit-identical sums.
        u[1:] += ew * v[:-1]
        u[:-1] += ew * v[1:]
        v = u
        out[k] = v[0]
    return out
