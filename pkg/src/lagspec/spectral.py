"""Finite Jacobi matrices and their weighted spectral measures.

A symmetric tridiagonal matrix with positive subdiagonal is held as a
:class:`JacobiCoefficients` value. Its spectral measure (eigenvalues as
atoms, squared first eigenvector components as weights) is a
:class:`SpectralMeasure`. The two representations are bijective at finite
size; :func:`eigen_spectral` and :func:`measure_to_coefficients` implement
the two directions, and :func:`moments_via_operator` /
:func:`moments_of_measure` compute moments on either side without ever
leaving it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalError

__all__ = [
    "JacobiCoefficients",
    "SpectralMeasure",
    "eigen_spectral",
    "free_jacobi",
    "measure_to_coefficients",
    "moments_of_measure",
    "moments_via_operator",
]

# Relative gap below which the Stieltjes recursion is declared broken down.
_STIELTJES_BREAKDOWN = 1e-12

_WEIGHT_SUM_TOL = 1e-10


@dataclass
class JacobiCoefficients:
    """Diagonal d_1..d_n and strictly positive off-diagonal c_1..c_{n-1}."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        self.diag = np.atleast_1d(np.asarray(self.diag, dtype=np.float64))
        self.offdiag = np.asarray(self.offdiag, dtype=np.float64).reshape(-1)
        if self.diag.ndim != 1 or self.diag.size < 1:
            raise ValueError("diag must be a nonempty 1-D array")
        if self.offdiag.size != self.diag.size - 1:
            raise ValueError(
                f"offdiag must have length n-1 = {self.diag.size - 1}, "
                f"got {self.offdiag.size}"
            )
        if not np.all(np.isfinite(self.diag)) or not np.all(np.isfinite(self.offdiag)):
            raise ValueError("coefficients must be finite")
        if self.offdiag.size and not np.all(self.offdiag > 0):
            raise ValueError("off-diagonal entries must be strictly positive")

    @property
    def n(self) -> int:
        return self.diag.size


@dataclass
class SpectralMeasure:
    """Atoms lambda_1 < ... < lambda_n with positive weights summing to 1."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.atoms = np.atleast_1d(np.asarray(self.atoms, dtype=np.float64))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        if self.atoms.shape != self.weights.shape or self.atoms.ndim != 1:
            raise ValueError("atoms and weights must be 1-D arrays of equal length")
        if self.atoms.size < 1:
            raise ValueError("measure must have at least one atom")
        if not np.all(np.isfinite(self.atoms)):
            raise ValueError("atoms must be finite")
        if self.atoms.size > 1 and not np.all(np.diff(self.atoms) > 0):
            raise ValueError("atoms must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("weights must be strictly positive")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total!r}")

    @property
    def n(self) -> int:
        return self.atoms.size


def free_jacobi(n: int) -> JacobiCoefficients:
    """Truncation of the free Jacobi matrix: zero diagonal, unit off-diagonal."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return JacobiCoefficients(np.zeros(n), np.ones(n - 1))


def eigen_spectral(coeffs: JacobiCoefficients) -> SpectralMeasure:
    """Spectral measure of a Jacobi matrix via the first-row eigensolver.

    The atoms are the eigenvalues; weight i is the squared first component
    of the i-th normalized eigenvector, obtained from an implicit-shift QL
    sweep that accumulates only the first row of the rotation product.
    """
    lam, w = _kernels.tridiag_eigen_firstrow(coeffs.diag, coeffs.offdiag)
    return SpectralMeasure(lam, w)


def moments_via_operator(coeffs: JacobiCoefficients, order: int) -> np.ndarray:
    """Moments m_k = <e1, J^k e1> for k = 1..order by iterated matvec.

    No eigendecomposition is involved; this is the operator-side route to
    the same numbers :func:`moments_of_measure` produces on the measure
    side.
    """
    return _kernels.tridiag_moments(coeffs.diag, coeffs.offdiag, order)


def moments_of_measure(measure: SpectralMeasure, order: int) -> np.ndarray:
    """Moments m_k = sum_i w_i lambda_i^k for k = 1..order.

    Each sum is accumulated with numpy's pairwise summation, which keeps
    cancellation mild even for high moments.
    """
    if order < 1:
        raise ValueError(f"moment order must be >= 1, got {order}")
    lam = measure.atoms
    w = measure.weights
    out = np.empty(order)
    power = np.ones_like(lam)
    for k in range(order):
        power = power * lam
        out[k] = np.sum(w * power)
    return out


def measure_to_coefficients(measure: SpectralMeasure, order: int) -> JacobiCoefficients:
    """Recursion coefficients of the orthonormal polynomials of a measure.

    Runs the Stieltjes procedure on the atoms with full reorthogonalization
    against all previously computed polynomial values, returning the first
    ``order`` diagonal and ``order - 1`` off-diagonal entries. This inverts
    :func:`eigen_spectral` when ``order`` equals the number of atoms.

    Raises ValueError when ``order`` exceeds the number of atoms and
    NumericalError when a recursion norm collapses (numerical breakdown,
    typically from nearly coincident atoms).
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if order > measure.n:
        raise ValueError(
            f"order {order} exceeds the number of atoms {measure.n}"
        )
    lam = measure.atoms
    w = measure.weights
    scale = max(1.0, float(np.max(np.abs(lam))))
    basis = np.empty((order, lam.size))
    diag = np.empty(order)
    off = np.empty(order - 1)
    p_prev = np.zeros_like(lam)
    p_cur = np.ones_like(lam)
    c_prev = 0.0
    for k in range(order):
        basis[k] = p_cur
        a = float(np.sum(w * lam * p_cur * p_cur))
        diag[k] = a
        if k == order - 1:
            break
        r = (lam - a) * p_cur - c_prev * p_prev
        # Full reorthogonalization in the w-weighted inner product.
        proj = basis[: k + 1] @ (w * r)
        r = r - proj @ basis[: k + 1]
        norm2 = float(np.sum(w * r * r))
        if not np.isfinite(norm2) or norm2 <= (_STIELTJES_BREAKDOWN * scale) ** 2:
            raise NumericalError(
                f"Stieltjes recursion broke down at step {k + 1}: "
                f"squared norm {norm2!r}"
            )
        c = float(np.sqrt(norm2))
        off[k] = c
        p_prev = p_cur
        p_cur = r / c
        c_prev = c
    return JacobiCoefficients(diag, off)
