"""
Rank and span computations shared by stability and membership tests.

Two backends with one interface:
- NumericBackend: SVD with threshold tol * max(sigma_max, 1)
- ExactBackend: sympy over the rationals, matrices held as numpy object arrays of Fraction
"""

import logging
from fractions import Fraction

import numpy as np
import sympy

from errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


def to_sympy(m: np.ndarray) -> sympy.Matrix:
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return sympy.zeros(rows, cols)
    entries = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in m.flatten()]
    return sympy.Matrix(rows, cols, entries)


def from_sympy(m: sympy.Matrix) -> np.ndarray:
    out = np.empty((m.rows, m.cols), dtype=object)
    for r in range(m.rows):
        for c in range(m.cols):
            p, q = sympy.fraction(sympy.Rational(m[r, c]))
            out[r, c] = Fraction(int(p), int(q))
    return out


def fraction_array(data, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Object array of Fraction from nested lists of ints, Fractions or "p/q" strings."""
    arr = np.array(data, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    return np.vectorize(Fraction, otypes=[object])(arr) if arr.size else np.zeros(arr.shape, dtype=object)


def fraction_zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out


def fraction_identity(n: int) -> np.ndarray:
    out = fraction_zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_exact_array(m: np.ndarray) -> bool:
    return m.dtype == object


class NumericBackend:
    exact = False

    def __init__(self, tol: float = DEFAULT_TOL):
        if tol <= 0:
            raise InvalidInputError(f"Rank tolerance must be positive, got {tol}")
        self.tol = tol

    def _svd(self, m: np.ndarray):
        return np.linalg.svd(np.asarray(m, dtype=complex), full_matrices=False)

    def _cut(self, s: np.ndarray) -> int:
        if s.size == 0:
            return 0
        threshold = self.tol * max(float(s[0]), 1.0)
        return int(np.sum(s > threshold))

    def rank(self, m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        return self._cut(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False))

    def is_zero(self, m: np.ndarray) -> bool:
        return self.rank(m) == 0

    def column_basis(self, m: np.ndarray) -> np.ndarray:
        if m.size == 0:
            return np.zeros((m.shape[0], 0), dtype=complex)
        u, s, _ = self._svd(m)
        return u[:, : self._cut(s)]

    def row_basis(self, m: np.ndarray) -> np.ndarray:
        if m.size == 0:
            return np.zeros((0, m.shape[1]), dtype=complex)
        _, s, vh = self._svd(m)
        return vh[: self._cut(s)]

    def null_space(self, m: np.ndarray) -> np.ndarray:
        cols = m.shape[1]
        if m.shape[0] == 0:
            return np.eye(cols, dtype=complex)
        _, s, vh = np.linalg.svd(np.asarray(m, dtype=complex), full_matrices=True)
        return vh[self._cut(s):].conj().T

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=complex)

    def inverse(self, m: np.ndarray) -> np.ndarray:
        if self.rank(m) < m.shape[0]:
            raise InvalidInputError("Matrix is singular")
        return np.linalg.inv(np.asarray(m, dtype=complex))


class ExactBackend:
    exact = True
    tol = 0.0

    def rank(self, m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        return to_sympy(m).rank()

    def is_zero(self, m: np.ndarray) -> bool:
        return all(x == 0 for x in m.flatten())

    def column_basis(self, m: np.ndarray) -> np.ndarray:
        rows = m.shape[0]
        if m.size == 0:
            return fraction_zeros(rows, 0)
        cols = to_sympy(m).columnspace()
        if not cols:
            return fraction_zeros(rows, 0)
        return from_sympy(sympy.Matrix.hstack(*cols))

    def row_basis(self, m: np.ndarray) -> np.ndarray:
        cols = m.shape[1]
        if m.size == 0:
            return fraction_zeros(0, cols)
        rows = to_sympy(m).rowspace()
        if not rows:
            return fraction_zeros(0, cols)
        return from_sympy(sympy.Matrix.vstack(*rows))

    def null_space(self, m: np.ndarray) -> np.ndarray:
        cols = m.shape[1]
        if m.shape[0] == 0:
            return fraction_identity(cols)
        basis = to_sympy(m).nullspace()
        if not basis:
            return fraction_zeros(cols, 0)
        return from_sympy(sympy.Matrix.hstack(*basis))

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return fraction_zeros(rows, cols)

    def inverse(self, m: np.ndarray) -> np.ndarray:
        sm = to_sympy(m)
        if sm.rows and sm.det() == 0:
            raise InvalidInputError("Matrix is singular")
        return from_sympy(sm.inv()) if sm.rows else fraction_zeros(0, 0)


def backend_for(exact: bool, tol: float = DEFAULT_TOL) -> NumericBackend | ExactBackend:
    return ExactBackend() if exact else NumericBackend(tol)
