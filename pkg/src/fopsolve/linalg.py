"""Dense/sparse matrix and vector kernels.

Everything is double precision and immutable after construction; the
functions here are pure and safe to share across threads.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, RankDeficient, SingularSystem

SOLVE_DENSE_MAX_N = 10
_PIVOT_RTOL = 1e-13
_RANK_RTOL = 1e-12


def as_vector(values) -> np.ndarray:
    """Validate and return a 1-D float64 vector (length >= 1, all finite)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"expected a 1-D vector of length >= 1, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


class Matrix:
    """Real matrix, stored either dense (row-ordered) or as coordinate triplets.

    Duplicate (row, col) triplets are rejected, all values must be finite.
    Instances are read-only; build new ones instead of mutating.
    """

    def __init__(self, shape, dense=None, coo=None):
        rows, cols = int(shape[0]), int(shape[1])
        if rows < 1 or cols < 1:
            raise DimensionMismatch(f"invalid shape {shape}")
        self._shape = (rows, cols)
        self._dense = dense
        self._coo = coo

    # -- constructors -------------------------------------------------

    @classmethod
    def from_dense(cls, array) -> "Matrix":
        a = np.array(array, dtype=float)
        if a.ndim != 2:
            raise DimensionMismatch(f"dense matrix must be 2-D, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        return cls(a.shape, dense=a)

    @classmethod
    def from_triplets(cls, shape, triplets: Iterable[tuple[int, int, float]]) -> "Matrix":
        rows, cols, vals = [], [], []
        for i, j, v in triplets:
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
        r = np.asarray(rows, dtype=np.intp)
        c = np.asarray(cols, dtype=np.intp)
        v = np.asarray(vals, dtype=float)
        nr, nc = int(shape[0]), int(shape[1])
        if r.size and (r.min() < 0 or r.max() >= nr or c.min() < 0 or c.max() >= nc):
            raise DimensionMismatch("triplet index out of range")
        if not np.all(np.isfinite(v)):
            raise ValueError("matrix entries must be finite")
        keys = r * nc + c
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate (row, col) triplets are forbidden")
        for arr in (r, c, v):
            arr.setflags(write=False)
        return cls((nr, nc), coo=(r, c, v))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.from_dense(np.eye(int(n)))

    @classmethod
    def diagonal(cls, values) -> "Matrix":
        return cls.from_dense(np.diag(as_vector(values)))

    @classmethod
    def tridiagonal(cls, n: int) -> "Matrix":
        """The (-1, 2, -1) stencil of size n, as coordinate triplets."""
        n = int(n)
        trips = [(i, i, 2.0) for i in range(n)]
        trips += [(i, i + 1, -1.0) for i in range(n - 1)]
        trips += [(i + 1, i, -1.0) for i in range(n - 1)]
        return cls.from_triplets((n, n), trips)

    # -- queries ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    @property
    def nnz(self) -> int:
        if self._dense is not None:
            return int(np.count_nonzero(self._dense))
        return int(self._coo[0].size)

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        r, c, v = self._coo
        out = np.zeros(self._shape)
        out[r, c] = v
        return out

    # -- products -----------------------------------------------------

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if len(v) != self.cols:
            raise DimensionMismatch(f"matvec: matrix is {self._shape}, vector has length {len(v)}")
        if self._dense is not None:
            return self._dense @ v
        r, c, vals = self._coo
        return np.bincount(r, weights=vals * v[c], minlength=self.rows)

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        if len(v) != self.rows:
            raise DimensionMismatch(f"transpose matvec: matrix is {self._shape}, vector has length {len(v)}")
        if self._dense is not None:
            return self._dense.T @ v
        r, c, vals = self._coo
        return np.bincount(c, weights=vals * v[r], minlength=self.cols)


def matvec(M: Matrix, v) -> np.ndarray:
    """Return M @ v."""
    return M.matvec(np.asarray(v, dtype=float))


def transpose_matvec(M: Matrix, v) -> np.ndarray:
    """Return M^T @ v without forming the transpose."""
    return M.rmatvec(np.asarray(v, dtype=float))


def solve_dense(M: Matrix | np.ndarray, b) -> np.ndarray:
    """Solve a small square system by Gaussian elimination with row pivoting.

    Restricted to n <= 10; the only consumers are moment systems and the
    3x3 recurrence-coefficient systems. Raises SingularSystem (carrying
    the offending elimination step) when a pivot falls below
    1e-13 * max|M|.
    """
    a = M.to_dense() if isinstance(M, Matrix) else np.array(M, dtype=float)
    rhs = as_vector(b).copy()
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionMismatch(f"solve_dense needs a square matrix, got {a.shape}")
    if n > SOLVE_DENSE_MAX_N:
        raise DimensionMismatch(f"solve_dense is limited to n <= {SOLVE_DENSE_MAX_N}, got n = {n}")
    if len(rhs) != n:
        raise DimensionMismatch("solve_dense: rhs length does not match matrix")

    pivot_floor = _PIVOT_RTOL * np.abs(a).max()
    for col in range(n):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[p, col]) <= pivot_floor:
            raise SingularSystem(col)
        if p != col:
            a[[col, p]] = a[[p, col]]
            rhs[[col, p]] = rhs[[p, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
        rhs[col + 1:] -= factors * rhs[col]

    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x


def least_squares(M: Matrix | np.ndarray, b, allow_rank_deficient: bool = False):
    """Minimize ||M w - b||_2 for a tall matrix (m >= n).

    Returns (coeffs, residual_norm). Rank deficiency is flagged when the
    smallest singular value drops below 1e-12 times the largest column
    norm; pass allow_rank_deficient=True to accept the minimum-norm
    solution instead of raising RankDeficient.
    """
    a = M.to_dense() if isinstance(M, Matrix) else np.asarray(M, dtype=float)
    rhs = as_vector(b)
    m, n = a.shape
    if m < n:
        raise DimensionMismatch(f"least_squares needs m >= n, got {a.shape}")
    if len(rhs) != m:
        raise DimensionMismatch("least_squares: rhs length does not match matrix")

    u, s, vt = np.linalg.svd(a, full_matrices=False)
    col_scale = np.linalg.norm(a, axis=0).max()
    tol = _RANK_RTOL * col_scale
    if s[-1] <= tol and not allow_rank_deficient:
        raise RankDeficient(f"smallest singular value {s[-1]:.3e} below {tol:.3e}")
    s_inv = np.where(s > tol, 1.0 / np.where(s > tol, s, 1.0), 0.0)
    coeffs = vt.T @ (s_inv * (u.T @ rhs))
    residual_norm = float(np.linalg.norm(a @ coeffs - rhs))
    return coeffs, residual_norm
