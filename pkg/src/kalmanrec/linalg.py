"""Small dense linear algebra for the tracking filter.

Matrices are 2-D float64 numpy arrays in row-major order; vectors are 1-D.
Only the operations the filter recursion needs are provided.  The symmetric
positive definite solve goes through a Cholesky factorization so the inverse
of an innovation covariance is applied without ever being materialized.

Every operation validates its operand shapes and rejects non-finite results,
so NaN or Inf never propagates silently through the recursion.
"""

from __future__ import annotations

import numpy as np

# Absolute tolerance on max |s[i,j] - s[j,i]| accepted by solve_spd.  Chosen
# for round-off accumulated over hundreds of covariance propagation steps.
SYMMETRY_TOL = 1e-9


class NotSymmetricError(ValueError):
    """Input to an SPD solve was not symmetric within tolerance."""


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization hit a non-positive pivot.

    ``pivot`` is the zero-based index of the failing diagonal entry.
    """

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} is {value:.6g}"
        )


def _finite_or_raise(a: np.ndarray, what: str) -> np.ndarray:
    if not np.isfinite(a).all():
        raise ValueError(f"non-finite entries in {what}")
    return a


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D float64 row-major array with finite entries."""
    a = np.ascontiguousarray(values, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return _finite_or_raise(a, "matrix")


def as_vector(values) -> np.ndarray:
    """Coerce to a 1-D float64 array with finite entries."""
    a = np.ascontiguousarray(values, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={a.ndim}")
    return _finite_or_raise(a, "vector")


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b with explicit conformance checking."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    return _finite_or_raise(out, "matmul result")


def transpose(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("transpose expects a 2-D operand")
    return np.ascontiguousarray(a.T)


def add(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch in add: {a.shape} vs {b.shape}")
    return _finite_or_raise(a + b, "add result")


def sub(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch in sub: {a.shape} vs {b.shape}")
    return _finite_or_raise(a - b, "sub result")


def scale(a, c: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not np.isfinite(c):
        raise ValueError("scale factor must be finite")
    return _finite_or_raise(a * float(c), "scale result")


def identity(n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("identity size must be non-negative")
    return np.eye(n)


def zeros(rows: int, cols: int) -> np.ndarray:
    if rows < 0 or cols < 0:
        raise ValueError("zeros dimensions must be non-negative")
    return np.zeros((rows, cols))


def block3x3(blocks) -> np.ndarray:
    """Tile nine equally sized d x d blocks into one 3d x 3d matrix.

    ``blocks`` is a flat sequence of nine matrices in row-major block order.
    """
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    if len(blocks) != 9:
        raise ValueError(f"block3x3 needs exactly 9 blocks, got {len(blocks)}")
    d = blocks[0].shape[0] if blocks[0].ndim == 2 else -1
    for b in blocks:
        if b.ndim != 2 or b.shape != (d, d):
            raise ValueError("block3x3 blocks must all be square with equal size")
    return np.block([[blocks[0], blocks[1], blocks[2]],
                     [blocks[3], blocks[4], blocks[5]],
                     [blocks[6], blocks[7], blocks[8]]])


def max_asymmetry(s) -> float:
    """Largest absolute difference between a matrix and its transpose."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("max_asymmetry expects a square matrix")
    if s.shape[0] == 0:
        return 0.0
    return float(np.abs(s - s.T).max())


def cholesky(s) -> np.ndarray:
    """Lower-triangular L with L @ L.T == s for symmetric PD input.

    Only the lower triangle of ``s`` is read.  Raises
    :class:`NotPositiveDefiniteError` naming the first failing pivot.
    """
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        pivot = s[j, j] - L[j, :j] @ L[j, :j]
        if not np.isfinite(pivot) or pivot <= 0.0:
            raise NotPositiveDefiniteError(j, float(pivot))
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (s[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _forward_sub(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Solves L y = b for lower-triangular L; b may be 1-D or 2-D.
    y = np.array(b, dtype=float)
    for i in range(L.shape[0]):
        y[i] = (y[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def _back_sub(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Solves U x = b for upper-triangular U; b may be 1-D or 2-D.
    x = np.array(b, dtype=float)
    for i in range(U.shape[0] - 1, -1, -1):
        x[i] = (x[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def solve_spd(s, b) -> np.ndarray:
    """Solve s @ X = b for symmetric positive definite s.

    ``b`` may be a vector or a matrix of stacked right-hand sides; the
    result has the same shape.  Symmetry is enforced within
    :data:`SYMMETRY_TOL` (absolute, on the largest entry difference).
    """
    s = np.asarray(s, dtype=float)
    b = np.asarray(b, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("solve_spd expects a square matrix")
    if b.ndim not in (1, 2) or b.shape[0] != s.shape[0]:
        raise ValueError(
            f"right-hand side shape {b.shape} does not match matrix {s.shape}"
        )
    asym = max_asymmetry(s)
    if asym > SYMMETRY_TOL:
        raise NotSymmetricError(
            f"matrix is not symmetric: max |s - s.T| = {asym:.3e} > {SYMMETRY_TOL:.0e}"
        )
    L = cholesky(s)
    x = _back_sub(L.T, _forward_sub(L, b))
    return _finite_or_raise(x, "solve_spd result")
