"""Exact dense linear algebra over the prime field GF(p).

Residues live in ``[0, p)``.  For moduli below 2**31 the arrays are int64 and
every kernel keeps intermediate products inside int64 (a product of two
residues is below 2**62; sums are reduced before they can accumulate past
2**63).  Larger moduli, up to 62 bits, fall back to object-dtype arrays of
Python integers: correct, but slow, and only expected for explicitly
configured exotic primes.

Array-level kernels (``mod_matmul``, ``mod_rref``, ...) are what the solver
hot paths use; :class:`FieldMatrix` and :class:`Subspace` wrap them for the
public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, NonPrimeError

DEFAULT_PRIME = 2**31 - 1

_INT64_SAFE_MAX = 2**31 - 1  # largest modulus whose residue products fit int64
_SPLIT = 1 << 16
_MAX_INNER_DIM = 1 << 16  # guards the split-multiply accumulation bound

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2**64."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A validated prime modulus, below 62 bits."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or self.p >= 2**62:
            raise NonPrimeError(f"modulus must be a prime in [2, 2**62): got {self.p!r}")
        if not is_prime(self.p):
            raise NonPrimeError(f"modulus {self.p} is not prime")

    def __int__(self) -> int:
        return self.p


def _dtype_for(p: int):
    return np.int64 if p <= _INT64_SAFE_MAX else object


def as_residues(data, p: int) -> np.ndarray:
    """Coerce nested sequences / arrays to a reduced residue array mod p."""
    arr = np.asarray(data)
    if arr.dtype == object or p > _INT64_SAFE_MAX:
        arr = np.array([[int(x) % p for x in row] for row in arr] if arr.ndim == 2
                       else [int(x) % p for x in arr] if arr.ndim == 1
                       else int(arr) % p, dtype=_dtype_for(p))
        return arr
    return np.asarray(arr, dtype=np.int64) % p


def mod_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Matrix product mod p with numpy broadcasting over leading axes."""
    if a.dtype != object and b.dtype != object and p <= _INT64_SAFE_MAX:
        if a.shape[-1] > _MAX_INNER_DIM:
            raise DimensionMismatchError("inner dimension too large for split multiply")
        hi = a >> 16
        lo = a & 0xFFFF
        return (np.matmul(hi, b) % p * _SPLIT + np.matmul(lo, b)) % p
    # Object path: np.matmul does not support object dtype.
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.ndim == 2 and b.ndim == 2:
        return np.dot(a, b) % p
    if a.ndim == 3 and b.ndim == 2:
        return np.stack([np.dot(a[i], b) % p for i in range(a.shape[0])])
    if a.ndim == 2 and b.ndim == 3:
        return np.stack([np.dot(a, b[i]) % p for i in range(b.shape[0])])
    raise DimensionMismatchError(f"unsupported matmul shapes {a.shape} x {b.shape}")


def batch_pow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise a**e mod p by binary exponentiation (vectorized)."""
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def batch_inv(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise modular inverse; zeros map to zero."""
    return batch_pow(a, p - 2, p)


def mod_rref(a: np.ndarray, p: int, transform: bool = False):
    """Reduced row-echelon form over GF(p).

    Returns ``(R, U, rank, pivots)``; ``U`` is None unless ``transform`` is
    set, in which case ``U @ a == R`` and U is invertible.  Pivoting takes the
    first nonzero entry in column order; exact arithmetic needs nothing
    cleverer.
    """
    a = np.asarray(a)
    rows, cols = a.shape
    A = a % p
    A = A.astype(_dtype_for(p), copy=True) if A.dtype != object else A.copy()
    if transform:
        eye = np.eye(rows, dtype=np.int64)
        if A.dtype == object:
            eye = eye.astype(object)
        A = np.concatenate([A, eye], axis=1)
    row = 0
    pivots: list[int] = []
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(A[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            A[[row, pr]] = A[[pr, row]]
        inv = pow(int(A[row, col]), p - 2, p)
        A[row] = A[row] * inv % p
        factors = A[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            A[hit] = (A[hit] - factors[hit, None] * A[row][None, :]) % p
        pivots.append(col)
        row += 1
    R = A[:, :cols]
    U = A[:, cols:] if transform else None
    return R, U, row, tuple(pivots)


def mod_rank(a: np.ndarray, p: int) -> int:
    return mod_rref(a, p)[2]


def mod_inverse_matrix(a: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix mod p; raises if singular."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatchError("inverse needs a square matrix")
    R, U, rank, _ = mod_rref(a, p, transform=True)
    if rank != n:
        raise DimensionMismatchError("matrix is singular")
    return U


def mod_nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {x : a @ x == 0}; shape (cols, cols - rank)."""
    a = np.asarray(a)
    rows, cols = a.shape
    R, _, rank, pivots = mod_rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=_dtype_for(p))
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-int(R[i, fc])) % p
    return basis


def mod_column_space(a: np.ndarray, p: int) -> np.ndarray:
    """Canonical (reduced-echelon) basis of the column space, as columns."""
    a = np.asarray(a)
    if a.shape[1] == 0:
        return a % p
    R, _, rank, _ = mod_rref(a.T, p)
    return R[:rank].T.copy()


# ---------------------------------------------------------------------------
# Public wrappers


@dataclass(frozen=True)
class FieldMatrix:
    """Dense matrix over GF(p); entries are reduced residues, row-major."""

    p: int
    data: np.ndarray

    def __post_init__(self):
        arr = as_residues(self.data, self.p)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"FieldMatrix needs a 2-D array, got ndim={arr.ndim}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]]) -> "FieldMatrix":
        return cls(p, np.array(rows))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FieldMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "FieldMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def random(cls, p: int, rows: int, cols: int, rng: np.random.Generator) -> "FieldMatrix":
        return cls(p, rng.integers(0, p, size=(rows, cols)))

    # -- shape -------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    # -- arithmetic ---------------------------------------------------------
    def _check_p(self, other: "FieldMatrix"):
        if self.p != other.p:
            raise DimensionMismatchError("mixed moduli")

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_p(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(f"{self.data.shape} @ {other.data.shape}")
        return FieldMatrix(self.p, mod_matmul(self.data, other.data, self.p))

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_p(other)
        return FieldMatrix(self.p, (self.data + other.data) % self.p)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_p(other)
        return FieldMatrix(self.p, (self.data - other.data) % self.p)

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.p, self.data.T)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldMatrix) and self.p == other.p
                and self.data.shape == other.data.shape
                and bool(np.all(self.data == other.data)))

    def __hash__(self):
        return hash((self.p, self.data.shape, self.data.tobytes() if self.data.dtype != object
                     else tuple(map(int, self.data.ravel()))))

    def rank(self) -> int:
        return mod_rank(self.data, self.p)

    def is_zero(self) -> bool:
        return not np.any(self.data)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "FieldMatrix":
        return FieldMatrix(self.p, mod_inverse_matrix(self.data, self.p))


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(p)^n given by an independent-column basis matrix."""

    ambient_dim: int
    basis: FieldMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_dim:
            raise DimensionMismatchError("basis rows must equal ambient dimension")
        if self.basis.cols and self.basis.rank() != self.basis.cols:
            raise DimensionMismatchError("basis columns are dependent")

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def dim(self) -> int:
        return self.basis.cols

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(n, FieldMatrix.zeros(p, n, 0))

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(n, FieldMatrix.identity(p, n))

    @classmethod
    def from_columns(cls, p: int, columns: np.ndarray) -> "Subspace":
        cols = as_residues(columns, p)
        return cls(cols.shape[0], FieldMatrix(p, mod_column_space(cols, p)))

    def contains(self, vector: Iterable[int]) -> bool:
        v = as_residues(list(vector), self.p).reshape(-1, 1)
        joint = np.concatenate([self.basis.data, v], axis=1)
        return mod_rank(joint, self.p) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        joint = np.concatenate([self.basis.data, other.basis.data], axis=1)
        return mod_rank(joint, self.p) == self.dim

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.dim == other.dim and self.contains_subspace(other))

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))


def rref(M: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix, int]:
    """Reduced row-echelon form with its invertible left transform.

    ``U @ M == R`` with U invertible; the returned rank is the pivot count.
    """
    R, U, rank, _ = mod_rref(M.data, M.p, transform=True)
    return FieldMatrix(M.p, R), FieldMatrix(M.p, U), rank


def nullspace(M: FieldMatrix) -> Subspace:
    """Right nullspace {x : M x = 0} of M."""
    return Subspace(M.cols, FieldMatrix(M.p, mod_nullspace(M.data, M.p)))


def column_space(M: FieldMatrix) -> Subspace:
    return Subspace(M.rows, FieldMatrix(M.p, mod_column_space(M.data, M.p)))


def preimage(M: FieldMatrix, W: Subspace) -> Subspace:
    """{x : M x lies in span(W)}; always contains the nullspace of M."""
    if W.ambient_dim != M.rows:
        raise DimensionMismatchError("preimage target lives in the wrong ambient space")
    combined = np.concatenate([M.data, W.basis.data], axis=1)
    null = mod_nullspace(combined, M.p)
    return Subspace.from_columns(M.p, null[: M.cols])


def span_union(mats: Sequence[FieldMatrix], U: Subspace) -> Subspace:
    """Span of all products B_k u over basis vectors u of U."""
    if not mats:
        raise DimensionMismatchError("span_union needs at least one matrix")
    p = mats[0].p
    n = mats[0].rows
    for mat in mats:
        if mat.cols != U.ambient_dim:
            raise DimensionMismatchError("matrix columns must match the subspace ambient dim")
    if U.dim == 0:
        return Subspace.zero(p, n)
    stack = np.stack([mat.data for mat in mats])
    return Subspace.from_columns(p, _span_columns(stack, U.basis.data, p))


def _span_columns(stack: np.ndarray, ubasis: np.ndarray, p: int) -> np.ndarray:
    """All columns B_k u as one (n, m*u) array."""
    prods = mod_matmul(stack, ubasis, p)  # (m, n, u)
    m, n, u = prods.shape
    return prods.transpose(1, 0, 2).reshape(n, m * u)
