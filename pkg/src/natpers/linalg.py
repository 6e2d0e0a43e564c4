"""Exact linear algebra over Q and GF(p).

Dense matrices are numpy object arrays holding field elements; sparse
vectors (used for chain reduction) are ``dict[int, element]`` with no
explicit zeros.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np


class Field:
    """Coefficient field: characteristic 0 (rationals) or a prime p."""

    def __init__(self, characteristic: int = 0):
        if characteristic != 0 and not _is_prime(characteristic):
            raise ValueError(f"field characteristic must be 0 or prime, got {characteristic}")
        self.p = characteristic
        self.zero = self(0)
        self.one = self(1)

    def __call__(self, x) -> "Fraction | GF":
        if self.p == 0:
            if isinstance(x, GF):
                x = x.v
            return Fraction(x)
        if isinstance(x, GF):
            if x.p != self.p:
                raise ValueError("mixing prime fields")
            return x
        if isinstance(x, Fraction):
            return GF(x.numerator, self.p) / GF(x.denominator, self.p)
        return GF(int(x), self.p)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    def elements(self) -> list:
        if self.p == 0:
            raise ValueError("Q is infinite")
        return [GF(i, self.p) for i in range(self.p)]


class GF:
    """Element of the prime field GF(p)."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, GF):
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return (GF(other.numerator, self.p) / GF(other.denominator, self.p)).v
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else GF(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else GF(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else GF(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else GF(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GF(-self.v, self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return GF(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return GF(self._lift(other), self.p) / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return str(self.v)


QQ = Field(0)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------- dense


def matrix(rows: Iterable[Iterable], field: Field = QQ, shape: tuple[int, int] | None = None) -> np.ndarray:
    rows = [[field(x) for x in r] for r in rows]
    if shape is None:
        ncols = len(rows[0]) if rows else 0
        shape = (len(rows), ncols)
    A = np.empty(shape, dtype=object)
    for i in range(shape[0]):
        for j in range(shape[1]):
            A[i, j] = rows[i][j]
    return A


def zeros(m: int, n: int, field: Field = QQ) -> np.ndarray:
    A = np.empty((m, n), dtype=object)
    A.fill(field.zero)
    return A


def identity(n: int, field: Field = QQ) -> np.ndarray:
    A = zeros(n, n, field)
    for i in range(n):
        A[i, i] = field.one
    return A


def matmul(A: np.ndarray, B: np.ndarray, field: Field = QQ) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    C = zeros(A.shape[0], B.shape[1], field)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            s = field.zero
            for k in range(A.shape[1]):
                a = A[i, k]
                if a:
                    b = B[k, j]
                    if b:
                        s = s + a * b
            C[i, j] = s
    return C


def mat_equal(A: np.ndarray, B: np.ndarray) -> bool:
    if A.shape != B.shape:
        return False
    return all(A[i, j] == B[i, j] for i in range(A.shape[0]) for j in range(A.shape[1]))


def is_zero(A: np.ndarray) -> bool:
    return all(not A[i, j] for i in range(A.shape[0]) for j in range(A.shape[1]))


def rref(A: np.ndarray, field: Field = QQ) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    R = np.array([[field(x) for x in row] for row in A], dtype=object).reshape(A.shape)
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pr = next((i for i in range(r, m) if R[i, c]), None)
        if pr is None:
            continue
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        inv = field.one / R[r, c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i, c]:
                f = R[i, c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: np.ndarray, field: Field = QQ) -> int:
    if A.size == 0:
        return 0
    return len(rref(A, field)[1])


def nullspace(A: np.ndarray, field: Field = QQ) -> list[np.ndarray]:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    m, n = A.shape
    if m == 0:
        return [identity(n, field)[:, j] for j in range(n)]
    R, pivots = rref(A, field)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = np.array([field.zero] * n, dtype=object)
        x[f] = field.one
        for i, p in enumerate(pivots):
            x[p] = -R[i, f]
        basis.append(x)
    return basis


def inverse(A: np.ndarray, field: Field = QQ) -> np.ndarray:
    n, m = A.shape
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return zeros(0, 0, field)
    aug = np.concatenate([A, identity(n, field)], axis=1)
    R, pivots = rref(aug, field)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular")
    return R[:, n:]


def is_invertible(A: np.ndarray, field: Field = QQ) -> bool:
    return A.shape[0] == A.shape[1] and rank(A, field) == A.shape[0]


def solve(A: np.ndarray, b: np.ndarray, field: Field = QQ) -> np.ndarray | None:
    """Some x with A x = b, or None if inconsistent."""
    m, n = A.shape
    aug = np.concatenate([A, np.asarray(b, dtype=object).reshape(m, 1)], axis=1)
    R, pivots = rref(aug, field)
    if n in pivots:
        return None
    x = np.array([field.zero] * n, dtype=object)
    for i, p in enumerate(pivots):
        x[p] = R[i, n]
    return x


def format_matrix(A: np.ndarray) -> str:
    rows = ["[" + ", ".join(str(x) for x in A[i]) + "]" for i in range(A.shape[0])]
    return f"{A.shape[0]}x{A.shape[1]} [" + ", ".join(rows) + "]"


def parse_matrix(text: str, field: Field = QQ) -> np.ndarray:
    """Inverse of :func:`format_matrix`."""
    text = text.strip()
    dims, _, body = text.partition(" ")
    m, n = (int(t) for t in dims.split("x"))
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"bad matrix literal: {text!r}")
    inner = body[1:-1].strip()
    rows = []
    while inner:
        if not inner.startswith("["):
            raise ValueError(f"bad matrix literal: {text!r}")
        end = inner.index("]")
        cells = inner[1:end].strip()
        rows.append([Fraction(c.strip()) for c in cells.split(",")] if cells else [])
        inner = inner[end + 1:].lstrip(", ")
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ValueError(f"matrix literal does not match its shape {m}x{n}")
    return matrix(rows, field, shape=(m, n))


# ---------------------------------------------------------------- sparse


def sparse_axpy(y: dict, a, x: dict) -> None:
    """y += a * x in place, dropping zeros."""
    for k, v in x.items():
        s = y.get(k)
        s = a * v if s is None else s + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


def low(v: dict) -> int:
    return max(v)


def dense_column(v: dict, n: int, field: Field) -> np.ndarray:
    out = np.array([field.zero] * n, dtype=object)
    for k, x in v.items():
        out[k] = x
    return out
