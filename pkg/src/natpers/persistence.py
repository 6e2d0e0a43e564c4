"""Persistence modules, graded column-echelon barcodes, and interleavings.

A module indexed by a finite increasing list of degrees is read as a
piecewise-constant module over the reals: zero below the first degree,
constant on [d_i, d_{i+1}), and constant from the last degree on.  Its graded
k[t]-module has the free presentation

    generators  e in basis(M_i)          in degree i
    relations   t.e - phi_i(e)            in degree i + 1

and the barcode is read from the column-echelon form of that presentation
matrix (rows in reverse degree order): a pivot row of degree b whose pivot is
t^n gives [b, b + n), a row without pivot gives [b, inf).
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import linalg
from .homology import ChainComplex, TableMap, homology, induced_map
from .linalg import QQ, Field

INF = math.inf
Degree = "int | Fraction"


@dataclass(frozen=True)
class PersistenceModule:
    degrees: tuple
    dims: tuple[int, ...]
    maps: tuple[np.ndarray, ...]
    tail: bool = True
    field: Field = QQ

    def __post_init__(self):
        if len(self.dims) != len(self.degrees):
            raise ValueError("one dimension per degree")
        if len(self.maps) != max(len(self.dims) - 1, 0):
            raise ValueError("one map per consecutive pair of degrees")
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise ValueError("degrees must be strictly increasing")
        for i, A in enumerate(self.maps):
            if A.shape != (self.dims[i + 1], self.dims[i]):
                raise ValueError(f"map {i} has shape {A.shape}, expected {(self.dims[i + 1], self.dims[i])}")

    @classmethod
    def from_maps(cls, dims: Sequence[int], maps: Sequence, degrees: Sequence | None = None,
                  field: Field = QQ, tail: bool = True) -> "PersistenceModule":
        if degrees is None:
            degrees = range(len(dims))
        mats = []
        for i, A in enumerate(maps):
            A = np.asarray(A, dtype=object).reshape(dims[i + 1], dims[i])
            mats.append(np.vectorize(field, otypes=[object])(A) if A.size else linalg.zeros(*A.shape, field))
        return cls(tuple(degrees), tuple(dims), tuple(mats), tail, field)

    @classmethod
    def zero(cls, field: Field = QQ) -> "PersistenceModule":
        return cls((), (), (), True, field)

    def __len__(self):
        return len(self.dims)

    def map_between(self, i: int, j: int) -> np.ndarray:
        """Composite from position i to position j >= i (positions, not degrees)."""
        if j < i:
            raise ValueError("maps only go forward")
        A = linalg.identity(self.dims[i], self.field)
        for k in range(i, j):
            A = linalg.matmul(self.maps[k], A, self.field)
        return A

    def position(self, t) -> int | None:
        """Index of the constant piece containing real index t (None below)."""
        i = bisect.bisect_right(self.degrees, t)
        return i - 1 if i else None

    def dim_at(self, t) -> int:
        p = self.position(t)
        return 0 if p is None else self.dims[p]

    def map_real(self, s, t) -> np.ndarray:
        """M(s <= t) over the reals."""
        ps, pt = self.position(s), self.position(t)
        if ps is None or pt is None:
            return linalg.zeros(self.dim_at(t), self.dim_at(s), self.field)
        return self.map_between(ps, pt)

    def shift(self, eps) -> "PersistenceModule":
        """t -> M_{t + eps}."""
        return PersistenceModule(tuple(d - eps for d in self.degrees), self.dims, self.maps, self.tail, self.field)


# ---------------------------------------------------------------- barcodes


Interval = tuple  # (birth, death) with death possibly INF


def sort_bars(bars) -> tuple:
    return tuple(sorted(bars, key=lambda iv: (iv[0], iv[1])))


def format_barcode(bars) -> str:
    def fmt(x):
        return "inf" if x == INF else str(x)

    return "\n".join(f"[{fmt(b)}, {fmt(d)})" for b, d in sort_bars(bars))


def parse_barcode(text: str) -> tuple:
    bars = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if not (line.startswith("[") and line.endswith(")")):
            raise ValueError(f"bad interval {line!r}")
        b, d = (x.strip() for x in line[1:-1].split(","))
        bars.append((Fraction(b), INF if d == "inf" else Fraction(d)))
    return sort_bars(bars)


def _norm(x):
    if x == INF:
        return INF
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def graded_column_echelon(row_degrees: Sequence, col_degrees: Sequence, columns: Sequence[Mapping[int, object]],
                          field: Field = QQ, col_order: Sequence[int] | None = None):
    """Column-echelon form of a homogeneous matrix over k[t].

    Entry (r, c) stands for coefficient * t^(col_degrees[c] - row_degrees[r]).
    Rows are ordered by decreasing degree (ties by index); columns by
    increasing degree (ties by index).  Each column's pivot is its topmost
    nonzero row.  Returns (reduced columns, {column: pivot row}).
    ``col_order`` overrides the tie order among equal-degree columns.
    """
    row_key = {r: (-row_degrees[r], r) for r in range(len(row_degrees))}
    order = col_order if col_order is not None else sorted(range(len(col_degrees)), key=lambda c: (col_degrees[c], c))
    R = [{r: field(v) for r, v in col.items() if v} for col in columns]
    pivot_col: dict[int, int] = {}
    pivots: dict[int, int] = {}
    for c in order:
        col = R[c]
        while col:
            r = min(col, key=row_key.__getitem__)
            p = pivot_col.get(r)
            if p is None:
                pivot_col[r] = c
                pivots[c] = r
                break
            if col_degrees[p] > col_degrees[c]:
                raise AssertionError("non-homogeneous elimination")
            linalg.sparse_axpy(col, -col[r] / R[p][r], R[p])
    return R, pivots


def read_bars(row_degrees: Sequence, col_degrees: Sequence, pivots: Mapping[int, int],
              rows: Sequence[int] | None = None) -> list:
    """Pivot rows give [deg r, deg c); the remaining listed rows give [deg r, inf)."""
    rows = range(len(row_degrees)) if rows is None else rows
    paired = {r: c for c, r in pivots.items()}
    bars = []
    for r in rows:
        b = row_degrees[r]
        if r in paired:
            d = col_degrees[paired[r]]
            if d > b:
                bars.append((b, d))
        else:
            bars.append((b, INF))
    return bars


def presentation(M: PersistenceModule):
    """Rows/columns/entries of the free presentation of the graded module."""
    offsets = list(itertools.accumulate(M.dims, initial=0))
    row_deg = [i for i, n in enumerate(M.dims) for _ in range(n)]
    col_deg, cols = [], []
    for i, A in enumerate(M.maps):
        for e in range(M.dims[i]):
            col = {offsets[i] + e: M.field.one}
            for r in range(M.dims[i + 1]):
                if A[r, e]:
                    col[offsets[i + 1] + r] = -A[r, e]
            cols.append(col)
            col_deg.append(i + 1)
    return row_deg, col_deg, cols


def barcode(M: PersistenceModule) -> tuple:
    """Interval decomposition by column-echelon reduction of the presentation."""
    if not M.tail and M.dims and M.dims[-1]:
        raise ValueError("module does not stabilise: set tail=True or end with a zero space")
    row_deg, col_deg, cols = presentation(M)
    _, pivots = graded_column_echelon(row_deg, col_deg, cols, M.field)
    bars = []
    for b, d in read_bars(row_deg, col_deg, pivots):
        bars.append((_norm(M.degrees[b]), INF if d == INF else _norm(M.degrees[d])))
    return sort_bars(bars)


def dims_from_bars(bars, degrees: Sequence) -> list[int]:
    return [sum(1 for b, d in bars if b <= t < d) for t in degrees]


def rank_from_bars(bars, s, t) -> int:
    return sum(1 for b, d in bars if b <= s and t < d)


# ---------------------------------------------------------------- filtrations


@dataclass
class FilteredComplex:
    """K^0 ⊆ K^1 ⊆ ... ⊆ K^n encoded by the birth stage of every generator of
    the final complex."""

    complex: ChainComplex
    births: list[list[int]]
    stages: int = 0

    def __post_init__(self):
        if not self.stages:
            self.stages = 1 + max((b for bs in self.births for b in bs), default=0)
        for k in range(1, len(self.births)):
            for j, b in enumerate(self.births[k]):
                for r in self.complex.column(k, j):
                    if self.births[k - 1][r] > b:
                        raise ValueError(f"degree-{k} generator {j} is born before its face {r}")

    def stage(self, i: int) -> tuple[ChainComplex, list[list[int]]]:
        keep = [[j for j, b in enumerate(bs) if b <= i] for bs in self.births]
        return self.complex.subcomplex(keep)


def inclusion(small: tuple[ChainComplex, list[list[int]]], big: tuple[ChainComplex, list[list[int]]]) -> TableMap:
    S, s_old = small
    B, b_old = big
    images = {}
    for k in range(len(s_old)):
        where = {old: new for new, old in enumerate(b_old[k])}
        images[k] = [(where[old], 1) for old in s_old[k]]
    return TableMap(S, B, images)


def persistent_homology(F: FilteredComplex, k: int, field: Field = QQ) -> PersistenceModule:
    stages = [F.stage(i) for i in range(F.stages)]
    dims = [homology(C, k, field).rank for C, _ in stages]
    maps = [induced_map(inclusion(stages[i], stages[i + 1]), k, field) for i in range(F.stages - 1)]
    return PersistenceModule(tuple(range(F.stages)), tuple(dims), tuple(maps), True, field)


def filtration_barcode(F: FilteredComplex, k: int, field: Field = QQ) -> tuple:
    """H_k barcode straight from the graded boundary matrix of the filtration.

    Rows are the degree-k cells; a row contributes only if it is a cycle
    creator (its column of the degree-k boundary reduces to zero).
    """
    C = F.complex
    if k >= len(F.births):
        return ()
    rows_deg = list(F.births[k])
    cols_deg = list(F.births[k + 1]) if k + 1 < len(F.births) else []
    cols = [C.column(k + 1, j) for j in range(len(cols_deg))]
    _, pivots = graded_column_echelon(rows_deg, cols_deg, cols, field)
    if k >= 1:
        # the k-cells must be totally ordered the same way in both reductions:
        # pivots above prefer the lowest index among equal degrees, so that index counts as youngest
        order = sorted(range(len(rows_deg)), key=lambda r: (rows_deg[r], -r))
        _, lower = graded_column_echelon(F.births[k - 1], rows_deg, [C.column(k, j) for j in range(len(rows_deg))],
                                         field, order)
        creators = [r for r in range(len(rows_deg)) if r not in lower]
    else:
        creators = list(range(len(rows_deg)))
    return sort_bars(read_bars(rows_deg, cols_deg, pivots, creators))


def echelon_table(row_names, row_degrees, col_names, col_degrees, columns, field: Field = QQ) -> str:
    """Text rendering of the reduced graded matrix, rows in reverse degree order."""
    R, pivots = graded_column_echelon(row_degrees, col_degrees, columns, field)
    rows = sorted(range(len(row_degrees)), key=lambda r: (-row_degrees[r], r))
    cols = sorted(range(len(col_degrees)), key=lambda c: (col_degrees[c], c))
    piv = set(pivots.items())

    def cell(r, c):
        v = R[c].get(r)
        if not v:
            return "0"
        n = col_degrees[c] - row_degrees[r]
        coef = str(v)
        txt = coef if n == 0 else (("" if v == 1 else "-" if v == -1 else coef) + ("t" if n == 1 else f"t^{n}"))
        return f"[{txt}]" if (c, r) in piv else txt

    width = 8
    lead = max([len(str(n)) for n in row_names] + [width]) + 1
    out = [" " * lead + "".join(str(col_names[c]).rjust(width) for c in cols)]
    for r in rows:
        out.append(str(row_names[r]).ljust(lead) + "".join(cell(r, c).rjust(width) for c in cols))
    return "\n".join(out)


# ---------------------------------------------------------------- reals


def complete_to_real(M: PersistenceModule, embedding: Callable | Sequence) -> PersistenceModule:
    """Re-index by a strictly monotone map of positions into exact rationals."""
    n = len(M)
    if callable(embedding):
        values = [Fraction(embedding(i)) for i in range(n)]
    else:
        values = [Fraction(x) for x in embedding]
        if len(values) != n:
            raise ValueError("embedding needs one value per index")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("embedding must be strictly increasing")
    return PersistenceModule(tuple(_norm(v) for v in values), M.dims, M.maps, M.tail, M.field)


Family = "Callable | Mapping"


def _family_at(fam, t, shape, field: Field) -> np.ndarray:
    if callable(fam):
        A = fam(t)
    else:
        keys = [k for k in fam if k <= t]
        A = fam[max(keys)] if keys else None
    if A is None:
        return linalg.zeros(*shape, field)
    A = np.asarray(A, dtype=object)
    if A.size == 0 and A.shape != shape:
        return linalg.zeros(*shape, field)
    if A.shape != shape:
        raise ValueError(f"interleaving map at {t} has shape {A.shape}, expected {shape}")
    return A


def verify_interleaving(M: PersistenceModule, N: PersistenceModule, eps, phi, psi) -> tuple[bool, str]:
    """Check the four interleaving identities at the critical indices.

    ``phi(t)`` maps M_t -> N_{t+eps} and ``psi(t)`` maps N_t -> M_{t+eps}; each
    may be a callable or a step function {breakpoint: matrix}.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    F = M.field
    eps = Fraction(eps)
    bps = set(M.degrees) | set(N.degrees)
    for fam in (phi, psi):
        if not callable(fam):
            bps |= set(fam)
    pts = sorted({Fraction(b) - m * eps for b in bps for m in range(3)})
    if pts:
        pts.insert(0, pts[0] - 1)

    def ph(t):
        return _family_at(phi, t, (N.dim_at(t + eps), M.dim_at(t)), F)

    def ps(t):
        return _family_at(psi, t, (M.dim_at(t + eps), N.dim_at(t)), F)

    eq = linalg.mat_equal
    mm = lambda A, B: linalg.matmul(A, B, F)  # noqa: E731
    for k, i in enumerate(pts):
        if not eq(mm(ps(i + eps), ph(i)), M.map_real(i, i + 2 * eps)):
            return False, f"psi(i+eps) phi(i) != M(i -> i+2eps) at i = {i}"
        if not eq(mm(ph(i + eps), ps(i)), N.map_real(i, i + 2 * eps)):
            return False, f"phi(i+eps) psi(i) != N(i -> i+2eps) at i = {i}"
        # naturality squares paste, so consecutive critical points suffice
        for j in pts[k + 1:k + 2]:
            if not eq(mm(ph(j), M.map_real(i, j)), mm(N.map_real(i + eps, j + eps), ph(i))):
                return False, f"phi(j) M(i -> j) != N(i+eps -> j+eps) phi(i) at i = {i}, j = {j}"
            if not eq(mm(ps(j), N.map_real(i, j)), mm(M.map_real(i + eps, j + eps), ps(i))):
                return False, f"psi(j) N(i -> j) != M(i+eps -> j+eps) psi(i) at i = {i}, j = {j}"
    return True, "interleaved"


def shift_interleaving(M: PersistenceModule, eps):
    """Canonical maps between M and its eps-shift N_t = M_{t+eps}:
    phi = M(t -> t + 2 eps), psi = identity."""
    N = M.shift(eps)
    return N, (lambda t: M.map_real(t, t + 2 * eps)), (lambda t: linalg.identity(N.dim_at(t), M.field))


# ---------------------------------------------------------------- distances


def _pair_cost(a, b):
    (b1, d1), (b2, d2) = a, b
    if (d1 == INF) != (d2 == INF):
        return INF
    if d1 == INF:
        return abs(Fraction(b1) - Fraction(b2))
    return max(abs(Fraction(b1) - Fraction(b2)), abs(Fraction(d1) - Fraction(d2)))


def _diag_cost(a):
    b, d = a
    return INF if d == INF else (Fraction(d) - Fraction(b)) / 2


def _perfect_matching(n_left: int, n_right: int, adj: list[list[int]]) -> list[int] | None:
    match_r = [-1] * n_right

    def augment(u, seen):
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] < 0 or augment(match_r[v], seen):
                    match_r[v] = u
                    return True
        return False

    for u in range(n_left):
        if not augment(u, [False] * n_right):
            return None
    match_l = [-1] * n_left
    for v, u in enumerate(match_r):
        if u >= 0:
            match_l[u] = v
    return match_l


def bottleneck(A: Sequence, B: Sequence) -> tuple:
    """Exact bottleneck distance and an optimal matching {i: j or None}."""
    A, B = list(A), list(B)
    na, nb = len(A), len(B)
    cand = {Fraction(0)}
    for a in A:
        cand.add(_diag_cost(a))
        for b in B:
            cand.add(_pair_cost(a, b))
    for b in B:
        cand.add(_diag_cost(b))
    for eps in sorted(cand):
        if eps == INF:
            break
        # left: A then diagonal copies of B; right: B then diagonal copies of A
        adj = []
        for i, a in enumerate(A):
            row = [j for j, b in enumerate(B) if _pair_cost(a, b) <= eps]
            if _diag_cost(a) <= eps:
                row.append(nb + i)
            adj.append(row)
        for j, b in enumerate(B):
            row = [nb + i for i in range(na)]
            if _diag_cost(b) <= eps:
                row.append(j)
            adj.append(row)
        m = _perfect_matching(na + nb, nb + na, adj)
        if m is not None:
            return _norm(eps), {i: (m[i] if m[i] < nb else None) for i in range(na)}
    return INF, {}


def interval_module(bars: Sequence, field: Field = QQ) -> tuple[PersistenceModule, list]:
    """Direct sum of interval modules; also returns, per position, the bar
    indices spanning the basis there."""
    pts = sorted({Fraction(x) for b, d in bars for x in (b, d) if x != INF})
    basis = [[k for k, (b, d) in enumerate(bars) if b <= t < d] for t in pts]
    maps = []
    for i in range(len(pts) - 1):
        A = linalg.zeros(len(basis[i + 1]), len(basis[i]), field)
        for c, k in enumerate(basis[i]):
            if k in basis[i + 1]:
                A[basis[i + 1].index(k), c] = field.one
        maps.append(A)
    M = PersistenceModule(tuple(_norm(p) for p in pts), tuple(len(b) for b in basis), tuple(maps), True, field)
    return M, basis


def _matched_family(src, src_basis, dst, dst_basis, pairs: dict, eps, field):
    def fam(t):
        ps, pd = src.position(t), dst.position(t + eps)
        rows = dst_basis[pd] if pd is not None else []
        cols = src_basis[ps] if ps is not None else []
        A = linalg.zeros(len(rows), len(cols), field)
        for c, k in enumerate(cols):
            j = pairs.get(k)
            if j is not None and j in rows:
                A[rows.index(j), c] = field.one
        return A

    return fam


def interleaving_distance(M: PersistenceModule, N: PersistenceModule, certify: bool = True):
    """Bottleneck distance of the barcodes, certified by an explicit
    interleaving of the interval decompositions at that value."""
    A, B = barcode(M), barcode(N)
    d, match = bottleneck(A, B)
    if certify and d != INF:
        MA, ba = interval_module(A, M.field)
        NB, bb = interval_module(B, M.field)
        fwd = {i: j for i, j in match.items() if j is not None}
        back = {j: i for i, j in fwd.items()}
        phi = _matched_family(MA, ba, NB, bb, fwd, d, M.field)
        psi = _matched_family(NB, bb, MA, ba, back, d, M.field)
        ok, why = verify_interleaving(MA, NB, d, phi, psi)
        if not ok:
            raise RuntimeError(f"bottleneck matching failed to certify at {d}: {why}")
    return d


def trace_poset_weight(P, p, q) -> int:
    """0 unless p <= q; then max of the prefix and suffix edge counts."""
    w = P.witness(p, q)
    if w is None:
        return 0
    u, v = w
    return max(len(u), len(v))
