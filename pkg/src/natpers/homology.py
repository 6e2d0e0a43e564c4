"""Chain complexes with sparse integer boundaries and exact homology over a field."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Protocol, Sequence

import numpy as np

from . import linalg
from .linalg import QQ, Field
from .tracespace import ExtensionMap, TraceComplex


@dataclass(eq=False)
class ChainComplex:
    """``bases[k]`` lists degree-k generators; ``boundaries[k][j]`` is the sparse
    column {row: int coefficient} of the j-th degree-k generator (k >= 1)."""

    bases: list[list[Hashable]]
    boundaries: dict[int, list[dict[int, int]]]
    _cache: dict = field(default_factory=dict, repr=False)

    def size(self, k: int) -> int:
        return len(self.bases[k]) if 0 <= k < len(self.bases) else 0

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def column(self, k: int, j: int) -> dict[int, int]:
        return self.boundaries[k][j] if k >= 1 else {}

    def boundary_matrix(self, k: int, field: Field = QQ) -> np.ndarray:
        A = linalg.zeros(self.size(k - 1), self.size(k), field)
        for j in range(self.size(k)):
            for i, c in self.column(k, j).items():
                A[i, j] = field(c)
        return A

    def subcomplex(self, keep: Sequence[Sequence[int]]) -> tuple["ChainComplex", list[list[int]]]:
        """Restriction to the generators listed per degree (must be closed under
        boundary).  Also returns the old index of each new generator."""
        new_index = [{old: new for new, old in enumerate(ks)} for ks in keep]
        bases = [[self.bases[k][i] for i in ks] for k, ks in enumerate(keep)]
        bnd = {}
        for k in range(1, len(keep)):
            cols = []
            for old in keep[k]:
                col = {}
                for r, c in self.column(k, old).items():
                    if r not in new_index[k - 1]:
                        raise ValueError(f"generator {self.bases[k][old]!r} has a boundary outside the subcomplex")
                    col[new_index[k - 1][r]] = c
                cols.append(col)
            bnd[k] = cols
        return ChainComplex(bases, bnd), [list(ks) for ks in keep]


def chain_complex_of_simplicial(simplices: Sequence[Sequence]) -> ChainComplex:
    """Simplicial chains with the alternating-sign boundary.

    Faces are added automatically; vertices are ordered by their natural sort
    order and each degree's basis is sorted lexicographically.
    """
    closed = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            closed.update(itertools.combinations(s, k))
    top = max((len(s) for s in closed), default=0)
    bases = [sorted(s for s in closed if len(s) == k + 1) for k in range(top)]
    if not bases:
        bases = [[]]
    index = [{s: i for i, s in enumerate(b)} for b in bases]
    bnd = {}
    for k in range(1, len(bases)):
        cols = []
        for s in bases[k]:
            col = {}
            for i in range(len(s)):
                col[index[k - 1][s[:i] + s[i + 1:]]] = (-1) ** i
            cols.append(col)
        bnd[k] = cols
    return ChainComplex([list(b) for b in bases], bnd)


def chain_complex_of_trace(T: TraceComplex) -> ChainComplex:
    """Degree 0: paths; degree 1: swaps (lower -> upper corner); degree 2:
    independent swap pairs with boundary bottom + right - top - left."""
    bnd = {1: [], 2: []}
    for s in T.swaps:
        bnd[1].append({s.path: -1, s.target: 1})
    for q in T.squares2:
        col: dict[int, int] = {}
        for e, c in ((q.bottom, 1), (q.right, 1), (q.top, -1), (q.left, -1)):
            col[e] = col.get(e, 0) + c
        bnd[2].append({e: c for e, c in col.items() if c})
    bases = [list(range(len(T.vertices))), list(range(len(T.swaps))), list(range(len(T.squares2)))]
    C = ChainComplex(bases, bnd)
    C.trace = T
    return C


def chains_of(T: TraceComplex) -> ChainComplex:
    """Memoised :func:`chain_complex_of_trace`, stored on the complex itself."""
    C = T.__dict__.get("_chains")
    if C is None:
        C = chain_complex_of_trace(T)
        object.__setattr__(T, "_chains", C)
    return C


# ---------------------------------------------------------------- reduction


def reduce_columns(columns: Sequence[dict], field: Field, track: bool = False):
    """Standard column reduction by lowest nonzero row.

    Returns (reduced columns, pivot row -> column, V) where V[j] records the
    combination of original columns forming reduced column j (if tracked).
    """
    R = [{r: field(c) for r, c in col.items()} for col in columns]
    V = [{j: field.one} for j in range(len(columns))] if track else None
    pivot_of: dict[int, int] = {}
    for j, col in enumerate(R):
        while col:
            lo = linalg.low(col)
            p = pivot_of.get(lo)
            if p is None:
                pivot_of[lo] = j
                break
            f = -col[lo] / R[p][lo]
            linalg.sparse_axpy(col, f, R[p])
            if track:
                linalg.sparse_axpy(V[j], f, V[p])
    return R, pivot_of, V


class HomologyBasis:
    """Chosen basis of H_k with a pivot table for reading off coordinates."""

    def __init__(self, C: ChainComplex, k: int, field: Field = QQ):
        self.complex, self.degree, self.field = C, k, field
        if k >= 1 and C.size(k):
            R_k, _, V = reduce_columns(C.boundaries[k], field, track=True)
            cycles = [V[j] for j in range(C.size(k)) if not R_k[j]]
        else:
            cycles = [{j: field.one} for j in range(C.size(k))]
        self.cycle_rank = len(cycles)
        upper = C.boundaries.get(k + 1, []) if C.size(k + 1) else []
        B, table, _ = reduce_columns(upper, field)
        self.boundary_rank = len(table)
        # pivot -> (reduced vector, homology coordinate or None for a boundary)
        self._table: dict[int, tuple[dict, int | None]] = {lo: (B[j], None) for lo, j in table.items()}
        self.reps: list[dict] = []
        for z in cycles:
            z = dict(z)
            while z:
                lo = linalg.low(z)
                hit = self._table.get(lo)
                if hit is None:
                    self._table[lo] = (z, len(self.reps))
                    self.reps.append(z)
                    break
                vec, _ = hit
                linalg.sparse_axpy(z, -z[lo] / vec[lo], vec)

    @property
    def rank(self) -> int:
        return len(self.reps)

    def coordinates(self, cycle: dict) -> list:
        """Coordinates of the class of a cycle; raises if it is not a cycle."""
        F = self.field
        z = {r: F(c) for r, c in cycle.items() if c}
        coords = [F.zero] * self.rank
        while z:
            lo = linalg.low(z)
            hit = self._table.get(lo)
            if hit is None:
                raise ValueError(f"chain is not a cycle in degree {self.degree}")
            vec, h = hit
            f = z[lo] / vec[lo]
            if h is not None:
                coords[h] = coords[h] + f
            linalg.sparse_axpy(z, -f, vec)
        return coords

    def is_cycle(self, chain: dict) -> bool:
        if self.degree == 0:
            return True
        acc: dict = {}
        for j, c in chain.items():
            linalg.sparse_axpy(acc, self.field(c), {r: self.field(x) for r, x in self.complex.column(self.degree, j).items()})
        return not acc


def homology(C: ChainComplex, k: int, field: Field = QQ) -> HomologyBasis:
    key = (k, field.p)
    H = C._cache.get(key)
    if H is None:
        H = C._cache[key] = HomologyBasis(C, k, field)
    return H


def betti(C: ChainComplex, k: int, field: Field = QQ) -> int:
    return homology(C, k, field).rank


# ---------------------------------------------------------------- maps


class CellularMap(Protocol):
    source: ChainComplex
    target: ChainComplex

    def cell(self, degree: int, i: int) -> tuple[int, int]: ...


@dataclass
class TableMap:
    """Cellular map given by explicit tables: ``images[k][i] = (j, sign)``;
    ``j = None`` sends the generator to zero (collapsed cell)."""

    source: ChainComplex
    target: ChainComplex
    images: dict[int, list[tuple[int | None, int]]]

    def cell(self, degree: int, i: int) -> tuple[int | None, int]:
        return self.images[degree][i]

    def compose(self, first: "TableMap") -> "TableMap":
        """self after first."""
        out = {}
        for k, imgs in first.images.items():
            row = []
            for j, s in imgs:
                if j is None:
                    row.append((None, 1))
                else:
                    j2, s2 = self.images[k][j]
                    row.append((j2, s * s2) if j2 is not None else (None, 1))
            out[k] = row
        return TableMap(first.source, self.target, out)


@dataclass
class TraceMap:
    """An :class:`ExtensionMap` seen on chain complexes."""

    ext: ExtensionMap

    @property
    def source(self) -> ChainComplex:
        return chains_of(self.ext.source)

    @property
    def target(self) -> ChainComplex:
        return chains_of(self.ext.target)

    def cell(self, degree: int, i: int) -> tuple[int, int]:
        return self.ext.cell(degree, i)


def as_cellular(f) -> CellularMap:
    return TraceMap(f) if isinstance(f, ExtensionMap) else f


def push(f: CellularMap, k: int, chain: dict, field: Field) -> dict:
    out: dict = {}
    for i, c in chain.items():
        j, s = f.cell(k, i)
        if j is None:
            continue
        linalg.sparse_axpy(out, field(s), {j: field(c)})
    return out


def is_chain_map(f: CellularMap, field: Field = QQ) -> bool:
    """Exhaustive check of f d = d f on every generator."""
    f = as_cellular(f)
    S, T = f.source, f.target
    for k in range(1, S.top + 1):
        for i in range(S.size(k)):
            lhs = push(f, k - 1, S.column(k, i), field)
            j, s = f.cell(k, i)
            rhs = {} if j is None else {r: field(s * c) for r, c in T.column(k, j).items()}
            if {r: v for r, v in lhs.items() if v} != {r: v for r, v in rhs.items() if v}:
                return False
    return True


def induced_map(f, k: int, field: Field = QQ, check: bool = False) -> np.ndarray:
    """Matrix of H_k(f) in the chosen homology bases (columns: source classes)."""
    f = as_cellular(f)
    if check and not is_chain_map(f, field):
        raise ValueError("map is not cellular (does not commute with boundaries)")
    Hs, Ht = homology(f.source, k, field), homology(f.target, k, field)
    M = linalg.zeros(Ht.rank, Hs.rank, field)
    for j, rep in enumerate(Hs.reps):
        image = push(f, k, rep, field)
        if not Ht.is_cycle(image):
            raise ValueError("map is not cellular: a cycle is sent to a non-cycle")
        for i, c in enumerate(Ht.coordinates(image)):
            M[i, j] = c
    return M


def identity_map(C: ChainComplex) -> TableMap:
    return TableMap(C, C, {k: [(i, 1) for i in range(C.size(k))] for k in range(len(C.bases))})
