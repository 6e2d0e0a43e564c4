"""Natural homology diagrams over trace posets and persistence along traces."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .homology import chains_of, homology, induced_map
from .linalg import QQ, Field
from .persistence import FilteredComplex, PersistenceModule
from .precubical import PrecubicalSet
from .tracespace import EdgePath, ExtensionMap, TraceComplex, trace_complex
from .traceposet import DEFAULT_CAP, Poset, TracePoset, build_trace_poset, witness


@dataclass
class PosetFunctor:
    """Vector-space valued functor on a finite poset, given on covers."""

    poset: Poset
    dims: list[int]
    cover_maps: dict[tuple[int, int], np.ndarray]
    field: Field = QQ
    _memo: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i, j in self.poset.covers():
            A = self.cover_maps.get((i, j))
            if A is None:
                raise ValueError(f"missing map on cover {self.poset.elements[i]} < {self.poset.elements[j]}")
            if A.shape != (self.dims[j], self.dims[i]):
                raise ValueError(f"map on cover ({i}, {j}) has shape {A.shape}")

    def map(self, i: int, j: int) -> np.ndarray:
        """F(i <= j), composed along the lexicographically first Hasse path."""
        if not self.poset.le(i, j):
            raise ValueError(f"{self.poset.elements[i]} is not below {self.poset.elements[j]}")
        if i == j:
            return linalg.identity(self.dims[i], self.field)
        key = (i, j)
        if key not in self._memo:
            c = next(c for c in self.poset.up[i] if self.poset.le(c, j))
            self._memo[key] = linalg.matmul(self.map(c, j), self.cover_maps[(i, c)], self.field)
        return self._memo[key]

    def check_commutative(self) -> tuple[int, int] | None:
        """First pair (i, j) where two Hasse paths disagree, or None."""
        P = self.poset
        for i in range(len(P)):
            for j in P.upset(i):
                first = None
                for c in P.up[i]:
                    if P.le(c, j):
                        A = linalg.matmul(self.map(c, j), self.cover_maps[(i, c)], self.field)
                        if first is None:
                            first = A
                        elif not linalg.mat_equal(first, A):
                            return i, j
        return None

    def restrict(self, keep: Sequence[int]) -> "PosetFunctor":
        Q, old = self.poset.subposet(keep)
        maps = {(a, b): self.map(old[a], old[b]) for a, b in Q.covers()}
        return PosetFunctor(Q, [self.dims[i] for i in old], maps, self.field)

    def labels(self) -> list[str]:
        return [str(e) for e in self.poset.elements]

    def export(self) -> str:
        lines = [f"nodes {len(self.dims)}"]
        for lab, d in zip(self.labels(), self.dims):
            lines.append(f"{lab}\t{d}")
        covers = self.poset.covers()
        lines.append(f"covers {len(covers)}")
        for i, j in covers:
            lines.append(f"{i}\t{j}\t{linalg.format_matrix(self.cover_maps[(i, j)])}")
        return "\n".join(lines) + "\n"


def import_diagram(text: str, field: Field = QQ) -> PosetFunctor:
    """Inverse of :meth:`PosetFunctor.export`; labels come back as strings."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = int(lines[0].split()[1])
    labels, dims = [], []
    for ln in lines[1:1 + n]:
        lab, d = ln.split("\t")
        labels.append(lab)
        dims.append(int(d))
    m = int(lines[1 + n].split()[1])
    up: list[list[int]] = [[] for _ in range(n)]
    maps = {}
    for ln in lines[2 + n:2 + n + m]:
        i, j, mat = ln.split("\t")
        i, j = int(i), int(j)
        up[i].append(j)
        maps[(i, j)] = linalg.parse_matrix(mat, field)
    return PosetFunctor(Poset(labels, up), dims, maps, field)


# ---------------------------------------------------------------- natural homology


class ComplexCache:
    """One trace complex per endpoint pair, shared by every trace with those endpoints."""

    def __init__(self, X: PrecubicalSet):
        self.X = X
        self._store: dict[tuple[str, str], TraceComplex] = {}

    def __call__(self, a: str, b: str) -> TraceComplex:
        T = self._store.get((a, b))
        if T is None:
            T = self._store[(a, b)] = trace_complex(self.X, a, b)
        return T

    def of(self, p: EdgePath) -> TraceComplex:
        return self(p.start, p.end)


@dataclass
class NatDiagram(PosetFunctor):
    X: PrecubicalSet | None = None
    degree: int = 1
    complexes: ComplexCache | None = None

    @property
    def traces(self) -> list[EdgePath]:
        return list(self.poset.elements)


def _check_degree(n: int):
    if n not in (1, 2):
        raise ValueError(f"degree must be 1 or 2, got {n}")


def extension_between(cache: ComplexCache, f: EdgePath, g: EdgePath) -> ExtensionMap:
    w = witness(cache.X, f, g)
    if w is None:
        raise ValueError(f"{f} is not below {g}")
    u, v = w
    return ExtensionMap(cache.of(f), cache.of(g), u, v)


def natural_homology(X: PrecubicalSet, n: int = 1, region=("whole",), field: Field = QQ,
                     cap: int = DEFAULT_CAP, P: TracePoset | None = None,
                     cache: ComplexCache | None = None) -> NatDiagram:
    """``region`` is ("whole",), ("upset", anchor) or ("interval", anchor, f);
    anchors may be vertex names (constant traces) or EdgePaths."""
    _check_degree(n)
    P = P or build_trace_poset(X, cap)
    Q = region_poset(P, region)
    cache = cache or ComplexCache(X)
    dims = [homology(chains_of(cache.of(f)), n - 1, field).rank for f in Q.elements]
    maps = {}
    for i, j in Q.covers():
        ext = extension_between(cache, Q.elements[i], Q.elements[j])
        maps[(i, j)] = induced_map(ext, n - 1, field)
    return NatDiagram(Q, dims, maps, field, X=X, degree=n, complexes=cache)


def _as_trace(P: TracePoset, a) -> int:
    if isinstance(a, int):
        return a
    if isinstance(a, str):
        return P.constant(a)
    return P.index[a]


def region_poset(P: TracePoset, region) -> TracePoset:
    kind = region[0]
    if kind == "whole":
        return P
    if kind == "upset":
        return P.upset_poset(_as_trace(P, region[1]))
    if kind == "interval":
        return P.interval_poset(_as_trace(P, region[1]), _as_trace(P, region[2]))
    raise ValueError(f"unknown region {kind!r}")


def endpoint_quotient(D: PosetFunctor) -> PosetFunctor:
    """Identify traces sharing both endpoints (they share a trace complex).

    Requires that all covers between two classes carry the same matrix.  The
    result is a diagram on covers, not necessarily a functor: two routes
    between the same endpoint pairs may land on different components.
    """
    P = D.poset
    classes: dict[tuple[str, str], list[int]] = {}
    for i, f in enumerate(P.elements):
        classes.setdefault((f.start, f.end), []).append(i)
    keys = sorted(classes, key=lambda k: min(classes[k]))
    cls = {i: k for k, members in classes.items() for i in members}
    pairs = {(cls[i], cls[j]) for i, j in P.covers() if cls[i] != cls[j]}
    Q = Poset.from_relation(keys, pairs)
    maps = {}
    for a, b in Q.covers():
        A = None
        for i, j in P.covers():
            if cls[i] == Q.elements[a] and cls[j] == Q.elements[b]:
                M = D.cover_maps[(i, j)]
                if A is None:
                    A = M
                elif not linalg.mat_equal(A, M):
                    raise ValueError(f"covers between {Q.elements[a]} and {Q.elements[b]} disagree")
        if A is None:
            raise ValueError(f"no trace cover realises {Q.elements[a]} < {Q.elements[b]}")
        maps[(a, b)] = A
    dims = [D.dims[classes[k][0]] for k in Q.elements]
    return PosetFunctor(Q, dims, maps, D.field)


# ---------------------------------------------------------------- along a trace


def _check_chain(X: PrecubicalSet, f: EdgePath, chain: Sequence[EdgePath]):
    if not chain:
        raise ValueError("empty chain")
    for c in chain:
        if witness(X, c, f) is None:
            raise ValueError(f"{c} is not a sub-trace of {f}")
    for a, b in zip(chain, chain[1:]):
        if a == b or witness(X, a, b) is None:
            raise ValueError(f"chain is not strictly increasing at {a} -> {b}")


def default_chain(X: PrecubicalSet, f: EdgePath) -> list[EdgePath]:
    """Prefixes of f from its start constant."""
    return [f.slice(X, 0, k) for k in range(len(f) + 1)]


def persistence_along_trace(X: PrecubicalSet, f: EdgePath, chain: Sequence[EdgePath] | None = None,
                            n: int = 1, field: Field = QQ, cache: ComplexCache | None = None) -> PersistenceModule:
    _check_degree(n)
    chain = list(chain) if chain is not None else default_chain(X, f)
    _check_chain(X, f, chain)
    cache = cache or ComplexCache(X)
    dims = tuple(homology(chains_of(cache.of(c)), n - 1, field).rank for c in chain)
    maps = tuple(induced_map(extension_between(cache, a, b), n - 1, field) for a, b in zip(chain, chain[1:]))
    return PersistenceModule(tuple(range(len(chain))), dims, maps, True, field)


def filtration_of_trace(X: PrecubicalSet, f: EdgePath, chain: Sequence[EdgePath] | None = None,
                        cache: ComplexCache | None = None) -> FilteredComplex:
    """Images of the trace complexes along the chain inside the last one."""
    chain = list(chain) if chain is not None else default_chain(X, f)
    _check_chain(X, f, chain)
    cache = cache or ComplexCache(X)
    top = chain[-1]
    C = chains_of(cache.of(top))
    births = [[None] * C.size(k) for k in range(3)]
    for i, c in enumerate(chain):
        ext = extension_between(cache, c, top)
        src = chains_of(ext.source)
        for k in range(3):
            for j in range(src.size(k)):
                t, _ = ext.cell(k, j)
                if births[k][t] is None:
                    births[k][t] = i
    last = len(chain) - 1
    births = [[last if b is None else b for b in bs] for bs in births]
    return FilteredComplex(C, births, len(chain))


def trace_label(f: EdgePath) -> str:
    return str(f)
