"""Finite posets and the trace poset of a loop-free precubical set.

Traces are edge paths (constants included); f <= g iff g = u.f.v.  In a
loop-free complex a path visits each vertex once, so the witness (u, v) is
unique and the covers are exactly the one-edge extensions on either side.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .precubical import PrecubicalSet
from .tracespace import EdgePath

DEFAULT_CAP = 20_000


class CapExceeded(RuntimeError):
    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} exceeds the cap of {cap}")
        self.count, self.cap = count, cap


class Poset:
    """Finite poset on indices 0..n-1 with hashable labels.

    ``elements`` must be listed in a linear extension (i < j whenever
    element i < element j); constructors guarantee it.
    """

    def __init__(self, elements: Sequence[Hashable], up: Sequence[Sequence[int]]):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self.up = [sorted(set(c)) for c in up]
        self.down: list[list[int]] = [[] for _ in self.elements]
        for i, cs in enumerate(self.up):
            for j in cs:
                if j <= i:
                    raise ValueError("elements are not listed in a linear extension")
                self.down[j].append(i)
        self._upset: list[int] | None = None

    # construction

    @classmethod
    def from_relation(cls, elements: Sequence[Hashable], pairs: Iterable[tuple[Hashable, Hashable]]) -> "Poset":
        """Reflexive-transitive closure of the given relation, reduced to covers.
        Raises ValueError on a cycle (antisymmetry failure)."""
        elements = list(elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        succ = [set() for _ in range(n)]
        for a, b in pairs:
            if a != b:
                succ[idx[a]].add(idx[b])
        order = _toposort(n, succ)
        if order is None:
            raise ValueError("relation is not antisymmetric (it has a cycle)")
        relabel = {old: new for new, old in enumerate(order)}
        new_succ = [[relabel[j] for j in succ[old]] for old in order]
        return cls.from_dag([elements[i] for i in order], new_succ)

    @classmethod
    def from_dag(cls, elements: Sequence[Hashable], succ: Sequence[Iterable[int]]) -> "Poset":
        """Elements in a linear extension, ``succ`` any generating relation."""
        n = len(elements)
        reach = [0] * n
        for i in range(n - 1, -1, -1):
            r = 1 << i
            for j in succ[i]:
                r |= reach[j]
            reach[i] = r
        up = []
        for i in range(n):
            strict = reach[i] & ~(1 << i)
            above = 0
            for j in _bits(strict):
                above |= reach[j] & ~(1 << j)
            up.append(list(_bits(strict & ~above)))
        P = cls(elements, up)
        P._upset = reach
        return P

    # queries

    def __len__(self):
        return len(self.elements)

    @property
    def upsets(self) -> list[int]:
        """Bitset of {j : i <= j} per i."""
        if self._upset is None:
            reach = [0] * len(self)
            for i in range(len(self) - 1, -1, -1):
                r = 1 << i
                for j in self.up[i]:
                    r |= reach[j]
                reach[i] = r
            self._upset = reach
        return self._upset

    def le(self, i: int, j: int) -> bool:
        return bool(self.upsets[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return self.le(i, j) or self.le(j, i)

    def minimal(self) -> list[int]:
        return [i for i in range(len(self)) if not self.down[i]]

    def maximal(self) -> list[int]:
        return [i for i in range(len(self)) if not self.up[i]]

    def relation_count(self) -> int:
        """Number of pairs i <= j (reflexive pairs included)."""
        return sum(bin(u).count("1") for u in self.upsets)

    def covers(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(len(self)) for j in self.up[i]]

    def upset(self, i: int) -> list[int]:
        return list(_bits(self.upsets[i]))

    def downset(self, j: int) -> list[int]:
        return [i for i in range(len(self)) if self.le(i, j)]

    def is_chain(self, chain: Sequence[int]) -> bool:
        return all(a != b and self.le(a, b) for a, b in zip(chain, chain[1:]))

    def subposet(self, keep: Iterable[int], convex: bool = False) -> tuple["Poset", list[int]]:
        """Induced sub-poset and the old index of each new element.  For convex
        subsets the covers are just restricted."""
        keep = sorted(set(keep))
        new = {old: k for k, old in enumerate(keep)}
        if convex:
            up = [[new[j] for j in self.up[i] if j in new] for i in keep]
        else:
            mask = sum(1 << i for i in keep)
            up = []
            for i in keep:
                strict = self.upsets[i] & mask & ~(1 << i)
                above = 0
                for j in _bits(strict):
                    above |= self.upsets[j] & ~(1 << j)
                up.append([new[j] for j in _bits(strict & ~above)])
        return Poset([self.elements[i] for i in keep], up), keep

    def maximal_chains(self, through: int | None = None, cap: int | None = None) -> list[tuple[int, ...]]:
        """All maximal chains (optionally only those containing ``through``),
        as increasing index tuples in lexicographic order."""
        out: list[tuple[int, ...]] = []

        def check():
            if cap is not None and len(out) > cap:
                raise CapExceeded("maximal chains", len(out), cap)

        if through is None:
            for m in self.minimal():
                for up in self._up_chains(m):
                    out.append(up)
                    check()
        else:
            ups = list(self._up_chains(through))
            for down in self._down_chains(through):
                for up in ups:
                    out.append(down[:-1] + up)
                    check()
        return sorted(out)

    def _up_chains(self, i: int):
        if not self.up[i]:
            yield (i,)
            return
        for j in self.up[i]:
            for rest in self._up_chains(j):
                yield (i,) + rest

    def _down_chains(self, i: int):
        if not self.down[i]:
            yield (i,)
            return
        for j in self.down[i]:
            for rest in self._down_chains(j):
                yield rest + (i,)

    def chains(self, cap: int | None = None) -> list[tuple[int, ...]]:
        """All nonempty chains, as increasing index tuples."""
        out: list[tuple[int, ...]] = []
        ups = self.upsets

        def grow(chain, allowed):
            out.append(chain)
            if cap is not None and len(out) > cap:
                raise CapExceeded("chains", len(out), cap)
            for j in _bits(allowed):
                grow(chain + (j,), allowed & ups[j] & ~(1 << j))

        for i in range(len(self)):
            grow((i,), ups[i] & ~(1 << i))
        return sorted(out)

    def hasse_text(self) -> str:
        return "\n".join(f"{self.elements[i]} < {self.elements[j]}" for i, j in self.covers())

    def same_as(self, other: "Poset") -> bool:
        """Equal as labelled posets."""
        if set(self.elements) != set(other.elements) or len(self) != len(other):
            return False
        return all(
            self.le(i, j) == other.le(other.index[a], other.index[b])
            for i, a in enumerate(self.elements) for j, b in enumerate(self.elements)
        )


def _bits(x: int):
    i = 0
    while x:
        if x & 1:
            yield i
        x >>= 1
        i += 1


def _toposort(n: int, succ) -> list[int] | None:
    indeg = [0] * n
    for i in range(n):
        for j in succ[i]:
            indeg[j] += 1
    ready = [i for i in range(n) if not indeg[i]]
    order = []
    while ready:
        i = min(ready)
        ready.remove(i)
        order.append(i)
        for j in sorted(succ[i]):
            indeg[j] -= 1
            if not indeg[j]:
                ready.append(j)
    return order if len(order) == n else None


def reduce_transitively(P: Poset) -> set[tuple[int, int]]:
    """Brute-force transitive reduction of the strict order (used to cross-check covers)."""
    n = len(P)
    lt = [[i != j and P.le(i, j) for j in range(n)] for i in range(n)]
    return {(i, j) for i in range(n) for j in range(n)
            if lt[i][j] and not any(lt[i][k] and lt[k][j] for k in range(n))}


# ---------------------------------------------------------------- traces


def witness(X: PrecubicalSet, f: EdgePath, g: EdgePath) -> tuple[EdgePath, EdgePath] | None:
    """The unique (u, v) with g = u.f.v, or None."""
    if f.is_constant:
        verts = g.vertices(X)
        if f.start not in verts:
            return None
        k = verts.index(f.start)
        return g.slice(X, 0, k), g.slice(X, k, len(g))
    n, m = len(f), len(g)
    for k in range(m - n + 1):
        if g.edges[k:k + n] == f.edges:
            return g.slice(X, 0, k), g.slice(X, k + n, m)
    return None


def leq(X: PrecubicalSet, f: EdgePath, g: EdgePath) -> tuple[EdgePath, EdgePath] | None:
    return witness(X, f, g)


class TracePoset(Poset):
    """Poset of edge paths of ``X`` under two-sided extension."""

    def __init__(self, X: PrecubicalSet, elements: Sequence[EdgePath], up: Sequence[Sequence[int]]):
        super().__init__(elements, up)
        self.X = X

    def witness(self, f: EdgePath | int, g: EdgePath | int):
        f, g = self._path(f), self._path(g)
        return witness(self.X, f, g)

    def leq(self, f, g):
        return self.witness(f, g)

    def _path(self, f) -> EdgePath:
        return self.elements[f] if isinstance(f, int) else f

    def constant(self, v: str) -> int:
        return self.index[EdgePath(v)]

    def sub(self, keep: Iterable[int], convex: bool = False) -> tuple["TracePoset", list[int]]:
        Q, old = self.subposet(keep, convex)
        T = TracePoset(self.X, Q.elements, Q.up)
        return T, old

    def upset_poset(self, anchor: EdgePath | int) -> "TracePoset":
        i = anchor if isinstance(anchor, int) else self.index[anchor]
        return self.sub(self.upset(i), convex=True)[0]

    def interval_poset(self, anchor: EdgePath | int, f: EdgePath | int) -> "TracePoset":
        a = anchor if isinstance(anchor, int) else self.index[anchor]
        b = f if isinstance(f, int) else self.index[f]
        if not self.le(a, b):
            raise ValueError(f"{self.elements[a]} is not below {self.elements[b]}")
        return self.sub(_bits(self.upsets[a] & sum(1 << i for i in self.downset(b))), convex=True)[0]

    def chain_paths(self, chain: Sequence[int]) -> list[EdgePath]:
        return [self.elements[i] for i in chain]


def _path_key(X: PrecubicalSet, p: EdgePath):
    return (len(p), X.vertex_index(p.start), tuple(X.edge_index(e) for e in p.edges))


def all_paths(X: PrecubicalSet, cap: int = DEFAULT_CAP) -> list[EdgePath]:
    out: list[EdgePath] = []

    def walk(start, edges, v):
        out.append(EdgePath(start, edges, v))
        if len(out) > cap:
            raise CapExceeded("trace poset elements", len(out), cap)
        for e in X.out_edges(v):
            walk(start, edges + (e,), X.target(e))

    for v in X.vertices:
        walk(v, (), v)
    return sorted(out, key=lambda p: _path_key(X, p))


def build_trace_poset(X: PrecubicalSet, cap: int = DEFAULT_CAP) -> TracePoset:
    paths = all_paths(X, cap)
    index = {p: i for i, p in enumerate(paths)}
    up: list[list[int]] = []
    for p in paths:
        cs = []
        for e in X.out_edges(p.end):
            cs.append(index[EdgePath(p.start, p.edges + (e,), X.target(e))])
        for e in X.in_edges(p.start):
            s = X.source(e)
            cs.append(index[EdgePath(s, (e,) + p.edges, p.end)])
        up.append(cs)
    return TracePoset(X, paths, up)


def upset(P: TracePoset, anchor) -> TracePoset:
    return P.upset_poset(anchor)


def interval(P: TracePoset, anchor, f) -> TracePoset:
    return P.interval_poset(anchor, f)


def maximal_chains(P: Poset, through=None, cap: int | None = None) -> list[tuple[int, ...]]:
    if through is not None and not isinstance(through, int):
        through = P.index[through]
    return P.maximal_chains(through, cap)


def endpoint_chain(P: TracePoset, f: EdgePath) -> tuple[int, ...]:
    """The chain of prefixes of f, from its start constant up to f."""
    X = P.X
    return tuple(P.index[f.slice(X, 0, k)] for k in range(len(f) + 1))


# ---------------------------------------------------------------- chain categories


def pullback(C1: Sequence[int], C2: Sequence[int]) -> tuple[int, ...]:
    """Intersection of two chains with the induced order."""
    return tuple(sorted(set(C1) & set(C2)))


def quasi_pullbacks(P: Poset, C1: Sequence[int], C2: Sequence[int]) -> list[tuple[int, ...]]:
    """Maximal chains of the induced sub-poset on C1 ∩ C2."""
    common = pullback(C1, C2)
    if not common:
        return []
    Q, old = P.subposet(common)
    return sorted(tuple(old[i] for i in c) for c in Q.maximal_chains())


FLAVORS = ("all", "pullback", "quasi")


@dataclass
class ChainCategory:
    """Objects are chains of ``poset`` (index tuples); arrows are inclusions
    (source object, target object) generating the diagram."""

    poset: Poset
    flavor: str
    objects: list[tuple[int, ...]]
    arrows: list[tuple[int, int]]


def chain_category(P: Poset, flavor: str = "all", cap: int = DEFAULT_CAP) -> ChainCategory:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {', '.join(FLAVORS)}")
    if flavor == "all":
        objs = P.chains(cap)
        where = {c: k for k, c in enumerate(objs)}
        arrows = []
        for k, c in enumerate(objs):
            for i in range(len(c)):
                sub = c[:i] + c[i + 1:]
                if sub:
                    arrows.append((where[sub], k))
        return ChainCategory(P, flavor, objs, sorted(arrows))
    maxi = P.maximal_chains(cap=cap)
    objs = list(maxi)
    where = {c: k for k, c in enumerate(objs)}
    arrows = set()
    for a, b in itertools.combinations(range(len(maxi)), 2):
        if flavor == "pullback":
            extra = [pullback(maxi[a], maxi[b])] if pullback(maxi[a], maxi[b]) else []
        else:
            extra = quasi_pullbacks(P, maxi[a], maxi[b])
        for c in extra:
            if c not in where:
                where[c] = len(objs)
                objs.append(c)
                if len(objs) > cap:
                    raise CapExceeded("chain category objects", len(objs), cap)
            k = where[c]
            if k != a:
                arrows.add((k, a))
            if k != b:
                arrows.add((k, b))
    return ChainCategory(P, flavor, objs, sorted(arrows))


def maximal_chain_category(P: Poset, cap: int = DEFAULT_CAP) -> ChainCategory:
    """Maximal chains alone, no completion."""
    return ChainCategory(P, "maximal", P.maximal_chains(cap=cap), [])


def diamond() -> Poset:
    return Poset.from_relation(["x", "y1", "y2", "z"], [("x", "y1"), ("x", "y2"), ("y1", "z"), ("y2", "z")])
