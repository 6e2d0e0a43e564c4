"""Combinatorial dipaths and the swap complex modelling a trace space.

Vertices of the swap complex are the edge paths from a to b.  A swap
rewrites the lower corner (bottom, right) of a square at some position into
its upper corner (left, top); two swaps on the same path whose positions
differ by at least two commute and bound a 2-cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .precubical import PrecubicalSet


@dataclass(frozen=True, order=True)
class EdgePath:
    start: str
    edges: tuple[str, ...] = ()
    end: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.end and not self.edges:
            object.__setattr__(self, "end", self.start)

    def __len__(self):
        return len(self.edges)

    @property
    def is_constant(self) -> bool:
        return not self.edges

    def __str__(self):
        return f"{self.start}[{','.join(self.edges)}]"

    def vertices(self, X: PrecubicalSet) -> list[str]:
        vs = [self.start]
        for e in self.edges:
            vs.append(X.target(e))
        return vs

    def concat(self, other: "EdgePath") -> "EdgePath":
        if self.end != other.start:
            raise ValueError(f"cannot compose {self} with {other}: {self.end} != {other.start}")
        return EdgePath(self.start, self.edges + other.edges, other.end)

    def slice(self, X: PrecubicalSet, i: int, j: int) -> "EdgePath":
        """Sub-path made of edges i..j-1 (constant at the i-th vertex if i == j)."""
        if i == j:
            v = self.start if i == 0 else X.target(self.edges[i - 1])
            return EdgePath(v)
        es = self.edges[i:j]
        return EdgePath(X.source(es[0]), es, X.target(es[-1]))


def make_path(X: PrecubicalSet, start: str, edges: Sequence[str] = ()) -> EdgePath:
    """Checked constructor: every edge must leave where the previous one ended."""
    if not X.has_vertex(start):
        raise KeyError(f"unknown vertex {start!r}")
    v = start
    for e in edges:
        if e not in X.faces or X.dim(e) != 1:
            raise KeyError(f"unknown edge {e!r}")
        if X.source(e) != v:
            raise ValueError(f"edge {e} starts at {X.source(e)}, not at {v}")
        v = X.target(e)
    return EdgePath(start, tuple(edges), v)


def parse_path(X: PrecubicalSet, text: str) -> EdgePath:
    """``start[e1,e2,...]``, or a bare comma-separated edge list."""
    text = text.strip()
    if "[" in text:
        start, _, rest = text.partition("[")
        edges = [e.strip() for e in rest.rstrip("]").split(",") if e.strip()]
        return make_path(X, start.strip(), edges)
    edges = [e.strip() for e in text.split(",") if e.strip()]
    if not edges:
        raise ValueError("empty path")
    return make_path(X, X.source(edges[0]), edges)


def enumerate_dipaths(X: PrecubicalSet, a: str, b: str) -> list[EdgePath]:
    """All directed edge paths from a to b, lexicographic in edge file order."""
    for v in (a, b):
        if not X.has_vertex(v):
            raise KeyError(f"unknown vertex {v!r}")
    reach = _coreachable(X, b)
    out: list[EdgePath] = []
    if a not in reach:
        return out

    def order(v):
        return sorted(X.out_edges(v), key=X.edge_index)

    stack: list[str] = []

    def walk(v):
        if v == b:
            out.append(EdgePath(a, tuple(stack), b))
            return
        for e in order(v):
            w = X.target(e)
            if w in reach:
                stack.append(e)
                walk(w)
                stack.pop()

    walk(a)
    return out


def _coreachable(X: PrecubicalSet, b: str) -> set[str]:
    seen = {b}
    todo = [b]
    while todo:
        v = todo.pop()
        for e in X.in_edges(v):
            u = X.source(e)
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


class Swap(NamedTuple):
    path: int
    position: int
    square: str
    target: int


class Square2(NamedTuple):
    """2-cell from two independent swaps on ``path``; edges are swap indices."""

    path: int
    bottom: int
    right: int
    top: int
    left: int


@dataclass(frozen=True)
class TraceComplex:
    X: PrecubicalSet = field(repr=False)
    a: str
    b: str
    vertices: tuple[EdgePath, ...]
    swaps: tuple[Swap, ...]
    squares2: tuple[Square2, ...]

    def __post_init__(self):
        object.__setattr__(self, "_path_index", {p.edges: i for i, p in enumerate(self.vertices)})
        object.__setattr__(self, "_swap_index", {(s.path, s.position, s.square): i for i, s in enumerate(self.swaps)})
        object.__setattr__(
            self, "_sq_index",
            {(q.path, self.swaps[q.bottom].position, self.swaps[q.bottom].square,
              self.swaps[q.left].position, self.swaps[q.left].square): i
             for i, q in enumerate(self.squares2)},
        )

    def path_index(self, edges: tuple[str, ...]) -> int:
        return self._path_index[edges]

    def swap_index(self, path: int, position: int, square: str) -> int:
        return self._swap_index[(path, position, square)]

    def square_index(self, path: int, k1: int, s1: str, k2: int, s2: str) -> int:
        return self._sq_index[(path, k1, s1, k2, s2)]

    def swap_endpoints(self, i: int) -> tuple[int, int]:
        s = self.swaps[i]
        return s.path, s.target

    def inverse_swap(self, i: int) -> tuple[int, int, str]:
        """The rewrite undoing swap i: (path, position, square) on its target."""
        s = self.swaps[i]
        return s.target, s.position, s.square

    def stats(self) -> dict[str, int]:
        return {"vertices": len(self.vertices), "swaps": len(self.swaps), "squares2": len(self.squares2)}


def _lower_corners(X: PrecubicalSet) -> dict[tuple[str, str], list[str]]:
    table: dict[tuple[str, str], list[str]] = {}
    for s in X.squares:
        left, right, bottom, top = X.faces[s]
        table.setdefault((bottom, right), []).append(s)
    return table


def apply_swap(X: PrecubicalSet, p: EdgePath, position: int, square: str) -> EdgePath:
    left, right, bottom, top = X.faces[square]
    k = position
    if p.edges[k:k + 2] != (bottom, right):
        raise ValueError(f"{square} has no lower corner at position {k} of {p}")
    return EdgePath(p.start, p.edges[:k] + (left, top) + p.edges[k + 2:], p.end)


def trace_complex(X: PrecubicalSet, a: str, b: str) -> TraceComplex:
    paths = enumerate_dipaths(X, a, b)
    index = {p.edges: i for i, p in enumerate(paths)}
    corners = _lower_corners(X)
    swaps: list[Swap] = []
    per_path: list[list[int]] = [[] for _ in paths]
    for i, p in enumerate(paths):
        es = p.edges
        for k in range(len(es) - 1):
            for s in corners.get((es[k], es[k + 1]), ()):
                q = apply_swap(X, p, k, s)
                per_path[i].append(len(swaps))
                swaps.append(Swap(i, k, s, index[q.edges]))
    sidx = {(s.path, s.position, s.square): n for n, s in enumerate(swaps)}
    squares: list[Square2] = []
    for i, mine in enumerate(per_path):
        for x in mine:
            for y in mine:
                s1, s2 = swaps[x], swaps[y]
                if s2.position - s1.position < 2:
                    continue
                # bottom: s1 at p; right: s2 after s1; left: s2 at p; top: s1 after s2
                right = sidx[(s1.target, s2.position, s2.square)]
                top = sidx[(s2.target, s1.position, s1.square)]
                squares.append(Square2(i, x, right, top, y))
    return TraceComplex(X, a, b, tuple(paths), tuple(swaps), tuple(squares))


def components(T: TraceComplex) -> list[list[int]]:
    """Connected components of the swap graph, as sorted vertex-index lists."""
    parent = list(range(len(T.vertices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s in T.swaps:
        ra, rb = find(s.path), find(s.target)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(len(T.vertices)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass(frozen=True)
class ExtensionMap:
    """Cellular map p -> u.p.v between swap complexes."""

    source: TraceComplex
    target: TraceComplex
    u: EdgePath
    v: EdgePath

    def vertex(self, i: int) -> int:
        p = self.source.vertices[i]
        return self.target.path_index(self.u.edges + p.edges + self.v.edges)

    def swap(self, i: int) -> int:
        s = self.source.swaps[i]
        return self.target.swap_index(self.vertex(s.path), s.position + len(self.u), s.square)

    def square(self, i: int) -> int:
        q = self.source.squares2[i]
        b, l = self.source.swaps[q.bottom], self.source.swaps[q.left]
        n = len(self.u)
        return self.target.square_index(self.vertex(q.path), b.position + n, b.square, l.position + n, l.square)

    def cell(self, degree: int, i: int) -> tuple[int, int]:
        """Image of a generator as (index, sign); orientation is preserved."""
        return ((self.vertex, self.swap, self.square)[degree](i), 1)


def extension_map(T: TraceComplex, u: EdgePath, v: EdgePath, target: TraceComplex | None = None) -> ExtensionMap:
    if u.end != T.a:
        raise ValueError(f"prefix {u} does not end at {T.a}")
    if v.start != T.b:
        raise ValueError(f"suffix {v} does not start at {T.b}")
    if target is None:
        target = trace_complex(T.X, u.start, v.end)
    elif (target.a, target.b) != (u.start, v.end):
        raise ValueError("target complex has the wrong endpoints")
    return ExtensionMap(T, target, u, v)
