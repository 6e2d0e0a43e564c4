"""Colimits of poset diagrams and of diagrams of persistence functors glued
along natural isomorphisms."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable

import numpy as np

from . import linalg
from .linalg import QQ, Field
from .natural import ComplexCache, PosetFunctor, natural_homology, persistence_along_trace
from .precubical import PrecubicalSet
from .traceposet import DEFAULT_CAP, ChainCategory, Poset, build_trace_poset, chain_category


@dataclass
class PosetDiagram:
    """Posets with order-embedding arrows ``(source, target, element map)``."""

    posets: list[Poset]
    arrows: list[tuple[int, int, list[int]]]

    def __post_init__(self):
        for s, t, m in self.arrows:
            S, T = self.posets[s], self.posets[t]
            if len(m) != len(S):
                raise ValueError(f"arrow {s}->{t} does not map every element")
            for a in range(len(S)):
                for b in range(len(S)):
                    if S.le(a, b) != T.le(m[a], m[b]):
                        raise ValueError(f"arrow {s}->{t} is not an order embedding")


def chain_diagram(cat: ChainCategory) -> PosetDiagram:
    """The chains of a chain category as sub-posets, inclusions as arrows."""
    P = cat.poset
    posets = [P.subposet(c)[0] for c in cat.objects]
    arrows = []
    for s, t in cat.arrows:
        pos = {x: k for k, x in enumerate(cat.objects[t])}
        arrows.append((s, t, [pos[x] for x in cat.objects[s]]))
    return PosetDiagram(posets, arrows)


@dataclass
class PosetColimit:
    poset: Poset
    members: list[list[tuple[int, int]]]    # per class, its (object, element) pairs, sorted
    injection: list[list[int]]              # per object, element -> class


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def colimit_posets(D: PosetDiagram) -> PosetColimit:
    """Disjoint union, quotient by the arrows, then transitive closure.

    Classes are labelled by the element at their least (object, element)
    member; clashing labels are disambiguated as (label, k).
    """
    offs = [0]
    for P in D.posets:
        offs.append(offs[-1] + len(P))
    uf = _UnionFind(offs[-1])
    for s, t, m in D.arrows:
        for a, b in enumerate(m):
            uf.union(offs[s] + a, offs[t] + b)
    roots = sorted({uf.find(g) for g in range(offs[-1])})
    cls_of_root = {r: k for k, r in enumerate(roots)}
    members: list[list[tuple[int, int]]] = [[] for _ in roots]
    injection = []
    for p, P in enumerate(D.posets):
        row = []
        for x in range(len(P)):
            c = cls_of_root[uf.find(offs[p] + x)]
            members[c].append((p, x))
            row.append(c)
        injection.append(row)
    pairs = set()
    for p, P in enumerate(D.posets):
        for a, b in P.covers():
            ca, cb = injection[p][a], injection[p][b]
            if ca == cb:
                raise ValueError(f"antisymmetry fails: {P.elements[a]} < {P.elements[b]} are identified")
            pairs.add((ca, cb))
    labels = [D.posets[ms[0][0]].elements[ms[0][1]] for ms in members]
    counts: dict[Hashable, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    seen: dict[Hashable, int] = {}
    names = []
    for lab in labels:
        if counts[lab] > 1:
            seen[lab] = seen.get(lab, 0) + 1
            names.append((lab, seen[lab]))
        else:
            names.append(lab)
    try:
        Q = Poset.from_relation(list(range(len(members))), pairs)
    except ValueError as exc:
        raise ValueError("antisymmetry fails in the colimit: the identified relation has a cycle") from exc
    # Q is indexed by class id in some linear extension; relabel consistently
    order = Q.elements
    pos = {c: k for k, c in enumerate(order)}
    poset = Poset([names[c] for c in order], Q.up)
    members = [members[c] for c in order]
    injection = [[pos[c] for c in row] for row in injection]
    return PosetColimit(poset, members, injection)


# ---------------------------------------------------------------- functors


@dataclass
class PersFunctorDiagram:
    """Per object a functor on a poset; per arrow an order embedding F1 and,
    for each source element x, an iso F2[x]: F_s(x) -> F_t(F1 x)."""

    functors: list[PosetFunctor]
    arrows: list[tuple[int, int, list[int], list[np.ndarray]]]
    field: Field = QQ

    def poset_diagram(self) -> PosetDiagram:
        return PosetDiagram([F.poset for F in self.functors], [(s, t, m) for s, t, m, _ in self.arrows])

    def check_natural(self) -> bool:
        fld = self.field
        for s, t, m, iso in self.arrows:
            S, T = self.functors[s], self.functors[t]
            for x in range(len(S.dims)):
                if not linalg.is_invertible(iso[x], fld):
                    return False
            for a, b in S.poset.covers():
                lhs = linalg.matmul(iso[b], S.cover_maps[(a, b)], fld)
                rhs = linalg.matmul(T.map(m[a], m[b]), iso[a], fld)
                if not linalg.mat_equal(lhs, rhs):
                    return False
        return True


@dataclass
class PersColimit:
    functor: PosetFunctor
    colimit: PosetColimit
    # per (object, element): iso from F_object(element) to the class value
    to_class: dict[tuple[int, int], np.ndarray]


def colimit_pers(D: PersFunctorDiagram) -> PersColimit:
    """Glue the functors along the isomorphisms.

    Each class is realised at its least member; every other member reaches it
    through a breadth-first zig-zag of F2 isos (inverted when walked
    backwards).  Within a class all dimensions are asserted equal.
    """
    fld = D.field
    C = colimit_posets(D.poset_diagram())
    adj: dict[tuple[int, int], list[tuple[tuple[int, int], np.ndarray]]] = {}
    for s, t, m, iso in D.arrows:
        for x, y in enumerate(m):
            A = iso[x]
            if not linalg.is_invertible(A, fld):
                raise ValueError(f"F2 at arrow {s}->{t}, element {x} is not invertible")
            adj.setdefault((s, x), []).append(((t, y), A))
            adj.setdefault((t, y), []).append(((s, x), linalg.inverse(A, fld)))
    to_class: dict[tuple[int, int], np.ndarray] = {}
    dims = []
    for ms in C.members:
        rep = ms[0]
        d = D.functors[rep[0]].dims[rep[1]]
        for p, x in ms:
            if D.functors[p].dims[x] != d:
                raise AssertionError(f"class of {rep} mixes dimensions {d} and {D.functors[p].dims[x]}")
        dims.append(d)
        # BFS from the representative; theta(node): F(node) -> F(rep)
        to_class[rep] = linalg.identity(d, fld)
        queue = deque([rep])
        while queue:
            node = queue.popleft()
            for nxt, A in sorted(adj.get(node, ()), key=lambda e: e[0]):
                if nxt not in to_class:
                    # A: F(node) -> F(nxt), so theta(nxt) = theta(node) A^-1
                    to_class[nxt] = linalg.matmul(to_class[node], linalg.inverse(A, fld), fld)
                    queue.append(nxt)
        missing = [m for m in ms if m not in to_class]
        if missing:
            raise AssertionError(f"class members {missing} unreachable from {rep}")
    maps = {}
    for a, b in C.poset.covers():
        found = None
        for p, F in enumerate(D.functors):
            inv = {c: x for x, c in enumerate(C.injection[p])}
            if a in inv and b in inv and F.poset.le(inv[a], inv[b]):
                found = (p, inv[a], inv[b])
                break
        if found is None:
            raise ValueError(f"cover {C.poset.elements[a]} < {C.poset.elements[b]} is not realised in any object")
        p, x, y = found
        A = linalg.matmul(D.functors[p].map(x, y), linalg.inverse(to_class[(p, x)], fld), fld)
        maps[(a, b)] = linalg.matmul(to_class[(p, y)], A, fld)
    return PersColimit(PosetFunctor(C.poset, dims, maps, fld), C, to_class)


def check_cocone(R: PersColimit, D: PersFunctorDiagram) -> bool:
    """Every object's functor maps into the glued one compatibly."""
    fld = D.field
    G = R.functor
    for p, F in enumerate(D.functors):
        inj = R.colimit.injection[p]
        for a, b in F.poset.covers():
            lhs = linalg.matmul(R.to_class[(p, b)], F.cover_maps[(a, b)], fld)
            rhs = linalg.matmul(G.map(inj[a], inj[b]), R.to_class[(p, a)], fld)
            if not linalg.mat_equal(lhs, rhs):
                return False
    return True


def restriction_diagram(F: PosetFunctor, cat: ChainCategory) -> PersFunctorDiagram:
    """Restrict F to every chain of the category; arrows carry identity isos."""
    fld = F.field
    functors = [F.restrict(c) for c in cat.objects]
    arrows = []
    for s, t in cat.arrows:
        pos = {x: k for k, x in enumerate(cat.objects[t])}
        m = [pos[x] for x in cat.objects[s]]
        arrows.append((s, t, m, [linalg.identity(F.dims[x], fld) for x in cat.objects[s]]))
    return PersFunctorDiagram(functors, arrows, fld)


def compare_functors(F: PosetFunctor, G: PosetFunctor, iso: dict[Hashable, np.ndarray] | None = None) -> str | None:
    """None if G is isomorphic to F via the node-wise ``iso`` (label -> matrix
    F(x) -> G(x); identities by default); else the first failing node or arrow."""
    fld = F.field
    if set(F.poset.elements) != set(G.poset.elements):
        return "underlying posets have different elements"
    gi = G.poset.index
    for x, lab in enumerate(F.poset.elements):
        if F.dims[x] != G.dims[gi[lab]]:
            return f"node {lab}: dim {F.dims[x]} vs {G.dims[gi[lab]]}"
    if not F.poset.same_as(G.poset):
        return "underlying posets differ"
    eta = iso or {lab: linalg.identity(F.dims[x], fld) for x, lab in enumerate(F.poset.elements)}
    for lab, A in eta.items():
        if not linalg.is_invertible(A, fld):
            return f"node {lab}: comparison map is not invertible"
    for a, b in F.poset.covers():
        la, lb = F.poset.elements[a], F.poset.elements[b]
        lhs = linalg.matmul(eta[lb], F.cover_maps[(a, b)], fld)
        rhs = linalg.matmul(G.map(gi[la], gi[lb]), eta[la], fld)
        if not linalg.mat_equal(lhs, rhs):
            return f"arrow {la} < {lb} does not commute"
    return None


FLAVOR_NAMES = {"all": "all chains", "pullback": "maximal chains + pullbacks", "quasi": "maximal chains + quasi-pullbacks"}


@dataclass
class Theorem1Verdict:
    flavor: str
    isomorphic: bool
    nodes: int
    objects: int
    detail: str

    def report(self) -> str:
        head = f"flavor: {FLAVOR_NAMES[self.flavor]}\nnodes: {self.nodes}\nchains: {self.objects}\n"
        return head + ("isomorphic" if self.isomorphic else f"not isomorphic: {self.detail}") + "\n"


def verify_theorem1(X: PrecubicalSet, anchor: str, n: int = 1, flavor: str = "quasi",
                    field: Field = QQ, cap: int = DEFAULT_CAP) -> Theorem1Verdict:
    """Glue persistence along the traces of every chain in the chosen chain
    category of the upset of the constant trace at ``anchor``, and compare
    with natural homology of that upset."""
    P = build_trace_poset(X, cap)
    cache = ComplexCache(X)
    D = natural_homology(X, n, ("upset", anchor), field, cap, P=P, cache=cache)
    U = D.poset
    cat = chain_category(U, flavor, cap)
    functors = []
    for c in cat.objects:
        paths = [U.elements[i] for i in c]
        M = persistence_along_trace(X, paths[-1], paths, n, field, cache)
        Q, _ = U.subposet(c)
        functors.append(PosetFunctor(Q, list(M.dims), {(k, k + 1): A for k, A in enumerate(M.maps)}, field))
    arrows = []
    for s, t in cat.arrows:
        pos = {x: k for k, x in enumerate(cat.objects[t])}
        m = [pos[x] for x in cat.objects[s]]
        arrows.append((s, t, m, [linalg.identity(D.dims[x], field) for x in cat.objects[s]]))
    glued = colimit_pers(PersFunctorDiagram(functors, arrows, field))
    why = compare_functors(glued.functor, D)
    return Theorem1Verdict(flavor, why is None, len(D.dims), len(cat.objects), why or "")
