"""Bisimulations between poset-indexed diagrams of vector spaces.

A relation is a set of triples (x, eta, y) with eta: F(x) -> G(y) invertible.
It is a bisimulation when every node on either side occurs in some triple and
every Hasse arrow out of a related node on one side is answered, on the other
side, by an arrow (identity or composite allowed) to a related node such that
the square with the two etas commutes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import linalg
from .linalg import Field
from .natural import PosetFunctor


@dataclass
class BisimRelation:
    triples: list[tuple[int, np.ndarray, int]]

    def transposed(self, field: Field) -> "BisimRelation":
        return BisimRelation([(y, linalg.inverse(eta, field), x) for x, eta, y in self.triples])

    def __len__(self):
        return len(self.triples)


def _typecheck(F: PosetFunctor, G: PosetFunctor, R: BisimRelation):
    for x, eta, y in R.triples:
        if not (0 <= x < len(F.dims) and 0 <= y < len(G.dims)):
            raise ValueError(f"triple ({x}, {y}) names a node outside the diagrams")
        if eta.shape != (G.dims[y], F.dims[x]):
            raise ValueError(f"triple ({F.poset.elements[x]}, {G.poset.elements[y]}): eta has shape {eta.shape}")
        if not linalg.is_invertible(eta, F.field):
            raise ValueError(f"triple ({F.poset.elements[x]}, {G.poset.elements[y]}): eta is not invertible")


def _answers(F: PosetFunctor, G: PosetFunctor, x2: int, Fi: np.ndarray, y: int, eta: np.ndarray,
             related: dict[tuple[int, int], list[np.ndarray]]) -> bool:
    """Is there y <= y2 and (x2, eta2, y2) related with eta2 Fi = G(y -> y2) eta?"""
    fld = F.field
    for y2 in G.poset.upset(y):
        etas = related.get((x2, y2))
        if not etas:
            continue
        rhs = linalg.matmul(G.map(y, y2), eta, fld)
        for eta2 in etas:
            if linalg.mat_equal(linalg.matmul(eta2, Fi, fld), rhs):
                return True
    return False


def _transfer_failure(F, G, x, eta, y, fwd, bwd) -> str | None:
    fld = F.field
    for x2 in F.poset.up[x]:
        if not _answers(F, G, x2, F.cover_maps[(x, x2)], y, eta, fwd):
            return f"arrow {F.poset.elements[x]} < {F.poset.elements[x2]} is not matched"
    inv = linalg.inverse(eta, fld)
    for y2 in G.poset.up[y]:
        if not _answers(G, F, y2, G.cover_maps[(y, y2)], x, inv, bwd):
            return f"arrow {G.poset.elements[y]} < {G.poset.elements[y2]} is not matched"
    return None


def _tables(F: PosetFunctor, G: PosetFunctor, triples: Iterable[tuple[int, np.ndarray, int]]):
    fwd: dict[tuple[int, int], list[np.ndarray]] = {}
    bwd: dict[tuple[int, int], list[np.ndarray]] = {}
    for x, eta, y in triples:
        fwd.setdefault((x, y), []).append(eta)
        bwd.setdefault((y, x), []).append(linalg.inverse(eta, F.field))
    return fwd, bwd


def verify_bisimulation(F: PosetFunctor, G: PosetFunctor, R: BisimRelation) -> tuple[bool, str]:
    """(True, "bisimulation") or (False, counterexample).  Raises ValueError
    on an ill-typed relation."""
    _typecheck(F, G, R)
    xs = {x for x, _, _ in R.triples}
    ys = {y for _, _, y in R.triples}
    for x in range(len(F.dims)):
        if x not in xs:
            return False, f"node {F.poset.elements[x]} of the first diagram is unrelated"
    for y in range(len(G.dims)):
        if y not in ys:
            return False, f"node {G.poset.elements[y]} of the second diagram is unrelated"
    fwd, bwd = _tables(F, G, R.triples)
    for x, eta, y in R.triples:
        why = _transfer_failure(F, G, x, eta, y, fwd, bwd)
        if why:
            return False, f"triple ({F.poset.elements[x]}, {G.poset.elements[y]}): {why}"
    return True, "bisimulation"


# ---------------------------------------------------------------- search


def signed_permutations(d: int, fld: Field) -> list[np.ndarray]:
    out = []
    for perm in itertools.permutations(range(d)):
        for signs in itertools.product((1, -1), repeat=d):
            A = linalg.zeros(d, d, fld)
            for c, r in enumerate(perm):
                A[r, c] = fld(signs[c])
            out.append(A)
    return out


def general_linear(d: int, fld: Field) -> list[np.ndarray]:
    if fld.p == 0:
        raise ValueError("the full linear group is enumerable only over a prime field")
    els = fld.elements()
    out = []
    for entries in itertools.product(els, repeat=d * d):
        A = np.array(entries, dtype=object).reshape(d, d)
        if linalg.is_invertible(A, fld):
            out.append(A)
    return out


DISCIPLINES = ("signed-perm", "gl")


@dataclass
class SearchResult:
    status: str                          # found | none | inconclusive
    discipline: str
    exhaustive: bool = False
    relation: BisimRelation | None = None
    message: str = ""

    def report(self) -> str:
        if self.status == "found":
            return f"bisimulation found ({len(self.relation)} triples, discipline {self.discipline})\n"
        if self.status == "none":
            tail = "definitive" if self.exhaustive else "bounded search"
            return f"no bisimulation within discipline {self.discipline}\n{tail}: {self.message}\n"
        return f"inconclusive: {self.message}\n"


def _ranks_out(D: PosetFunctor, i: int, hasse: bool) -> set[int]:
    fld = D.field
    targets = D.poset.up[i] if hasse else D.poset.upset(i)
    return {linalg.rank(D.map(i, j), fld) for j in targets}


def _entries_unit(D: PosetFunctor) -> bool:
    return all(v == 0 or v == 1 or v == -1 for A in D.cover_maps.values() for v in A.flat)


def search_bisimulation(F: PosetFunctor, G: PosetFunctor, discipline: str = "signed-perm",
                        cap: int = 200_000, max_dim: int = 4) -> SearchResult:
    """Greatest-fixpoint search over candidate triples drawn from a finite set of isos."""
    if discipline not in DISCIPLINES:
        raise ValueError(f"unknown discipline {discipline!r}")
    fld = F.field
    if G.field != fld:
        raise ValueError("diagrams over different fields")
    # totality is impossible if some node has no partner of the same dimension
    fdims, gdims = set(F.dims), set(G.dims)
    for D, other, side in ((F, gdims, "first"), (G, fdims, "second")):
        for i, d in enumerate(D.dims):
            if d not in other:
                return SearchResult("none", discipline, True, None,
                                    f"node {D.poset.elements[i]} of the {side} diagram has dimension {d}, "
                                    f"matched by no node of the other diagram")
    top = max(fdims | gdims, default=0)
    if top > max_dim:
        return SearchResult("inconclusive", discipline, False, None, f"dimension {top} exceeds the bound {max_dim}")
    gens = {d: (signed_permutations(d, fld) if discipline == "signed-perm" else general_linear(d, fld))
            for d in fdims}
    f_hasse = [_ranks_out(F, x, True) for x in range(len(F.dims))]
    g_hasse = [_ranks_out(G, y, True) for y in range(len(G.dims))]
    f_all = [_ranks_out(F, x, False) for x in range(len(F.dims))]
    g_all = [_ranks_out(G, y, False) for y in range(len(G.dims))]
    triples = []
    for x, y in itertools.product(range(len(F.dims)), range(len(G.dims))):
        if F.dims[x] != G.dims[y]:
            continue
        if not (f_hasse[x] <= g_all[y] and g_hasse[y] <= f_all[x]):
            continue
        for eta in gens[F.dims[x]]:
            triples.append((x, eta, y))
            if len(triples) > cap:
                return SearchResult("inconclusive", discipline, False, None,
                                    f"more than {cap} candidate triples")
    exhaustive = discipline == "gl" or (top <= 1 and _entries_unit(F) and _entries_unit(G))
    alive = list(triples)
    while True:
        fwd, bwd = _tables(F, G, alive)
        keep = [t for t in alive if _transfer_failure(F, G, t[0], t[1], t[2], fwd, bwd) is None]
        if len(keep) == len(alive):
            break
        alive = keep
    xs = {x for x, _, _ in alive}
    ys = {y for _, _, y in alive}
    lonely = [F.poset.elements[x] for x in range(len(F.dims)) if x not in xs]
    lonely += [G.poset.elements[y] for y in range(len(G.dims)) if y not in ys]
    if lonely:
        return SearchResult("none", discipline, exhaustive, None, f"node {lonely[0]} has no surviving partner")
    R = BisimRelation(alive)
    ok, why = verify_bisimulation(F, G, R)
    if not ok:
        raise AssertionError(f"fixpoint relation fails verification: {why}")
    return SearchResult("found", discipline, exhaustive, R, "")


def identity_relation(F: PosetFunctor) -> BisimRelation:
    return BisimRelation([(x, linalg.identity(d, F.field), x) for x, d in enumerate(F.dims)])


# ---------------------------------------------------------------- files


def format_relation(F: PosetFunctor, G: PosetFunctor, R: BisimRelation) -> str:
    lines = [f"{F.poset.elements[x]}\t{G.poset.elements[y]}\t{linalg.format_matrix(eta)}" for x, eta, y in R.triples]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_relation(F: PosetFunctor, G: PosetFunctor, text: str) -> BisimRelation:
    fi = {str(e): i for i, e in enumerate(F.poset.elements)}
    gi = {str(e): i for i, e in enumerate(G.poset.elements)}
    triples = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            a, b, mat = line.split("\t")
            triples.append((fi[a], linalg.parse_matrix(mat, F.field), gi[b]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"relation line {n}: {exc}") from exc
    return BisimRelation(triples)
