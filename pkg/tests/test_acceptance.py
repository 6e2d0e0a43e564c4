"""Acceptance criteria 1-8.  Each test carries a ``criterion`` marker; the
conftest hook prints one PASS/FAIL line per criterion after the run."""
import random
import time
from fractions import Fraction

import pytest

from natpers import linalg
from natpers.bisim import search_bisimulation
from natpers.colimit import (PersFunctorDiagram, chain_diagram, colimit_pers, colimit_posets, compare_functors,
                             verify_theorem1)
from natpers.homology import chain_complex_of_simplicial
from natpers.linalg import QQ, Field
from natpers.natural import (ComplexCache, PosetFunctor, endpoint_quotient, natural_homology,
                             persistence_along_trace)
from natpers.persistence import (INF, FilteredComplex, barcode, complete_to_real, dims_from_bars,
                                 filtration_barcode, interleaving_distance, interval_module, persistent_homology,
                                 rank_from_bars, shift_interleaving, verify_interleaving)
from natpers.precubical import FIXTURES, load
from natpers.tracespace import components, enumerate_dipaths, make_path
from natpers.traceposet import (FLAVORS, Poset, build_trace_poset, chain_category, diamond,
                                maximal_chain_category)

from oracles import brute_bottleneck, persistent_rank, random_barcode, random_filtration, random_poset

MATCHBOX_TRACES = {
    "alpha": ["Oy", "Yx", "XYz"],
    "zeta": ["Ox", "Xy", "XYz"],
    "beta": ["Oy", "Yz", "YZx"],
    "gamma": ["Oz", "Zy", "YZx"],
    "delta": ["Oz", "Zx", "XZy"],
    "epsilon": ["Ox", "Xz", "XZy"],
}
TWO_BARS = ((0, INF), (2, 3))
ONE_BAR = ((0, INF),)


def _same_poset(P, Q):
    return set(P.elements) == set(Q.elements) and P.same_as(Q)


# ---------------------------------------------------------------- 1


@pytest.mark.criterion(1, "matchbox barcodes along the six maximal traces")
@pytest.mark.parametrize("name", list(MATCHBOX_TRACES))
def test_c1_matchbox_barcodes(name):
    X = load("fixtures/matchbox")
    expect = TWO_BARS if name in ("alpha", "zeta") else ONE_BAR
    t0 = time.perf_counter()
    f = make_path(X, "O", MATCHBOX_TRACES[name])
    M = persistence_along_trace(X, f)
    bars = barcode(M)
    elapsed = time.perf_counter() - t0
    assert bars == expect
    assert elapsed < 1.0


# ---------------------------------------------------------------- 2


@pytest.mark.criterion(2, "matchbox natural homology over the upset of the origin")
def test_c2_upset_diagram():
    t0 = time.perf_counter()
    X = load("fixtures/matchbox")
    D = natural_homology(X, 1, ("upset", "O"))
    Q = endpoint_quotient(D)
    elapsed = time.perf_counter() - t0
    idx = Q.poset.index
    assert Q.dims[idx[("O", "O")]] == 1
    assert sorted(Q.dims[idx[("O", v)]] for v in "XYZ") == [1, 1, 1]
    assert sorted(Q.dims[idx[("O", v)]] for v in ("XY", "XZ", "YZ")) == [1, 1, 2]
    assert Q.dims[idx[("O", "XY")]] == 2
    assert Q.dims[idx[("O", "P")]] == 1
    assert sorted(Q.dims) == [1, 1, 1, 1, 1, 1, 1, 2]
    assert D.check_commutative() is None
    for Fn in (D, Q):
        for A in Fn.cover_maps.values():
            assert linalg.rank(A) >= 1
    assert elapsed < 5.0


# ---------------------------------------------------------------- 3


@pytest.mark.criterion(3, "gluing theorem on the matchbox under all three flavors")
@pytest.mark.parametrize("flavor", FLAVORS)
def test_c3_theorem1(flavor):
    t0 = time.perf_counter()
    V = verify_theorem1(load("fixtures/matchbox"), "O", 1, flavor)
    elapsed = time.perf_counter() - t0
    assert V.isomorphic, V.detail
    assert V.report().splitlines()[-1] == "isomorphic"
    assert elapsed < 30.0


# ---------------------------------------------------------------- 4


@pytest.mark.criterion(4, "fig-1 component counts and bisimulation negative")
def test_c4_fig1_discrimination():
    t0 = time.perf_counter()
    tops = {}
    diagrams = {}
    for name in ("fig1-left", "fig1-right"):
        X = load(f"fixtures/{name}")
        cache = ComplexCache(X)
        best = 0
        for a in X.vertices:
            for b in X.vertices:
                if enumerate_dipaths(X, a, b):
                    best = max(best, len(components(cache(a, b))))
        tops[name] = best
        diagrams[name] = natural_homology(X, 1, cache=cache)
    res = search_bisimulation(diagrams["fig1-left"], diagrams["fig1-right"])
    elapsed = time.perf_counter() - t0
    assert tops == {"fig1-left": 3, "fig1-right": 4}
    assert res.status == "none" and res.exhaustive
    assert max(diagrams["fig1-left"].dims) == 3 and max(diagrams["fig1-right"].dims) == 4
    assert elapsed < 10.0


# ---------------------------------------------------------------- 5


@pytest.mark.criterion(5, "column-echelon barcodes against brute-force persistent ranks")
def test_c5_echelon_oracle():
    rng = random.Random(20261018)
    t0 = time.perf_counter()
    checked = 0
    for _ in range(200):
        simplices, stages = random_filtration(rng, 8, 5)
        assert len(simplices) <= 8 and stages <= 5
        C = chain_complex_of_simplicial([list(s) for s in simplices])
        births = [[simplices[tuple(s)] for s in basis] for basis in C.bases]
        F = FilteredComplex(C, births, stages)
        for p in (0, 2):
            fld = Field(p)
            for k in range(len(C.bases)):
                M = persistent_homology(F, k, fld)
                bars = filtration_barcode(F, k, fld)
                assert bars == barcode(M)
                assert dims_from_bars(bars, range(stages)) == list(M.dims)
                for i in range(stages):
                    for j in range(i, stages):
                        assert rank_from_bars(bars, i, j) == persistent_rank(simplices, k, i, j, p)
            checked += 1
    assert checked == 400
    assert time.perf_counter() - t0 < 60.0


# ---------------------------------------------------------------- 6


def _fixture_regions():
    """Whole trace posets of the small fixtures; for the two 36-vertex grids the
    sub-traces of a length-6 trace through the forbidden region."""
    out = []
    for name in FIXTURES:
        X = load(f"fixtures/{name}")
        P = build_trace_poset(X)
        if name.startswith("fig1"):
            f = enumerate_dipaths(X, "1_1", "4_4")[0]
            P, _ = P.sub(P.downset(P.index[f]))
        out.append((name, P))
    return out


@pytest.mark.criterion(6, "poset colimits of chain diagrams")
def test_c6_fixture_colimits():
    for name, P in _fixture_regions():
        for flavor in FLAVORS:
            C = colimit_posets(chain_diagram(chain_category(P, flavor)))
            assert _same_poset(C.poset, P), (name, flavor)


@pytest.mark.criterion(6, "poset colimits of chain diagrams")
def test_c6_random_posets():
    rng = random.Random(61)
    for _ in range(120):
        n, lt = random_poset(rng, 8)
        P = Poset.from_relation(list(range(n)), lt)
        for flavor in FLAVORS:
            C = colimit_posets(chain_diagram(chain_category(P, flavor)))
            assert _same_poset(C.poset, P), (flavor, n, sorted(lt))


@pytest.mark.criterion(6, "poset colimits of chain diagrams")
def test_c6_diamond_needs_completion():
    D = diamond()
    C = colimit_posets(chain_diagram(maximal_chain_category(D)))
    assert not _same_poset(C.poset, D)
    assert len(C.poset) == 6
    for flavor in FLAVORS:
        assert _same_poset(colimit_posets(chain_diagram(chain_category(D, flavor))).poset, D)


# ---------------------------------------------------------------- 7


def _random_invertible(rng, d, fld):
    while True:
        A = linalg.matrix([[rng.randint(-2, 2) for _ in range(d)] for _ in range(d)], fld) if d \
            else linalg.zeros(0, 0, fld)
        if linalg.is_invertible(A, fld):
            return A


def _random_functor(rng, P, fld):
    """Sum of interval modules on convex sets, in a random basis at every node."""
    ivs = []
    for _ in range(rng.randint(1, 3)):
        lo = rng.randrange(len(P))
        ivs.append((lo, rng.choice(P.upset(lo))))
    support = [[k for k, (lo, hi) in enumerate(ivs) if P.le(lo, x) and P.le(x, hi)] for x in range(len(P))]
    B = [_random_invertible(rng, len(s), fld) for s in support]
    maps = {}
    for a, b in P.covers():
        E = linalg.zeros(len(support[b]), len(support[a]), fld)
        for c, v in enumerate(support[a]):
            if v in support[b]:
                E[support[b].index(v), c] = fld(1)
        maps[(a, b)] = linalg.matmul(linalg.matmul(B[b], E, fld), linalg.inverse(B[a], fld), fld)
    return PosetFunctor(P, [len(s) for s in support], maps, fld)


@pytest.mark.criterion(7, "restrict-then-glue reproduces the functor")
def test_c7_pers_colimit_gluing():
    rng = random.Random(7)
    done = 0
    while done < 120:
        fld = QQ if done % 2 else Field(3)
        n, lt = random_poset(rng, 6)
        P = Poset.from_relation(list(range(n)), lt)
        F = _random_functor(rng, P, fld)
        assert F.check_commutative() is None
        cat = chain_category(P, FLAVORS[done % 3])
        # each chain object sees F through its own change of basis
        functors, twist = [], []
        for c in cat.objects:
            R = F.restrict(c)
            T = [_random_invertible(rng, R.dims[k], fld) for k in range(len(c))]
            maps = {(a, b): linalg.matmul(linalg.matmul(T[b], A, fld), linalg.inverse(T[a], fld), fld)
                    for (a, b), A in R.cover_maps.items()}
            functors.append(PosetFunctor(R.poset, R.dims, maps, fld))
            twist.append(T)
        arrows = []
        for s, t in cat.arrows:
            pos = {x: k for k, x in enumerate(cat.objects[t])}
            m = [pos[x] for x in cat.objects[s]]
            isos = [linalg.matmul(twist[t][m[k]], linalg.inverse(twist[s][k], fld), fld) for k in range(len(m))]
            arrows.append((s, t, m, isos))
        D = PersFunctorDiagram(functors, arrows, fld)
        assert D.check_natural()
        G = colimit_pers(D)
        for members in G.colimit.members:
            assert len({functors[p].dims[x] for p, x in members}) == 1
        eta = {}
        for cls, members in enumerate(G.colimit.members):
            p, x = members[0]
            label = G.functor.poset.elements[cls]
            eta[label] = linalg.matmul(G.to_class[(p, x)], twist[p][x], fld)
        assert compare_functors(F, G.functor, eta) is None
        done += 1


# ---------------------------------------------------------------- 8


def _fixture_modules():
    mods = []
    for name in FIXTURES:
        X = load(f"fixtures/{name}")
        cache = ComplexCache(X)
        lo = [v for v in X.vertices if not X.in_edges(v)]
        hi = [v for v in X.vertices if not X.out_edges(v)]
        for a in lo:
            for b in hi:
                for f in enumerate_dipaths(X, a, b):
                    mods.append((name, str(f), persistence_along_trace(X, f, cache=cache)))
    return mods


def _identities(M):
    return lambda t: linalg.identity(M.dim_at(t), M.field)


@pytest.mark.criterion(8, "interleavings and interleaving distance")
def test_c8_fixture_interleavings():
    mods = _fixture_modules()
    assert len(mods) > 500
    seen = {}
    for name, f, M in mods:
        assert verify_interleaving(M, M, 0, _identities(M), _identities(M))[0], (name, f)
        for eps in (Fraction(1, 2), 1, 2):
            N, phi, psi = shift_interleaving(M, eps)
            ok, why = verify_interleaving(M, N, eps, phi, psi)
            assert ok, (name, f, eps, why)
        seen.setdefault(barcode(M), M)
    distinct = list(seen.items())
    for A, MA in distinct:
        for B, MB in distinct:
            assert interleaving_distance(MA, MB) == brute_bottleneck(A, B)


@pytest.mark.criterion(8, "interleavings and interleaving distance")
def test_c8_distance_against_exhaustive_matching():
    rng = random.Random(88)
    for _ in range(200):
        A, B = random_barcode(rng, 5), random_barcode(rng, 5)
        MA, _ = interval_module(A)
        MB, _ = interval_module(B)
        assert interleaving_distance(MA, MB) == brute_bottleneck(A, B)


@pytest.mark.criterion(8, "interleavings and interleaving distance")
def test_c8_alpha_against_its_completion():
    X = load("fixtures/matchbox")
    alpha = persistence_along_trace(X, make_path(X, "O", MATCHBOX_TRACES["alpha"]))
    step = complete_to_real(alpha, range(len(alpha)))
    d = interleaving_distance(alpha, step)
    assert d <= 1
    N, phi, psi = shift_interleaving(alpha, 1)
    assert verify_interleaving(alpha, N, 1, phi, psi)[0]
