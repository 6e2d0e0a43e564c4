from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from natpers import linalg
from natpers.persistence import (INF, PersistenceModule, barcode, bottleneck, dims_from_bars, format_barcode,
                                 interval_module, parse_barcode, rank_from_bars, shift_interleaving,
                                 verify_interleaving)

from oracles import brute_bottleneck
from oracles import rank as oracle_rank

small = st.integers(min_value=-2, max_value=2)


@st.composite
def modules(draw, p=0):
    n = draw(st.integers(1, 5))
    dims = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    maps = [draw(st.lists(st.lists(small, min_size=dims[i], max_size=dims[i]), min_size=dims[i + 1],
                          max_size=dims[i + 1])) for i in range(n - 1)]
    return PersistenceModule.from_maps(dims, maps, field=linalg.Field(p))


@st.composite
def barcodes(draw):
    bars = []
    for _ in range(draw(st.integers(0, 4))):
        b = draw(st.integers(0, 5))
        d = draw(st.one_of(st.just(INF), st.integers(b + 1, 7)))
        bars.append((b, d))
    return bars


@settings(max_examples=80, deadline=None)
@given(modules())
def test_barcode_reconstructs_every_rank(M):
    bars = barcode(M)
    assert dims_from_bars(bars, M.degrees) == list(M.dims)
    for i in range(len(M)):
        for j in range(i, len(M)):
            A = M.map_between(i, j)
            rows = [list(A[r]) for r in range(A.shape[0])]
            expect = oracle_rank(rows) if rows and rows[0] else 0
            assert rank_from_bars(bars, i, j) == expect


@settings(max_examples=60, deadline=None)
@given(modules(p=3))
def test_barcode_over_gf3(M):
    bars = barcode(M)
    for i in range(len(M)):
        for j in range(i, len(M)):
            assert rank_from_bars(bars, i, j) == linalg.rank(M.map_between(i, j), M.field)


@settings(max_examples=80, deadline=None)
@given(barcodes(), barcodes())
def test_bottleneck_is_a_symmetric_matching_distance(A, B):
    d, _ = bottleneck(A, B)
    assert d == bottleneck(B, A)[0] == brute_bottleneck(A, B)
    assert bottleneck(A, A)[0] == 0


@settings(max_examples=40, deadline=None)
@given(barcodes(), barcodes(), barcodes())
def test_bottleneck_triangle(A, B, C):
    ab, bc, ac = bottleneck(A, B)[0], bottleneck(B, C)[0], bottleneck(A, C)[0]
    assert ac <= ab + bc


@settings(max_examples=60, deadline=None)
@given(barcodes())
def test_interval_module_barcode(A):
    M, _ = interval_module(A)
    assert barcode(M) == tuple(sorted(A))


@settings(max_examples=40, deadline=None)
@given(modules(), st.sampled_from([Fraction(1, 2), 1, 2]))
def test_shift_is_an_interleaving(M, eps):
    N, phi, psi = shift_interleaving(M, eps)
    assert verify_interleaving(M, N, eps, phi, psi)[0]


@given(barcodes())
def test_barcode_text_roundtrip(A):
    bars = tuple(sorted(A))
    assert parse_barcode(format_barcode(bars)) == bars


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_matrix_text_roundtrip(m, n, data):
    rows = data.draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    A = linalg.matrix(rows) if m and n else linalg.zeros(m, n)
    B = linalg.parse_matrix(linalg.format_matrix(A))
    assert B.shape == A.shape and linalg.mat_equal(A, B)
