import pytest

from natpers.precubical import (FIXTURES, GridPospace, ParseError, ValidationError, build, from_grid, load,
                                parse_grid, parse_precubical, resolve_vertex, serialize, validate)

from oracles import grid_digraph


def test_matchbox_has_five_squares():
    X = load("fixtures/matchbox")
    assert (len(X.vertices), len(X.edges), len(X.squares)) == (8, 12, 5)
    assert X.dimension == 2
    assert validate(X) == []


def test_single_vertex():
    X = parse_precubical("vertices: v\n")
    assert X.dimension == 0 and X.vertices == ("v",)


SQUARE = """
vertices: a, b, c, d
edges:
  ab: a -> b
  ac: a -> c
  bd: b -> d
  cd: c -> d
squares:
  s: [ab, cd, ac, bd]
"""


def test_square_text_is_valid():
    X = parse_precubical(SQUARE)
    assert X.squares == ("s",)
    assert X.face("s", 1, 0) == "ab" and X.face("s", 2, 1) == "bd"


def test_identity_violation_is_reported():
    # bottom and top swapped: d_1^0 of the left face no longer meets d_1^0 of the bottom face
    with pytest.raises(ValidationError) as exc:
        parse_precubical(SQUARE.replace("[ab, cd, ac, bd]", "[ab, cd, bd, ac]"))
    assert any("precubical identity" in p for p in exc.value.problems)


def test_cycle_is_named():
    with pytest.raises(ValidationError) as exc:
        build([["u", "v"], ["e", "f"]], {"e": ["u", "v"], "f": ["v", "u"]})
    msg = " ".join(exc.value.problems)
    assert "cycle" in msg and "u" in msg and "v" in msg


def test_dangling_face():
    with pytest.raises(ValidationError) as exc:
        build([["u"], ["e"]], {"e": ["u", "w"]})
    assert any("does not exist" in p for p in exc.value.problems)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_precubical("vertices: a\nedges:\n  e a -> b\n")
    assert exc.value.line == 3


@pytest.mark.parametrize("forbidden", [[[1, 3], [3, 1]], [[1, 1], [3, 3]]])
def test_fig1_grids_match_independent_digraph(forbidden):
    X = from_grid(GridPospace((5, 5), frozenset(map(tuple, forbidden))))
    assert len(X.vertices) == 36
    assert len(X.squares) == 23
    edges = {(X.source(e), X.target(e)) for e in X.edges}
    expect = {(f"{a[0]}_{a[1]}", f"{b[0]}_{b[1]}") for a, b in grid_digraph((5, 5), forbidden)}
    assert edges == expect


def test_unit_square_grid():
    X = load("fixtures/unit-square")
    assert (len(X.vertices), len(X.edges), len(X.squares)) == (4, 4, 1)


def test_forbidden_outside_grid():
    with pytest.raises(ValueError):
        parse_grid("grid: [2, 2]\nforbidden: [[2, 0]]\n")


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_roundtrip(name):
    X = load(f"fixtures/{name}")
    Y = parse_precubical(serialize(X))
    assert Y.cells == X.cells and Y.faces == X.faces


def test_resolve_vertex_coordinates():
    X = load("fixtures/fig1-left")
    assert resolve_vertex(X, "(4,4)") == "4_4"
    with pytest.raises(KeyError):
        resolve_vertex(X, "(9,9)")


def test_three_dimensional_grid_identities():
    X = from_grid(GridPospace((1, 1, 1)))
    assert len(X.cubes) == 1 and len(X.squares) == 6
    assert validate(X) == []
