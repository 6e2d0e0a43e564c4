"""Finite loop-free precubical sets: representation, validation, text formats.

Explicit-cell format (UTF-8, ``#`` starts a comment)::

    vertices: O, X, Y
    edges:
      a: O -> X
      b: O -> Y
    squares:
      s: [left, right, bottom, top]
    cubes:
      c: [d1-, d1+, d2-, d2+, d3-, d3+]

A section header may carry its entries inline after the colon (``vertices:``
does this with a comma-separated list) or list them on the following indented
lines.  Square faces are the edges d_1^0, d_1^1, d_2^0, d_2^1; cube faces are
the squares d_1^0, d_1^1, d_2^0, d_2^1, d_3^0, d_3^1.  An edge ``a -> b`` has
d_1^0 = a and d_1^1 = b.

Grid shorthand::

    grid: [5, 5]
    forbidden: [[1, 3], [3, 1]]
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_DIMENSION = 3
IDENT = re.compile(r"[A-Za-z0-9_.'+\-]+\Z")
SECTIONS = ("vertices", "edges", "squares", "cubes")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid precubical set:\n  " + "\n  ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class PrecubicalSet:
    """Cells per dimension (file order) and their face maps.

    ``faces[c]`` is the tuple (d_1^0, d_1^1, d_2^0, d_2^1, ...) of a cell of
    dimension >= 1.
    """

    cells: tuple[tuple[str, ...], ...]
    faces: dict[str, tuple[str, ...]] = field(compare=False)

    def __post_init__(self):
        dim_of = {}
        for d, cs in enumerate(self.cells):
            for c in cs:
                dim_of[c] = d
        object.__setattr__(self, "_dim", dim_of)
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        inc: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            fs = self.faces.get(e, ())
            if len(fs) != 2:
                continue
            s, t = fs
            if s in out:
                out[s].append(e)
            if t in inc:
                inc[t].append(e)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_in", {k: tuple(v) for k, v in inc.items()})
        object.__setattr__(self, "_edge_index", {e: i for i, e in enumerate(self.edges)})
        object.__setattr__(self, "_vertex_index", {v: i for i, v in enumerate(self.vertices)})

    @property
    def dimension(self) -> int:
        return max((d for d, cs in enumerate(self.cells) if cs), default=0)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.cells[0] if self.cells else ()

    @property
    def edges(self) -> tuple[str, ...]:
        return self.cells[1] if len(self.cells) > 1 else ()

    @property
    def squares(self) -> tuple[str, ...]:
        return self.cells[2] if len(self.cells) > 2 else ()

    @property
    def cubes(self) -> tuple[str, ...]:
        return self.cells[3] if len(self.cells) > 3 else ()

    def dim(self, cell: str) -> int:
        return self._dim[cell]

    def face(self, cell: str, axis: int, sign: int) -> str:
        """d_axis^sign, axis counted from 1."""
        return self.faces[cell][2 * (axis - 1) + sign]

    def source(self, edge: str) -> str:
        return self.faces[edge][0]

    def target(self, edge: str) -> str:
        return self.faces[edge][1]

    def out_edges(self, v: str) -> tuple[str, ...]:
        return self._out[v]

    def in_edges(self, v: str) -> tuple[str, ...]:
        return self._in[v]

    def edge_index(self, e: str) -> int:
        return self._edge_index[e]

    def vertex_index(self, v: str) -> int:
        return self._vertex_index[v]

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def relabel(self, mapping: dict[str, str], order: dict[int, Sequence[int]] | None = None) -> "PrecubicalSet":
        """Rename cells (and optionally permute the file order per dimension)."""
        cells = []
        for d, cs in enumerate(self.cells):
            cs = list(cs)
            if order and d in order:
                cs = [cs[i] for i in order[d]]
            cells.append(tuple(mapping.get(c, c) for c in cs))
        faces = {mapping.get(c, c): tuple(mapping.get(f, f) for f in fs) for c, fs in self.faces.items()}
        return PrecubicalSet(tuple(cells), faces)


@dataclass(frozen=True)
class GridPospace:
    extents: tuple[int, ...]
    forbidden: frozenset[tuple[int, ...]] = frozenset()

    def __post_init__(self):
        if not 2 <= len(self.extents) <= 3:
            raise ValueError("grids have 2 or 3 axes")
        if any(n < 1 for n in self.extents):
            raise ValueError("grid extents must be positive")
        for cell in self.forbidden:
            if len(cell) != len(self.extents) or any(not 0 <= c < n for c, n in zip(cell, self.extents)):
                raise ValueError(f"forbidden cell {list(cell)} lies outside the grid {list(self.extents)}")


# ---------------------------------------------------------------- validation


def validate(X: PrecubicalSet) -> list[str]:
    """Every violated invariant, with the offending cells; empty iff valid."""
    problems = []
    if len(X.cells) - 1 > MAX_DIMENSION:
        problems.append(f"dimension {len(X.cells) - 1} exceeds the supported maximum {MAX_DIMENSION}")
    seen = {}
    for d, cs in enumerate(X.cells):
        for c in cs:
            if c in seen:
                problems.append(f"duplicate cell identifier {c!r}")
            seen[c] = d
    for d, cs in enumerate(X.cells):
        for c in cs:
            if d == 0:
                continue
            fs = X.faces.get(c)
            if fs is None or len(fs) != 2 * d:
                problems.append(f"{c}: expected {2 * d} faces")
                continue
            for f in fs:
                if f not in seen:
                    problems.append(f"{c}: face {f!r} does not exist")
                elif seen[f] != d - 1:
                    problems.append(f"{c}: face {f!r} has dimension {seen[f]}, expected {d - 1}")
    if problems:
        return problems
    for d in range(2, len(X.cells)):
        for c in X.cells[d]:
            for i in range(1, d + 1):
                for j in range(i + 1, d + 1):
                    for a in (0, 1):
                        for b in (0, 1):
                            lhs = X.face(X.face(c, j, b), i, a)
                            rhs = X.face(X.face(c, i, a), j - 1, b)
                            if lhs != rhs:
                                problems.append(
                                    f"{c}: precubical identity d_{i}^{a} d_{j}^{b} = d_{j - 1}^{b} d_{i}^{a} "
                                    f"fails ({lhs} != {rhs})"
                                )
    cycle = _find_cycle(X)
    if cycle:
        problems.append("1-skeleton has a directed cycle: " + " -> ".join(cycle))
    return problems


def _find_cycle(X: PrecubicalSet) -> list[str] | None:
    color = {v: 0 for v in X.vertices}
    parent: dict[str, str] = {}
    for root in X.vertices:
        if color[root]:
            continue
        stack = [(root, iter(X.out_edges(root)))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            e = next(it, None)
            if e is None:
                color[v] = 2
                stack.pop()
                continue
            w = X.target(e)
            if color[w] == 1:
                cyc = [w]
                u = v
                while u != w:
                    cyc.append(u)
                    u = parent[u]
                cyc.append(w)
                return cyc[::-1]
            if color[w] == 0:
                color[w] = 1
                parent[w] = v
                stack.append((w, iter(X.out_edges(w))))
    return None


def build(cells: Sequence[Sequence[str]], faces: dict[str, Sequence[str]]) -> PrecubicalSet:
    """Construct and validate; raises ValidationError."""
    cells = [tuple(cs) for cs in cells]
    while len(cells) > 1 and not cells[-1]:
        cells.pop()
    X = PrecubicalSet(tuple(cells), {k: tuple(v) for k, v in faces.items()})
    problems = validate(X)
    if problems:
        raise ValidationError(problems)
    return X


# ---------------------------------------------------------------- parsing


def parse_precubical(text: str) -> PrecubicalSet:
    """Parse either the explicit-cell format or the grid shorthand."""
    if re.search(r"^\s*grid\s*:", text, re.M):
        return from_grid(parse_grid(text))
    sections: dict[str, list[tuple[str, int, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        if indent == 0:
            key, colon, rest = line.partition(":")
            key = key.strip()
            if not colon:
                raise ParseError("expected a section header 'name:'", lineno)
            if key not in SECTIONS:
                raise ParseError(f"unknown key {key!r}", lineno)
            if key in sections:
                raise ParseError(f"duplicate section {key!r}", lineno)
            current = key
            sections[key] = []
            if rest.strip():
                sections[key].append((rest.strip(), lineno, len(key) + 2 + (len(rest) - len(rest.lstrip()))))
        else:
            if current is None:
                raise ParseError("entry outside of any section", lineno, indent + 1)
            sections[current].append((line.strip(), lineno, indent + 1))

    vertices: list[str] = []
    for body, ln, col in sections.get("vertices", []):
        for tok in body.split(","):
            tok = tok.strip()
            _check_ident(tok, ln, col)
            vertices.append(tok)
    faces: dict[str, tuple[str, ...]] = {}
    edges = []
    for body, ln, col in sections.get("edges", []):
        m = re.fullmatch(r"(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", body)
        if not m:
            raise ParseError("expected 'name: source -> target'", ln, col)
        name, s, t = m.groups()
        for tok in (name, s, t):
            _check_ident(tok, ln, col)
        edges.append(name)
        faces[name] = (s, t)
    higher = {}
    for dim, key in ((2, "squares"), (3, "cubes")):
        higher[dim] = []
        for body, ln, col in sections.get(key, []):
            m = re.fullmatch(r"(\S+)\s*:\s*\[(.*)\]", body)
            if not m:
                raise ParseError(f"expected 'name: [{', '.join(['face'] * 2 * dim)}]'", ln, col)
            name, inner = m.groups()
            _check_ident(name, ln, col)
            fs = [f.strip() for f in inner.split(",")]
            if len(fs) != 2 * dim:
                raise ParseError(f"{key[:-1]} {name!r} needs {2 * dim} faces, got {len(fs)}", ln, col)
            for f in fs:
                _check_ident(f, ln, col)
            higher[dim].append(name)
            faces[name] = tuple(fs)
    cells = [vertices, edges, higher[2], higher[3]]
    return build(cells, faces)


def _check_ident(tok: str, line: int, col: int) -> None:
    if not IDENT.match(tok):
        raise ParseError(f"invalid identifier {tok!r}", line, col)


def parse_grid(text: str) -> GridPospace:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, colon, rest = line.partition(":")
        key = key.strip()
        if not colon:
            raise ParseError("expected 'key: value'", lineno)
        if key not in ("grid", "forbidden"):
            raise ParseError(f"unknown key {key!r}", lineno)
        try:
            values[key] = json.loads(rest)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad value for {key!r}: {exc.msg}", lineno, len(key) + 2 + exc.colno) from None
    if "grid" not in values:
        raise ParseError("missing 'grid' key", 1)
    ext = values["grid"]
    if not isinstance(ext, list) or not all(isinstance(n, int) for n in ext):
        raise ParseError("'grid' must be a list of integers", 1)
    forb = values.get("forbidden", [])
    if not isinstance(forb, list) or not all(isinstance(c, list) for c in forb):
        raise ParseError("'forbidden' must be a list of index lists", 1)
    return GridPospace(tuple(ext), frozenset(tuple(c) for c in forb))


def serialize(X: PrecubicalSet) -> str:
    lines = ["vertices: " + ", ".join(X.vertices)]
    if X.edges:
        lines.append("edges:")
        lines += [f"  {e}: {X.source(e)} -> {X.target(e)}" for e in X.edges]
    for key, cs in (("squares", X.squares), ("cubes", X.cubes)):
        if cs:
            lines.append(f"{key}:")
            lines += [f"  {c}: [{', '.join(X.faces[c])}]" for c in cs]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- grids


def vertex_name(point: Sequence[int]) -> str:
    return "_".join(str(c) for c in point)


def _cell_name(base: Sequence[int], axes: Sequence[int]) -> str:
    if not axes:
        return vertex_name(base)
    return vertex_name(base) + "+" + "".join(str(a) for a in axes)


def from_grid(g: GridPospace) -> PrecubicalSet:
    """Cubical grid on ``g.extents`` minus the forbidden top cells.

    A lower cell is dropped only when every top cell containing it is
    forbidden.  Vertex ``(i, j)`` is named ``i_j``; the cell with base point
    p spanning axes a < b is ``p+ab``.
    """
    n = len(g.extents)
    top = [c for c in itertools.product(*(range(e) for e in g.extents))]
    allowed_top = [c for c in top if c not in g.forbidden]
    keep: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    full_axes = tuple(range(n))
    for c in allowed_top:
        # every face of c: choose a subset of axes to span, fix the others at 0/1
        for k in range(n + 1):
            for axes in itertools.combinations(full_axes, k):
                fixed = [a for a in full_axes if a not in axes]
                for shift in itertools.product((0, 1), repeat=len(fixed)):
                    base = list(c)
                    for a, s in zip(fixed, shift):
                        base[a] += s
                    keep.add((tuple(base), axes))
    cells: list[list[str]] = [[] for _ in range(n + 1)]
    faces: dict[str, tuple[str, ...]] = {}
    # deterministic order: by dimension, then axes, then base point
    for d in range(n + 1):
        for axes in itertools.combinations(full_axes, d):
            bases = sorted(b for b, ax in keep if ax == axes)
            for base in bases:
                name = _cell_name(base, axes)
                cells[d].append(name)
                if d == 0:
                    continue
                fs = []
                for i, a in enumerate(axes):
                    rest = axes[:i] + axes[i + 1:]
                    for s in (0, 1):
                        b = list(base)
                        b[a] += s
                        fs.append(_cell_name(b, rest))
                faces[name] = tuple(fs)
    return build(cells, faces)


def minimal_vertices(X: PrecubicalSet) -> list[str]:
    return [v for v in X.vertices if not X.in_edges(v)]


def maximal_vertices(X: PrecubicalSet) -> list[str]:
    return [v for v in X.vertices if not X.out_edges(v)]


def resolve_vertex(X: PrecubicalSet, name: str) -> str:
    """Accept a vertex identifier, or grid coordinates written ``(i,j)``/``i,j``."""
    if X.has_vertex(name):
        return name
    m = re.fullmatch(r"\(?\s*(\d+(?:\s*,\s*\d+)*)\s*\)?", name)
    if m:
        cand = "_".join(t.strip() for t in m.group(1).split(","))
        if X.has_vertex(cand):
            return cand
    raise KeyError(f"unknown vertex {name!r}")


def cells_of(X: PrecubicalSet) -> Iterable[str]:
    for cs in X.cells:
        yield from cs


FIXTURES = ("matchbox", "fig1-left", "fig1-right", "unit-square", "grid2x2")


def fixture_text(name: str) -> str:
    from importlib import resources

    base = resources.files("natpers") / "fixtures"
    for suffix in (".cells", ".grid"):
        f = base / (name + suffix)
        if f.is_file():
            return f.read_text(encoding="utf-8")
    raise FileNotFoundError(f"no bundled fixture named {name!r}")


def load(path: str) -> PrecubicalSet:
    """Read a complex from a file, falling back to a bundled fixture by name."""
    import os

    if os.path.isfile(path):
        with open(path, encoding="utf-8") as fh:
            return parse_precubical(fh.read())
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_precubical(fixture_text(name))
