"""Brute-force reference implementations used as test oracles.

Nothing here imports the package: each oracle recomputes its answer from
first principles (plain Fractions, exhaustive enumeration).
"""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction


# ---------------------------------------------------------------- linear algebra


def rank(rows, p: int = 0) -> int:
    """Rank of a list-of-rows matrix over Q (p = 0) or GF(p), by plain elimination."""
    if p:
        M = [[int(x) % p for x in r] for r in rows]
    else:
        M = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                if p:
                    f = M[i][c] * pow(M[r][c], -1, p)
                    M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
                else:
                    f = M[i][c] / M[r][c]
                    M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def nullspace(rows, ncols: int, p: int = 0) -> list[list]:
    """Basis of the kernel of a matrix given by rows (length ncols each)."""
    if p:
        M = [[int(x) % p for x in r] for r in rows]
        inv = lambda a: pow(a, -1, p)  # noqa: E731
        norm = lambda a: a % p  # noqa: E731
    else:
        M = [[Fraction(x) for x in r] for r in rows]
        inv = lambda a: 1 / a  # noqa: E731
        norm = lambda a: a  # noqa: E731
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        s = inv(M[r][c])
        M[r] = [norm(a * s) for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [norm(a - f * b) for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[free] = 1
        for i, c in enumerate(pivots):
            v[c] = norm(-M[i][free])
        basis.append(v)
    return basis


def matmul(A, B, p: int = 0):
    n = len(B[0]) if B else 0
    out = [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(n)] for i in range(len(A))]
    return [[x % p for x in r] for r in out] if p else out


# ---------------------------------------------------------------- simplicial filtrations


def random_filtration(rng: random.Random, max_cells: int = 8, max_stages: int = 5):
    """Random simplicial complex with at most ``max_cells`` simplices and a
    monotone birth stage per simplex.  Returns {simplex tuple: birth}."""
    stages = rng.randint(1, max_stages)
    nv = rng.randint(1, 4)
    simplices = {(v,): rng.randrange(stages) for v in range(nv)}
    cands = list(itertools.combinations(range(nv), 2)) + list(itertools.combinations(range(nv), 3))
    rng.shuffle(cands)
    for s in cands:
        if len(simplices) >= max_cells:
            break
        faces = list(itertools.combinations(s, len(s) - 1))
        if all(f in simplices for f in faces) and rng.random() < 0.7:
            lo = max(simplices[f] for f in faces)
            simplices[s] = rng.randint(lo, stages - 1)
    return simplices, stages


def boundary_rows(simplices, k: int):
    """Dense boundary matrix from k-simplices to (k-1)-simplices, rows = faces,
    bases sorted; returns (matrix rows, row basis, column basis)."""
    rows_b = sorted(s for s in simplices if len(s) == k)
    cols_b = sorted(s for s in simplices if len(s) == k + 1)
    ri = {s: i for i, s in enumerate(rows_b)}
    M = [[0] * len(cols_b) for _ in rows_b]
    for j, s in enumerate(cols_b):
        for i in range(len(s)):
            M[ri[s[:i] + s[i + 1:]]][j] = (-1) ** i
    return M, rows_b, cols_b


def persistent_rank(simplices, k: int, i: int, j: int, p: int = 0) -> int:
    """rank of H_k(K_i) -> H_k(K_j) as dim(Z_k(K_i) + B_k(K_j)) - dim B_k(K_j),
    everything written in the basis of k-simplices of the full complex."""
    ks = sorted(s for s in simplices if len(s) == k + 1)
    pos = {s: n for n, s in enumerate(ks)}
    # Z_k(K_i)
    alive_k = [s for s in ks if simplices[s] <= i]
    if k == 0:
        Z = [[1 if t == s else 0 for t in ks] for s in alive_k]
    else:
        faces = sorted({s[:m] + s[m + 1:] for s in alive_k for m in range(len(s))})
        fi = {f: n for n, f in enumerate(faces)}
        rows = [[0] * len(alive_k) for _ in faces]
        for c, s in enumerate(alive_k):
            for m in range(len(s)):
                rows[fi[s[:m] + s[m + 1:]]][c] = (-1) ** m
        Z = []
        for v in nullspace(rows, len(alive_k), p):
            full = [0] * len(ks)
            for c, s in enumerate(alive_k):
                full[pos[s]] = v[c]
            Z.append(full)
    # B_k(K_j)
    B = []
    for s in simplices:
        if len(s) == k + 2 and simplices[s] <= j:
            col = [0] * len(ks)
            for m in range(len(s)):
                col[pos[s[:m] + s[m + 1:]]] = (-1) ** m
            B.append(col)
    if not ks:
        return 0
    return rank(Z + B, p) - rank(B, p) if (Z or B) else 0


# ---------------------------------------------------------------- graphs and grids


def grid_digraph(extents, forbidden):
    """Edges of a 2D grid complex as (u, v) integer pairs: a unit step is kept
    iff it is an edge of some allowed unit square."""
    nx, ny = extents
    forb = {tuple(c) for c in forbidden}
    edges = set()
    for i in range(nx):
        for j in range(ny):
            if (i, j) in forb:
                continue
            edges |= {((i, j), (i + 1, j)), ((i, j), (i, j + 1)),
                      ((i + 1, j), (i + 1, j + 1)), ((i, j + 1), (i + 1, j + 1))}
    return edges


def count_paths(edges, a, b) -> int:
    succ = {}
    for u, v in edges:
        succ.setdefault(u, []).append(v)

    def dfs(u):
        if u == b:
            return 1
        return sum(dfs(v) for v in succ.get(u, ()))

    return dfs(a)


def union_find_components(n: int, pairs) -> int:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(n)})


def lattice_paths(a: int, b: int) -> int:
    return math.comb(a + b, a)


# ---------------------------------------------------------------- posets


def random_poset(rng: random.Random, n_max: int = 8):
    """Random strict order on range(n) as a set of pairs (closed), n <= n_max."""
    n = rng.randint(1, n_max)
    density = rng.random()
    lt = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density * 0.5}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(lt), repeat=2):
            if b == c and (a, d) not in lt:
                lt.add((a, d))
                changed = True
    return n, lt


def powerset_chains(n: int, lt) -> list[tuple[int, ...]]:
    out = []
    for r in range(1, n + 1):
        for sub in itertools.combinations(range(n), r):
            if all((a, b) in lt or (b, a) in lt for a, b in itertools.combinations(sub, 2)):
                out.append(sub)
    return out


def covers(n: int, lt):
    return {(a, b) for (a, b) in lt if not any((a, c) in lt and (c, b) in lt for c in range(n))}


# ---------------------------------------------------------------- barcodes


INF = math.inf


def _cost(a, b):
    if (a[1] == INF) != (b[1] == INF):
        return INF
    if a[1] == INF:
        return abs(Fraction(a[0]) - Fraction(b[0]))
    return max(abs(Fraction(a[0]) - Fraction(b[0])), abs(Fraction(a[1]) - Fraction(b[1])))


def _diag(a):
    return INF if a[1] == INF else (Fraction(a[1]) - Fraction(a[0])) / 2


def brute_bottleneck(A, B):
    """Minimum over every partial matching of the largest cost."""
    A, B = list(A), list(B)
    best = INF

    def go(i, used, worst):
        nonlocal best
        if worst >= best:
            return
        if i == len(A):
            rest = [_diag(B[j]) for j in range(len(B)) if j not in used]
            w = max([worst] + rest)
            best = min(best, w)
            return
        go(i + 1, used, max(worst, _diag(A[i])))
        for j in range(len(B)):
            if j not in used:
                go(i + 1, used | {j}, max(worst, _cost(A[i], B[j])))

    go(0, frozenset(), Fraction(0))
    return best


def random_barcode(rng: random.Random, n_max: int = 5, span: int = 6):
    bars = []
    for _ in range(rng.randint(0, n_max)):
        b = Fraction(rng.randint(0, 2 * span), 2)
        if rng.random() < 0.25:
            bars.append((b, INF))
        else:
            bars.append((b, b + Fraction(rng.randint(1, 2 * span), 2)))
    return bars
