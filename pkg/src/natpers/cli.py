"""Command-line front end.

Exit status: 0 success / true, 1 verified false or bad input, 2 inconclusive.
"""
from __future__ import annotations

import argparse
import sys

from .bisim import DISCIPLINES, format_relation, parse_relation, search_bisimulation, verify_bisimulation
from .colimit import FLAVOR_NAMES, chain_diagram, colimit_posets, verify_theorem1
from .homology import betti, chains_of
from .linalg import Field
from .natural import endpoint_quotient, filtration_of_trace, natural_homology, persistence_along_trace
from .persistence import barcode, echelon_table, format_barcode
from .precubical import (ParseError, ValidationError, load, maximal_vertices, minimal_vertices, resolve_vertex,
                         validate)
from .tracespace import components, parse_path, trace_complex
from .traceposet import DEFAULT_CAP, CapExceeded, build_trace_poset, chain_category

OK, FALSE, INCONCLUSIVE = 0, 1, 2


def _field(text: str) -> Field:
    try:
        return Field(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("caps must be positive")
    return n


def _degree(text: str) -> int:
    n = int(text)
    if n not in (1, 2):
        raise argparse.ArgumentTypeError("degree must be 1 or 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field, default=Field(0), help="0 for Q or a prime p")
    common.add_argument("--degree", type=_degree, default=1, help="natural homology degree n (H_{n-1})")
    common.add_argument("--cap", type=_positive, default=DEFAULT_CAP)
    common.add_argument("--out", help="also write the output to this file")

    p = argparse.ArgumentParser(prog="natpers", description="Natural homology of loop-free precubical sets.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse and validate a complex")
    s.add_argument("input")

    s = sub.add_parser("tracespace", parents=[common], help="trace space between two vertices")
    s.add_argument("input")
    s.add_argument("--from", dest="source")
    s.add_argument("--to", dest="target")
    s.add_argument("--all-pairs", action="store_true", help="component counts over every vertex pair")

    s = sub.add_parser("poset", parents=[common], help="trace poset summary and Hasse diagram")
    s.add_argument("input")
    s.add_argument("--anchor", help="restrict to the upset of this vertex")

    s = sub.add_parser("persistence", parents=[common], help="barcode along a trace")
    s.add_argument("input")
    s.add_argument("--trace", required=True, help="start[e1,e2,...]")
    s.add_argument("--chain", help="semicolon-separated traces; default: prefixes of the trace")
    s.add_argument("--table", action="store_true", help="print the reduced graded boundary matrix")

    s = sub.add_parser("natural", parents=[common], help="natural homology diagram")
    s.add_argument("input")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--upset", metavar="VERTEX")
    g.add_argument("--interval", nargs=2, metavar=("VERTEX", "TRACE"))
    s.add_argument("--quotient", action="store_true", help="identify traces with equal endpoints")

    s = sub.add_parser("colimit", parents=[common], help="chain colimits and the gluing theorem")
    s.add_argument("input")
    s.add_argument("--theorem1", action="store_true")
    s.add_argument("--anchor")
    s.add_argument("--flavor", choices=sorted(FLAVOR_NAMES), default="quasi")

    s = sub.add_parser("bisim", parents=[common], help="search or verify a bisimulation")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--discipline", choices=DISCIPLINES, default="signed-perm")
    s.add_argument("--relation", help="verify this relation file instead of searching; "
                   "with --out a found relation is written in this format")
    s.add_argument("--anchor", nargs=2, metavar=("LEFT", "RIGHT"), help="compare upsets of these vertices")
    return p


def _emit(cfg: argparse.Namespace, text: str) -> None:
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)


def _endpoints(X, args) -> tuple[str, str]:
    def pick(name, candidates, what):
        if name:
            return resolve_vertex(X, name)
        if len(candidates) != 1:
            raise ValueError(f"no unique {what} vertex; pass --from/--to")
        return candidates[0]

    return pick(args.source, minimal_vertices(X), "minimal"), pick(args.target, maximal_vertices(X), "maximal")


def cmd_validate(args) -> int:
    X = load(args.input)
    problems = validate(X)
    if problems:
        _emit(args, "invalid\n" + "".join(f"  {p}\n" for p in problems))
        return FALSE
    _emit(args, f"valid: {len(X.vertices)} vertices, {len(X.edges)} edges, {len(X.squares)} squares, "
                f"{len(X.cubes)} cubes\n")
    return OK


def cmd_tracespace(args) -> int:
    X = load(args.input)
    if args.all_pairs:
        lines, best = [], 0
        for a in X.vertices:
            for b in X.vertices:
                T = trace_complex(X, a, b)
                if T.vertices:
                    c = len(components(T))
                    best = max(best, c)
                    lines.append(f"{a} -> {b}: {c}")
        _emit(args, "\n".join(lines) + f"\nmax components: {best}\n")
        return OK
    a, b = _endpoints(X, args)
    T = trace_complex(X, a, b)
    C = chains_of(T)
    text = (f"vertices: {len(T.vertices)}, swaps: {len(T.swaps)}, components: {len(components(T))}, "
            f"b1: {betti(C, 1, args.field)}\n"
            f"squares: {len(T.squares2)}, b0: {betti(C, 0, args.field)}\n")
    _emit(args, text)
    return OK


def cmd_poset(args) -> int:
    X = load(args.input)
    P = build_trace_poset(X, args.cap)
    if args.anchor:
        P = P.upset_poset(P.constant(resolve_vertex(X, args.anchor)))
    text = (f"elements: {len(P)}, covers: {len(P.covers())}, minimal: {len(P.minimal())}, "
            f"maximal: {len(P.maximal())}\n" + P.hasse_text() + "\n")
    _emit(args, text)
    return OK


def cmd_persistence(args) -> int:
    X = load(args.input)
    f = parse_path(X, args.trace)
    chain = [parse_path(X, c) for c in args.chain.split(";")] if args.chain else None
    M = persistence_along_trace(X, f, chain, args.degree, args.field)
    text = format_barcode(barcode(M))
    text = text + "\n" if text else ""
    if args.table:
        F = filtration_of_trace(X, f, chain)
        k = args.degree - 1
        C = F.complex
        T = C.trace
        names = {0: [str(p) for p in T.vertices], 1: [f"s{i}" for i in range(len(T.swaps))],
                 2: [f"q{i}" for i in range(len(T.squares2))]}
        cols = [C.column(k + 1, j) for j in range(C.size(k + 1))]
        text += echelon_table(names[k], F.births[k], names.get(k + 1, []), F.births[k + 1] if k + 1 < 3 else [],
                              cols, args.field) + "\n"
    _emit(args, text)
    return OK


def cmd_natural(args) -> int:
    X = load(args.input)
    if args.upset:
        region = ("upset", resolve_vertex(X, args.upset))
    elif args.interval:
        region = ("interval", resolve_vertex(X, args.interval[0]), parse_path(X, args.interval[1]))
    else:
        region = ("whole",)
    D = natural_homology(X, args.degree, region, args.field, args.cap)
    if args.quotient:
        D = endpoint_quotient(D)
    _emit(args, D.export())
    return OK


def cmd_colimit(args) -> int:
    X = load(args.input)
    if args.theorem1:
        if not args.anchor:
            raise ValueError("--theorem1 needs --anchor")
        v = verify_theorem1(X, resolve_vertex(X, args.anchor), args.degree, args.flavor, args.field, args.cap)
        _emit(args, v.report())
        return OK if v.isomorphic else FALSE
    P = build_trace_poset(X, args.cap)
    if args.anchor:
        P = P.upset_poset(P.constant(resolve_vertex(X, args.anchor)))
    cat = chain_category(P, args.flavor, args.cap)
    C = colimit_posets(chain_diagram(cat))
    same = C.poset.same_as(P)
    _emit(args, f"flavor: {FLAVOR_NAMES[args.flavor]}\nchains: {len(cat.objects)}\n"
                f"colimit elements: {len(C.poset)}\n"
                + ("colimit reproduces the poset\n" if same else "colimit differs from the poset\n"))
    return OK if same else FALSE


def cmd_bisim(args) -> int:
    X, Y = load(args.left), load(args.right)
    if args.anchor:
        rl = ("upset", resolve_vertex(X, args.anchor[0]))
        rr = ("upset", resolve_vertex(Y, args.anchor[1]))
    else:
        rl = rr = ("whole",)
    F = natural_homology(X, args.degree, rl, args.field, args.cap)
    G = natural_homology(Y, args.degree, rr, args.field, args.cap)
    if args.relation:
        with open(args.relation) as fh:
            R = parse_relation(F, G, fh.read())
        ok, why = verify_bisimulation(F, G, R)
        _emit(args, ("bisimulation verified\n" if ok else f"not a bisimulation: {why}\n"))
        return OK if ok else FALSE
    res = search_bisimulation(F, G, args.discipline, cap=args.cap * 10)
    # stdout gets the verdict; --out gets the relation in the format --relation reads
    sys.stdout.write(res.report())
    if args.out and res.status == "found":
        with open(args.out, "w") as fh:
            fh.write(format_relation(F, G, res.relation))
    return {"found": OK, "none": FALSE}.get(res.status, INCONCLUSIVE)


COMMANDS = {
    "validate": cmd_validate, "tracespace": cmd_tracespace, "poset": cmd_poset, "persistence": cmd_persistence,
    "natural": cmd_natural, "colimit": cmd_colimit, "bisim": cmd_bisim,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE
    except (ParseError, ValidationError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FALSE


if __name__ == "__main__":
    sys.exit(main())
