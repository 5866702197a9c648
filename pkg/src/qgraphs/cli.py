"""Command line front end: ``qgraphs construct | verify | scan``.

Every JSON document echoes the run configuration, the field and the tool
version. Keys are sorted, so the same command always prints the same bytes.
Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 internal
invariant violated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import __version__
from .catalog import GROUP_NAMES, default_catalog, extended_catalog, resolve_group
from .constructions import (
    complete_qgraph,
    desarguesian_spread,
    empty_qgraph,
    field_reduce_qgraph,
    hexagon_qgraph,
    spread_complement_qgraph,
    spread_interior_qgraph,
    spread_partition_qgraph,
    symplectic_polar_qgraph,
)
from .errors import BudgetExceededError, QGraphError, ValidationError
from .finite_field import gf
from .orbit_scan import DEFAULT_BUDGET, classification_crosscheck, single_orbit_scan
from .qgraph import (
    QGraph,
    check_automorphisms,
    classical_counterpart,
    is_edge_transitive,
    is_flag_transitive,
    is_symmetric,
    is_vertex_transitive,
    partial_linear_space_check,
    regularity,
)

CONSTRUCTIONS = (
    "complete", "empty", "polar", "hexagon",
    "spread-partition", "spread-interior", "spread-complement",
)
FORMATS = ("json", "table", "graph6", "edgelist")


def _budget(q: int, n: int, heavy: bool) -> None:
    if n * math.log2(q) > DEFAULT_BUDGET + 1e-9 and not heavy:
        raise BudgetExceededError(f"GF({q})^{n} (n log2 q; pass --heavy)", round(n * math.log2(q), 2), DEFAULT_BUDGET)


def build_graph(args: argparse.Namespace) -> QGraph:
    name = args.construction
    if name == "hexagon":
        b = args.b or 1
        _budget(2**b, 6, args.heavy)
        G = hexagon_qgraph(b)
    else:
        if args.q is None or args.n is None:
            raise ValidationError(f"construction {name!r} needs --q and --n")
        F = gf(args.q)
        _budget(args.q, args.n, args.heavy)
        if name == "complete":
            G = complete_qgraph(F, args.n)
        elif name == "empty":
            G = empty_qgraph(F, args.n)
        elif name == "polar":
            G = symplectic_polar_qgraph(F, args.n)
        else:
            t = args.t or 2
            model = args.model or ("field" if args.group == "gammal1" else "blocks")
            S = desarguesian_spread(F, args.n, t, model)
            if name == "spread-partition":
                G = spread_partition_qgraph(S)
            elif name == "spread-interior":
                G = spread_interior_qgraph(S)
            else:
                G = spread_complement_qgraph(S)
    if args.reduce_to is not None:
        F = gf(args.reduce_to)
        _budget(F.q, G.n * (G.field.t // F.t) if G.field.p == F.p and G.field.t % F.t == 0 else G.n, args.heavy)
        G = field_reduce_qgraph(G, F)
    return G


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "config", "output"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_construct(args: argparse.Namespace) -> str:
    G = build_graph(args)
    fmt = args.export or args.format
    if fmt == "graph6":
        return classical_counterpart(G).to_graph6() + "\n"
    if fmt == "edgelist":
        return classical_counterpart(G).to_edgelist()
    reg = regularity(G)
    if fmt == "table":
        k = "-" if reg.k is None else reg.k
        return f"{args.construction} over GF({G.q})^{G.n}: {G.num_vertices} vertices, {len(G)} edges, k={k}\n"
    doc = {
        "tool_version": __version__,
        "config": _config_echo(args),
        "graph": G.to_json(),
        "num_vertices": G.num_vertices,
        "num_edges": len(G),
        "regularity": reg.to_json(),
    }
    return _dump(doc)


def cmd_verify(args: argparse.Namespace) -> str:
    if not args.group:
        raise ValidationError("verify needs --group")
    G = build_graph(args)
    grp = resolve_group(args.group, G.q, G.n, args.d, args.e, args.s, args.ext)
    check_automorphisms(G, grp)
    reg = regularity(G, grp)
    vt = is_vertex_transitive(G, grp, checked=True)
    et = is_edge_transitive(G, grp, checked=True)
    ft = is_flag_transitive(G, grp, checked=True)
    sym = is_symmetric(G, grp, checked=True)
    doc = {
        "tool_version": __version__,
        "config": _config_echo(args),
        "field": G.field.to_dict(),
        "n": G.n,
        "num_edges": len(G),
        "group": grp.name,
        "group_order": grp.order,
        "regular": reg.k,
        "vertex": bool(vt),
        "edge": bool(et),
        "flag": bool(ft),
        "symmetric": bool(sym),
        "partial_linear_space": partial_linear_space_check(G),
        "certificates": {
            "regularity": reg.to_json(),
            "vertex": vt.to_json(),
            "edge": et.to_json(),
            "flag": ft.to_json(),
            "symmetric": sym.to_json(),
        },
    }
    if args.format == "table":
        k = "-" if reg.k is None else reg.k
        return (
            f"{grp.name} on {args.construction} over GF({G.q})^{G.n}: k={k} vertex={bool(vt)} "
            f"edge={bool(et)} flag={bool(ft)} symmetric={bool(sym)}\n"
        )
    return _dump(doc)


def cmd_scan(args: argparse.Namespace) -> str:
    if args.catalog:
        groups = default_catalog() if args.catalog == "default" else extended_catalog()
        res = classification_crosscheck(groups, args.heavy, symmetric_iff_q2=args.catalog == "default")
        if args.format == "table":
            return res.to_table()
        doc = res.to_json()
        doc["config"] = _config_echo(args)
        return _dump(doc)
    if not args.group or args.q is None or args.n is None:
        raise ValidationError("scan needs --group, --q and --n (or --catalog)")
    _budget(args.q, args.n, args.heavy)
    grp = resolve_group(args.group, args.q, args.n, args.d, args.e, args.s, args.ext)
    rep = single_orbit_scan(grp, args.heavy)
    if args.format == "table":
        return rep.to_table()
    doc = rep.to_json()
    doc["config"] = _config_echo(args)
    return _dump(doc)


def _common(p: argparse.ArgumentParser, construction: bool) -> None:
    p.add_argument("--q", type=int, help="field order")
    p.add_argument("--n", type=int, help="ambient dimension")
    p.add_argument("--group", choices=GROUP_NAMES)
    p.add_argument("--d", type=int, help="gammal1: exponent of the cyclic part")
    p.add_argument("--e", type=int, help="gammal1: twist exponent")
    p.add_argument("--s", type=int, help="gammal1: Frobenius exponent")
    p.add_argument("--ext", type=int, help="reduced groups: extension degree")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--heavy", action="store_true", help="lift the default size budget")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    p.add_argument("--config", help="JSON file of option defaults")
    if construction:
        p.add_argument("construction", choices=CONSTRUCTIONS)
        p.add_argument("--t", type=int, help="spread element dimension")
        p.add_argument("--b", type=int, help="hexagon over GF(2^b)")
        p.add_argument("--model", choices=("blocks", "field"), help="spread coordinates")
        p.add_argument("--reduce-to", type=int, dest="reduce_to", help="field-reduce the graph to GF(this)")
        p.add_argument("--export", choices=("graph6", "edgelist"))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgraphs", description="Symmetric q-graphs over finite fields.")
    parser.add_argument("--version", action="version", version=f"qgraphs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("construct", help="build a q-graph")
    _common(p, True)
    p.set_defaults(func=cmd_construct)
    p = sub.add_parser("verify", help="check regularity and transitivity under a group")
    _common(p, True)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("scan", help="classify the orbits of a group on 2-spaces")
    _common(p, False)
    p.add_argument("--catalog", choices=("default", "extended"), help="cross-check a whole catalog")
    p.set_defaults(func=cmd_scan)
    return parser


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ValidationError("config file must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        out = args.func(args)
    except QGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
