"""Command-line interface: ``phylotoric <subcommand> ...``.

Exit codes: 0 on success, 1 on bad input, 2 when a resource budget runs out.
Settings come from flags, then environment variables
(``PHYLOTORIC_CACHE_DIR``, ``PHYLOTORIC_WORKERS``, ``PHYLOTORIC_MAX_SECONDS``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .binomial import Budget, BudgetExceeded, TermOrder
from .config import achievable_points, configuration, labeling_str
from .polytope import hull
from .tables import HEADERS, ResultCache, point_counts, table_csv, table_json
from .toric import conjecture_harness, groebner_basis, markov_basis, minimal_generators
from .trees import TreeError, enumerate_trees, parse_tree, path_tree, star_tree
from .viterbi import decode, is_viterbi_sequence


def tree_arg(text: str):
    """Tree from ``"n; p2 ... pn"``, a level sequence, ``path:N`` or ``star:N``."""
    kind, sep, size = text.partition(":")
    if sep and kind in ("path", "star"):
        try:
            n = int(size)
        except ValueError as exc:
            raise TreeError(f"bad node count in {text!r}") from exc
        return path_tree(n) if kind == "path" else star_tree(n)
    return parse_tree(text)


def _env(name: str, default=None, cast=str):
    value = os.environ.get(name)
    return cast(value) if value not in (None, "") else default


def _budget(args) -> Budget:
    seconds = args.max_seconds if args.max_seconds is not None else _env("PHYLOTORIC_MAX_SECONDS", None, float)
    return Budget(max_seconds=seconds) if seconds is not None else Budget()


def _order(args, nvars: int) -> TermOrder | None:
    if not args.weight:
        return None
    weight = [int(x) for x in args.weight.replace(",", " ").split()]
    if len(weight) != nvars:
        raise ValueError(f"weight has {len(weight)} entries, the ideal has {nvars} variables")
    return TermOrder(nvars, weight=weight)


def _emit_basis(gens, nvars: int, fmt: str) -> str:
    return gens.to_vectors_text(nvars) if fmt == "vectors" else gens.to_text()


def cmd_trees(args) -> str:
    return "".join(f"{t}\n" for t in enumerate_trees(args.n, args.family))


def cmd_table(args) -> str:
    cache_dir = args.cache_dir or _env("PHYLOTORIC_CACHE_DIR")
    workers = args.workers if args.workers is not None else _env("PHYLOTORIC_WORKERS", 1, int)
    render = table_json if args.format == "json" else table_csv
    out = render(args.which, args.n_max, extended=args.extended, workers=workers,
                 cache=ResultCache(cache_dir), budget=_budget(args))
    return out if out.endswith("\n") else out + "\n"


def cmd_points(args) -> str:
    if args.n > 16:
        raise ValueError("points: n is capped at 16 (every rooted tree is enumerated)")
    return json.dumps(point_counts(args.n), indent=2) + "\n"


def cmd_polytope(args) -> str:
    p = hull(achievable_points(args.tree))
    return p.to_off() if args.format == "off" else p.to_json() + "\n"


def cmd_markov(args) -> str:
    c = configuration(args.tree)
    fn = minimal_generators if args.minimal else markov_basis
    return _emit_basis(fn(c, method=args.method, budget=_budget(args)), c.num_columns, args.format)


def cmd_gb(args) -> str:
    c = configuration(args.tree)
    gb = groebner_basis(c, _order(args, c.num_columns), budget=_budget(args))
    return _emit_basis(gb, c.num_columns, args.format)


def cmd_viterbi(args) -> str:
    t = args.tree
    try:
        b = [Fraction(x) for x in args.b]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"log-parameters must be rationals: {exc}") from exc
    d = decode(t, b)
    points = achievable_points(t)
    p = hull(points)
    vertices = {tuple(v) for v in p.vertices}
    report = {
        "tree": str(t),
        "b": [str(x) for x in b],
        "value": str(d.value),
        "optimal_vectors": [
            {"vector": list(v), "is_vertex": tuple(v) in vertices, "multiplicity": points[v]}
            for v in d.vectors
        ],
        "witness": labeling_str(d.witness),
        "witness_is_viterbi_sequence": is_viterbi_sequence(t, d.witness, p, points),
    }
    return json.dumps(report, indent=2) + "\n"


def cmd_config(args) -> str:
    c = configuration(args.tree)
    return c.dedup_json() + "\n" if args.format == "json" else c.to_matrix_text()


def cmd_conjectures(args) -> str:
    return json.dumps(conjecture_harness(args.tree, budget=_budget(args)), indent=2, default=str) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phylotoric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def tree_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("tree", type=str, help='tree as "n; p2 ... pn", a level sequence, path:N or star:N')
        p.set_defaults(fn=fn)
        return p

    def budget_flag(p):
        p.add_argument("--max-seconds", type=float, default=None,
                       help="time budget (env PHYLOTORIC_MAX_SECONDS)")

    p = sub.add_parser("trees", help="list canonical trees on n nodes")
    p.add_argument("n", type=int)
    p.add_argument("--family", choices=["all", "binary", "path"], default="all")
    p.set_defaults(fn=cmd_trees)

    p = sub.add_parser("table", help="regenerate a results table as CSV")
    p.add_argument("which", type=int, choices=sorted(HEADERS))
    p.add_argument("n_max", type=int)
    p.add_argument("--extended", action="store_true", help="lift the desk-scale caps")
    p.add_argument("--workers", type=int, default=None, help="worker processes (env PHYLOTORIC_WORKERS)")
    p.add_argument("--cache-dir", default=None, help="result cache directory (env PHYLOTORIC_CACHE_DIR)")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="json keeps averages as exact fractions")
    budget_flag(p)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("points", help="distinct achievable-point counts for n = 1..N")
    p.add_argument("n", type=int)
    p.set_defaults(fn=cmd_points)

    p = tree_cmd("polytope", cmd_polytope, "polytope of the tree as JSON or OFF")
    p.add_argument("--format", choices=["json", "off"], default="json")

    p = tree_cmd("markov", cmd_markov, "generating set of the toric ideal")
    p.add_argument("--minimal", action="store_true", help="minimal generating set")
    p.add_argument("--method", choices=["elimination", "saturation"], default="elimination")
    p.add_argument("--format", choices=["text", "vectors"], default="text")
    budget_flag(p)

    p = tree_cmd("gb", cmd_gb, "reduced Groebner basis (degrevlex, optionally weighted)")
    p.add_argument("--weight", default="", help="comma-separated integer weights, one per labeling")
    p.add_argument("--format", choices=["text", "vectors"], default="text")
    budget_flag(p)

    p = tree_cmd("viterbi", cmd_viterbi, "decode with log-parameters b00 b01 b10 b11")
    p.add_argument("b", nargs=4, help="four rationals, e.g. 1/2 -3 0 2")

    p = tree_cmd("config", cmd_config, "configuration matrix, or its distinct columns as JSON")
    p.add_argument("--format", choices=["matrix", "json"], default="matrix")

    p = tree_cmd("conjectures", cmd_conjectures, "generator-degree report for one tree")
    budget_flag(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "tree"):
            args.tree = tree_arg(args.tree)
        out = args.fn(args)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except (TreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
