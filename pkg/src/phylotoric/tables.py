"""Drivers that regenerate the polytope census and the ideal tables.

Per-tree results can be cached on disk as JSON records addressed by
(canonical tree string, computation kind, engine version).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Iterable

from . import ENGINE_VERSION
from .binomial import Budget
from .config import achievable_points, configuration
from .polytope import hull, normalized_volume
from .toric import minimal_generators
from .trees import Tree, enumerate_binary_trees, enumerate_rooted_trees, path_tree


class CapExceeded(ValueError):
    """``n_max`` is beyond the desk-scale cap and ``extended`` was not set."""


# (bases cap, degree cap) for the generator tables; node cap for the census tables.
CAPS = {1: (7, 11), 2: (6, 11), 3: 23, 4: 10}
EXTENDED_CAPS = {1: (11, 23), 2: (11, 40), 3: 31, 4: 15}

HEADERS = {
    1: ["tree", "Degree of I_T", "#Minimal Generators", "Max degree of generator"],
    2: ["# of nodes", "Degree of I_T", "#Minimal Generators", "Max degree", "Number of deg 3"],
    3: ["Number of nodes", "Number of binary trees", "Min vertices", "Max vertices", "Ave vertices"],
    4: ["Number of nodes", "Number of trees", "Min vertices", "Max vertices", "Ave vertices"],
}


def format_average(x: Fraction) -> str:
    """Half-up rounding to 2 decimals, trailing zeros dropped (``9.70 -> 9.7``)."""
    d = (Decimal(x.numerator) / Decimal(x.denominator)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


# ---------------------------------------------------------------------------
# Result cache


class ResultCache:
    """Directory of JSON records keyed by tree, kind and engine version."""

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None
        self.hits = 0
        self.misses = 0
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, tree: str, kind: str) -> Path:
        digest = hashlib.sha256(f"{tree}|{kind}|{ENGINE_VERSION}".encode()).hexdigest()
        return self.root / f"{digest}.json"

    def get(self, tree: str, kind: str):
        if not self.root:
            return None
        path = self._path(tree, kind)
        if not path.exists():
            return None
        record = json.loads(path.read_text())
        if record.get("engine_version") != ENGINE_VERSION:
            return None
        self.hits += 1
        return record["payload"]

    def put(self, tree: str, kind: str, payload: dict, seconds: float) -> None:
        if not self.root:
            return
        record = {"tree": tree, "kind": kind, "engine_version": ENGINE_VERSION,
                  "payload": payload, "seconds": round(seconds, 6)}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(record, fh, sort_keys=True)
        os.replace(tmp, self._path(tree, kind))

    def compute(self, t: Tree, kind: str, fn: Callable[[Tree], dict]) -> dict:
        key = str(t.canonical())
        cached = self.get(key, kind)
        if cached is not None:
            return cached
        self.misses += 1
        start = time.perf_counter()
        payload = fn(t)
        self.put(key, kind, payload, time.perf_counter() - start)
        return payload


# ---------------------------------------------------------------------------
# Per-tree computations


def polytope_record(t: Tree) -> dict:
    pts = list(achievable_points(t))
    p = hull(pts)
    out = {"fvector": list(p.fvector), "dim": p.dim, "points": len(pts)}
    if p.dim == 3:
        out["degree"] = normalized_volume(p, pts)
    return out


def generators_record(t: Tree, budget: Budget | None = None) -> dict:
    gens = minimal_generators(configuration(t), budget=budget)
    return {"count": len(gens), "without_linear": gens.count_without_linear,
            "max_degree": gens.max_degree,
            "histogram": {str(k): v for k, v in gens.degree_histogram.items()}}


def _map(fn, trees: list, workers: int):
    if workers <= 1 or len(trees) < 2 * workers:
        return [fn(t) for t in trees]
    with Pool(workers) as pool:
        # imap keeps input order, so the merge is deterministic.
        return list(pool.imap(fn, trees, chunksize=max(1, len(trees) // (8 * workers))))


def _vertex_count(t: Tree) -> int:
    return len(hull(achievable_points(t)).vertices)


@dataclass(frozen=True)
class CensusRow:
    n: int
    count: int
    min_vertices: int
    max_vertices: int
    mean_vertices: Fraction
    argmax: str = ""
    argmax_fvector: tuple = ()

    def csv_fields(self) -> list:
        return [self.n, self.count, self.min_vertices, self.max_vertices, format_average(self.mean_vertices)]

    def raw_fields(self) -> list:
        return [self.n, self.count, self.min_vertices, self.max_vertices, str(self.mean_vertices)]


def census(trees: Iterable[Tree], workers: int = 1, cache: ResultCache | None = None) -> list[CensusRow]:
    """Per node count: tree count and min / max / mean vertex count of the polytope."""
    trees = list(trees)
    if cache is not None and cache.root:
        records = [cache.compute(t, "polytope", polytope_record) for t in trees]
        counts = [r["fvector"][0] for r in records]
    else:
        counts = _map(_vertex_count, trees, workers)
    by_n: dict[int, list] = {}
    for t, v in zip(trees, counts):
        by_n.setdefault(t.n, []).append((v, t))
    rows = []
    for n in sorted(by_n):
        items = by_n[n]
        vs = [v for v, _ in items]
        top_v, top_t = max(items, key=lambda it: it[0])  # first maximizer in enumeration order
        rows.append(CensusRow(n, len(vs), min(vs), max(vs), Fraction(sum(vs), len(vs)),
                              str(top_t), tuple(hull(achievable_points(top_t)).fvector)))
    return rows


# ---------------------------------------------------------------------------
# Tables


def _check(which: int, n_max: int, extended: bool) -> None:
    caps = EXTENDED_CAPS if extended else CAPS
    cap = caps[which] if which in (3, 4) else caps[which][1]
    if n_max > cap:
        hint = "" if extended else " (use --extended for longer runs)"
        raise CapExceeded(f"table {which}: n_max={n_max} exceeds the cap of {cap}{hint}")


def table_rows(which: int, n_max: int, extended: bool = False, workers: int = 1,
               cache: ResultCache | None = None, budget: Budget | None = None,
               raw: bool = False) -> list[list]:
    """Table rows in column order; ``raw`` keeps averages as exact fractions."""
    if which not in HEADERS:
        raise ValueError(f"unknown table {which}; expected 1, 2, 3 or 4")
    _check(which, n_max, extended)
    cache = cache or ResultCache(None)
    caps = EXTENDED_CAPS if extended else CAPS
    if which in (3, 4):
        if which == 3:
            trees = [t for n in range(3, n_max + 1, 2) for t in enumerate_binary_trees(n)]
        else:
            trees = [t for n in range(3, n_max + 1) for t in enumerate_rooted_trees(n)]
        rows = census(trees, workers=workers, cache=cache)
        return [row.raw_fields() if raw else row.csv_fields() for row in rows]
    bases_cap = caps[which][0]
    rows = []
    if which == 1:
        for n in range(3, n_max + 1, 2):
            for t in enumerate_binary_trees(n):
                rows.append([str(t)] + _ideal_fields(t, n <= bases_cap, cache, budget)[:3])
    else:
        for n in range(3, n_max + 1):
            t = path_tree(n)
            rows.append([n] + _ideal_fields(t, n <= bases_cap, cache, budget))
    return rows


def _ideal_fields(t: Tree, with_bases: bool, cache: ResultCache, budget) -> list:
    poly = cache.compute(t, "polytope", polytope_record)
    if not with_bases:
        return [poly["degree"], "", "", ""]
    gens = cache.compute(t, "generators", lambda tt: generators_record(tt, budget))
    return [poly["degree"], gens["count"], gens["max_degree"], gens["histogram"].get("3", 0)]


def table_json(which: int, n_max: int, **kwargs) -> str:
    rows = table_rows(which, n_max, raw=True, **kwargs)
    return json.dumps({"table": which, "columns": HEADERS[which], "rows": rows}, indent=2)


def point_counts(n_max: int) -> list[dict]:
    """Distinct achievable points per node count: range over all trees, plus path and star."""
    out = []
    for n in range(1, n_max + 1):
        counts = [(len(achievable_points(t)), t) for t in enumerate_rooted_trees(n)]
        top = max(counts, key=lambda c: c[0])
        out.append({"n": n, "trees": len(counts), "min": min(c for c, _ in counts), "max": top[0],
                    "argmax": str(top[1]), "path": len(achievable_points(path_tree(n))) if n > 1 else 1})
    return out


def table_csv(which: int, n_max: int, **kwargs) -> str:
    rows = table_rows(which, n_max, **kwargs)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADERS[which])
    writer.writerows(rows)
    return buf.getvalue()
