"""Toric ideal of a tree: kernel lattice, Markov basis, minimal generators,
Groebner bases, degree, and the conjecture probes.

Variables are indexed by labelings (binary order, labeling ``00...0`` is
variable 0 and the largest in every default order).  Heavy computations run
on the distinct columns only; duplicate columns contribute the linear
binomials ``x_u - x_v`` and are re-inserted afterwards.
"""

from __future__ import annotations

import random
import time
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .binomial import Budget, BudgetExceeded, TermOrder, groebner, saturate
from .config import Configuration, achievable_points, configuration, labeling_from_index, labeling_str
from .lattice import integer_kernel
from .polytope import hull, normalized_volume
from .trees import Tree

DEFAULT_VARIABLE_CAP = 128


class FiberTooLarge(BudgetExceeded):
    def __init__(self, target, limit):
        super().__init__(f"fiber of multidegree {tuple(target)} has more than {limit} monomials")
        self.target = tuple(target)


@dataclass(frozen=True)
class Binomial:
    """``x^plus - x^minus`` with sparse exponents keyed by labeling index."""

    n: int
    plus: tuple[tuple[int, int], ...]
    minus: tuple[tuple[int, int], ...]

    @classmethod
    def from_maps(cls, n: int, plus: Mapping[int, int], minus: Mapping[int, int]) -> "Binomial":
        return cls(n, tuple(sorted((v, e) for v, e in plus.items() if e)),
                   tuple(sorted((v, e) for v, e in minus.items() if e)))

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.plus)

    def vector(self, nvars: int) -> list[int]:
        out = [0] * nvars
        for v, e in self.plus:
            out[v] += e
        for v, e in self.minus:
            out[v] -= e
        return out

    def normalized(self) -> "Binomial":
        """Sign-normalised copy: the side with the smaller sorted support first."""
        if self.minus < self.plus:
            return Binomial(self.n, self.minus, self.plus)
        return self

    def _monomial_str(self, mono) -> str:
        parts = []
        for v, e in mono:
            name = f"x_{{{labeling_str(labeling_from_index(v, self.n))}}}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts) if parts else "1"

    def __str__(self) -> str:
        return f"{self._monomial_str(self.plus)} - {self._monomial_str(self.minus)}"


@dataclass
class GeneratingSet:
    binomials: list[Binomial]
    is_minimal: bool = False
    reduced_groebner: bool = False
    order: TermOrder | None = None

    @property
    def degree_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(b.degree for b in self.binomials).items()))

    @property
    def max_degree(self) -> int:
        return max((b.degree for b in self.binomials), default=0)

    def __len__(self) -> int:
        return len(self.binomials)

    @property
    def count_without_linear(self) -> int:
        return sum(1 for b in self.binomials if b.degree > 1)

    def to_vectors_text(self, nvars: int) -> str:
        """Line format: header ``count nvars`` then two exponent rows per binomial."""
        lines = [f"{len(self.binomials)} {nvars}"]
        for b in self.binomials:
            for mono in (b.plus, b.minus):
                row = [0] * nvars
                for v, e in mono:
                    row[v] = e
                lines.append(" ".join(map(str, row)))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        return "\n".join(str(b) for b in self.binomials) + "\n"


@dataclass
class KernelLattice:
    basis: list[list[int]]

    @property
    def rank(self) -> int:
        return len(self.basis)


# ---------------------------------------------------------------------------
# Distinct-column reduction


@dataclass
class _Reduced:
    """Toric ideal restricted to one representative variable per column."""

    config: Configuration
    columns: list[tuple[int, ...]]
    reps: list[int]                        # labeling index standing for each column
    linear: list[tuple[int, int]]          # (other, rep) pairs, other - rep in the ideal

    @property
    def nvars(self) -> int:
        return len(self.columns)

    def lift(self, a, b) -> Binomial:
        plus = {self.reps[i]: e for i, e in enumerate(a) if e}
        minus = {self.reps[i]: e for i, e in enumerate(b) if e}
        return Binomial.from_maps(self.config.n, plus, minus)

    def degree_of(self, m) -> int:
        return sum(m)

    def multidegree(self, m) -> tuple[int, ...]:
        out = [0, 0, 0, 0]
        for i, e in enumerate(m):
            if e:
                col = self.columns[i]
                for r in range(4):
                    out[r] += e * col[r]
        return tuple(out)


def _reduce(c: Configuration, order: TermOrder | None = None) -> _Reduced:
    columns, reps, linear = [], [], []
    for vec, labelings in c.classes.items():
        if order is None:
            rep = labelings[0]
        else:
            rep = min(labelings, key=lambda v: order.key(_unit(v, order.nvars)))
        columns.append(tuple(vec))
        reps.append(rep)
        linear.extend((v, rep) for v in labelings if v != rep)
    return _Reduced(c, columns, reps, sorted(linear))


def _unit(v: int, nvars: int) -> tuple[int, ...]:
    return tuple(int(i == v) for i in range(nvars))


def _check_cap(c: Configuration, cap: int) -> None:
    if c.num_columns > cap:
        raise BudgetExceeded(f"{c.num_columns} variables exceed the variable cap of {cap}")


def _linear_binomials(red: _Reduced, order: TermOrder | None = None) -> list[Binomial]:
    out = []
    for other, rep in red.linear:
        if order is None:
            out.append(Binomial.from_maps(red.config.n, {other: 1}, {rep: 1}).normalized())
        else:
            out.append(Binomial.from_maps(red.config.n, {other: 1}, {rep: 1}))
    return out


# ---------------------------------------------------------------------------
# Kernel and Markov basis


def lattice_kernel(c: Configuration) -> KernelLattice:
    """Saturated integer basis of ``ker(A_T)`` over all ``2^n`` variables."""
    return KernelLattice(integer_kernel(c.matrix.tolist()))


def _split(v: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(x if x > 0 else 0 for x in v), tuple(-x if x < 0 else 0 for x in v)


def _engine_markov(red: _Reduced, method: str, budget: Budget):
    k = red.nvars
    if k <= 1:
        return []
    if method == "saturation":
        cols = [list(r) for r in zip(*red.columns)]
        basis = integer_kernel(cols)
        gens = [_split(v) for v in basis]
        # The last saturation runs under a degrevlex with variable k-1 last,
        # which is the default order on the distinct columns.
        return saturate(gens, k, budget=budget)
    if method == "elimination":
        return _eliminate(red, TermOrder(k), budget)
    raise ValueError(f"unknown Markov basis method {method!r}")


def _eliminate(red: _Reduced, order: TermOrder, budget: Budget):
    """Groebner basis of ``<x_j - t^{a_j}>`` under an elimination order, t-free part."""
    k = red.nvars
    n1 = max(sum(red.columns[0]), 1)
    nv = k + 4
    grading = (n1,) * k + (1,) * 4
    t_order = TermOrder(4)

    def key(m):
        x, t = m[:k], m[k:]
        return (sum(t), order.key(x), t_order.key(t))

    big = TermOrder(nv, grading=grading)
    gens = []
    for j, col in enumerate(red.columns):
        gens.append((tuple(int(i == j) for i in range(k)) + (0, 0, 0, 0),
                     (0,) * k + tuple(col)))
    basis = groebner(gens, big, saturated=True, budget=budget, key=key)
    return [(a[:k], b[:k]) for a, b in basis if not any(a[k:]) and not any(b[k:])]


_MARKOV_CACHE: dict = {}


def _reduced_markov(c: Configuration, method: str, budget: Budget | None):
    key = (str(c.tree), method)
    if key not in _MARKOV_CACHE:
        budget = (budget or Budget()).restart()
        red = _reduce(c)
        _MARKOV_CACHE[key] = (red, _engine_markov(red, method, budget))
    return _MARKOV_CACHE[key]


def markov_basis(c: Configuration, method: str = "elimination", budget: Budget | None = None,
                 variable_cap: int = DEFAULT_VARIABLE_CAP) -> GeneratingSet:
    """A generating set of the toric ideal (not necessarily minimal)."""
    _check_cap(c, variable_cap)
    red, gens = _reduced_markov(c, method, budget)
    out = _linear_binomials(red) + [red.lift(a, b) for a, b in gens]
    return GeneratingSet(out, is_minimal=False)


# ---------------------------------------------------------------------------
# Fibers


def enumerate_fiber(columns: Sequence[Sequence[int]], target: Sequence[int], degree: int,
                    limit: int | None = None) -> list[tuple[int, ...]]:
    """All exponent vectors ``u`` with ``sum(u) = degree`` and ``A u = target``."""
    k = len(columns)
    cols = [tuple(col) for col in columns]
    out: list[tuple[int, ...]] = []
    cur = [0] * k

    def rec(j, rem, d):
        if d == 0:
            if not any(rem):
                out.append(tuple(cur))
                if limit is not None and len(out) > limit:
                    raise FiberTooLarge(target, limit)
            return
        if j == k:
            return
        col = cols[j]
        # Largest multiplicity allowed by the remaining target.
        top = d
        for r, x in zip(rem, col):
            if x:
                top = min(top, r // x)
        for e in range(top, -1, -1):
            cur[j] = e
            rec(j + 1, tuple(r - e * x for r, x in zip(rem, col)), d - e)
        cur[j] = 0

    rec(0, tuple(target), degree)
    return out


def fiber_components(fiber: Sequence[tuple[int, ...]]) -> list[list[tuple[int, ...]]]:
    """Components of the graph joining monomials that share a variable."""
    parent = list(range(len(fiber)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_with: dict[int, int] = {}
    for idx, m in enumerate(fiber):
        for v, e in enumerate(m):
            if e:
                if v in first_with:
                    ra, rb = find(first_with[v]), find(idx)
                    if ra != rb:
                        parent[ra] = rb
                else:
                    first_with[v] = idx
    groups: dict[int, list] = defaultdict(list)
    for idx, m in enumerate(fiber):
        groups[find(idx)].append(m)
    return list(groups.values())


def fiber_connected(fiber: Sequence[tuple[int, ...]], moves: Sequence[tuple[tuple[int, ...], tuple[int, ...]]]) -> bool:
    """Is the fiber connected by the moves ``u -> u - a + b`` (either direction)?"""
    if len(fiber) <= 1:
        return True
    members = set(fiber)
    start = fiber[0]
    seen = {start}
    stack = [start]
    both = list(moves) + [(b, a) for a, b in moves]
    while stack:
        m = stack.pop()
        for a, b in both:
            if all(x >= y for x, y in zip(m, a)):
                q = tuple(x - y + z for x, y, z in zip(m, a, b))
                if q not in seen and q in members:
                    seen.add(q)
                    stack.append(q)
    return len(seen) == len(members)


# ---------------------------------------------------------------------------
# Minimal generators


def _minimal_reduced(red: _Reduced, gens, budget: Budget) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    order = TermOrder(red.nvars)
    targets = {}
    for a, b in gens:
        md = red.multidegree(a)
        targets.setdefault(md, sum(a))
    out = []
    for md, deg in sorted(targets.items(), key=lambda kv: (kv[1], kv[0])):
        fiber = enumerate_fiber(red.columns, md, deg, limit=budget.max_fiber)
        comps = fiber_components(fiber)
        if len(comps) < 2:
            continue
        reps = sorted((max(comp, key=order.key) for comp in comps), key=order.key, reverse=True)
        for r in reps[1:]:
            out.append((reps[0], r))
    return out


def minimal_generators(c: Configuration, method: str = "elimination", budget: Budget | None = None,
                       variable_cap: int = DEFAULT_VARIABLE_CAP) -> GeneratingSet:
    """A minimal generating set, including the linear binomials of duplicate columns.

    A fiber of degree ``d`` needs ``k - 1`` generators of that multidegree,
    where ``k`` counts the classes of its monomials under "share a
    variable", since exactly those pairs are already joined by relations
    of lower degree.  Only multidegrees occurring in a Markov basis can
    carry minimal generators.
    """
    _check_cap(c, variable_cap)
    budget = budget or Budget()
    red, gens = _reduced_markov(c, method, budget)
    mins = _minimal_reduced(red, gens, budget)
    out = _linear_binomials(red) + [red.lift(a, b) for a, b in mins]
    return GeneratingSet(out, is_minimal=True)


def is_minimal_generating_set(columns, gens) -> bool:
    """Removing any generator disconnects the fiber of its own multidegree.

    ``gens`` are ``(a, b)`` exponent pairs over ``columns``; moves of higher
    degree cannot act on that fiber, so only lower or equal degrees count.
    """
    for idx, (a, b) in enumerate(gens):
        md = tuple(sum(e * col[r] for e, col in zip(a, columns)) for r in range(4))
        fiber = enumerate_fiber(columns, md, sum(a))
        others = [g for j, g in enumerate(gens) if j != idx and sum(g[0]) <= sum(a)]
        if fiber_connected(fiber, others):
            return False
    return True


# ---------------------------------------------------------------------------
# Groebner bases


def default_order(c: Configuration) -> TermOrder:
    return TermOrder(c.num_columns)


def groebner_basis(c: Configuration, order: TermOrder | None = None, budget: Budget | None = None,
                   method: str = "elimination", variable_cap: int = DEFAULT_VARIABLE_CAP) -> GeneratingSet:
    """Reduced Groebner basis of the toric ideal under ``order`` (default degrevlex)."""
    _check_cap(c, variable_cap)
    order = order or default_order(c)
    if order.nvars != c.num_columns:
        raise ValueError(f"order has {order.nvars} variables, ideal has {c.num_columns}")
    budget = budget or Budget()
    base, gens = _reduced_markov(c, method, budget)
    red = _reduce(c, order)
    sub = order.restricted(red.reps)
    # Re-express the Markov basis in the order-dependent representatives.
    pos = {vec: i for i, vec in enumerate(red.columns)}
    remap = [pos[col] for col in base.columns]

    def move(m):
        out = [0] * red.nvars
        for i, e in enumerate(m):
            out[remap[i]] += e
        return tuple(out)

    gb = groebner([(move(a), move(b)) for a, b in gens], sub, saturated=True, budget=budget.restart())
    out = _linear_binomials(red, order) + [red.lift(a, b) for a, b in gb]
    return GeneratingSet(out, reduced_groebner=True, order=order)


def random_weight_order(nvars: int, rng: random.Random, spread: int = 20) -> TermOrder:
    return TermOrder(nvars, weight=[rng.randint(0, spread) for _ in range(nvars)])


def _excess_degree(gb: GeneratingSet) -> int:
    return sum(b.degree - 2 for b in gb.binomials if b.degree > 2)


def quadratic_groebner_search(c: Configuration, seed: int = 0, max_tries: int = 5000,
                              max_seconds: float = 600.0, stop_after: int = 1,
                              patience: int = 60) -> dict:
    """Look for weight orders whose reduced Groebner basis has degree <= 2.

    Quadratic bases are rare among random weights, so each random start is
    improved by a seeded local search: change one weight at a time and keep
    the move when the total excess degree ``sum(deg - 2)`` over the basis
    does not grow.  A start is abandoned after ``patience`` moves without
    a strict improvement.  Every basis computed counts as one try.
    """
    rng = random.Random(seed)
    start = time.monotonic()
    found: dict[tuple, dict] = {}
    tries = restarts = 0
    degrees = Counter()

    def budget_left() -> bool:
        return (tries < max_tries and time.monotonic() - start < max_seconds
                and len(found) < stop_after)

    def evaluate(weight):
        nonlocal tries
        tries += 1
        gb = groebner_basis(c, TermOrder(c.num_columns, weight=weight), budget=Budget(max_seconds=max_seconds))
        degrees[gb.max_degree] += 1
        if gb.max_degree <= 2:
            key = tuple(sorted(str(b) for b in gb.binomials))
            found.setdefault(key, {"weight": list(weight), "size": len(gb)})
        return _excess_degree(gb)

    while budget_left():
        restarts += 1
        weight = list(random_weight_order(c.num_columns, rng).weight)
        score = evaluate(weight)
        stall = 0
        while score > 0 and stall < patience and budget_left():
            trial = list(weight)
            j = rng.randrange(len(trial))
            trial[j] = max(0, trial[j] + rng.choice((-3, -2, -1, 1, 2, 3)))
            s = evaluate(trial)
            stall = 0 if s < score else stall + 1
            if s <= score:
                weight, score = trial, s
    return {
        "found": bool(found),
        "distinct_quadratic": len(found),
        "tries": tries,
        "restarts": restarts,
        "seconds": round(time.monotonic() - start, 3),
        "max_degree_histogram": dict(sorted(degrees.items())),
        "weights": [f["weight"] for f in found.values()],
    }


# ---------------------------------------------------------------------------
# Degree


def ideal_degree(c: Configuration) -> int:
    """Degree of the toric ideal as the normalized volume of the polytope."""
    pts = list(c.classes)
    return normalized_volume(hull(pts), pts)


def ideal_degree_of_tree(t: Tree) -> int:
    pts = list(achievable_points(t))
    return normalized_volume(hull(pts), pts)


def hilbert_numerator(gens: Sequence[tuple[int, ...]], nvars: int) -> list[int]:
    """Numerator ``K(t)`` of the Hilbert series ``K(t) / (1-t)^nvars`` of ``S/M``.

    ``gens`` are exponent vectors of monomial generators of ``M``.
    """
    return _kpoly(_minimalize(gens))


def _minimalize(gens):
    gens = sorted(set(tuple(g) for g in gens), key=sum)
    out = []
    for g in gens:
        if not any(all(x <= y for x, y in zip(h, g)) for h in out):
            out.append(g)
    return out


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_add(p, q):
    out = [0] * max(len(p), len(q))
    for i, a in enumerate(p):
        out[i] += a
    for i, a in enumerate(q):
        out[i] += a
    return out


def _kpoly(gens):
    if not gens:
        return [1]
    # Pairwise coprime generators: product of (1 - t^deg).
    masks = [sum(1 << i for i, e in enumerate(g) if e) for g in gens]
    acc = 0
    coprime = True
    for m in masks:
        if acc & m:
            coprime = False
            break
        acc |= m
    if coprime:
        out = [1]
        for g in gens:
            d = sum(g)
            out = _poly_mul(out, [1] + [0] * (d - 1) + [-1])
        return out
    # Pivot on the most frequent variable: S/M -> S/(M + x) and t * S/(M : x).
    counts = Counter(i for g in gens for i, e in enumerate(g) if e)
    v = max(counts, key=lambda i: (counts[i], -i))
    unit = tuple(int(i == v) for i in range(len(gens[0])))
    plus = _minimalize([g for g in gens if g[v] == 0] + [unit])
    colon = _minimalize([g[:v] + (max(g[v] - 1, 0),) + g[v + 1:] for g in gens])
    return _poly_add(_kpoly(plus), [0] + _kpoly(colon))


def degree_from_initial_ideal(leads: Sequence[tuple[int, ...]], nvars: int) -> tuple[int, int]:
    """(Krull dimension, degree) of ``S/M`` for the monomial ideal with generators ``leads``."""
    k = hilbert_numerator(leads, nvars)
    while len(k) > 1 and k[-1] == 0:
        k.pop()
    codim = 0
    # Divide by (1 - t) while t = 1 is a root.
    while sum(k) == 0 and len(k) > 1:
        q = []
        acc = 0
        for a in k[:-1]:
            acc += a
            q.append(acc)
        k = q
        codim += 1
    return nvars - codim, sum(k)


def ideal_degree_groebner(c: Configuration, budget: Budget | None = None) -> tuple[int, int]:
    """(Krull dimension, degree) read off the initial ideal of the degrevlex basis."""
    gb = groebner_basis(c, budget=budget)
    nvars = c.num_columns
    leads = []
    for b in gb.binomials:
        row = [0] * nvars
        for v, e in b.plus:
            row[v] = e
        leads.append(tuple(row))
    return degree_from_initial_ideal(leads, nvars)


# ---------------------------------------------------------------------------
# Conjectures


def conjecture_harness(t: Tree, budget: Budget | None = None) -> dict:
    """Report the generator structure against the degree conjectures."""
    c = configuration(t)
    gens = minimal_generators(c, budget=budget)
    hist = gens.degree_histogram
    report = {
        "tree": str(t),
        "n": t.n,
        "minimal_generators": len(gens),
        "without_linear": gens.count_without_linear,
        "degree_histogram": hist,
        "max_degree": gens.max_degree,
        "degree": ideal_degree(c),
    }
    counts = {len(ch) for ch in t.children[1:] if ch}
    if t.is_binary or len(counts) == 1:
        report["equal_children"] = sorted(counts)
        report["generated_in_degree_2"] = gens.max_degree <= 2
    if t.is_path:
        report["path_max_degree_3"] = gens.max_degree == 3
        report["path_cubics"] = hist.get(3, 0)
        report["path_cubics_expected"] = 2 * t.n - 4
        report["path_cubics_match"] = hist.get(3, 0) == 2 * t.n - 4
    report["has_degree_n_generator"] = gens.max_degree >= t.n
    return report


def scan_max_degrees(trees: Iterable[Tree], budget: Budget | None = None) -> list[dict]:
    """Max generator degree of every tree, flagging those that need degree n."""
    rows = []
    for t in trees:
        gens = minimal_generators(configuration(t), budget=budget)
        rows.append({"tree": str(t), "n": t.n, "max_degree": gens.max_degree,
                     "count": len(gens), "degree_n": gens.max_degree >= t.n})
    return rows


def relation_holds(b: Binomial, c: Configuration) -> bool:
    """Do both monomials map to the same parameter monomial?"""
    def image(mono):
        out = [0, 0, 0, 0]
        for v, e in mono:
            col = c.column(v)
            for r in range(4):
                out[r] += e * col[r]
        return out
    return image(b.plus) == image(b.minus) and b.degree == sum(e for _, e in b.minus)
