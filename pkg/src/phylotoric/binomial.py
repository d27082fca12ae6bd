"""Buchberger's algorithm specialised to pure difference binomials.

A binomial ``x^a - x^b`` is stored as a pair of dense exponent tuples with
the leading monomial first.  S-pairs and reductions of such binomials are
again of that shape, so only exponent arithmetic is ever needed.

Variables whose common powers may be cancelled are given by a bitmask:
for a lattice ideal (saturated by construction) all of them, for the
intermediate ideals of a saturation run only those already saturated.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

Monomial = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """Raised when a computation hits one of its resource limits."""


@dataclass
class Budget:
    max_seconds: float | None = 600.0
    max_pairs: int | None = 5_000_000
    max_basis: int | None = 200_000
    max_fiber: int | None = 1_000_000
    _start: float = field(default_factory=time.monotonic, repr=False)

    def restart(self) -> "Budget":
        self._start = time.monotonic()
        return self

    def check_time(self, what: str) -> None:
        if self.max_seconds is not None and time.monotonic() - self._start > self.max_seconds:
            raise BudgetExceeded(f"{what}: time budget of {self.max_seconds}s exhausted")


class TermOrder:
    """Degree-compatible monomial order on ``nvars`` variables.

    ``revlex_order`` lists the variables from largest to smallest for the
    reverse-lexicographic tie break (default ``0, 1, ..., nvars-1``).  An
    optional integer ``weight`` is compared after the total degree.
    """

    def __init__(self, nvars: int, weight: Sequence[int] | None = None,
                 revlex_order: Sequence[int] | None = None,
                 grading: Sequence[int] | None = None):
        self.nvars = nvars
        self.weight = tuple(weight) if weight is not None else None
        perm = tuple(revlex_order) if revlex_order is not None else tuple(range(nvars))
        if sorted(perm) != list(range(nvars)):
            raise ValueError("revlex_order must be a permutation of the variables")
        self.revlex_order = perm
        self._rev = tuple(reversed(perm))
        self.grading = tuple(grading) if grading is not None else (1,) * nvars

    @property
    def kind(self) -> str:
        return "degrevlex" if self.weight is None else "weight-then-degrevlex"

    def key(self, m: Monomial):
        deg = sum(g * e for g, e in zip(self.grading, m))
        tail = tuple(-m[i] for i in self._rev)
        if self.weight is None:
            return (deg, tail)
        return (deg, sum(w * e for w, e in zip(self.weight, m)), tail)

    def restricted(self, keep: Sequence[int]) -> "TermOrder":
        """The induced order on the variables listed in ``keep`` (re-indexed)."""
        pos = {v: k for k, v in enumerate(keep)}
        perm = [pos[v] for v in self.revlex_order if v in pos]
        w = None if self.weight is None else [self.weight[v] for v in keep]
        return TermOrder(len(keep), w, perm, [self.grading[v] for v in keep])

    def __repr__(self):
        return f"TermOrder({self.kind}, nvars={self.nvars}, weight={self.weight})"


@dataclass
class _Elem:
    lead: Monomial
    trail: Monomial
    lmask: int
    tmask: int
    deg: int


def _mask(m: Monomial) -> int:
    out = 0
    for i, e in enumerate(m):
        if e:
            out |= 1 << i
    return out


def _divides(a: Monomial, b: Monomial) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x > y else y for x, y in zip(a, b))


class BinomialGB:
    """Incremental Buchberger state for one ideal and one term order."""

    def __init__(self, nvars: int, order: TermOrder, key: Callable | None = None,
                 cancel_mask: int = 0, saturated: bool = False,
                 budget: Budget | None = None):
        self.nvars = nvars
        self.order = order
        self.key = key or order.key
        self.grading = order.grading
        self.cancel_mask = cancel_mask
        # In a saturated ideal, a pair whose trailing terms share a
        # variable factors through a lower-degree element.
        self.saturated = saturated
        self.budget = budget or Budget()
        self.elems: list[_Elem] = []
        self.reducers: list[int] = []
        self._pairs: list = []
        self._dead: set = set()
        self._seq = 0
        self.pairs_done = 0

    # -- reduction -----------------------------------------------------
    def normal_form(self, m: Monomial) -> Monomial:
        elems = self.elems
        reducers = self.reducers
        while True:
            mm = _mask(m)
            for idx in reducers:
                g = elems[idx]
                if g.lmask & ~mm == 0 and _divides(g.lead, m):
                    m = tuple(x - a + b for x, a, b in zip(m, g.lead, g.trail))
                    break
            else:
                return m

    def _make(self, a: Monomial, b: Monomial) -> _Elem | None:
        a = self.normal_form(a)
        b = self.normal_form(b)
        if a == b:
            return None
        if self.cancel_mask:
            cm = self.cancel_mask
            common = [min(x, y) if (cm >> i) & 1 else 0 for i, (x, y) in enumerate(zip(a, b))]
            if any(common):
                a = tuple(x - c for x, c in zip(a, common))
                b = tuple(y - c for y, c in zip(b, common))
        ka, kb = self.key(a), self.key(b)
        if ka < kb:
            a, b = b, a
        return _Elem(a, b, _mask(a), _mask(b), self._deg(a))

    def _deg(self, m: Monomial) -> int:
        return sum(g * e for g, e in zip(self.grading, m))

    # -- pair bookkeeping (Gebauer-Moeller update) ----------------------
    def _install(self, h: _Elem) -> None:
        j = len(self.elems)
        self.elems.append(h)
        hl = h.lead
        # Old pairs whose lcm is divisible by lm(h) and differs from both new lcms.
        if self._pairs:
            for entry in self._pairs:
                _, _, a, b, lcm_ab = entry
                if (a, b) in self._dead:
                    continue
                if _divides(hl, lcm_ab):
                    if _lcm(self.elems[a].lead, hl) != lcm_ab and _lcm(self.elems[b].lead, hl) != lcm_ab:
                        self._dead.add((a, b))
        # New pairs: keep those whose lcm is minimal among the new lcms.
        cands = []
        for i in range(j):
            g = self.elems[i]
            lcm = _lcm(g.lead, hl)
            excess = tuple(x - y if x > y else 0 for x, y in zip(g.lead, hl))
            coprime = (g.lmask & h.lmask) == 0
            cands.append((sum(excess), excess, _mask(excess), coprime, i, lcm))
        cands.sort(key=lambda c: (c[0], not c[3], c[4]))
        kept: list = []
        seen_excess: dict = {}
        for tot, excess, emask, coprime, i, lcm in cands:
            if excess in seen_excess:
                continue  # same lcm as an earlier candidate
            dominated = False
            for _, e2, m2, _c2 in kept:
                if m2 & ~emask == 0 and _divides(e2, excess):
                    dominated = True
                    break
            seen_excess[excess] = coprime
            if dominated:
                continue
            kept.append((tot, excess, emask, coprime))
            if coprime:
                continue
            g = self.elems[i]
            if self.saturated and (g.tmask & h.tmask):
                continue
            self._seq += 1
            heapq.heappush(self._pairs, (self._deg(lcm), self._seq, i, j, lcm))
        # Reducers: keep only elements with minimal leading terms.
        self.reducers = [k for k in self.reducers
                         if not (h.lmask & ~self.elems[k].lmask == 0 and _divides(hl, self.elems[k].lead))]
        self.reducers.append(j)
        if self.budget.max_basis is not None and len(self.elems) > self.budget.max_basis:
            raise BudgetExceeded(f"basis size exceeded {self.budget.max_basis}")
        if self.budget.max_pairs is not None and len(self._pairs) > self.budget.max_pairs:
            raise BudgetExceeded(f"S-pair queue exceeded {self.budget.max_pairs}")

    def add(self, a: Monomial, b: Monomial) -> bool:
        h = self._make(tuple(a), tuple(b))
        if h is None:
            return False
        self._install(h)
        return True

    def run(self) -> "BinomialGB":
        budget = self.budget
        while self._pairs:
            _, _, i, j, lcm = heapq.heappop(self._pairs)
            if (i, j) in self._dead:
                self._dead.discard((i, j))
                continue
            self.pairs_done += 1
            if self.pairs_done % 256 == 0:
                budget.check_time("Buchberger")
            gi, gj = self.elems[i], self.elems[j]
            # S-binomial: lcm/lead_i * trail_i - lcm/lead_j * trail_j
            a = tuple(l - x + y for l, x, y in zip(lcm, gi.lead, gi.trail))
            b = tuple(l - x + y for l, x, y in zip(lcm, gj.lead, gj.trail))
            h = self._make(a, b)
            if h is not None:
                self._install(h)
        return self

    def reduced(self) -> list[tuple[Monomial, Monomial]]:
        """Reduced Groebner basis as ``(lead, trail)`` pairs, sorted by lead."""
        out = []
        for idx in self.reducers:
            g = self.elems[idx]
            trail = self.normal_form(g.trail)
            out.append((g.lead, trail))
        out.sort(key=lambda lt: self.key(lt[0]))
        return out


def groebner(binomials: Iterable[tuple[Monomial, Monomial]], order: TermOrder,
             saturated: bool = True, cancel_mask: int | None = None,
             budget: Budget | None = None, key: Callable | None = None
             ) -> list[tuple[Monomial, Monomial]]:
    """Reduced Groebner basis of the ideal generated by ``x^a - x^b`` pairs."""
    nvars = order.nvars
    if cancel_mask is None:
        cancel_mask = (1 << nvars) - 1 if saturated else 0
    eng = BinomialGB(nvars, order, key=key, cancel_mask=cancel_mask,
                     saturated=saturated, budget=budget)
    gens = sorted(((tuple(a), tuple(b)) for a, b in binomials),
                  key=lambda ab: max(eng._deg(ab[0]), eng._deg(ab[1])))
    for a, b in gens:
        eng.add(a, b)
    eng.run()
    return eng.reduced()


def is_groebner(basis: Sequence[tuple[Monomial, Monomial]], order: TermOrder) -> bool:
    """Check Buchberger's criterion on every pair, without any shortcuts."""
    eng = BinomialGB(order.nvars, order, cancel_mask=0)
    for lead, trail in basis:
        g = _Elem(tuple(lead), tuple(trail), _mask(lead), _mask(trail), eng._deg(lead))
        eng.elems.append(g)
    eng.reducers = list(range(len(basis)))
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            gi, gj = eng.elems[i], eng.elems[j]
            lcm = _lcm(gi.lead, gj.lead)
            a = tuple(l - x + y for l, x, y in zip(lcm, gi.lead, gi.trail))
            b = tuple(l - x + y for l, x, y in zip(lcm, gj.lead, gj.trail))
            if eng.normal_form(a) != eng.normal_form(b):
                return False
    return True


def saturate(binomials: Iterable[tuple[Monomial, Monomial]], nvars: int,
             variables: Sequence[int] | None = None, budget: Budget | None = None,
             grading: Sequence[int] | None = None) -> list[tuple[Monomial, Monomial]]:
    """Saturate a homogeneous binomial ideal by each variable in turn.

    For variable ``k`` a Groebner basis is computed under degrevlex with
    ``x_k`` smallest; dividing every element by its power of ``x_k`` then
    gives a Groebner basis of the saturation by ``x_k``.
    """
    current = [(tuple(a), tuple(b)) for a, b in binomials]
    variables = list(range(nvars)) if variables is None else list(variables)
    done_mask = 0
    for k in variables:
        perm = [v for v in range(nvars) if v != k] + [k]
        order = TermOrder(nvars, revlex_order=perm, grading=grading)
        mask = done_mask | (1 << k)
        basis = groebner(current, order, saturated=False, cancel_mask=mask, budget=budget)
        current = []
        for lead, trail in basis:
            c = min(lead[k], trail[k])
            if c:
                lead = lead[:k] + (lead[k] - c,) + lead[k + 1:]
                trail = trail[:k] + (trail[k] - c,) + trail[k + 1:]
            if lead != trail:
                current.append((lead, trail))
        done_mask = mask
    return current
