"""Exact convex hulls of transition vectors and the polytope statistics.

All points live on the hyperplane ``b00 + b01 + b10 + b11 = n - 1``.  The
hull is computed in the coordinates ``(b00, b01, b10)`` (an integral
affine isomorphism of the hyperplane) with integer-only predicates.
Rational inputs are scaled to integers first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm
from typing import Iterable, Sequence

from .config import achievable_points
from .lattice import det3, lattice_index, primitive
from .trees import Tree, TreeError, is_completely_odd


class PolytopeError(ValueError):
    pass


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@dataclass(frozen=True)
class Facet:
    """Inequality ``normal . (b00, b01, b10) <= offset`` and its vertex cycle.

    ``vertices`` index into the parent polytope's vertex list, ordered
    counterclockwise when seen from outside.
    """

    normal: tuple[int, ...]
    offset: Fraction | int
    vertices: tuple[int, ...]


@dataclass
class LatticePolytope:
    """Face data of a polytope on the hyperplane ``sum(b) = total``."""

    total: Fraction | int
    dim: int
    vertices: list[tuple]
    facets: list[Facet]
    edges: list[tuple[int, int]]

    @property
    def fvector(self) -> tuple[int, int, int]:
        """Counts of faces of dimension 0, 1 and 2 (the polytope itself included
        when it is at most 2-dimensional)."""
        if self.dim == 3:
            return (len(self.vertices), len(self.edges), len(self.facets))
        if self.dim == 2:
            return (len(self.vertices), len(self.edges), 1)
        if self.dim == 1:
            return (2, 1, 0)
        return (1, 0, 0)

    def facet_normals4(self) -> list[tuple[tuple[int, ...], Fraction | int]]:
        """Facet inequalities lifted to the four b-coordinates.

        The lift of ``c . (b00, b01, b10) <= d`` adds a multiple of
        ``(1, 1, 1, 1)`` so the smallest entry is 0, then makes the normal
        primitive.
        """
        out = []
        for f in self.facets:
            c = tuple(f.normal) + (0,)
            shift = -min(c)
            n4 = tuple(x + shift for x in c)
            off = f.offset + shift * self.total
            g = gcd(*n4) or 1
            out.append((tuple(x // g for x in n4), _simplify(Fraction(off) / g)))
        return out

    def contains(self, point: Sequence) -> bool:
        if sum(point) != self.total:
            return False
        q = tuple(point[:3])
        return all(_dot(f.normal, q) <= f.offset for f in self.facets) if self.dim == 3 \
            else _lower_dim_contains(self, q)

    def face_maximizing(self, weights: Sequence) -> list[tuple]:
        """Vertices of the face on which ``weights . b`` is maximal."""
        vals = [sum(w * x for w, x in zip(weights, v)) for v in self.vertices]
        best = max(vals)
        return [v for v, x in zip(self.vertices, vals) if x == best]

    def combinatorial_type(self) -> tuple:
        """Canonical code of the face lattice; equal codes iff isomorphic."""
        return _combinatorial_key(self)

    def to_json(self) -> str:
        facets = [
            {"normal": list(f.normal), "offset": _jsonable(f.offset),
             "normal4": list(n4), "offset4": _jsonable(off4), "vertices": list(f.vertices)}
            for f, (n4, off4) in zip(self.facets, self.facet_normals4())
        ] if self.dim == 3 else [
            {"normal": list(f.normal), "offset": _jsonable(f.offset), "vertices": list(f.vertices)}
            for f in self.facets
        ]
        return json.dumps({
            "dim": self.dim,
            "total": _jsonable(self.total),
            "vertices": [[_jsonable(x) for x in v] for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "facets": facets,
            "fvector": list(self.fvector),
        }, indent=2)

    def to_off(self) -> str:
        """OFF file of the projection onto ``(b00, b01, b10)``."""
        lines = ["OFF", f"{len(self.vertices)} {len(self.facets)} {len(self.edges)}"]
        lines += [" ".join(str(float(x)) if isinstance(x, Fraction) else str(x) for x in v[:3])
                  for v in self.vertices]
        lines += [f"{len(f.vertices)} " + " ".join(map(str, f.vertices)) for f in self.facets]
        return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x)


def _simplify(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def _lower_dim_contains(p: LatticePolytope, q) -> bool:
    if p.dim == 0:
        return tuple(p.vertices[0][:3]) == q
    base = p.vertices[0][:3]
    if p.dim == 1:
        a, b = p.vertices[0][:3], p.vertices[1][:3]
        d = _sub(b, a)
        w = _sub(q, a)
        if _cross(d, w) != (0, 0, 0):
            return False
        t = _dot(w, d)
        return 0 <= t <= _dot(d, d)
    pts = [v[:3] for v in p.vertices]
    normal = _cross(_sub(pts[1], base), _sub(pts[2], base))
    if _dot(normal, _sub(q, base)) != 0:
        return False
    return all(_dot(f.normal, q) <= f.offset for f in p.facets)


def hull(points: Iterable[Sequence]) -> LatticePolytope:
    """Exact convex hull of points on a common hyperplane ``sum = const``."""
    pts4 = [tuple(p) for p in points]
    if not pts4:
        raise PolytopeError("hull of an empty point set")
    totals = {sum(p) for p in pts4}
    if len(totals) != 1:
        raise PolytopeError(f"points have mixed coordinate sums {sorted(totals)}")
    total = totals.pop()
    scale = 1
    for p in pts4:
        for x in p:
            if isinstance(x, Fraction):
                scale = lcm(scale, x.denominator)
    pts3 = sorted({tuple(int(x * scale) for x in p[:3]) for p in pts4})
    dim, faces = _hull3(pts3)

    def back(q):
        head = tuple(_simplify(Fraction(x, scale)) for x in q)
        return head + (_simplify(total - sum(Fraction(x, scale) for x in q)),)

    vert3 = sorted({q for f in faces for q in f[2]}) if dim >= 2 else faces
    index = {q: k for k, q in enumerate(vert3)}
    vertices = [back(q) for q in vert3]
    if dim <= 1:
        facets = []
        if dim == 1:
            d = primitive(_sub(vert3[1], vert3[0]))
            facets = [Facet(tuple(-x for x in d), _simplify(Fraction(-_dot(d, vert3[0]), scale)), (0,)),
                      Facet(d, _simplify(Fraction(_dot(d, vert3[1]), scale)), (1,))]
        edges = [(0, 1)] if dim == 1 else []
        return LatticePolytope(_simplify(total), dim, vertices, facets, edges)
    facets = []
    edges = set()
    for normal, offset, cycle in faces:
        ids = tuple(index[q] for q in cycle)
        # Rotate so the cycle starts at its smallest vertex.
        k = ids.index(min(ids))
        ids = ids[k:] + ids[:k]
        facets.append(Facet(normal, _simplify(Fraction(offset, scale)), ids))
        for a, b in zip(ids, ids[1:] + ids[:1]):
            edges.add((min(a, b), max(a, b)))
    facets.sort(key=lambda f: f.normal)
    if dim == 2:
        # The single polygon: facets are its edges, normals inside the plane.
        polygon = facets[0]
        plane = polygon.normal
        sides = []
        cyc = polygon.vertices
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            qa, qb = vert3[a], vert3[b]
            out = primitive(_cross(_sub(qb, qa), plane))
            sides.append(Facet(out, _simplify(Fraction(_dot(out, qa), scale)), (a, b)))
        return LatticePolytope(_simplify(total), 2, vertices, sides, sorted(edges),)
    return LatticePolytope(_simplify(total), 3, vertices, facets, sorted(edges))


def _affine_basis(pts):
    """Indices of a maximal affinely independent prefix-greedy subset."""
    base = pts[0]
    chosen = [0]
    dirs = []
    for k, q in enumerate(pts[1:], start=1):
        d = _sub(q, base)
        if d == (0, 0, 0):
            continue
        if len(dirs) == 0:
            dirs.append(d); chosen.append(k)
        elif len(dirs) == 1:
            if _cross(dirs[0], d) != (0, 0, 0):
                dirs.append(d); chosen.append(k)
        elif len(dirs) == 2:
            if det3(dirs[0], dirs[1], d) != 0:
                dirs.append(d); chosen.append(k)
                break
    return chosen, dirs


def _polygon(points, normal):
    """Strictly convex hull of coplanar points, counterclockwise about ``normal``."""
    def orient(a, b, c):
        return _dot(normal, _cross(_sub(b, a), _sub(c, a)))

    drop = max(range(3), key=lambda i: abs(normal[i]))
    key = [i for i in range(3) if i != drop]
    pts = sorted(set(points), key=lambda q: (q[key[0]], q[key[1]]))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for q in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    for q in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    return lower[:-1] + upper[:-1]


def _wrap(pts, a, u, outward, skip_plane):
    """Rotate a supporting plane about the line ``a + s*u`` onto the next point.

    ``outward`` is the outward normal of the current supporting plane and
    ``w = u x outward``-style sweep direction is given implicitly: the sweep
    starts from the half-plane in direction ``sweep`` and turns toward the
    interior.  Returns the new primitive outward normal.
    """
    sweep, inward = skip_plane
    best = None
    for q in pts:
        d = _sub(q, a)
        if _cross(u, d) == (0, 0, 0):
            continue
        sw, dn = _dot(sweep, d), _dot(inward, d)
        if dn == 0 and sw <= 0:
            continue  # on the current plane, behind the rotation axis
        if best is None:
            best = (sw, dn, q)
            continue
        bw, bn, _ = best
        # Smaller sweep angle from `sweep` toward `inward` wins.
        if sw * bn - dn * bw > 0:
            best = (sw, dn, q)
    if best is None:
        raise PolytopeError("wrapping found no point off the rotation axis")
    q = best[2]
    normal = primitive(_cross(u, _sub(q, a)))
    # Orient away from the rest of the points.
    for r in pts:
        s = _dot(normal, _sub(r, a))
        if s > 0:
            normal = tuple(-x for x in normal)
            break
        if s < 0:
            break
    return normal


_REFINE_MIN = 48
_DIRECTIONS = [d for d in product((-1, 0, 1), repeat=3) if any(d)]


def _hull3(pts):
    chosen, dirs = _affine_basis(pts)
    dim = len(dirs)
    if dim == 0:
        return 0, [pts[0]]
    if dim == 1:
        d = dirs[0]
        proj = sorted(pts, key=lambda q: _dot(_sub(q, pts[0]), d))
        return 1, [proj[0], proj[-1]]
    if dim == 2:
        normal = primitive(_cross(dirs[0], dirs[1]))
        cyc = _polygon(pts, normal)
        return 2, [(normal, _dot(normal, cyc[0]), tuple(cyc))]
    if len(pts) > _REFINE_MIN:
        return 3, _refine(pts)
    return 3, _gift_wrap(pts)


def _refine(pts):
    """Hull of many points from hulls of few.

    Start from the extreme points in 26 directions; while some point lies
    strictly outside the current hull, add the outermost point beyond each
    violated facet and drop everything strictly inside.  Points strictly
    inside a sub-hull are never vertices, so the result is exact.
    """
    chosen = {max(pts, key=lambda q: (_dot(d, q), q)) for d in _DIRECTIONS}
    rest = pts
    while True:
        base = sorted(chosen)
        if len(_affine_basis(base)[1]) < 3:
            return _gift_wrap(pts)
        faces = _gift_wrap(base)
        outside, best = [], {}
        for q in rest:
            hit = False
            for k, (n, o, _) in enumerate(faces):
                v = _dot(n, q)
                if v > o:
                    hit = True
                    cur = best.get(k)
                    if cur is None or (v, q) > cur:
                        best[k] = (v, q)
            if hit:
                outside.append(q)
        if not outside:
            return faces
        chosen.update(q for _, q in best.values())
        rest = outside


def _gift_wrap(pts):
    # Initial supporting plane through the lex-smallest point: normal -e1.
    normal = _rotate_until_facet(pts, (-1, 0, 0))
    faces = {}
    todo = [normal]
    while todo:
        nrm = todo.pop()
        off = max(_dot(nrm, q) for q in pts)
        if (nrm, off) in faces:
            continue
        members = [q for q in pts if _dot(nrm, q) == off]
        cyc = _polygon(members, nrm)
        faces[(nrm, off)] = tuple(cyc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            u = _sub(b, a)
            sweep = _cross(u, nrm)       # points away from the facet across edge ab
            inward = tuple(-x for x in nrm)
            new = _wrap(pts, a, u, nrm, (sweep, inward))
            new_off = _dot(new, a)
            if (new, new_off) not in faces:
                todo.append(new)
    return [(n, o, c) for (n, o), c in faces.items()]


def _rotate_until_facet(pts, normal):
    """Turn a supporting plane until it holds a 2-face."""
    for _ in range(3):
        top = max(_dot(normal, q) for q in pts)
        on = [q for q in pts if _dot(normal, q) == top]
        chosen, dirs = _affine_basis(on)
        if len(dirs) >= 2:
            return primitive(normal)
        if len(dirs) == 1:
            u = dirs[0]
        else:
            # Any axis inside the plane through the single contact point.
            u = _cross(normal, (0, 0, 1))
            if u == (0, 0, 0):
                u = _cross(normal, (0, 1, 0))
        a = on[0]
        sweep = _cross(u, normal)
        normal = _wrap(pts, a, u, normal, (sweep, tuple(-x for x in normal)))
    raise PolytopeError("no facet found through the initial vertex")


# ---------------------------------------------------------------------------
# Volume and degree

def normalized_volume(p: LatticePolytope, lattice_points: Iterable[Sequence] | None = None) -> int:
    """Lattice-normalized volume of a 3-polytope.

    The reference lattice is spanned by differences of ``lattice_points``
    (default: the vertices), so the value is the degree of the projective
    toric variety of those points.
    """
    if p.dim != 3:
        raise PolytopeError(f"normalized volume needs a 3-polytope, got dimension {p.dim}")
    verts = [tuple(Fraction(x) for x in v[:3]) for v in p.vertices]
    apex = verts[0]
    six_vol = Fraction(0)
    for f in p.facets:
        if 0 in f.vertices:
            continue
        cyc = [verts[k] for k in f.vertices]
        for i in range(1, len(cyc) - 1):
            six_vol += abs(det3(_sub(cyc[0], apex), _sub(cyc[i], apex), _sub(cyc[i + 1], apex)))
    pts = [tuple(q[:3]) for q in (lattice_points if lattice_points is not None else p.vertices)]
    base = pts[0]
    diffs = [tuple(int(x - y) for x, y in zip(q, base)) for q in pts[1:]]
    index = lattice_index(diffs)
    vol = six_vol / index
    if vol.denominator != 1:
        raise PolytopeError(f"normalized volume {vol} is not an integer")
    return int(vol)


def tree_polytope(t: Tree) -> LatticePolytope:
    return hull(achievable_points(t))


def ideal_degree_of_tree(t: Tree) -> int:
    pts = list(achievable_points(t))
    return normalized_volume(hull(pts), pts)


# ---------------------------------------------------------------------------
# The polytope cut out by the simplex bounds and the two binary-tree inequalities

def universal_inequalities(n: int) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Six inequalities ``a . b <= c`` on the four b-coordinates."""
    h = Fraction(n + 1, 2)
    out = [(tuple(Fraction(-int(i == k)) for i in range(4)), Fraction(0)) for k in range(4)]
    out.append(((Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(0)), h))
    out.append(((Fraction(0), Fraction(1), Fraction(-1, 2), Fraction(1, 2)), h))
    return out


def universal_vertex_formulas(n: int) -> list[tuple[Fraction, ...]]:
    F = Fraction
    return [
        (F(n - 1), F(0), F(0), F(0)),
        (F(n - 3), F(0), F(2), F(0)),
        (F(n - 3, 2), F(n + 1, 2), F(0), F(0)),
        (F(0), F(2 * n, 3), F(n - 3, 3), F(0)),
        (F(0), F(n - 3, 3), F(2 * n, 3), F(0)),
        (F(0), F(0), F(n + 1, 2), F(n - 3, 2)),
        (F(0), F(2), F(0), F(n - 3)),
        (F(0), F(0), F(0), F(n - 1)),
    ]


def _solve(rows, rhs):
    """Solve a square rational system; None if singular."""
    m = [list(r) + [c] for r, c in zip(rows, rhs)]
    k = len(m)
    for col in range(k):
        piv = next((i for i in range(col, k) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for i in range(k):
            if i != col and m[i][col] != 0:
                f = m[i][col] / m[col][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][k] / m[i][i] for i in range(k)]


def universal_vertices(n: int) -> list[tuple[Fraction, ...]]:
    """Vertices of the six-inequality polytope by exact vertex enumeration."""
    ineqs = universal_inequalities(n)
    eq = ((Fraction(1),) * 4, Fraction(n - 1))
    found = set()
    for tri in combinations(ineqs, 3):
        sol = _solve([eq[0]] + [a for a, _ in tri], [eq[1]] + [c for _, c in tri])
        if sol is None:
            continue
        if all(sum(a * x for a, x in zip(row, sol)) <= c for row, c in ineqs):
            found.add(tuple(sol))
    return sorted(found)


def universal_polytope(n: int) -> LatticePolytope:
    if n < 4:
        raise PolytopeError(f"universal polytope is defined for n >= 4, got {n}")
    return hull(universal_vertices(n))


def _facet_set(p: LatticePolytope):
    return {(f.normal, Fraction(f.offset)) for f in p.facets}


def verify_theorem1(t: Tree) -> bool:
    """Does the tree's polytope coincide with the universal polytope?"""
    if not t.is_binary or t.n <= 3 or not is_completely_odd(t):
        raise TreeError("verify_theorem1 needs a completely odd binary tree with n > 3")
    return polytope_matches_universal(t)


def polytope_matches_universal(t: Tree) -> bool:
    p = tree_polytope(t)
    u = universal_polytope(t.n)
    same_vertices = {tuple(Fraction(x) for x in v) for v in p.vertices} == \
        {tuple(Fraction(x) for x in v) for v in u.vertices}
    return same_vertices and _facet_set(p) == _facet_set(u)


def shared_universal_vertices(t: Tree) -> int:
    p = tree_polytope(t)
    u = {tuple(Fraction(x) for x in v) for v in universal_polytope(t.n).vertices}
    return sum(tuple(Fraction(x) for x in v) in u for v in p.vertices)


def binary_inequalities_hold(t: Tree) -> bool:
    """Check both binary-tree inequalities and the equality case of each.

    Equality in the first should hold exactly for labelings with a one at
    the root and zeros at all leaves (the second is the 0/1 mirror).
    Everything is counted with the subtree dynamic program.
    """
    if not t.is_binary:
        raise TreeError("binary_inequalities_hold needs a binary tree")
    n = t.n
    bound = Fraction(n + 1, 2)
    pts = achievable_points(t)

    def lhs1(v):
        return Fraction(v[0] - v[1], 2) + v[2]

    def lhs2(v):
        return Fraction(v[3] - v[2], 2) + v[1]

    for lhs, root_label in ((lhs1, 1), (lhs2, 0)):
        if any(lhs(v) > bound for v in pts):
            return False
        tight = sum(c for v, c in pts.items() if lhs(v) == bound)
        pinned = {1: root_label, **{leaf: 1 - root_label for leaf in t.leaves}}
        special = achievable_points(t, fixed=pinned)
        if not all(lhs(v) == bound for v in special):
            return False
        if tight != sum(special.values()):
            return False
    return True


# ---------------------------------------------------------------------------
# Combinatorial type

def _combinatorial_key(p: LatticePolytope) -> tuple:
    """Canonical form of the vertex-facet incidence structure.

    Facet cycles give an oriented map; the canonical code is the least
    traversal code over all starting flags (facet, first edge, orientation).
    """
    if p.dim != 3:
        return ("dim", p.dim, p.fvector)
    cycles = [list(f.vertices) for f in p.facets]
    best = None
    for fi, cyc in enumerate(cycles):
        k = len(cyc)
        for start in range(k):
            for direction in (1, -1):
                code = _traverse(cycles, fi, start, direction)
                if best is None or code < best:
                    best = code
    return tuple(best)


def _traverse(cycles, f0, start, direction):
    # Directed edge -> facet containing it with that orientation.
    owner = {}
    for fi, cyc in enumerate(cycles):
        seq = cyc if direction == 1 else cyc[::-1]
        for a, b in zip(seq, seq[1:] + seq[:1]):
            owner[(a, b)] = (fi, seq)
    fnum = {f0: 0}
    vnum = {}
    code = []
    seq0 = cycles[f0] if direction == 1 else cycles[f0][::-1]
    if direction == -1:
        start = len(seq0) - 1 - start
    queue = [(f0, seq0[start:] + seq0[:start])]
    for fi, seq in queue:
        code.append(-len(seq))
        for a, b in zip(seq, seq[1:] + seq[:1]):
            for v in (a,):
                if v not in vnum:
                    vnum[v] = len(vnum)
                code.append(vnum[v])
            other, oseq = owner[(b, a)]
            if other not in fnum:
                fnum[other] = len(fnum)
                j = oseq.index(a)
                queue.append((other, oseq[j:] + oseq[:j]))
            code.append(10_000 + fnum[other])
    return code
