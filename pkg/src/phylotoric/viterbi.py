"""Max-sum decoding on a tree with log-parameters ``b = (b00, b01, b10, b11)``.

The score of a labeling is ``b . transition_vector``; all arithmetic is
exact (``Fraction``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .config import (TransitionVector, ZERO, _UNIT, achievable_points, labeling_from_index,
                     transition_vector)
from .polytope import LatticePolytope, hull
from .trees import Tree


@dataclass(frozen=True)
class Decoding:
    value: Fraction
    vectors: tuple[TransitionVector, ...]
    witness: tuple[int, ...]


def _score(b, vec) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(b, vec)), Fraction(0))


def decode(t: Tree, b: Sequence) -> Decoding:
    """Best labeling score, all optimal transition vectors, and the
    lexicographically least optimal labeling."""
    b = tuple(Fraction(x) for x in b)
    if len(b) != 4:
        raise ValueError("log-parameters need four entries (b00, b01, b10, b11)")
    w = ((b[0], b[1]), (b[2], b[3]))
    n = t.n
    best = [None] * (n + 1)
    opt = [None] * (n + 1)
    for v in t.postorder():
        bv, ov = [], []
        for r in (0, 1):
            total = Fraction(0)
            vecs = {ZERO}
            for c in t.children[v]:
                cand = [w[r][y] + best[c][y] for y in (0, 1)]
                top = max(cand)
                total += top
                contrib = set()
                for y in (0, 1):
                    if cand[y] == top:
                        e = _UNIT[r][y]
                        contrib.update(vec + e for vec in opt[c][y])
                vecs = {a + c2 for a in vecs for c2 in contrib}
            bv.append(total)
            ov.append(vecs)
        best[v], opt[v] = bv, ov
    value = max(best[1])
    vectors = set()
    for r in (0, 1):
        if best[1][r] == value:
            vectors |= opt[1][r]
    # Greedy in node order: each node's allowed labels depend only on its parent's label.
    lab = [0] * (n + 1)
    lab[1] = 0 if best[1][0] == value else 1
    for j in range(2, n + 1):
        r = lab[t.parent(j)]
        cand = [w[r][y] + best[j][y] for y in (0, 1)]
        lab[j] = 0 if cand[0] >= cand[1] else 1
    return Decoding(value, tuple(sorted(vectors)), tuple(lab[1:]))


def brute_force_decode(t: Tree, b: Sequence) -> Decoding:
    b = tuple(Fraction(x) for x in b)
    scores = []
    for idx in range(1 << t.n):
        lab = labeling_from_index(idx, t.n)
        vec = transition_vector(t, lab)
        scores.append((_score(b, vec), vec, lab))
    value = max(s for s, _, _ in scores)
    winners = [(vec, lab) for s, vec, lab in scores if s == value]
    return Decoding(value, tuple(sorted({v for v, _ in winners})), min(lab for _, lab in winners))


def is_viterbi_sequence(t: Tree, labeling: Sequence[int], polytope: LatticePolytope | None = None,
                        points: dict | None = None) -> bool:
    """Is ``labeling`` the unique best labeling for some choice of ``b``?

    True exactly when its transition vector is a vertex of the tree's
    polytope and no other labeling shares that vector.
    """
    vec = transition_vector(t, labeling)
    points = points if points is not None else achievable_points(t)
    polytope = polytope or hull(points)
    return points[vec] == 1 and tuple(vec) in {tuple(v) for v in polytope.vertices}


def viterbi_vertices(t: Tree) -> dict:
    """Vertices split by whether a unique labeling reaches them."""
    points = achievable_points(t)
    p = hull(points)
    single, multiple = [], []
    for v in p.vertices:
        (single if points[TransitionVector(*v)] == 1 else multiple).append(tuple(v))
    return {"unique": single, "shared": multiple}


def face_check(t: Tree, b: Sequence, polytope: LatticePolytope, points: dict) -> bool:
    """Decoding agrees with the face of the polytope maximizing ``b``."""
    d = decode(t, b)
    b = tuple(Fraction(x) for x in b)
    top = max(_score(b, p) for p in points)
    on_face = {tuple(p) for p in points if _score(b, p) == top}
    face_vertices = {tuple(v) for v in polytope.face_maximizing(b)}
    verts = {tuple(v) for v in polytope.vertices}
    got = {tuple(v) for v in d.vectors}
    return (d.value == top and got == on_face
            and {v for v in got if v in verts} == face_vertices)


def random_log_params(rng: random.Random, spread: int = 50) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(-spread, spread), rng.randint(1, spread)) for _ in range(4))


def normal_fan_consistency(t: Tree, samples: int = 100, seed: int = 0) -> bool:
    """Random parameters plus the zero vector and every facet normal."""
    points = achievable_points(t)
    p = hull(points)
    rng = random.Random(seed)
    params = [random_log_params(rng) for _ in range(samples)]
    params.append((0, 0, 0, 0))
    if p.dim == 3:
        params.extend(n4 for n4, _ in p.facet_normals4())
    return all(face_check(t, b, p, points) for b in params)
