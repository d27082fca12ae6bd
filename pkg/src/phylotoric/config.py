"""Monomial parameterization of the homogeneous binary tree model.

A labeling assigns 0/1 to every node; its transition vector counts the
parent->child label pairs ``(00, 01, 10, 11)`` over all edges.  The
configuration matrix has one such column per labeling, in binary order
with node 1 as the most significant bit.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .trees import Tree, TreeError

DEFAULT_CONFIG_CAP = 24


class TransitionVector(NamedTuple):
    t00: int
    t01: int
    t10: int
    t11: int

    def __add__(self, other):  # componentwise; tuple concatenation is never wanted
        return TransitionVector(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return TransitionVector(*(a - b for a, b in zip(self, other)))

    def swapped(self) -> "TransitionVector":
        """Image under exchanging the labels 0 and 1."""
        return TransitionVector(self.t11, self.t10, self.t01, self.t00)


ZERO = TransitionVector(0, 0, 0, 0)
_UNIT = (
    (TransitionVector(1, 0, 0, 0), TransitionVector(0, 1, 0, 0)),
    (TransitionVector(0, 0, 1, 0), TransitionVector(0, 0, 0, 1)),
)


def edge_vector(parent_label: int, child_label: int) -> TransitionVector:
    return _UNIT[parent_label][child_label]


# Labelings are plain bit tuples; node j carries bit j - 1.
Labeling = tuple


def labeling_from_index(index: int, n: int) -> tuple[int, ...]:
    if not 0 <= index < 1 << n:
        raise ValueError(f"labeling index {index} out of range for n={n}")
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def labeling_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | (1 if b else 0)
    return out


def labeling_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def parse_labeling(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"labeling must be a 0/1 string, got {text!r}")
    return tuple(int(ch) for ch in text)


def transition_vector(t: Tree, labeling: Sequence[int]) -> TransitionVector:
    if len(labeling) != t.n:
        raise ValueError(f"labeling has length {len(labeling)}, tree has {t.n} nodes")
    counts = [0, 0, 0, 0]
    for p, c in t.edges():
        counts[2 * labeling[p - 1] + labeling[c - 1]] += 1
    return TransitionVector(*counts)


@dataclass
class Configuration:
    """The ``4 x 2^n`` matrix of transition vectors of a tree."""

    tree: Tree
    matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def num_columns(self) -> int:
        return self.matrix.shape[1]

    def column(self, index: int) -> TransitionVector:
        return TransitionVector(*(int(x) for x in self.matrix[:, index]))

    @cached_property
    def classes(self) -> dict[TransitionVector, list[int]]:
        """Distinct columns mapped to the labeling indices producing them.

        Keys are in order of first occurrence, so each key's first labeling
        is its representative.
        """
        out: dict[TransitionVector, list[int]] = {}
        for idx, col in enumerate(map(tuple, self.matrix.T.tolist())):
            out.setdefault(TransitionVector(*col), []).append(idx)
        return out

    def dedup(self, with_labelings: bool = False) -> dict:
        """Distinct column -> (multiplicity, representative index[, all indices])."""
        if with_labelings:
            return {v: (len(ls), ls[0], list(ls)) for v, ls in self.classes.items()}
        return {v: (len(ls), ls[0]) for v, ls in self.classes.items()}

    @property
    def distinct_columns(self) -> list[TransitionVector]:
        return list(self.classes)

    def to_matrix_text(self) -> str:
        rows = [" ".join(str(int(x)) for x in row) for row in self.matrix]
        return f"4 {self.num_columns}\n" + "\n".join(rows) + "\n"

    def dedup_json(self) -> str:
        n = self.n
        payload = [
            {
                "vector": list(v),
                "multiplicity": len(ls),
                "representative": labeling_str(labeling_from_index(ls[0], n)),
                "labelings": [labeling_str(labeling_from_index(i, n)) for i in ls],
            }
            for v, ls in self.classes.items()
        ]
        return json.dumps({"tree": str(self.tree), "columns": payload}, indent=2)


def configuration(t: Tree, cap: int = DEFAULT_CONFIG_CAP) -> Configuration:
    """Build the full configuration by looping over all ``2^n`` labelings."""
    if t.n > cap:
        raise TreeError(f"configuration of a {t.n}-node tree exceeds the cap of {cap} nodes")
    n = t.n
    idx = np.arange(1 << n, dtype=np.int64)
    bits = [(idx >> (n - j)) & 1 for j in range(1, n + 1)]
    codes = np.zeros((4, 1 << n), dtype=np.int64)
    for p, c in t.edges():
        code = 2 * bits[p - 1] + bits[c - 1]
        for k in range(4):
            codes[k] += code == k
    return Configuration(t, codes)


def parse_matrix_text(text: str) -> np.ndarray:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    rows, cols = map(int, lines[0])
    data = np.array([[int(x) for x in ln] for ln in lines[1:]], dtype=np.int64)
    if data.shape != (rows, cols):
        raise ValueError(f"matrix body has shape {data.shape}, header says {(rows, cols)}")
    return data


def achievable_points(t: Tree, fixed: Mapping[int, int] | None = None
                      ) -> dict[TransitionVector, int]:
    """Distinct transition vectors of ``t`` with the number of labelings reaching each.

    Runs a subtree dynamic program instead of enumerating labelings.
    ``fixed`` optionally pins the label of some nodes.
    """
    return {v: c for v, (c, _) in _subtree_dp(t, fixed).items()}


def achievable_witnesses(t: Tree, fixed: Mapping[int, int] | None = None
                         ) -> dict[TransitionVector, tuple[int, int]]:
    """Like :func:`achievable_points` but values are ``(count, least labeling index)``."""
    return _subtree_dp(t, fixed)


def _subtree_dp(t: Tree, fixed):
    n = t.n
    fixed = dict(fixed or {})
    for v, lab in fixed.items():
        if not 1 <= v <= n or lab not in (0, 1):
            raise ValueError(f"bad fixed label {v}: {lab}")
    # tables[v][r]: partial vector over the subtree's edges -> [count, min mask]
    tables: list = [None] * (n + 1)
    for v in t.postorder():
        bit = 1 << (n - v)
        per_label = []
        for r in (0, 1):
            if fixed.get(v, r) != r:
                per_label.append({})
                continue
            cur = {ZERO: (1, bit if r else 0)}
            for c in t.children[v]:
                # Child contribution: its subtree table shifted by the edge (r, y).
                contrib: dict = {}
                for y in (0, 1):
                    e = _UNIT[r][y]
                    for vec, (cnt, mask) in tables[c][y].items():
                        key = vec + e
                        old = contrib.get(key)
                        if old is None:
                            contrib[key] = (cnt, mask)
                        else:
                            contrib[key] = (old[0] + cnt, min(old[1], mask))
                merged: dict = {}
                for a, (ca, ma) in cur.items():
                    for b, (cb, mb) in contrib.items():
                        key = TransitionVector(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])
                        old = merged.get(key)
                        if old is None:
                            merged[key] = (ca * cb, ma + mb)
                        else:
                            merged[key] = (old[0] + ca * cb, min(old[1], ma + mb))
                cur = merged
            per_label.append(cur)
        for c in t.children[v]:
            tables[c] = None
        tables[v] = per_label
    out: dict = {}
    for r in (0, 1):
        for vec, (cnt, mask) in tables[1][r].items():
            old = out.get(vec)
            out[vec] = (cnt, mask) if old is None else (old[0] + cnt, min(old[1], mask))
    return dict(sorted(out.items(), key=lambda kv: kv[1][1]))


def brute_force_points(t: Tree) -> dict[TransitionVector, int]:
    """Reference: distinct columns with multiplicity by looping over labelings."""
    counts: dict[TransitionVector, int] = defaultdict(int)
    for idx in range(1 << t.n):
        counts[transition_vector(t, labeling_from_index(idx, t.n))] += 1
    return dict(counts)


def nonsmoothness_identity(t: Tree) -> bool:
    """Check the column relation showing the affine chart at all-zeros is not free.

    For ``n >= 5``: with ``a0`` the all-zeros column, (1 at root) + (1 at a
    leaf) equals (1 at a non-root internal node) after subtracting ``a0``
    from each, for every choice of leaf and internal node.  For ``n = 3``
    the only internal node is the root, and the relation used instead is
    (1 at root) + (all ones) = 2 * (1 at root and one leaf).
    """
    if not t.is_binary or t.n < 3:
        raise TreeError("nonsmoothness_identity needs a binary tree with at least 3 nodes")
    n = t.n
    base = transition_vector(t, (0,) * n)

    def shifted(ones: Iterable[int]) -> TransitionVector:
        lab = [0] * n
        for v in ones:
            lab[v - 1] = 1
        return transition_vector(t, lab) - base

    root = shifted([1])
    if n == 3:
        leaf = t.leaves[0]
        return root + shifted(range(1, n + 1)) == shifted([1, leaf]) + shifted([1, leaf])
    inner = [v for v in t.internal_nodes if v != 1]
    return all(root + shifted([leaf]) == shifted([u]) for leaf in t.leaves for u in inner)
