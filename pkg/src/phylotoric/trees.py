"""Rooted trees in parent-array form, with canonical forms and enumeration.

Nodes are numbered ``1..n`` with the root at ``1`` and every other node
``j`` attached to a parent ``parent(j) < j``.  Trees produced by the
enumerators are numbered in breadth-first order from the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence


class TreeError(ValueError):
    """Raised for malformed tree text or invalid parent arrays."""


@dataclass(frozen=True)
class Tree:
    """Rooted tree on ``n`` nodes.

    ``parents[k]`` is the parent of node ``k + 2``; the root (node 1) has
    no entry.
    """

    n: int
    parents: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise TreeError(f"node count must be positive, got {self.n}")
        if len(self.parents) != self.n - 1:
            raise TreeError(
                f"expected {self.n - 1} parent entries, got {len(self.parents)}")
        for j, p in enumerate(self.parents, start=2):
            if not 1 <= p < j:
                raise TreeError(f"parent of node {j} must be in 1..{j - 1}, got {p}")

    def parent(self, j: int) -> int:
        if j == 1:
            raise TreeError("the root has no parent")
        return self.parents[j - 2]

    def edges(self) -> list[tuple[int, int]]:
        """List of ``(parent, child)`` pairs, ordered by child."""
        return [(p, j) for j, p in enumerate(self.parents, start=2)]

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """``children[v]`` for ``v`` in ``1..n``; index 0 is unused."""
        kids: list[list[int]] = [[] for _ in range(self.n + 1)]
        for j, p in enumerate(self.parents, start=2):
            kids[p].append(j)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        """``depths[v]`` for ``v`` in ``1..n``; index 0 is unused."""
        d = [0] * (self.n + 1)
        for j, p in enumerate(self.parents, start=2):
            d[j] = d[p] + 1
        return tuple(d)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(1, self.n + 1) if not self.children[v])

    @property
    def internal_nodes(self) -> tuple[int, ...]:
        return tuple(v for v in range(1, self.n + 1) if self.children[v])

    @cached_property
    def is_binary(self) -> bool:
        """True when every non-leaf has exactly two children."""
        return self.n >= 1 and all(len(self.children[v]) in (0, 2)
                                   for v in range(1, self.n + 1))

    @property
    def is_path(self) -> bool:
        return all(p == j - 1 for j, p in enumerate(self.parents, start=2))

    def postorder(self) -> list[int]:
        """Nodes ordered so that every child precedes its parent."""
        # Children always carry larger indices than their parent.
        return list(range(self.n, 0, -1))

    @cached_property
    def level_sequence(self) -> tuple[int, ...]:
        """Canonical level sequence (largest over all child orderings)."""
        enc: list[tuple[int, ...]] = [()] * (self.n + 1)
        for v in self.postorder():
            subs = sorted((enc[c] for c in self.children[v]), reverse=True)
            seq = [0]
            for s in subs:
                seq.extend(x + 1 for x in s)
            enc[v] = tuple(seq)
        return enc[1]

    def canonical(self) -> "Tree":
        """Isomorphic copy in canonical BFS numbering."""
        return from_level_sequence(self.level_sequence)

    def isomorphic(self, other: "Tree") -> bool:
        return self.level_sequence == other.level_sequence

    def __str__(self) -> str:
        return serialize_tree(self)


def serialize_tree(t: Tree) -> str:
    """Parent-list text ``"n; p2 p3 ... pn"``."""
    body = " ".join(str(p) for p in t.parents)
    return f"{t.n}; {body}" if body else f"{t.n};"


def parse_tree(text: str) -> Tree:
    """Parse a parent list ``"n; p2 ... pn"`` or a level sequence ``"0 1 2 1"``.

    >>> parse_tree("3; 1 2").is_path
    True
    >>> serialize_tree(parse_tree("0 1 1"))
    '3; 1 1'
    """
    text = text.strip()
    if not text:
        raise TreeError("empty tree text")
    if ";" in text:
        head, _, body = text.partition(";")
        try:
            n = int(head)
            parents = tuple(int(tok) for tok in body.replace(",", " ").split())
        except ValueError as exc:
            raise TreeError(f"malformed parent list: {text!r}") from exc
        if len(parents) != n - 1:
            raise TreeError(
                f"node count mismatch: header says {n}, found {len(parents) + 1} nodes")
        return Tree(n, parents)
    try:
        levels = tuple(int(tok) for tok in text.strip("[]()").replace(",", " ").split())
    except ValueError as exc:
        raise TreeError(f"malformed level sequence: {text!r}") from exc
    return from_level_sequence(levels)


def from_level_sequence(levels: Sequence[int]) -> Tree:
    """Build a BFS-numbered tree from a preorder level sequence."""
    levels = list(levels)
    if not levels or levels[0] != 0:
        raise TreeError("level sequence must start with 0")
    if any(x <= 0 for x in levels[1:]):
        raise TreeError("only the first entry of a level sequence may be 0")
    # Preorder parents: parent of k is the latest node at level L[k] - 1.
    pre_parent = [-1] * len(levels)
    last_at: list[int] = [0]
    for k in range(1, len(levels)):
        lv = levels[k]
        if lv > len(last_at):
            raise TreeError(f"level jumps from {levels[k - 1]} to {lv}")
        pre_parent[k] = last_at[lv - 1]
        del last_at[lv:]
        last_at.append(k)
    kids: list[list[int]] = [[] for _ in levels]
    for k in range(1, len(levels)):
        kids[pre_parent[k]].append(k)
    # Renumber breadth-first, children kept in preorder order.
    number = {0: 1}
    queue = [0]
    parents = []
    for v in queue:
        for c in kids[v]:
            number[c] = len(number) + 1
            parents.append(number[v])
            queue.append(c)
    return Tree(len(levels), tuple(parents))


def path_tree(n: int) -> Tree:
    if n < 2:
        raise TreeError(f"a path needs at least 2 nodes, got {n}")
    return Tree(n, tuple(range(1, n)))


def star_tree(n: int) -> Tree:
    """Root joined directly to ``n - 1`` leaves."""
    return Tree(n, (1,) * (n - 1))


def enumerate_level_sequences(n: int) -> Iterator[tuple[int, ...]]:
    """Canonical level sequences of rooted trees on ``n`` nodes.

    Beyer-Hedetniemi successor rule; starts at the path and ends at the
    star, in decreasing lexicographic order.
    """
    if n < 1:
        raise TreeError(f"node count must be positive, got {n}")
    seq = list(range(n))
    while True:
        yield tuple(seq)
        p = n - 1
        while p > 0 and seq[p] <= 1:
            p -= 1
        if p == 0:
            return
        q = p - 1
        while seq[q] != seq[p] - 1:
            q -= 1
        shift = p - q
        for i in range(p, n):
            seq[i] = seq[i - shift]


def enumerate_rooted_trees(n: int) -> Iterator[Tree]:
    """One BFS-numbered representative per isomorphism class of rooted trees."""
    for seq in enumerate_level_sequences(n):
        yield from_level_sequence(seq)


@lru_cache(maxsize=None)
def _binary_shapes(leaves: int) -> tuple:
    # A shape is () for a leaf or (left, right) with left >= right in
    # generation order, so each unordered tree appears once.
    if leaves == 1:
        return ((),)
    out = []
    for left in range(leaves - 1, (leaves - 1) // 2, -1):
        right = leaves - left
        ls, rs = _binary_shapes(left), _binary_shapes(right)
        if left != right:
            out.extend((a, b) for a in ls for b in rs)
        else:
            out.extend((ls[i], ls[j]) for i in range(len(ls)) for j in range(i, len(ls)))
    return tuple(out)


def _shape_tree(shape) -> Tree:
    parents = []
    queue = [shape]
    for k, node in enumerate(queue):
        for sub in node:
            parents.append(k + 1)
            queue.append(sub)
    return Tree(len(queue), tuple(parents))


def enumerate_binary_trees(n: int) -> Iterator[Tree]:
    """Rooted trees on ``n`` nodes where every internal node has two children."""
    if n < 1 or n % 2 == 0:
        raise TreeError(f"full binary trees have an odd node count, got {n}")
    for shape in _binary_shapes((n + 1) // 2):
        yield _shape_tree(shape).canonical()


def enumerate_trees(n: int, family: str = "all") -> Iterator[Tree]:
    if family == "all":
        return enumerate_rooted_trees(n)
    if family == "binary":
        return enumerate_binary_trees(n)
    if family == "path":
        return iter([path_tree(n)])
    raise TreeError(f"unknown tree family {family!r} (expected all, binary or path)")


def is_completely_odd(t: Tree) -> bool:
    """True when every leaf of the binary tree ``t`` sits at odd depth."""
    if not t.is_binary:
        raise TreeError("is_completely_odd needs a binary tree")
    return all(t.depths[v] % 2 == 1 for v in t.leaves)
