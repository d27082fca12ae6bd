"""Exact integer linear algebra: row Hermite form, kernels, lattice index."""

from __future__ import annotations

from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def hermite_rows(rows: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, list[int]]:
    """Row-style Hermite normal form.

    Returns ``(H, U, pivots)`` with ``U`` unimodular, ``U @ rows == H``,
    ``H`` in row echelon form with positive pivots and entries above each
    pivot reduced into ``[0, pivot)``.  Zero rows of ``H`` are kept at the
    bottom, so the rows of ``U`` past ``len(pivots)`` span the left kernel.
    """
    H = [list(map(int, r)) for r in rows]
    m = len(H)
    ncols = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == m:
            break
        # Euclid on column `col` among rows r..m-1.
        while True:
            nz = [i for i in range(r, m) if H[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(H[i][col]))
            if best != r:
                H[r], H[best] = H[best], H[r]
                U[r], U[best] = U[best], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][col]:
                    q = H[i][col] // H[r][col]
                    _axpy(H[i], -q, H[r])
                    _axpy(U[i], -q, U[r])
                    if H[i][col]:
                        done = False
            if done:
                break
        if r < m and H[r][col] != 0:
            if H[r][col] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            p = H[r][col]
            for i in range(r):
                q = H[i][col] // p
                if q:
                    _axpy(H[i], -q, H[r])
                    _axpy(U[i], -q, U[r])
            pivots.append(col)
            r += 1
    return H, U, pivots


def _axpy(target: list[int], a: int, source: list[int]) -> None:
    for k, s in enumerate(source):
        if s:
            target[k] += a * s


def rank(rows: Sequence[Sequence[int]]) -> int:
    return len(hermite_rows(rows)[2])


def integer_kernel(matrix: Sequence[Sequence[int]]) -> Matrix:
    """Basis of ``{v in Z^m : matrix @ v = 0}``; the basis is saturated."""
    cols = len(matrix[0])
    transposed = [[int(matrix[i][j]) for i in range(len(matrix))] for j in range(cols)]
    _, U, pivots = hermite_rows(transposed)
    basis = U[len(pivots):]
    return size_reduce(basis)


def size_reduce(basis: Matrix) -> Matrix:
    """Greedy pairwise reduction of a lattice basis (keeps the same lattice)."""
    basis = [list(b) for b in basis]
    improved = True
    while improved:
        improved = False
        basis.sort(key=_norm2)
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i == j:
                    continue
                bi, bj = basis[i], basis[j]
                nj = _norm2(bj)
                if nj == 0:
                    continue
                dot = sum(x * y for x, y in zip(bi, bj))
                q = _round_div(dot, nj)
                if q:
                    cand = [x - q * y for x, y in zip(bi, bj)]
                    if _norm2(cand) < _norm2(bi):
                        basis[i] = cand
                        improved = True
    return basis


def _norm2(v: Sequence[int]) -> int:
    return sum(x * x for x in v)


def _round_div(a: int, b: int) -> int:
    return (2 * a + b) // (2 * b)


def lattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by ``vectors`` inside ``Z^d``.

    Requires the vectors to span a full-rank sublattice.
    """
    H, _, pivots = hermite_rows(vectors)
    d = len(vectors[0])
    if len(pivots) != d:
        raise ValueError(f"vectors span rank {len(pivots)}, need {d}")
    out = 1
    for r, c in enumerate(pivots):
        out *= H[r][c]
    return out


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def det3(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> int:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))
