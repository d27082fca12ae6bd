from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phylotoric.config import (TransitionVector, achievable_points, achievable_witnesses,
                               brute_force_points, configuration, labeling_from_index,
                               labeling_index, labeling_str, nonsmoothness_identity,
                               parse_labeling, parse_matrix_text, transition_vector)
from phylotoric.lattice import hermite_rows, integer_kernel, lattice_index, rank
from phylotoric.trees import (TreeError, enumerate_binary_trees, enumerate_rooted_trees,
                              parse_tree, path_tree, star_tree)

PATH3_MATRIX = [
    [2, 1, 0, 0, 1, 0, 0, 0],
    [0, 1, 1, 1, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 1, 1, 0],
    [0, 0, 0, 1, 0, 0, 1, 2],
]


def test_path3_configuration():
    c = configuration(path_tree(3))
    assert c.matrix.tolist() == PATH3_MATRIX
    assert c.to_matrix_text().splitlines()[0] == "4 8"
    assert parse_matrix_text(c.to_matrix_text()).tolist() == PATH3_MATRIX


def test_path3_distinct_columns():
    c = configuration(path_tree(3))
    assert len(c.distinct_columns) == 7
    assert c.classes[TransitionVector(0, 1, 1, 0)] == [2, 5]  # labelings 010 and 101


def test_labeling_helpers():
    assert labeling_from_index(5, 3) == (1, 0, 1)
    assert labeling_index((1, 0, 1)) == 5
    assert labeling_str((0, 1, 0)) == "010"
    assert parse_labeling("011") == (0, 1, 1)
    with pytest.raises(ValueError):
        parse_labeling("012")


def test_transition_vector_length_mismatch():
    with pytest.raises(ValueError):
        transition_vector(path_tree(3), (0, 1))


def test_columns_sum_to_edge_count():
    for t in enumerate_rooted_trees(6):
        m = configuration(t).matrix
        assert (m.sum(axis=0) == t.n - 1).all()


def test_configuration_cap():
    with pytest.raises(TreeError):
        configuration(path_tree(30))


def test_dp_matches_brute_force_small():
    for n in range(1, 9):
        for t in enumerate_rooted_trees(n):
            assert achievable_points(t) == brute_force_points(t)


def test_witness_is_least_labeling():
    t = path_tree(4)
    c = configuration(t)
    for vec, (count, witness) in achievable_witnesses(t).items():
        assert c.classes[vec][0] == witness and len(c.classes[vec]) == count


def test_fixed_labels():
    t = parse_tree("5; 1 1 2 2")
    pinned = achievable_points(t, fixed={1: 1, 3: 0, 4: 0, 5: 0})
    brute = {}
    for idx in range(32):
        lab = labeling_from_index(idx, 5)
        if lab[0] == 1 and lab[2] == lab[3] == lab[4] == 0:
            v = transition_vector(t, lab)
            brute[v] = brute.get(v, 0) + 1
    assert pinned == brute


@given(st.integers(1, 9), st.data())
@settings(max_examples=30, deadline=None)
def test_swap_symmetry(n, data):
    parents = tuple(data.draw(st.integers(1, j - 1)) for j in range(2, n + 1))
    t = parse_tree(f"{n}; " + " ".join(map(str, parents)))
    pts = achievable_points(t)
    assert {v.swapped(): c for v, c in pts.items()} == pts


def test_nonsmoothness_identity_binary():
    for n in (3, 5, 7, 9, 11):
        assert all(nonsmoothness_identity(t) for t in enumerate_binary_trees(n))


def test_nonsmoothness_identity_needs_binary():
    with pytest.raises(TreeError):
        nonsmoothness_identity(star_tree(4))


def test_dedup_json_lists_representatives():
    import json
    doc = json.loads(configuration(path_tree(3)).dedup_json())
    shared = [c for c in doc["columns"] if c["multiplicity"] == 2]
    assert len(doc["columns"]) == 7 and shared[0]["labelings"] == ["010", "101"]


# ---------------------------------------------------------------------------
# Integer lattice utilities


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    out = Fraction(1)
    for i in range(len(m)):
        piv = next((r for r in range(i, len(m)) if m[r][i]), None)
        if piv is None:
            return 0
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            out = -out
        out *= m[i][i]
        for r in range(i + 1, len(m)):
            f = m[r][i] / m[i][i]
            m[r] = [a - f * b for a, b in zip(m[r], m[i])]
    return int(out)


def saturated(vectors):
    """A rank-r lattice is saturated iff its r x r minors have gcd 1."""
    r, d = len(vectors), len(vectors[0])
    g = 0
    for cols in combinations(range(d), r):
        g = gcd(g, _det([[v[c] for c in cols] for v in vectors]))
        if g == 1:
            return True
    return False


def test_lattice_index():
    assert lattice_index([[2, 0], [0, 3]]) == 6
    assert lattice_index([[1, 1], [1, -1]]) == 2


def test_kernel_of_path3():
    m = configuration(path_tree(3)).matrix.tolist()
    k = integer_kernel(m)
    assert rank(m) == 4 and len(k) == 4
    for v in k:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in m)
    assert saturated(k)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=5, max_size=5), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_kernel_properties(rows):
    k = integer_kernel(rows)
    assert len(k) == 5 - rank(rows)
    for v in k:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in rows)
    if k:
        assert rank(k) == len(k) and saturated(k)


def test_hermite_form():
    h, u, piv = hermite_rows([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    assert np.array(h).tolist() == (np.array(u) @ np.array([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])).tolist()
    assert piv == [0, 1, 2]
    assert abs(round(np.linalg.det(np.array(u, dtype=float)))) == 1
