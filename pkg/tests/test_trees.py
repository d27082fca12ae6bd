import pytest
from hypothesis import given, strategies as st

from phylotoric.trees import (Tree, TreeError, enumerate_binary_trees, enumerate_level_sequences,
                              enumerate_rooted_trees, enumerate_trees, from_level_sequence,
                              is_completely_odd, parse_tree, path_tree, serialize_tree, star_tree)

ROOTED_COUNTS = [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]
BINARY_COUNTS = {1: 1, 3: 1, 5: 1, 7: 2, 9: 3, 11: 6, 13: 11, 15: 23, 17: 46}


def random_tree(data, n):
    return Tree(n, tuple(data.draw(st.integers(1, j - 1)) for j in range(2, n + 1)))


def test_parse_serialize_examples():
    t = parse_tree("3; 1 2")
    assert t.is_path and serialize_tree(t) == "3; 1 2"
    assert serialize_tree(parse_tree("0 1 1")) == "3; 1 1"
    assert str(parse_tree("1;")) == "1;"
    assert parse_tree("5; 1 1 2 2").is_binary


@pytest.mark.parametrize("text", ["", "3; 1", "3; 1 x", "3; 2 1", "0 2", "1 2"])
def test_parse_rejects_bad_input(text):
    with pytest.raises(TreeError):
        parse_tree(text)


def test_parents_must_precede_children():
    with pytest.raises(TreeError):
        Tree(3, (1, 3))


@given(st.data(), st.integers(1, 14))
def test_round_trip(data, n):
    t = random_tree(data, n)
    assert parse_tree(str(t)) == t


@given(st.data(), st.integers(1, 12))
def test_canonical_form_is_isomorphism_invariant(data, n):
    t = random_tree(data, n)
    c = t.canonical()
    assert c.canonical() == c
    assert from_level_sequence(c.level_sequence) == c
    assert sorted(len(ch) for ch in t.children[1:]) == sorted(len(ch) for ch in c.children[1:])
    assert sorted(t.depths[1:]) == sorted(c.depths[1:])


def test_rooted_counts():
    assert [sum(1 for _ in enumerate_rooted_trees(n)) for n in range(1, 11)] == ROOTED_COUNTS


def test_enumerated_trees_are_pairwise_non_isomorphic():
    for n in range(1, 9):
        trees = list(enumerate_rooted_trees(n))
        assert len({t.canonical() for t in trees}) == len(trees)
        assert all(t.canonical() == t for t in trees)


def test_level_sequences_start_with_the_path():
    seqs = list(enumerate_level_sequences(4))
    assert seqs[0] == (0, 1, 2, 3) and seqs[-1] == (0, 1, 1, 1)


def test_binary_counts():
    for n, count in BINARY_COUNTS.items():
        trees = list(enumerate_binary_trees(n))
        assert len(trees) == count
        assert all(t.is_binary for t in trees)
        assert len({t.canonical() for t in trees}) == count


def test_binary_needs_odd_n():
    with pytest.raises(TreeError):
        list(enumerate_binary_trees(4))


def test_families():
    assert [str(t) for t in enumerate_trees(4, "path")] == ["4; 1 2 3"]
    assert sum(1 for _ in enumerate_trees(5, "all")) == 9
    assert sum(1 for _ in enumerate_trees(2, "all")) == 1
    with pytest.raises(TreeError):
        list(enumerate_trees(4, "ternary"))


def test_shapes():
    assert path_tree(4).is_path and not star_tree(4).is_path
    assert star_tree(5).leaves == (2, 3, 4, 5)
    assert path_tree(4).postorder() == [4, 3, 2, 1]


def test_completely_odd():
    assert is_completely_odd(parse_tree("3; 1 1"))
    assert not is_completely_odd(parse_tree("5; 1 1 2 2"))
    odd9 = [t for t in enumerate_binary_trees(9) if is_completely_odd(t)]
    assert len(odd9) == 1
