from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raagcomm.trees import (Diam4Code, Tree, TreeError, big_d, canonical_form, diam4_code, diameter,
                            is_isomorphic, parse_tree_spec, path_tree, read_adjacency_file, reduce,
                            tkk_tree, tree_from_code)


def test_path_spec_counts():
    t = parse_tree_spec("path:5")
    assert (t.vertex_count, len(t.edges), len(t.leaves())) == (6, 5, 2)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_tkk_counts(k):
    t = parse_tree_spec(f"tkk:{k}")
    assert t.vertex_count == 2 * k + 4
    assert len(t.leaves()) == 2 * k + 1
    assert diameter(t) == 4


def test_t4_code_matches_tkk1():
    t = parse_tree_spec("t4:(1,1),(2,1);0")
    # centre, two pivots and 1 + 2 leaves
    assert t.vertex_count == 6 == tkk_tree(1).vertex_count
    assert is_isomorphic(t, tkk_tree(1))


@pytest.mark.parametrize("text", ["path", "path:x", "tkk:0", "t4:(2,1),(1,1);0", "t4:(1,1);0",
                                  "adj:0 1 2", "adj:0 1 1 2 2 0", "adj:0 0", "blob:3", "adj:0 -1"])
def test_bad_specs_rejected(text):
    with pytest.raises(TreeError):
        parse_tree_spec(text)


def test_tree_validation():
    with pytest.raises(TreeError):
        Tree(3, ((0, 1),))
    with pytest.raises(TreeError):
        Tree(4, ((0, 1), (1, 0), (2, 3)))


def test_diameter_examples():
    assert diameter(path_tree(5)) == 5
    assert diameter(tkk_tree(2)) == 4
    assert diameter(Tree(1, ())) == 0


@pytest.mark.parametrize("m", [3, 4, 7, 10])
def test_reduce_path(m):
    r = reduce(path_tree(m))
    assert is_isomorphic(r.tree, path_tree(m - 2))
    assert all(r.to_new[r.to_old[i]] == i for i in range(r.tree.vertex_count))


def test_reduce_tkk_is_p2():
    r = reduce(tkk_tree(3))
    assert is_isomorphic(r.tree, path_tree(2))
    assert sorted(r.tree.names) == ["b", "c", "d"]


def test_reduce_p2_single_vertex():
    assert reduce(path_tree(2)).tree.vertex_count == 1


def test_big_d_values():
    p = path_tree(7)
    assert all(big_d(p, v) == 1 for v in range(1, 7))
    k = 3
    t = tkk_tree(k)
    by_name = {t.name(v): v for v in range(t.vertex_count)}
    assert big_d(t, by_name["c"]) == 1
    assert {big_d(t, by_name["b"]), big_d(t, by_name["d"])} == {k, k + 1}
    with pytest.raises(TreeError):
        big_d(p, 0)


def test_big_d_diam4_center_and_pivots():
    t = parse_tree_spec("t4:(1,1),(2,1),(4,1);0")
    centre = next(v for v in range(t.vertex_count) if t.name(v) == "c")
    assert big_d(t, centre) == 2
    pivots = sorted(big_d(t, w) for w in t.adjacency[centre])
    assert pivots == [1, 2, 4]


def test_diam4_code_examples():
    assert diam4_code(tkk_tree(1)) == Diam4Code(((1, 1), (2, 1)), 0)
    star_of_stars = tree_from_code(Diam4Code(((2, 3),), 0))
    assert diam4_code(star_of_stars) == Diam4Code(((2, 3),), 0)
    assert diam4_code(path_tree(4)) == Diam4Code(((1, 2),), 0)
    assert diam4_code(parse_tree_spec("t4:(1,2),(3,1);2")).format() == "t4:(1,2),(3,1);2"


def test_adjacency_file(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("# a spider\n0 1\n1 2  # leg\n0 3\n\n")
    t = read_adjacency_file(f)
    assert is_isomorphic(t, path_tree(3))


@st.composite
def random_trees(draw):
    n = draw(st.integers(1, 12))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    return Tree(n, tuple((p, i) for i, p in enumerate(parents, 1)))


@settings(max_examples=60, deadline=None)
@given(random_trees(), st.randoms(use_true_random=False))
def test_canonical_form_relabel_invariant(t, rnd):
    perm = list(range(t.vertex_count))
    rnd.shuffle(perm)
    assert canonical_form(t.relabel(perm)) == canonical_form(t)
    assert diameter(t.relabel(perm)) == diameter(t)


def test_non_isomorphic_same_size():
    assert not is_isomorphic(path_tree(3), parse_tree_spec("adj:0 1 0 2 0 3"))
