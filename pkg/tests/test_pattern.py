import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selinv.errors import InvalidInputError
from selinv.pattern import (FactorGraphTopology, PrimaryOrder, SparsityPattern,
                            SymmetricSparseMatrix, fill_in_count, pattern_from_graph,
                            random_order, spanning_tree_order, symbolic_fill_in)


def brute_closure(n, pairs):
    """Eliminate a dense boolean graph vertex by vertex."""
    adj = np.zeros((n + 1, n + 1), dtype=bool)
    for i, j in pairs:
        adj[i, j] = adj[j, i] = True
    for k in range(1, n + 1):
        later = [v for v in range(k + 1, n + 1) if adj[k, v]]
        for a, b in itertools.combinations(later, 2):
            adj[a, b] = adj[b, a] = True
    return {(i, j) for i in range(1, n + 1) for j in range(1, i) if adj[i, j]}


@st.composite
def patterns(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    all_pairs = [(i, j) for i in range(2, n + 1) for j in range(1, i)]
    chosen = draw(st.lists(st.sampled_from(all_pairs), unique=True) if all_pairs else st.just([]))
    return SparsityPattern(n, chosen)


def test_pattern_normalizes_and_adds_diagonal():
    p = SparsityPattern(3, [(1, 3)])
    assert (3, 1) in p and (1, 3) in p
    assert len(p) == 4
    assert p.off_diagonal == {(3, 1)}
    assert p.complement == {(2, 1), (3, 2)}


def test_pattern_rejects_out_of_range():
    with pytest.raises(InvalidInputError):
        SparsityPattern(3, [(4, 1)])
    with pytest.raises(InvalidInputError):
        SparsityPattern(0)


def test_pattern_text_roundtrip():
    p = SparsityPattern(5, [(5, 1), (4, 2), (3, 2)])
    assert SparsityPattern.from_text(p.to_text()) == p


def test_row_and_column():
    p = SparsityPattern(4, [(4, 1), (4, 3), (2, 1)])
    assert p.row(4) == [1, 3]
    assert p.column(1) == [2, 4]


@given(patterns())
@settings(max_examples=200, deadline=None)
def test_closure_matches_elimination_game(p):
    closed = symbolic_fill_in(p)
    assert closed.off_diagonal == brute_closure(p.n, p.off_diagonal)
    assert closed.is_closed()
    assert p.entries <= closed.entries


@given(patterns())
@settings(max_examples=100, deadline=None)
def test_closure_idempotent(p):
    closed = symbolic_fill_in(p)
    assert symbolic_fill_in(closed) == closed
    assert fill_in_count(closed) == 0


def test_four_corners_example():
    # (3,1) and (4,1) force (4,3)
    p = SparsityPattern(4, [(3, 1), (4, 1)])
    assert not p.is_closed()
    assert symbolic_fill_in(p).off_diagonal == {(3, 1), (4, 1), (4, 3)}
    assert fill_in_count(p) == 1


def test_star_center_first_fills_completely():
    n = 6
    star = FactorGraphTopology(n, [(1, v) for v in range(2, n + 1)])
    center_first = pattern_from_graph(star, PrimaryOrder.identity(n))
    assert fill_in_count(center_first) == (n - 1) * (n - 2) // 2
    center_last = pattern_from_graph(star, PrimaryOrder.from_sequence(range(n, 0, -1)))
    assert fill_in_count(center_last) == 0


def test_order_roundtrip():
    o = PrimaryOrder.from_sequence([3, 1, 2])
    assert o.position(3) == 1 and o.label(2) == 1
    assert o.sequence() == [3, 1, 2]
    assert PrimaryOrder.from_sequence(o.inverse().sequence()).inverse() == o
    with pytest.raises(InvalidInputError):
        PrimaryOrder((1, 1, 2))


def test_random_order_reproducible():
    assert random_order(10, 7) == random_order(10, 7)
    assert sorted(random_order(10, 7).sequence()) == list(range(1, 11))


@given(st.integers(2, 25), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_spanning_tree_order_no_fill_on_trees(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(1, k)), k) for k in range(2, n + 1)]
    tree = FactorGraphTopology(n, edges)
    assert tree.is_tree()
    order = spanning_tree_order(tree)
    assert fill_in_count(pattern_from_graph(tree, order)) == 0


def test_spanning_tree_order_handles_forest():
    forest = FactorGraphTopology(5, [(1, 2), (4, 5), (3,)])
    order = spanning_tree_order(forest)
    assert sorted(order.sequence()) == [1, 2, 3, 4, 5]
    assert fill_in_count(pattern_from_graph(forest, order)) == 0


def test_graph_validation():
    with pytest.raises(InvalidInputError):
        FactorGraphTopology(3, [(1, 4)])
    with pytest.raises(InvalidInputError):
        FactorGraphTopology(3, [()])


def test_pattern_from_graph_uses_positions():
    g = FactorGraphTopology(3, [(1, 3)])
    p = pattern_from_graph(g, PrimaryOrder.from_sequence([3, 2, 1]))
    # label 3 at position 1, label 1 at position 3
    assert p.off_diagonal == {(3, 1)}


def test_symmetric_matrix_dense_roundtrip(rng):
    a = rng.normal(size=(5, 5))
    a = a + a.T
    a[np.abs(a) < 0.5] = 0.0
    m = SymmetricSparseMatrix.from_dense(a)
    np.testing.assert_array_equal(m.to_dense(), a)
    assert m[(1, 2)] == m[(2, 1)]


def test_symmetric_matrix_permuted(rng):
    a = rng.normal(size=(4, 4))
    a = a + a.T
    m = SymmetricSparseMatrix.from_dense(a)
    order = PrimaryOrder.from_sequence([2, 4, 1, 3])
    p = np.array(order.sequence()) - 1
    np.testing.assert_array_equal(m.permuted(order).to_dense(), a[np.ix_(p, p)])


def test_symmetric_matrix_values_must_match_pattern():
    p = SparsityPattern(2, [(2, 1)])
    with pytest.raises(InvalidInputError):
        SymmetricSparseMatrix(p, {(1, 1): 1.0, (2, 2): 1.0})
