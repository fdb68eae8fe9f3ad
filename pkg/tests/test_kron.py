import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selinv import kron
from selinv.errors import InvalidInputError
from selinv.generators import random_closed_pattern, random_spd, random_unit_lower
from selinv.pattern import SparsityPattern
from selinv.solver import ldl_factorize, selected_inverse
from selinv.verify import PRINTED_E3, PRINTED_D3


def test_vec_stacks_columns():
    a = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(kron.vec(a), [1, 3, 2, 4])
    np.testing.assert_array_equal(kron.unvec(kron.vec(a), 2), a)


def test_basic_order_sequence():
    assert kron.basic_triangular_order(3).sequence == ((1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3))
    assert kron.basic_triangular_order(4).m == 10


def test_secondary_order_rejects_bad_sequence():
    with pytest.raises(InvalidInputError):
        kron.SecondaryOrder(2, ((1, 1), (2, 1)))


def test_elimination_duplication_n3_reference():
    order = kron.basic_triangular_order(3)
    np.testing.assert_array_equal(kron.elimination_matrix(order), PRINTED_E3)
    np.testing.assert_array_equal(kron.duplication_matrix(order), PRINTED_D3)


def test_oracle_size_guard():
    with pytest.raises(InvalidInputError):
        kron.elimination_matrix(kron.basic_triangular_order(kron.MAX_ORACLE_N + 1))


def test_ultimate_order_puts_outside_first():
    p = SparsityPattern(3, [(3, 1)])
    ult = kron.ultimate_triangular_order(3, p)
    assert ult.sequence[:2] == ((2, 1), (3, 2))
    assert set(ult.sequence[2:]) == p.entries
    # stable: inside pairs keep basic relative order
    assert ult.sequence[2:] == ((1, 1), (2, 2), (3, 1), (3, 3))


def test_ultimate_order_requires_closed_pattern():
    with pytest.raises(InvalidInputError):
        kron.ultimate_triangular_order(4, SparsityPattern(4, [(3, 1), (4, 1)]))


@given(st.integers(1, 7), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_ultimate_equals_swap_fixed_point(n, seed):
    rng = np.random.default_rng(seed)
    p = random_closed_pattern(n, rng)
    assert kron.swap_to_fixed_point(kron.basic_triangular_order(n), p) == \
        kron.ultimate_triangular_order(n, p)


@given(st.integers(1, 6), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_entry_formulas_match_dense(n, seed):
    rng = np.random.default_rng(seed)
    p = random_closed_pattern(n, rng)
    lmat = random_unit_lower(p, rng)
    order = kron.basic_triangular_order(n)
    c, g = kron.build_C(lmat, order), kron.build_G(lmat, order)
    for r, (i, j) in enumerate(order.sequence):
        for col, (k, l) in enumerate(order.sequence):
            assert c[r, col] == kron.entry_C(i, j, k, l, lmat)
            assert g[r, col] == kron.entry_G(i, j, k, l, lmat)


def test_c_and_g_have_unit_diagonal(rng):
    p = random_closed_pattern(5, rng)
    lmat = random_unit_lower(p, rng)
    order = kron.basic_triangular_order(5)
    np.testing.assert_array_equal(np.diag(kron.build_C(lmat, order)), 1.0)
    np.testing.assert_array_equal(np.diag(kron.build_G(lmat, order)), 1.0)


def test_secondary_systems_hold_at_solution(rng):
    """``G v = h`` and ``C y = d`` hold for the full vectors under the basic order."""
    n = 5
    p = random_closed_pattern(n, rng, density=0.5)
    a = random_spd(p, rng)
    f = ldl_factorize(a)
    order = kron.basic_triangular_order(n)
    v = kron.build_v(f, order)
    np.testing.assert_allclose(kron.build_G(f, order) @ v, kron.build_h(a, order), atol=1e-12)
    y_full = kron.elimination_matrix(order) @ kron.vec(np.linalg.inv(a.to_dense()))
    np.testing.assert_allclose(kron.build_C(f, order) @ y_full, kron.build_d(f, order),
                               atol=1e-12)
    y = selected_inverse(f)
    idx = order.index()
    for pair in f.pattern.entries:
        assert y[pair] == pytest.approx(y_full[idx[pair]], rel=1e-10, abs=1e-14)


def test_build_d_rejects_nonpositive():
    with pytest.raises(Exception):
        kron.build_d(np.array([1.0, 0.0]), kron.basic_triangular_order(2))


def test_split_blocks_checks_partition(rng):
    p = random_closed_pattern(4, rng, density=0.3)
    basic = kron.basic_triangular_order(4)
    mat = np.eye(basic.m)
    if p.complement:
        with pytest.raises(InvalidInputError):
            kron.split_blocks(mat, basic, p)
    ult = kron.ultimate_triangular_order(4, p)
    blocks = kron.split_blocks(mat, ult, p)
    assert blocks[0].shape == (len(p.complement),) * 2


def test_write_csv(tmp_path):
    order = kron.basic_triangular_order(2)
    kron.write_csv(np.eye(3), tmp_path / "m.csv", order.labels())
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert len(lines) == 4
